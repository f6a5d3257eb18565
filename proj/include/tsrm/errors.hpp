#pragma once

#include <stdexcept>
#include <string>

namespace tsrm {

/// Precondition violated (bad parity, out-of-range argument, ...).
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// A configured resource cap (window growth, step budget) was exhausted.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A Monte Carlo estimate could not be formed (all censored, empty level).
struct estimation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least-squares design was singular or under-determined.
struct fit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tsrm
