#pragma once
// Continuum samplers for area functionals of Brownian paths.
//
// All samplers take their randomness from a RandomStream and are pure
// functions of (arguments, cfg, stream position). State structs are plain
// values so the splitting engine can copy particles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "tsrm/area_laws.hpp"
#include "tsrm/errors.hpp"
#include "tsrm/rng.hpp"

namespace tsrm {

struct SdeConfig {
  double dt = 1e-4;
  bool bridge_correction = true;
  std::int64_t max_steps = std::int64_t{1} << 28;
  // Absorption runs use dt below this height and dt * (B / adapt_height)^2
  // above it; 0 keeps the step fixed.
  double adapt_height = 0.1;

  void validate() const {
    if (!(dt > 0)) throw domain_error("samplers.dt must be positive");
    if (max_steps <= 0) throw domain_error("samplers.max_steps must be positive");
    if (!(adapt_height >= 0)) throw domain_error("samplers.adapt_height must be non-negative");
  }
};

struct SampleResult {
  double value = 0;
  bool censored = false;
  double duration = 0;  // simulated time, where the sampler tracks it
};

namespace detail {

// Expected integral of |X| over a Brownian bridge from b0 to b1 of length dt,
// by 6-point Gauss-Legendre in time. Used only near zero; elsewhere the
// trapezoid is already the conditional mean.
inline double bridge_abs_area(double b0, double b1, double dt) {
  static constexpr std::array<double, 6> node = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                                                 0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
  static constexpr std::array<double, 6> wt = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                                               0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
  double acc = 0;
  for (int i = 0; i < 6; ++i) {
    const double u = 0.5 * (node[i] + 1);
    const double m = b0 + (b1 - b0) * u;
    const double sd = std::sqrt(dt * u * (1 - u));
    const double r = m / sd;
    const double e = sd * std::sqrt(2 / std::numbers::pi) * std::exp(-0.5 * r * r) + m * std::erf(r / std::numbers::sqrt2);
    acc += wt[i] * e;
  }
  return 0.5 * dt * acc;
}

inline double abs_area_step(double b0, double b1, double dt, bool bridge) {
  const double sq = std::sqrt(dt);
  if (bridge && (std::fabs(b0) < 4 * sq || std::fabs(b1) < 4 * sq)) return bridge_abs_area(b0, b1, dt);
  if ((b0 >= 0) == (b1 >= 0)) return 0.5 * dt * std::fabs(b0 + b1);
  // piecewise-linear interpolation through the sign change
  return 0.5 * dt * (b0 * b0 + b1 * b1) / (std::fabs(b0) + std::fabs(b1));
}

}  // namespace detail

/// Integral of |B| over [0, x_end], B a standard Brownian motion from 0.
inline double sample_reflected_area(double x_end, const SdeConfig& cfg, RandomStream& s) {
  if (!(x_end > 0)) throw domain_error("sample_reflected_area: x_end must be positive");
  const auto n = static_cast<std::int64_t>(std::ceil(x_end / cfg.dt - 1e-9));
  const double dt = x_end / static_cast<double>(n), sq = std::sqrt(dt);
  GaussianSource gauss(s);
  double b = 0, area = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    const double b1 = b + sq * gauss();
    area += detail::abs_area_step(b, b1, dt, cfg.bridge_correction);
    b = b1;
  }
  return area;
}

/// Area under B from start_height until its first hit of 0. Between grid
/// points the path is a Brownian bridge: absorption inside a step is detected
/// with the exact crossing probability and the trapezoid is the bridge's mean
/// area, so the step can grow with the height without biasing the law.
inline SampleResult sample_absorption_area(double start_height, const SdeConfig& cfg, RandomStream& s) {
  if (!(start_height > 0)) throw domain_error("sample_absorption_area: start_height must be positive");
  // scale-free: simulate from height 1 and rescale by h^3
  const double h3 = start_height * start_height * start_height;
  const double c = cfg.adapt_height;
  GaussianSource gauss(s);
  const double h2 = start_height * start_height;
  double b = 1, area = 0, t = 0;
  for (std::int64_t k = 0; k < cfg.max_steps; ++k) {
    const double r = c > 0 ? std::max(b / c, 1.0) : 1.0;
    const double dt = cfg.dt * r * r;
    const double b1 = b + std::sqrt(dt) * gauss();
    if (b1 <= 0) {
      const double f = b / (b - b1);
      area += 0.5 * b * f * dt;
      return {area * h3, false, (t + f * dt) * h2};
    }
    const double q = 2 * b * b1 / dt;
    if (cfg.bridge_correction && q < 40 && s.next_uniform() < std::exp(-q)) {
      area += 0.25 * dt * (b + b1);
      return {area * h3, false, (t + 0.5 * dt) * h2};
    }
    area += 0.5 * dt * (b + b1);
    t += dt;
    b = b1;
  }
  return {area * h3, true, t * h2};
}

/// Exact draw of U from its closed-form law by inverse transform.
inline double sample_absorption_area_exact(RandomStream& s) {
  return absorption_area_quantile(s.next_uniform_open0() * (1 - 0x1.0p-54));
}

// ---------------------------------------------------------------------------
// sigma_x = sqrt2 * (int_0^x |B| + int_x^{tau'} |B|), tau' the first zero of B
// after x. The gap between the dual line from level x and the stationary
// profile is sqrt2 |B| run backwards from x, then absorbed once past 0.

struct SigmaState {
  double b = 0;     // B at the current x
  double area = 0;  // int |B| so far
  double x = 0;
};

inline void advance_sigma(SigmaState& st, double x_to, const SdeConfig& cfg, RandomStream& s) {
  const auto n = static_cast<std::int64_t>(std::ceil((x_to - st.x) / cfg.dt - 1e-9));
  if (n <= 0) return;
  const double dt = (x_to - st.x) / static_cast<double>(n), sq = std::sqrt(dt);
  GaussianSource gauss(s);
  for (std::int64_t k = 0; k < n; ++k) {
    const double b1 = st.b + sq * gauss();
    st.area += detail::abs_area_step(st.b, b1, dt, cfg.bridge_correction);
    st.b = b1;
  }
  st.x = x_to;
}

/// Continue |B| from height b until absorption at 0 (Euler, bridge-corrected).
inline SampleResult absorbed_tail_area(double b, const SdeConfig& cfg, RandomStream& s) {
  const double h = std::fabs(b);
  if (h == 0) return {0, false};
  return sample_absorption_area(h, cfg, s);
}

struct SigmaOptions {
  bool exact_tail = false;  // draw the post-x area from its closed-form law
};

inline SampleResult sample_sigma(double x, const SdeConfig& cfg, RandomStream& s, SigmaOptions opt = {}) {
  if (!(x > 0)) throw domain_error("sample_sigma: x must be positive");
  SigmaState st;
  advance_sigma(st, x, cfg, s);
  const double h = std::fabs(st.b);
  SampleResult tail;
  if (opt.exact_tail) tail = {h * h * h * sample_absorption_area_exact(s), false};
  else tail = absorbed_tail_area(h, cfg, s);
  return {std::numbers::sqrt2 * (st.area + tail.value), tail.censored};
}

/// P(sigma_x <= budget | state at x), integrating out the absorbed tail.
inline double sigma_tail_probability(const SigmaState& st, double budget) {
  const double rem = budget / std::numbers::sqrt2 - st.area;
  if (rem <= 0) return 0.0;
  const double h = std::fabs(st.b);
  if (h == 0) return 1.0;
  return absorption_area_cdf(rem / (h * h * h));
}

// ---------------------------------------------------------------------------
// Stationary height events. Gamma_0 is a standard BM; Y its first passage to
// -h. The dual line from Y sits Gamma_0 + G above the profile with
// G(y) = Z(y) - min_{[y,Y]} Z, Z = W - Gamma_0, W an independent BM; left of 0
// the gap G(0) diffuses with variance 2 until it closes. So
//   sigma_Y = int_0^Y G + G(0)^3 U / 2.
// The suffix-min function y -> min_{[y,s]} Z is kept as a monotone stack of
// (value, length) blocks, so int_0^s (Z - min_{[y,s]} Z) dy is available at
// every s; it only grows with s and equals int_0^Y G at s = Y.

struct HeightState {
  double y = 0;
  double gamma = 0;  // Gamma_0(y)
  double z = 0;      // Z(y)
  double z_int = 0;  // int_0^y Z
  double min_int = 0;
  std::vector<std::array<double, 2>> stack;  // (value, length), values increasing upwards
  bool hit = false;

  double area_lower_bound() const { return z_int - min_int; }
  double gap_at_origin() const { return stack.empty() ? 0.0 : std::max(0.0, -stack.front()[0]); }
};

inline HeightState height_initial_state() {
  HeightState st;
  st.stack.push_back({0.0, 0.0});
  return st;
}

enum class HeightStep { reached, killed, censored };

/// Run until Gamma_0 first drops to `level` (reached), the area lower bound
/// reaches kill_area (killed), or the step cap (censored).
inline HeightStep advance_height(HeightState& st, double level, double kill_area, const SdeConfig& cfg,
                                 RandomStream& s, std::int64_t& steps) {
  const double dt = cfg.dt, sq = std::sqrt(dt);
  GaussianSource gauss(s);
  if (st.gamma <= level) return HeightStep::reached;
  while (steps < cfg.max_steps) {
    ++steps;
    const double g1 = st.gamma + sq * gauss();
    const double z1 = st.z + sq * gauss() - (g1 - st.gamma);
    // right-endpoint sums here and in the min blocks, so the difference stays >= 0
    st.z_int += dt * z1;
    double len = dt;
    while (!st.stack.empty() && st.stack.back()[0] >= z1) {
      st.min_int -= st.stack.back()[0] * st.stack.back()[1];
      len += st.stack.back()[1];
      st.stack.pop_back();
    }
    st.stack.push_back({z1, len});
    st.min_int += z1 * len;
    bool crossed = g1 <= level;
    if (!crossed && cfg.bridge_correction) {
      const double q = 2 * (st.gamma - level) * (g1 - level) / dt;
      crossed = q < 40 && s.next_uniform() < std::exp(-q);
    }
    st.gamma = g1;
    st.z = z1;
    st.y += dt;
    if (crossed) {
      st.hit = true;
      return HeightStep::reached;
    }
    if (st.area_lower_bound() >= kill_area) return HeightStep::killed;
  }
  return HeightStep::censored;
}

struct HeightEventSample {
  double h_target = 0;
  double Y = 0;
  double sigma_Y = 0;
  bool censored = false;
};

/// Full sample of (Y, sigma_Y) without early stopping.
inline HeightEventSample sample_height_hit(double h, const SdeConfig& cfg, RandomStream& s) {
  if (!(h > 0)) throw domain_error("sample_height_hit: h must be positive");
  HeightState st = height_initial_state();
  std::int64_t steps = 0;
  const auto r = advance_height(st, -h, std::numeric_limits<double>::infinity(), cfg, s, steps);
  HeightEventSample out{h, st.y, 0, r == HeightStep::censored};
  if (out.censored) return out;
  const double g0 = st.gap_at_origin();
  out.sigma_Y = st.area_lower_bound() + 0.5 * g0 * g0 * g0 * sample_absorption_area_exact(s);
  return out;
}

/// P(sigma_Y < budget | state at Y), integrating out the left tail.
inline double height_tail_probability(const HeightState& st, double budget) {
  const double rem = budget - st.area_lower_bound();
  if (rem <= 0) return 0.0;
  const double g0 = st.gap_at_origin();
  if (g0 == 0) return 1.0;
  return absorption_area_cdf(2 * rem / (g0 * g0 * g0));
}

/// Flat initial condition: the area under the line through (0,h) is h^3 (U1+U2).
inline double sample_flat_height_area(double h, RandomStream& s) {
  if (!(h > 0)) throw domain_error("sample_flat_height_area: h must be positive");
  const double u1 = sample_absorption_area_exact(s), u2 = sample_absorption_area_exact(s);
  return h * h * h * (u1 + u2);
}

}  // namespace tsrm
