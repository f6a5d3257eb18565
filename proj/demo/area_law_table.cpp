// Print the absorption-area law next to a Monte Carlo histogram.

#include <cstdio>
#include <vector>

#include "tsrm/area_laws.hpp"
#include "tsrm/samplers.hpp"
#include "tsrm/stats.hpp"

int main() {
  using namespace tsrm;
  const int n = 4000;
  SdeConfig cfg;
  cfg.dt = 1e-4;
  std::vector<double> u;
  for (int i = 0; i < n; ++i) {
    RandomStream s({7, static_cast<std::uint64_t>(i)});
    const auto r = sample_absorption_area(1.0, cfg, s);
    if (!r.censored) u.push_back(r.value);
  }
  std::printf("%10s %12s %12s %12s\n", "a", "cdf", "empirical", "pdf");
  const AreaLawTable table(0.05, 100, 12);
  for (const auto& row : table.rows()) {
    double below = 0;
    for (double v : u) below += v <= row.a;
    std::printf("%10.4g %12.6f %12.6f %12.6f\n", row.a, row.cdf, below / static_cast<double>(u.size()), row.pdf);
  }
  const auto ks = ks_against_cdf(u, absorption_area_cdf);
  std::printf("KS D = %.4f (p = %.3f), kappa = %.10f\n", ks.statistic, ks.p_value, kappa());
}
