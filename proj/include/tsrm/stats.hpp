#pragma once
// Distribution tests and resampling.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "tsrm/errors.hpp"
#include "tsrm/rng.hpp"

namespace tsrm {

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0, sign = 1;
  for (int k = 1; k < 100; ++k) {
    const double t = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * t;
    sign = -sign;
    if (t < 1e-18) break;
  }
  return std::clamp(2 * sum, 0.0, 1.0);
}

/// Stephens' finite-n correction of the statistic before the asymptotic tail.
inline double ks_p_value(double d, double n_eff) {
  const double rn = std::sqrt(n_eff);
  return kolmogorov_q((rn + 0.12 + 0.11 / rn) * d);
}

inline KsResult ks_against_cdf(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw domain_error("ks_against_cdf: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  // tied values form one jump of the empirical cdf
  for (std::size_t i = 0, j = 0; i < sample.size(); i = j) {
    while (j < sample.size() && sample[j] == sample[i]) ++j;
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(j) / n - f});
  }
  return {d, ks_p_value(d, n)};
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw domain_error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

/// Two-sample KS of the sample against its own negation.
inline double symmetry_check(const std::vector<double>& x) {
  if (x.size() < 1000) throw domain_error("symmetry_check: need at least 1000 samples");
  std::vector<double> neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
  return ks_two_sample(x, neg).p_value;
}

/// Sample quantile, linear interpolation between order statistics (type 7).
inline double quantile_sorted(const std::vector<double>& s, double q) {
  if (s.empty()) throw domain_error("quantile: empty sample");
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

inline double quantile(std::vector<double> s, double q) {
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, q);
}

struct Interval {
  double lo, hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Percentile bootstrap interval for stat(sample).
template <class Stat>
Interval bootstrap_ci(const std::vector<double>& sample, Stat&& stat, int reps, double level, StreamSpec spec) {
  if (sample.empty()) throw domain_error("bootstrap_ci: empty sample");
  RandomStream s(spec);
  std::vector<double> stats, buf(sample.size());
  stats.reserve(static_cast<std::size_t>(reps));
  const auto n = static_cast<double>(sample.size());
  for (int r = 0; r < reps; ++r) {
    for (auto& v : buf) v = sample[static_cast<std::size_t>(s.next_uniform() * n)];
    stats.push_back(stat(buf));
  }
  std::sort(stats.begin(), stats.end());
  const double a = (1 - level) / 2;
  return {quantile_sorted(stats, a), quantile_sorted(stats, 1 - a)};
}

/// Bootstrap interval for quantile_q(a) - quantile_q(b), independent samples.
inline Interval bootstrap_quantile_difference(const std::vector<double>& a, const std::vector<double>& b, double q,
                                              int reps, double level, StreamSpec spec) {
  RandomStream s(spec);
  std::vector<double> diffs, ba(a.size()), bb(b.size());
  diffs.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    for (auto& v : ba) v = a[static_cast<std::size_t>(s.next_uniform() * static_cast<double>(a.size()))];
    for (auto& v : bb) v = b[static_cast<std::size_t>(s.next_uniform() * static_cast<double>(b.size()))];
    std::sort(ba.begin(), ba.end());
    std::sort(bb.begin(), bb.end());
    diffs.push_back(quantile_sorted(ba, q) - quantile_sorted(bb, q));
  }
  std::sort(diffs.begin(), diffs.end());
  const double al = (1 - level) / 2;
  return {quantile_sorted(diffs, al), quantile_sorted(diffs, 1 - al)};
}

inline double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace tsrm
