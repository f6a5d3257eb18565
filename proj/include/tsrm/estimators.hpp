#pragma once
// Monte Carlo orchestration: direct frequency estimates, fixed-effort
// multilevel splitting, tail regressions and the LIL band report.
//
// Every replica (or particle, per level) draws from its own stream derived
// from (seed, index), and all reductions run in index order, so results are
// bit-identical for any worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "tsrm/area_laws.hpp"
#include "tsrm/errors.hpp"
#include "tsrm/parallel.hpp"
#include "tsrm/rng.hpp"
#include "tsrm/samplers.hpp"

namespace tsrm {

enum class Method { direct, splitting };

inline const char* method_name(Method m) { return m == Method::direct ? "direct" : "splitting"; }

struct Estimate {
  double value = 0;
  double stderr_ = 0;
  std::int64_t n = 0;
  double ci_lo = 0, ci_hi = 0;
  Method method = Method::direct;
  double censored_fraction = 0;
  std::vector<double> level_probabilities;  // splitting only
};

enum class Outcome { hit, miss, censored };

/// Frequency of `hit` over n replicas; replica i uses stream (seed, substream(i, tag)).
/// Censored replicas count as misses in `value`, and widen ci_hi by their mass.
template <class Trial>
Estimate run_direct(Trial&& trial, std::int64_t n, std::uint64_t seed, unsigned threads = 1, std::uint64_t tag = 0) {
  if (n < 1) throw domain_error("run_direct: n must be positive");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    RandomStream s({seed, substream(i, tag)});
    out[i] = static_cast<std::uint8_t>(trial(s));
  });
  std::int64_t hits = 0, cens = 0;
  for (auto o : out) {
    hits += o == static_cast<std::uint8_t>(Outcome::hit);
    cens += o == static_cast<std::uint8_t>(Outcome::censored);
  }
  if (cens == n) throw estimation_error("run_direct: every replica was censored");
  Estimate e;
  e.n = n;
  e.method = Method::direct;
  e.value = static_cast<double>(hits) / static_cast<double>(n);
  e.stderr_ = std::sqrt(e.value * (1 - e.value) / static_cast<double>(n));
  e.censored_fraction = static_cast<double>(cens) / static_cast<double>(n);
  e.ci_lo = std::max(0.0, e.value - 1.96 * e.stderr_);
  e.ci_hi = std::min(1.0, e.value + 1.96 * e.stderr_ + e.censored_fraction);
  return e;
}

enum class Step { survive, die, censored };

template <class M>
concept SplittingModel = requires(const M& m, typename M::State& st, RandomStream& s, int level) {
  { m.levels() } -> std::convertible_to<int>;
  { m.init() } -> std::convertible_to<typename M::State>;
  { m.advance(st, level, s) } -> std::convertible_to<Step>;
  { m.final_weight(st) } -> std::convertible_to<double>;
};

/// Fixed-effort splitting: n particles attempt each level; survivors are
/// resampled multinomially back to n. The estimate is the product of level
/// frequencies times the mean final weight of the last survivors.
template <SplittingModel M>
Estimate run_splitting(const M& model, std::int64_t n, std::uint64_t seed, unsigned threads = 1) {
  if (n < 1) throw domain_error("run_splitting: n must be positive");
  const int levels = model.levels();
  if (levels < 1) throw domain_error("run_splitting: need at least one level");
  const auto N = static_cast<std::size_t>(n);
  std::vector<typename M::State> parts(N, model.init());
  std::vector<std::uint8_t> res(N);
  Estimate e;
  e.method = Method::splitting;
  e.n = n;
  double log_p = 0, rel_var = 0, widen = 1;
  std::int64_t cens_total = 0;
  for (int lv = 0; lv < levels; ++lv) {
    parallel_for(N, threads, [&](std::size_t i) {
      RandomStream s({seed, substream(substream(static_cast<std::uint64_t>(lv), i), 0x53504C54u)});
      res[i] = static_cast<std::uint8_t>(model.advance(parts[i], lv, s));
    });
    std::vector<std::size_t> alive;
    std::int64_t cens = 0;
    for (std::size_t i = 0; i < N; ++i) {
      if (res[i] == static_cast<std::uint8_t>(Step::survive)) alive.push_back(i);
      cens += res[i] == static_cast<std::uint8_t>(Step::censored);
    }
    cens_total += cens;
    if (alive.empty()) throw estimation_error("run_splitting: no survivors at level " + std::to_string(lv));
    const double p = static_cast<double>(alive.size()) / static_cast<double>(n);
    e.level_probabilities.push_back(p);
    log_p += std::log(p);
    rel_var += (1 - p) / (p * static_cast<double>(n));
    widen *= static_cast<double>(static_cast<std::int64_t>(alive.size()) + cens) / static_cast<double>(alive.size());
    if (lv + 1 < levels) {
      RandomStream rs({seed, substream(static_cast<std::uint64_t>(lv), 0x5E5A4D50u)});
      std::vector<typename M::State> next;
      next.reserve(N);
      for (std::size_t i = 0; i < N; ++i)
        next.push_back(parts[alive[static_cast<std::size_t>(rs.next_uniform() * static_cast<double>(alive.size()))]]);
      parts.swap(next);
    } else {
      std::vector<typename M::State> last;
      last.reserve(alive.size());
      for (auto i : alive) last.push_back(std::move(parts[i]));
      parts.swap(last);
    }
  }
  double wsum = 0, wsq = 0;
  for (const auto& st : parts) {
    const double w = model.final_weight(st);
    wsum += w;
    wsq += w * w;
  }
  const double m = static_cast<double>(parts.size());
  const double wmean = wsum / m;
  if (!(wmean > 0)) throw estimation_error("run_splitting: final weights are all zero");
  const double wvar = std::max(0.0, wsq / m - wmean * wmean);
  rel_var += wvar / (wmean * wmean * m);
  e.value = std::exp(log_p) * wmean;
  e.stderr_ = e.value * std::sqrt(rel_var);
  e.censored_fraction = static_cast<double>(cens_total) / (static_cast<double>(n) * levels);
  e.ci_lo = std::max(0.0, e.value - 1.96 * e.stderr_);
  e.ci_hi = std::min(1.0, (e.value + 1.96 * e.stderr_) * widen);
  return e;
}

// ---------------------------------------------------------------------------
// Splitting models for the continuum experiments.

/// P(int_0^1 |B| <= eps), levels at times (k+1)/m.
struct SmallBallSplitting {
  using State = SigmaState;
  double eps;
  int m = 8;
  SdeConfig cfg;

  int levels() const { return m; }
  State init() const { return {}; }
  Step advance(State& st, int lv, RandomStream& s) const {
    const double t1 = static_cast<double>(lv + 1) / m;
    // step in blocks so hopeless particles stop early
    const int blocks = 16;
    const double t0 = st.x;
    for (int b = 1; b <= blocks; ++b) {
      advance_sigma(st, t0 + (t1 - t0) * b / blocks, cfg, s);
      if (st.area > eps) return Step::die;
    }
    return Step::survive;
  }
  double final_weight(const State&) const { return 1.0; }
};

/// P(sigma_x <= budget) for the stationary process; levels are x-slices and
/// the absorbed tail beyond x is integrated out exactly.
struct SigmaTailSplitting {
  using State = SigmaState;
  double x;
  int m = 6;
  SdeConfig cfg;
  double budget = 1.0;

  int levels() const { return m; }
  State init() const { return {}; }
  Step advance(State& st, int lv, RandomStream& s) const {
    const double x1 = x * (lv + 1) / m;
    const int blocks = 16;
    const double x0 = st.x;
    for (int b = 1; b <= blocks; ++b) {
      advance_sigma(st, x0 + (x1 - x0) * b / blocks, cfg, s);
      if (std::numbers::sqrt2 * st.area > budget) return Step::die;
    }
    return Step::survive;
  }
  double final_weight(const State& st) const { return sigma_tail_probability(st, budget); }
};

/// P(sigma_Y < budget) with Y the first passage of Gamma_0 to -h; level k
/// asks Gamma_0 to reach -h (k+1)/m before the area lower bound exceeds budget.
struct HeightTailSplitting {
  struct State {
    HeightState hs = height_initial_state();
    std::int64_t steps = 0;
  };
  double h;
  int m = 5;
  SdeConfig cfg;
  double budget = 1.0;

  int levels() const { return m; }
  State init() const { return {}; }
  Step advance(State& st, int lv, RandomStream& s) const {
    switch (advance_height(st.hs, -h * (lv + 1) / m, budget, cfg, s, st.steps)) {
      case HeightStep::reached: return Step::survive;
      case HeightStep::killed: return Step::die;
      case HeightStep::censored: return Step::censored;
    }
    return Step::die;
  }
  double final_weight(const State& st) const { return height_tail_probability(st.hs, budget); }
};

// ---------------------------------------------------------------------------
// Tail regression: -log p = c0 + c1 ln a + slope a^power.

enum class TailModel { x_cubed, h_three_halves, h_cubed };

inline double tail_power(TailModel m) { return m == TailModel::h_three_halves ? 1.5 : 3.0; }

inline const char* tail_model_name(TailModel m) {
  switch (m) {
    case TailModel::x_cubed: return "x_cubed";
    case TailModel::h_three_halves: return "h_three_halves";
    case TailModel::h_cubed: return "h_cubed";
  }
  return "?";
}

struct TailPoint {
  double abscissa, p, stderr_;
};

struct TailFit {
  TailModel model = TailModel::x_cubed;
  double slope = 0, slope_lo = 0, slope_hi = 0;
  double intercept = 0, log_coefficient = 0;
  std::vector<TailPoint> points;
};

/// Weighted least squares with weights 1/var(-log p) (delta method); points
/// with zero stderr get unit weight. The slope interval uses the residual
/// scale and Student t with n-3 degrees of freedom.
inline TailFit fit_tail(const std::vector<TailPoint>& pts, TailModel model, bool log_term = true, double level = 0.95) {
  const int k = log_term ? 3 : 2;
  if (pts.size() < 3) throw fit_error("fit_tail: need at least 3 points");
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n), w(n);
  const double pw = tail_power(model);
  bool any_err = false;
  for (const auto& p : pts) any_err |= p.stderr_ > 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    if (!(p.p > 0 && p.p <= 1 && p.abscissa > 0)) throw fit_error("fit_tail: point outside the model domain");
    if (!std::isfinite(p.stderr_)) throw fit_error("fit_tail: non-finite stderr");
    const double sy = p.stderr_ / p.p;
    w(i) = (any_err && sy > 0) ? 1 / sy : 1.0;
    X(i, 0) = w(i);
    int c = 1;
    if (log_term) X(i, c++) = w(i) * std::log(p.abscissa);
    X(i, c) = w(i) * std::pow(p.abscissa, pw);
    y(i) = w(i) * -std::log(p.p);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) throw fit_error("fit_tail: singular design");
  const Eigen::VectorXd beta = qr.solve(y);
  TailFit f;
  f.model = model;
  f.points = pts;
  f.intercept = beta(0);
  f.log_coefficient = log_term ? beta(1) : 0;
  f.slope = beta(k - 1);
  const Eigen::MatrixXd cov = (X.transpose() * X).inverse();
  const double dof = static_cast<double>(n - k);
  double s2 = 0;
  if (dof > 0) s2 = (y - X * beta).squaredNorm() / dof;
  const double tq = dof > 0 ? boost::math::quantile(boost::math::students_t(dof), 0.5 + level / 2)
                            : std::numeric_limits<double>::infinity();
  const double se = std::sqrt(std::max(0.0, s2 * cov(k - 1, k - 1)));
  f.slope_lo = se == 0 ? f.slope : f.slope - tq * se;
  f.slope_hi = se == 0 ? f.slope : f.slope + tq * se;
  return f;
}

// ---------------------------------------------------------------------------
// LIL band: sup_{s<=t} X_s / (t^{2/3} (ln ln t)^{1/3}) at decade times.

struct LilSeries {
  std::vector<double> t;      // sample times, increasing
  std::vector<double> sup_x;  // running sup of X at those times
  std::vector<double> sup_abs_h;  // running sup of |H|
};

struct LilReport {
  double center = 0, band_lo = 0, band_hi = 0;
  std::int64_t inside = 0, total = 0;
  double fraction_inside = 0;
  std::vector<double> x_stats;  // every trace-decade statistic, trace-major
  std::vector<double> h_stats;
};

inline double lil_x_statistic(double t, double sup_x) {
  return sup_x / (std::pow(t, 2.0 / 3.0) * std::cbrt(std::log(std::log(t))));
}

inline double lil_h_statistic(double t, double sup_h) {
  const double ll = std::log(std::log(t));
  return sup_h / (std::cbrt(t) * std::cbrt(ll * ll));
}

inline LilReport lil_band_report(const std::vector<LilSeries>& series, int horizon_decades, double lo_factor = 0.2,
                                 double hi_factor = 5.0) {
  if (horizon_decades < 3) throw domain_error("lil_band_report: need at least 3 decades");
  LilReport r;
  r.center = std::pow(2 * kappa(), -1.0 / 3.0);
  r.band_lo = lo_factor * r.center;
  r.band_hi = hi_factor * r.center;
  for (const auto& s : series) {
    if (static_cast<int>(s.t.size()) < horizon_decades) throw domain_error("lil_band_report: series shorter than horizon");
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (!(s.t[i] > std::numbers::e)) throw domain_error("lil_band_report: times must exceed e");
      const double v = lil_x_statistic(s.t[i], s.sup_x[i]);
      r.x_stats.push_back(v);
      if (i < s.sup_abs_h.size()) r.h_stats.push_back(lil_h_statistic(s.t[i], s.sup_abs_h[i]));
      ++r.total;
      r.inside += (v >= r.band_lo && v <= r.band_hi);
    }
  }
  r.fraction_inside = r.total ? static_cast<double>(r.inside) / static_cast<double>(r.total) : 0.0;
  return r;
}

}  // namespace tsrm
