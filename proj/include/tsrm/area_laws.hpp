#pragma once
// Brownian-area laws.
//
// U = integral of B up to its first hit of 0, B started at 1. With u = a^{-1/3},
//   P(U <= a) = int_u^inf exp(-2y^3/9) dy / Z,   Z = Gamma(4/3) (9/2)^{1/3}.
// Substituting s = 2y^3/9 turns this into the regularized upper incomplete
// gamma Q(1/3, 2/(9a)); equivalently U has the law of 2/(9G) with
// G ~ Gamma(1/3). The incomplete-gamma form is the fast path; the direct
// quadrature is kept as an independent route and for the normalization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "tsrm/airy.hpp"
#include "tsrm/errors.hpp"

namespace tsrm {

struct AiryConstants {
  double a1_prime;
  double kappa;
};

inline AiryConstants airy_constants() {
  const double a = first_airy_prime_zero().root;
  return {a, 2.0 * std::pow(std::fabs(a), 3) / 27.0};
}

inline double kappa() { return airy_constants().kappa; }

namespace detail {

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 20) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol);
}

inline constexpr double third = 1.0 / 3.0;

}  // namespace detail

/// Z = int_0^inf exp(-2y^3/9) dy by quadrature.
inline double area_normalization_quadrature() {
  return detail::integrate([](double y) { return std::exp(-2.0 * y * y * y / 9.0); }, 0.0,
                           std::numeric_limits<double>::infinity());
}

/// Z via the Gamma identity.
inline double area_normalization() { return std::tgamma(4.0 / 3.0) * std::cbrt(4.5); }

inline double absorption_area_cdf(double a) {
  if (!(a > 0)) throw domain_error("absorption_area_cdf: a must be positive");
  if (std::isinf(a)) return 1.0;
  return boost::math::gamma_q(detail::third, 2.0 / (9.0 * a));
}

/// P(U > a), accurate in the far tail where 1 - cdf would cancel.
inline double absorption_area_sf(double a) {
  if (!(a > 0)) throw domain_error("absorption_area_sf: a must be positive");
  if (std::isinf(a)) return 0.0;
  return boost::math::gamma_p(detail::third, 2.0 / (9.0 * a));
}

/// The same cdf by direct quadrature of the defining integral.
inline double absorption_area_cdf_quadrature(double a) {
  if (!(a > 0)) throw domain_error("absorption_area_cdf_quadrature: a must be positive");
  const double u = std::cbrt(1.0 / a);
  const double tail = detail::integrate([](double y) { return std::exp(-2.0 * y * y * y / 9.0); }, u,
                                        std::numeric_limits<double>::infinity());
  return tail / area_normalization_quadrature();
}

inline double absorption_area_pdf(double a) {
  if (!(a > 0)) throw domain_error("absorption_area_pdf: a must be positive");
  return std::pow(a, -4.0 / 3.0) * std::exp(-2.0 / (9.0 * a)) / (3.0 * area_normalization());
}

inline double absorption_area_quantile(double p) {
  if (!(p > 0 && p < 1)) throw domain_error("absorption_area_quantile: p must lie in (0,1)");
  return 2.0 / (9.0 * boost::math::gamma_q_inv(detail::third, p));
}

/// Tabulated law of U on a log grid, for plotting and fast lookups.
class AreaLawTable {
 public:
  struct Row {
    double a, cdf, pdf;
  };

  AreaLawTable(double a_min = 1e-3, double a_max = 1e4, std::size_t n = 400) {
    if (!(a_min > 0 && a_max > a_min && n >= 2)) throw domain_error("AreaLawTable: bad grid");
    z_ = area_normalization();
    rows_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = a_min * std::pow(a_max / a_min, static_cast<double>(i) / static_cast<double>(n - 1));
      rows_.push_back({a, absorption_area_cdf(a), absorption_area_pdf(a)});
    }
  }

  double normalization() const { return z_; }
  const std::vector<Row>& rows() const { return rows_; }

  /// Total mass of the density, integrated in y = a^{-1/3} where it is smooth.
  static double mass() {
    return detail::integrate(
        [](double y) {
          if (y <= 0) return 1.0 / area_normalization();
          return absorption_area_pdf(1.0 / (y * y * y)) * 3.0 / (y * y * y * y);
        },
        0.0, std::numeric_limits<double>::infinity());
  }

  std::vector<double> quantiles(const std::vector<double>& ps) const {
    std::vector<double> out;
    out.reserve(ps.size());
    for (double p : ps) out.push_back(absorption_area_quantile(p));
    return out;
  }

 private:
  double z_ = 0;
  std::vector<Row> rows_;
};

/// Below this the convolution integrand underflows relative to double range.
inline constexpr double convolution_floor = 0.02;

/// P(U1 + U2 <= x) for iid copies of U: int_0^x f(a) F(x-a) da.
inline double convolution_sum_tail(double x) {
  if (!(x >= convolution_floor)) throw domain_error("convolution_sum_tail: x below validity floor 0.02");
  if (std::isinf(x)) return 1.0;
  // P = int_0^{x/2} f(a) F(x-a) da + int_0^{x/2} f(x-b) F(b) db. For large x both pieces
  // carry mass on a log scale near 0, so break the range geometrically.
  auto lower = [x](double a) { return a <= 0 ? 0.0 : absorption_area_pdf(a) * absorption_area_cdf(x - a); };
  auto upper = [x](double b) { return b <= 0 ? 0.0 : absorption_area_pdf(x - b) * absorption_area_cdf(b); };
  double total = 0, hi = 0.5 * x;
  while (hi > 1e-3) {
    const double lo = hi > 1e-2 ? 0.1 * hi : 0.0;
    const double piece = detail::integrate(lower, lo, hi, 1e-12, 8) + detail::integrate(upper, lo, hi, 1e-12, 8);
    total += piece;
    // density decays like exp(-c/a) toward 0, so once a piece is negligible the rest are too
    if (piece <= 1e-17 * total) break;
    hi = lo;
  }
  return total;
}

// ---------------------------------------------------------------------------
// F(x, A) = P_x(area before absorption <= A) solves F_xx - 2x F_A = 0.

struct PdeGrid {
  std::vector<double> xs, as;
  std::vector<double> f;  // f[i * as.size() + j] = F(xs[i], as[j])
  double at(std::size_t i, std::size_t j) const { return f[i * as.size() + j]; }
};

inline double absorption_cdf_from(double x, double A) {
  if (x <= 0) return 1.0;
  return absorption_area_cdf(A / (x * x * x));
}

inline PdeGrid make_pde_grid(double x0, double x1, std::size_t nx, double a0, double a1, std::size_t na) {
  PdeGrid g;
  for (std::size_t i = 0; i < nx; ++i) g.xs.push_back(x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nx - 1));
  for (std::size_t j = 0; j < na; ++j) g.as.push_back(a0 + (a1 - a0) * static_cast<double>(j) / static_cast<double>(na - 1));
  g.f.resize(nx * na);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < na; ++j) g.f[i * na + j] = absorption_cdf_from(g.xs[i], g.as[j]);
  return g;
}

/// Max centered-difference residual of F_xx - 2x F_A over interior nodes.
inline double pde_residual(const PdeGrid& g) {
  const std::size_t nx = g.xs.size(), na = g.as.size();
  if (nx < 5 || na < 5) throw domain_error("pde_residual: need at least 5 points per axis");
  if (g.f.size() != nx * na) throw domain_error("pde_residual: table size mismatch");
  const double hx = g.xs[1] - g.xs[0], ha = g.as[1] - g.as[0];
  double worst = 0;
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 1; j + 1 < na; ++j) {
      const double fxx = (g.at(i + 1, j) - 2 * g.at(i, j) + g.at(i - 1, j)) / (hx * hx);
      const double fa = (g.at(i, j + 1) - g.at(i, j - 1)) / (2 * ha);
      worst = std::max(worst, std::fabs(fxx - 2 * g.xs[i] * fa));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Small-ball models: log p(eps) = log c + k log eps - kappa / eps^2.

enum class SmallBallKind { motion, bridge };

struct SmallBallModel {
  SmallBallKind kind = SmallBallKind::motion;
  double kappa = 0;
  int prefactor_exponent = 1;  // 1 for the motion, 0 for the bridge
  double log_free_constant = 0;

  static SmallBallModel motion(double kappa, double log_c = 0) { return {SmallBallKind::motion, kappa, 1, log_c}; }
  static SmallBallModel bridge(double kappa, double log_c = 0) { return {SmallBallKind::bridge, kappa, 0, log_c}; }

  double log_p(double eps) const {
    return log_free_constant + prefactor_exponent * std::log(eps) - kappa / (eps * eps);
  }
};

struct SmallBallPoint {
  double eps, log_p;
};

struct SmallBallFit {
  double log_free_constant, kappa_hat;
  double kappa_lo, kappa_hi;
  double kappa_stderr;
  double residual_rms;
};

/// OLS of log p - k log eps on [1, eps^-2]; CI from the t distribution.
inline SmallBallFit small_ball_fit(const std::vector<SmallBallPoint>& pts, const SmallBallModel& model,
                                   double level = 0.95) {
  if (pts.size() < 4) throw fit_error("small_ball_fit: need at least 4 points");
  double emin = pts[0].eps, emax = pts[0].eps;
  for (const auto& p : pts) {
    if (!(p.eps > 0) || !std::isfinite(p.log_p)) throw fit_error("small_ball_fit: non-finite point");
    emin = std::min(emin, p.eps);
    emax = std::max(emax, p.eps);
  }
  if (emax < 2 * emin) throw fit_error("small_ball_fit: eps values must span a factor of 2");
  const double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (const auto& p : pts) {
    sx += 1 / (p.eps * p.eps);
    sy += p.log_p - model.prefactor_exponent * std::log(p.eps);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    const double dx = 1 / (p.eps * p.eps) - mx;
    sxx += dx * dx;
    sxy += dx * (p.log_p - model.prefactor_exponent * std::log(p.eps) - my);
  }
  if (!(sxx > 0)) throw fit_error("small_ball_fit: degenerate design");
  const double slope = sxy / sxx, icept = my - slope * mx;
  double rss = 0;
  for (const auto& p : pts) {
    const double r = p.log_p - model.prefactor_exponent * std::log(p.eps) - icept - slope / (p.eps * p.eps);
    rss += r * r;
  }
  const double dof = n - 2;
  const double se = std::sqrt(rss / dof / sxx);
  const double tq = boost::math::quantile(boost::math::students_t(dof), 0.5 + level / 2);
  return {icept, -slope, -slope - tq * se, -slope + tq * se, se, std::sqrt(rss / n)};
}

}  // namespace tsrm
