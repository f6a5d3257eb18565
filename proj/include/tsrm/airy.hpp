#pragma once
// Airy functions on [-20, 20], two ways.
//
// Route A: Maclaurin series in long double for |x| <= 8, asymptotic
// expansions beyond. Route B: Taylor stepping of y'' = x y from x = 0 with the
// exact initial values. Route A is the production path; route B exists to
// cross-check it and to give an independent root for a'_1.

#include <array>
#include <cmath>
#include <numbers>

#include "tsrm/errors.hpp"

namespace tsrm {

struct AiryValues {
  double ai, aip, bi, bip;
};

namespace detail {

inline constexpr long double airy_c1 = 0.355028053887817239260063186004183176L;  // Ai(0)
inline constexpr long double airy_c2 = 0.258819403792806798405183560189203963L;  // -Ai'(0)

inline void check_airy_range(double x) {
  if (!(x >= -20.0 && x <= 20.0)) throw domain_error("airy: argument outside [-20, 20]");
}

// f, f', g, g' of the Maclaurin pair, Ai = c1 f - c2 g, Bi = sqrt3 (c1 f + c2 g).
inline AiryValues airy_series(long double x) {
  const long double x3 = x * x * x;
  long double f = 0, fp = 0, g = 0, gp = 0;
  long double tf = 1, tg = x;  // x^{3k}/..., x^{3k+1}/...
  for (int k = 0; k < 200; ++k) {
    f += tf;
    g += tg;
    // derivatives term by term: d/dx x^{3k} = 3k x^{3k-1}
    if (x != 0) {
      fp += tf * 3 * k / x;
      gp += tg * (3 * k + 1) / x;
    }
    const long double nf = tf * x3 / ((3.0L * k + 2) * (3.0L * k + 3));
    const long double ng = tg * x3 / ((3.0L * k + 3) * (3.0L * k + 4));
    tf = nf;
    tg = ng;
    if (std::fabs(tf) + std::fabs(tg) < 1e-40L * (std::fabs(f) + std::fabs(g)) && k > 3) break;
  }
  if (x == 0) gp = 1;
  const long double s3 = std::sqrt(3.0L);
  return {static_cast<double>(airy_c1 * f - airy_c2 * g), static_cast<double>(airy_c1 * fp - airy_c2 * gp),
          static_cast<double>(s3 * (airy_c1 * f + airy_c2 * g)),
          static_cast<double>(s3 * (airy_c1 * fp + airy_c2 * gp))};
}

// Sums of the asymptotic u_k, v_k series; alternate = (-1)^k weights.
struct AsymSums {
  long double u_even = 0, u_odd = 0, v_even = 0, v_odd = 0;  // signs (-1)^k within each parity
  long double u_alt = 0, v_alt = 0, u_all = 0, v_all = 0;
};

inline AsymSums airy_asym_sums(long double zeta) {
  AsymSums s;
  long double u = 1, zp = 1;
  long double last = INFINITY;
  for (int k = 0; k < 60; ++k) {
    const long double v = (k == 0) ? 1.0L : -(6.0L * k + 1) / (6.0L * k - 1) * u;
    const long double tu = u / zp, tv = v / zp;
    if (std::fabs(tu) > last) break;  // asymptotic series: stop at smallest term
    last = std::fabs(tu);
    const long double alt = (k % 2 == 0) ? 1 : -1;
    s.u_alt += alt * tu;
    s.v_alt += alt * tv;
    s.u_all += tu;
    s.v_all += tv;
    const long double alt2 = ((k / 2) % 2 == 0) ? 1 : -1;
    if (k % 2 == 0) {
      s.u_even += alt2 * tu;
      s.v_even += alt2 * tv;
    } else {
      s.u_odd += alt2 * tu;
      s.v_odd += alt2 * tv;
    }
    if (last < 1e-22L) break;
    const int n = k + 1;
    u *= (6.0L * n - 5) * (6.0L * n - 3) * (6.0L * n - 1) / ((2.0L * n - 1) * 216.0L * n);
    zp *= zeta;
  }
  return s;
}

inline AiryValues airy_asymptotic(long double x) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double z = std::fabs(x);
  const long double zeta = 2.0L / 3.0L * z * std::sqrt(z);
  const long double q = std::pow(z, 0.25L);
  const AsymSums s = airy_asym_sums(zeta);
  if (x > 0) {
    const long double em = std::exp(-zeta), ep = std::exp(zeta);
    return {static_cast<double>(em / (2 * std::sqrt(pi) * q) * s.u_alt),
            static_cast<double>(-q * em / (2 * std::sqrt(pi)) * s.v_alt),
            static_cast<double>(ep / (std::sqrt(pi) * q) * s.u_all),
            static_cast<double>(q * ep / std::sqrt(pi) * s.v_all)};
  }
  const long double th = zeta - pi / 4;
  const long double c = std::cos(th), sn = std::sin(th);
  return {static_cast<double>((c * s.u_even + sn * s.u_odd) / (std::sqrt(pi) * q)),
          static_cast<double>(q / std::sqrt(pi) * (sn * s.v_even - c * s.v_odd)),
          static_cast<double>((-sn * s.u_even + c * s.u_odd) / (std::sqrt(pi) * q)),
          static_cast<double>(q / std::sqrt(pi) * (c * s.v_even + sn * s.v_odd))};
}

}  // namespace detail

inline AiryValues airy(double x) {
  detail::check_airy_range(x);
  if (std::fabs(x) <= 8.0) return detail::airy_series(x);
  return detail::airy_asymptotic(x);
}

inline double airy_ai(double x) { return airy(x).ai; }
inline double airy_ai_prime(double x) { return airy(x).aip; }
inline double airy_bi(double x) { return airy(x).bi; }

/// Route B: integrate y'' = x y from 0 to x by local Taylor series with step h.
/// Returns {y, y'} for the solution with y(0) = y0, y'(0) = y1.
inline std::array<long double, 2> airy_ode(long double x, long double y0, long double y1, long double h = 0.25L) {
  const int n = static_cast<int>(std::ceil(std::fabs(x) / h));
  const long double step = n == 0 ? 0 : x / n;
  long double y = y0, yp = y1, x0 = 0;
  for (int i = 0; i < n; ++i) {
    // Taylor coefficients about x0: a_{k+2} = (x0 a_k + a_{k-1}) / ((k+2)(k+1))
    std::array<long double, 64> a{};
    a[0] = y;
    a[1] = yp;
    for (int k = 0; k + 2 < 64; ++k) a[k + 2] = (x0 * a[k] + (k > 0 ? a[k - 1] : 0)) / ((k + 2.0L) * (k + 1.0L));
    long double ny = 0, nyp = 0, p = 1;
    for (int k = 0; k < 64; ++k) {
      ny += a[k] * p;
      if (k + 1 < 64) nyp += (k + 1) * a[k + 1] * p;
      p *= step;
    }
    y = ny;
    yp = nyp;
    x0 += step;
  }
  return {y, yp};
}

inline double airy_ai_ode(double x, double h = 0.25) {
  detail::check_airy_range(x);
  return static_cast<double>(airy_ode(x, detail::airy_c1, -detail::airy_c2, h)[0]);
}
inline double airy_ai_prime_ode(double x, double h = 0.25) {
  detail::check_airy_range(x);
  return static_cast<double>(airy_ode(x, detail::airy_c1, -detail::airy_c2, h)[1]);
}

struct RootReport {
  double root;
  int iterations;
  double residual;
};

/// First negative zero of Ai' by safeguarded Newton inside [lo, hi].
/// Ai'' = x Ai, so the Newton step is Ai'(x) / (x Ai(x)).
inline RootReport first_airy_prime_zero(double lo = -1.1, double hi = -1.0) {
  double flo = airy_ai_prime(lo), fhi = airy_ai_prime(hi);
  if (flo * fhi > 0) throw domain_error("first_airy_prime_zero: bracket does not straddle a root");
  double x = 0.5 * (lo + hi);
  int it = 0;
  for (; it < 100; ++it) {
    const AiryValues v = airy(x);
    if (v.aip == 0) break;
    if ((v.aip > 0) == (fhi > 0)) hi = x; else lo = x;
    double nx = x - v.aip / (x * v.ai);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::fabs(nx - x) < 1e-16 * std::fabs(x)) {
      x = nx;
      break;
    }
    x = nx;
  }
  return {x, it, std::fabs(airy_ai_prime(x))};
}

/// Bisection for the zero of the ODE-integrated Ai' at a fixed step h.
inline double airy_prime_zero_at_step(double h, double lo = -1.1, double hi = -1.0) {
  const double flo = airy_ai_prime_ode(lo, h);
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi), fm = airy_ai_prime_ode(mid, h);
    if ((fm > 0) == (flo > 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Independent route: step halving until successive roots agree to tol.
inline RootReport first_airy_prime_zero_ode(double tol = 1e-13) {
  double prev = 0, root = 0;
  int rounds = 0;
  for (double h = 0.25; h > 1e-3; h *= 0.5, ++rounds) {
    root = airy_prime_zero_at_step(h);
    if (rounds > 0 && std::fabs(root - prev) < tol) break;
    prev = root;
  }
  return {root, rounds, std::fabs(airy_ai_prime_ode(root))};
}

}  // namespace tsrm
