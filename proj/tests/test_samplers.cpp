#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tsrm/area_laws.hpp"
#include "tsrm/samplers.hpp"
#include "tsrm/stats.hpp"

using namespace tsrm;

namespace {

SdeConfig with_dt(double dt) {
  SdeConfig c;
  c.dt = dt;
  return c;
}

template <class F>
std::vector<double> draw(int n, std::uint64_t seed, F&& f) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RandomStream s({seed, static_cast<std::uint64_t>(i)});
    v.push_back(f(s));
  }
  return v;
}

}  // namespace

TEST(SdeConfig, Validation) {
  EXPECT_NO_THROW(SdeConfig{}.validate());
  SdeConfig c;
  c.dt = -1;
  EXPECT_THROW(c.validate(), domain_error);
  c = {};
  c.max_steps = 0;
  EXPECT_THROW(c.validate(), domain_error);
}

TEST(ReflectedArea, VanishesWithHorizon) {
  const auto cfg = with_dt(1e-4);
  double prev = INFINITY;
  for (double x : {1.0, 1e-2, 1e-4, 1e-6}) {
    const auto v = draw(2000, 1, [&](RandomStream& s) { return sample_reflected_area(x, cfg, s); });
    const double m = mean(v);
    EXPECT_LT(m, prev);
    // E = (2/3) sqrt(2/pi) x^{3/2}
    EXPECT_LT(m, 2 * x * std::sqrt(x));
    prev = m;
  }
  RandomStream s({1, 0});
  EXPECT_THROW(sample_reflected_area(0, cfg, s), domain_error);
}

TEST(ReflectedArea, MeanMatchesAnalytic) {
  const auto cfg = with_dt(1e-2);
  const auto v = draw(1000000, 2, [&](RandomStream& s) { return sample_reflected_area(1.0, cfg, s); });
  double m = 0, m2 = 0;
  for (double a : v) {
    m += a;
    m2 += a * a;
  }
  m /= static_cast<double>(v.size());
  const double se = std::sqrt((m2 / static_cast<double>(v.size()) - m * m) / static_cast<double>(v.size()));
  const double expected = std::sqrt(2 / std::numbers::pi) * 2.0 / 3.0;
  EXPECT_NEAR(m, expected, 3 * se);
}

TEST(ReflectedArea, BrownianScaling) {
  const auto cfg = with_dt(1e-2);
  const auto a = draw(20000, 3, [&](RandomStream& s) { return sample_reflected_area(4.0, cfg, s); });
  const auto b = draw(20000, 4, [&](RandomStream& s) { return 8 * sample_reflected_area(1.0, cfg, s); });
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.001);
}

TEST(Sigma, AtLeastTheAreaUpToX) {
  const auto cfg = with_dt(1e-3);
  for (int i = 0; i < 2000; ++i) {
    RandomStream s({5, static_cast<std::uint64_t>(i)}), copy = s;
    const double front = std::numbers::sqrt2 * sample_reflected_area(1.0, cfg, copy);
    const auto r = sample_sigma(1.0, cfg, s, {.exact_tail = (i % 2) == 0});
    ASSERT_FALSE(r.censored);
    ASSERT_GE(r.value, front);
    ASSERT_GE(front, 0.0);
  }
}

TEST(Sigma, CensoringIsSurfaced) {
  SdeConfig cfg = with_dt(1e-3);
  cfg.max_steps = 3;
  int censored = 0;
  for (int i = 0; i < 200; ++i) {
    RandomStream s({6, static_cast<std::uint64_t>(i)});
    censored += sample_sigma(1.0, cfg, s).censored;
  }
  EXPECT_GT(censored, 100);
  // the exact tail never censors
  RandomStream s({6, 0});
  EXPECT_FALSE(sample_sigma(1.0, cfg, s, {.exact_tail = true}).censored);
}

TEST(Sigma, SdeTailMatchesExactTail) {
  const auto cfg = with_dt(1e-4);
  const auto a = draw(20000, 7, [&](RandomStream& s) { return sample_sigma(1.0, cfg, s).value; });
  const auto b = draw(20000, 8, [&](RandomStream& s) { return sample_sigma(1.0, cfg, s, {.exact_tail = true}).value; });
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.001);
}

TEST(Sigma, HalvingStepWithinNoise) {
  const int n = 100000;
  for (double x : {1.0, 2.0}) {
    double p[2];
    int k = 0;
    for (double dt : {1e-2, 5e-3}) {
      const auto cfg = with_dt(dt);
      const auto v = draw(n, 9 + k, [&](RandomStream& s) { return sample_sigma(x, cfg, s, {.exact_tail = true}).value; });
      p[k++] = static_cast<double>(std::count_if(v.begin(), v.end(), [](double s) { return s <= 1; })) / n;
    }
    const double se = std::sqrt((p[0] * (1 - p[0]) + p[1] * (1 - p[1])) / n);
    EXPECT_LT(std::fabs(p[0] - p[1]), 3 * se) << "x=" << x;
  }
}

TEST(Absorption, CubicScaling) {
  const auto cfg = with_dt(1e-4);
  const auto a = draw(20000, 11, [&](RandomStream& s) { return sample_absorption_area(2.0, cfg, s).value; });
  const auto b = draw(20000, 12, [&](RandomStream& s) { return 8 * sample_absorption_area(1.0, cfg, s).value; });
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.001);
}

TEST(Absorption, MatchesExactLaw) {
  const auto cfg = with_dt(1e-5);
  int censored = 0;
  const auto v = draw(100000, 13, [&](RandomStream& s) {
    const auto r = sample_absorption_area(1.0, cfg, s);
    censored += r.censored;
    return r.value;
  });
  EXPECT_EQ(censored, 0);
  EXPECT_LE(ks_against_cdf(v, absorption_area_cdf).statistic, 0.01);
}

TEST(Absorption, FixedStepAgreesWithAdaptive) {
  SdeConfig fixed = with_dt(1e-3);
  fixed.adapt_height = 0;
  fixed.max_steps = 20000;
  // compare min(area, 2); a path still positive after 20 time units has area far above 2
  const auto a = draw(5000, 14, [&](RandomStream& s) { return std::min(sample_absorption_area(1.0, fixed, s).value, 2.0); });
  const auto b = draw(5000, 15, [&](RandomStream& s) {
    return std::min(sample_absorption_area(1.0, with_dt(1e-3), s).value, 2.0);
  });
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.001);
}

TEST(Absorption, DurationGrowsWithStepCap) {
  // E tau is infinite: the mean of the truncated duration keeps growing (like sqrt of the horizon)
  SdeConfig cfg = with_dt(1e-3);
  cfg.adapt_height = 0;
  double prev = 0;
  for (std::int64_t cap : {100, 1000, 10000, 100000}) {
    cfg.max_steps = cap;
    const auto v = draw(2000, 16, [&](RandomStream& s) { return sample_absorption_area(1.0, cfg, s).duration; });
    const double m = mean(v);
    EXPECT_GT(m, 1.5 * prev) << "cap " << cap;
    prev = m;
  }
}

TEST(Absorption, Preconditions) {
  RandomStream s({1, 0});
  EXPECT_THROW(sample_absorption_area(0, SdeConfig{}, s), domain_error);
  EXPECT_THROW(sample_sigma(-1, SdeConfig{}, s), domain_error);
  EXPECT_THROW(sample_height_hit(0, SdeConfig{}, s), domain_error);
  EXPECT_THROW(sample_flat_height_area(0, s), domain_error);
}

TEST(HeightHit, FirstPassageMedian) {
  // P(tau_h <= t) = 2 (1 - Phi(h / sqrt t)); the median is h^2 / Phi^{-1}(3/4)^2
  const double h = 0.5;
  const double z = boost::math::quantile(boost::math::normal(), 0.75);
  const double median = h * h / (z * z);
  SdeConfig cfg = with_dt(1e-3);
  cfg.max_steps = 50000;
  const int n = 10000;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    RandomStream s({17, static_cast<std::uint64_t>(i)});
    const auto r = sample_height_hit(h, cfg, s);
    if (!r.censored) {
      ASSERT_GT(r.Y, 0.0);
      ASSERT_GE(r.sigma_Y, 0.0);
      EXPECT_EQ(r.h_target, h);
    }
    below += !r.censored && r.Y <= median;
  }
  EXPECT_NEAR(static_cast<double>(below) / n, 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(HeightHit, AreaBoundGrowsAlongTheRun) {
  SdeConfig cfg = with_dt(1e-3);
  RandomStream s({18, 0});
  HeightState st = height_initial_state();
  std::int64_t steps = 0;
  double prev = 0;
  for (int k = 1; k <= 20; ++k) {
    const auto r = advance_height(st, -0.05 * k, INFINITY, cfg, s, steps);
    ASSERT_EQ(r, HeightStep::reached);
    ASSERT_GE(st.area_lower_bound(), prev - 1e-12);
    ASSERT_GE(st.gap_at_origin(), 0.0);
    prev = st.area_lower_bound();
  }
  EXPECT_GE(height_tail_probability(st, prev + 1), 0.0);
  EXPECT_EQ(height_tail_probability(st, prev * 0.5), 0.0);
}

TEST(FlatHeight, MatchesConvolution) {
  const double h = 1.2;
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    RandomStream s({19, static_cast<std::uint64_t>(i)});
    hits += sample_flat_height_area(h, s) <= 1;
  }
  const double p = convolution_sum_tail(1 / (h * h * h));
  EXPECT_NEAR(static_cast<double>(hits) / n, p, 3 * std::sqrt(p * (1 - p) / n));
}

TEST(FlatHeight, CubicByConstruction) {
  RandomStream a({20, 0}), b({20, 0});
  for (int i = 0; i < 100; ++i) EXPECT_DOUBLE_EQ(sample_flat_height_area(2.0, a), 8 * sample_flat_height_area(1.0, b));
}
