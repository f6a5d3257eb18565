#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tsrm/area_laws.hpp"
#include "tsrm/experiments.hpp"
#include "tsrm/invariants.hpp"
#include "tsrm/samplers.hpp"
#include "tsrm/stats.hpp"
#include "tsrm/tsrm_contour.hpp"

using namespace tsrm;

namespace {

ProfiledWeb make_web(std::uint64_t seed, ProfileKind kind, std::uint64_t id = 0) {
  return ProfiledWeb(ArrowField({seed, id}, Window::unbounded()), kind);
}

/// Sup-distance between an empirical cdf of n draws and `cdf`, looking only at
/// values <= cut; draws above the cut are censored and enter through their mass.
template <class F>
double censored_ks(std::vector<double> below, std::size_t n, double cut, F cdf) {
  std::sort(below.begin(), below.end());
  const double nn = static_cast<double>(n);
  double d = 0;
  for (std::size_t i = 0; i < below.size(); ++i) {
    const double f = cdf(below[i]);
    d = std::max({d, f - static_cast<double>(i) / nn, static_cast<double>(i + 1) / nn - f});
  }
  return std::max(d, std::fabs(static_cast<double>(below.size()) / nn - cdf(cut)));
}

// Flat profile with a dual line at gap 3 (two above q = g + 1) over columns
// -1..-k, dropping onto q at column -k-1; the forward half glues at once.
ProfiledWeb gap_three_fixture(coord k) {
  ArrowField f({1, 0}, Window::unbounded());
  auto q = [](coord x) { return std::abs(x) % 2 + 1; };
  f.set_override({0, 2}, -1);
  coord h = 3;
  for (coord x = 0; x > -k; --x) {
    const coord next = q(x - 1) + 2;
    f.set_override({x - 1, h}, static_cast<int>(h - next));
    h = next;
  }
  f.set_override({-k - 1, h}, static_cast<int>(h - q(-k - 1)));
  return ProfiledWeb(std::move(f), ProfileKind::flat);
}

}  // namespace

TEST(AreaTime, OriginIsZero) {
  for (auto kind : {ProfileKind::stationary, ProfileKind::flat})
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto web = make_web(s, kind);
      EXPECT_EQ(area_time_at(web, 0, web.profile().height(0) + 1), 0);
    }
}

TEST(AreaTime, Preconditions) {
  const auto web = make_web(1, ProfileKind::flat);
  EXPECT_THROW(area_time_at(web, 0, 2), tsrm::domain_error);   // parity
  EXPECT_THROW(area_time_at(web, 1, 0), tsrm::domain_error);   // below the profile
  EXPECT_THROW(area_time(web, Cell{0, -1, Tri::lower_left}), tsrm::domain_error);
}

TEST(AreaTime, HandCountedFixture) {
  for (coord k : {2, 4, 6, 8}) {
    const auto web = gap_three_fixture(k);
    // each parallel column holds 4 cells, the two glue strips 2 each
    EXPECT_EQ(area_time_at(web, 0, 3), 4 * k + 4) << "k=" << k;
    ContourWalker w(web);
    while (!(w.door() == Door{0, 2, true})) w.step();
    EXPECT_EQ(w.cells(), 4 * k + 4);
  }
}

TEST(AreaTime, CellTimesMatchTheWalk) {
  const auto web = make_web(8, ProfileKind::stationary);
  ContourWalker w(web);
  for (std::int64_t k = 1; k <= 3000; ++k) ASSERT_EQ(area_time(web, w.step()), k);
}

// Flat profile, lattice height 41: cells/2 over 40^3 is distributed as U1+U2.
// Areas above 3 are censored (their mass is still compared).
TEST(AreaTime, FlatProfileAreaLaw) {
  const coord hl = 41;
  const double h = static_cast<double>(hl - 1), cut = 3.0;
  const std::size_t n = 100000;
  const auto cap = static_cast<std::int64_t>(2 * h * h * h * cut) + 1;
  std::vector<double> below;
  for (std::size_t r = 0; r < n; ++r) {
    const auto web = make_web(3, ProfileKind::flat, r);
    const auto a = area_time_at(web, 0, hl, cap);
    if (!a) continue;
    const double v = static_cast<double>(*a) / 2 / (h * h * h);
    if (v <= cut) below.push_back(v);
  }
  const double d = censored_ks(below, n, cut, [](double x) { return x < convolution_floor ? 0.0 : convolution_sum_tail(x); });
  EXPECT_LE(d, 0.02);
}

TEST(BuildContour, OneCell) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto web = make_web(s, ProfileKind::stationary);
    const TsrmTrace tr = build_contour(web, 0.5, 1.0);
    ASSERT_EQ(tr.cells.size(), 1u);
    EXPECT_EQ(tr.cells[0].x, 0);
    EXPECT_EQ(tr.cells[0].row, web.profile().height(0));
    EXPECT_EQ(cell_doors(tr.cells[0]).first, origin_door);
    EXPECT_EQ(tr.samples.size(), 2u);
    EXPECT_DOUBLE_EQ(tr.duration(), 0.5);
  }
}

TEST(BuildContour, BudgetCapRaisesWithPartialTrace) {
  const auto web = make_web(1, ProfileKind::stationary);
  try {
    build_contour(web, 100.0, 1.0, {50});
    FAIL() << "expected a resource error";
  } catch (const contour_resource_error& e) {
    EXPECT_FALSE(e.partial.complete);
    EXPECT_EQ(e.partial.cells.size(), 50u);
  }
  EXPECT_THROW(build_contour(web, -1.0), tsrm::domain_error);
}

TEST(BuildContour, WalkOrderIsAreaOrder) {
  InvariantOptions opt;
  opt.seed = 5;
  opt.windows = 40;
  const InvariantReport r = run_invariant_suite(opt);
  EXPECT_EQ(r.order_failures, 0);
  EXPECT_EQ(r.plane_failures, 0);
  EXPECT_EQ(r.time_area_failures, 0);
}

// Mesh refinement: median |X_1| at eps and eps/4 agree within a 99% bootstrap CI.
TEST(BuildContour, MedianStableUnderRefinement) {
  const std::size_t n = 10000;
  const double eps = 1.0 / 256;
  auto abs_x = [&](double mesh, std::uint64_t seed) {
    const auto snaps = lattice_snapshots(n, seed, mesh, ProfileKind::stationary, {1.0});
    std::vector<double> v;
    for (const auto& s : snaps) v.push_back(std::fabs(s[0].x));
    return v;
  };
  const auto a = abs_x(eps, 21), b = abs_x(eps / 4, 22);
  const Interval ci = bootstrap_quantile_difference(a, b, 0.5, 1000, 0.99, {23, 0});
  EXPECT_TRUE(ci.contains(0.0)) << "[" << ci.lo << ", " << ci.hi << "]";
}

TEST(LocalTime, ZeroAtStartAndMassIsTime) {
  const auto web = make_web(2, ProfileKind::stationary);
  const double mesh = 1.0 / 64;
  const TsrmTrace tr = build_contour(web, 1.0, mesh);
  const auto l0 = local_time_profile(tr, 0.0);
  EXPECT_TRUE(l0.cells.empty());
  EXPECT_EQ(l0.value(0), 0.0);
  for (double t : {0.1, 0.5, 1.0}) {
    const auto lp = local_time_profile(tr, t);
    EXPECT_NEAR(lp.mass(), lp.t, 1e-12);
    EXPECT_NEAR(lp.t, t, tr.cell_time());
  }
  EXPECT_THROW(local_time_profile(tr, 2.0), tsrm::domain_error);
}

TEST(LocalTime, RayKnightAtRandomDoors) {
  std::int64_t checked = 0, fails = 0;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto web = make_web(s, s % 2 ? ProfileKind::flat : ProfileKind::stationary);
    RandomStream rs({s, 77});
    std::vector<Door> doors;
    while (doors.size() < 1000) {
      const coord x = -10 + static_cast<coord>(rs.next_uniform() * 21);
      const coord h = -10 + static_cast<coord>(rs.next_uniform() * 21);
      if (!is_dual({x, h}) || h <= web.profile().height(x)) continue;
      const auto a = door_area(web, Door{x, h - 1, true}, 200000);
      if (a && *a >= 0) doors.push_back(Door{x, h - 1, true});
    }
    fails += ray_knight_failures(web, doors, &checked);
  }
  EXPECT_EQ(checked, 4000);
  EXPECT_EQ(fails, 0);
}

TEST(HittingTime, ZeroAndMonotone) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto web = make_web(s, ProfileKind::stationary);
    const TsrmTrace tr = build_contour(web, 1.0, 1.0 / 256);
    EXPECT_EQ(hitting_time(tr, 0.0), 0.0);
    double prev = 0;
    for (double x = 1.0 / 256; x < 1; x += 1.0 / 256) {
      const auto t = hitting_time(tr, x);
      if (!t) break;
      ASSERT_GE(*t, prev);
      prev = *t;
    }
    prev = 0;
    for (double x = -1.0 / 256; x > -1; x -= 1.0 / 256) {
      const auto t = hitting_time(tr, x);
      if (!t) break;
      ASSERT_GE(*t, prev);
      prev = *t;
    }
  }
}

TEST(HittingTime, LatticeSigmaEqualsTraceHittingTime) {
  const double mesh = 1.0 / 256;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto web = make_web(s, ProfileKind::stationary);
    const TsrmTrace tr = build_contour(web, 2.0, mesh);
    for (coord xl : {1, 5, 20, 60}) {
      const auto t = hitting_time(tr, mesh * static_cast<double>(xl));
      const auto c = lattice_sigma_cells(web, xl, 1 << 24);
      if (!t) continue;
      ASSERT_TRUE(c.has_value());
      EXPECT_DOUBLE_EQ(*t, static_cast<double>(*c) * tr.cell_time());
    }
  }
}

// Flat profile at mesh 1e-3: sigma_1 against the continuum sampler with the
// sqrt(2) of the stationary case removed. Values above 3 are censored.
TEST(HittingTime, SigmaLawMatchesSampler) {
  const std::size_t n = 100000;
  const double eps = 1e-3, cut = 3.0, unit = 0.5 * std::pow(eps, 1.5);
  const auto cap = static_cast<std::int64_t>(cut / unit) + 1;
  std::vector<double> a, b;
  for (std::size_t r = 0; r < n; ++r) {
    const auto web = make_web(31, ProfileKind::flat, r);
    const auto c = lattice_sigma_cells(web, 1000, cap);
    a.push_back(c ? static_cast<double>(*c) * unit : INFINITY);
  }
  SdeConfig cfg;
  cfg.dt = 1e-3;
  for (std::size_t r = 0; r < n; ++r) {
    RandomStream s({32, r});
    const auto v = sample_sigma(1.0, cfg, s, {true});
    b.push_back(v.censored ? INFINITY : v.value / std::numbers::sqrt2);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  for (const auto* v : {&a, &b})
    for (double x : *v) {
      if (x > cut) break;
      const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin());
      const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin());
      d = std::max(d, std::fabs(fa - fb) / static_cast<double>(n));
    }
  EXPECT_LE(d, 0.02);
}

TEST(PVariation, MonotoneFixtureIsDisplacement) {
  TsrmTrace tr;
  tr.mesh = 1.0;
  for (int k = 0; k <= 64; ++k) tr.samples.push_back({0.5 * k, 0.25 * k * k, 0.0});
  for (const auto& v : p_variation(tr, 1.0, {0, 2, 4, 6})) EXPECT_DOUBLE_EQ(v.value, 0.25 * 64 * 64);
  EXPECT_THROW(p_variation(tr, 0.0, {1}), tsrm::domain_error);
}

// Over 100 unit-duration traces at mesh 2^-10, the mean 2-variation falls at
// each of the three finest dyadic levels and the 3/2-variation is stable.
TEST(PVariation, QuadraticVanishesThreeHalvesStable) {
  const std::vector<int> levels{8, 9, 10};
  auto means = [&](double p) {
    const auto v = lattice_p_variation(100, 41, 1.0 / 1024, ProfileKind::stationary, p, levels);
    std::vector<double> m(levels.size(), 0);
    for (const auto& r : v)
      for (std::size_t i = 0; i < levels.size(); ++i) m[i] += r[i].value / 100;
    return m;
  };
  const auto q = means(2.0), th = means(1.5);
  EXPECT_GT(q[0], q[1]);
  EXPECT_GT(q[1], q[2]);
  for (std::size_t i = 0; i + 1 < th.size(); ++i) {
    const double ratio = th[i + 1] / th[i];
    EXPECT_GE(ratio, 0.5);
    EXPECT_LE(ratio, 2.0);
  }
}
