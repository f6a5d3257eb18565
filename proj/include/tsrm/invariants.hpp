#pragma once
// Exact structural checks of the lattice engine on small windows.

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tsrm/lattice_web.hpp"
#include "tsrm/rng.hpp"
#include "tsrm/tsrm_contour.hpp"

namespace tsrm {

struct InvariantOptions {
  std::uint64_t seed = 1;
  int windows = 1000;
  coord half_width = 10;        // window is [-w, w] x [-w, w]
  int rk_points_per_window = 10;
  std::int64_t walk_cells = 1000;  // contour prefix compared with the area sort
};

struct InvariantReport {
  int windows = 0;
  std::int64_t crossing_failures = 0;
  std::int64_t coalescence_failures = 0;
  std::int64_t duality_failures = 0;
  std::int64_t rk_checks = 0, rk_failures = 0;
  std::int64_t plane_failures = 0;
  std::int64_t time_area_failures = 0;
  std::int64_t order_failures = 0;

  bool ok() const {
    return crossing_failures == 0 && coalescence_failures == 0 && duality_failures == 0 && rk_failures == 0 &&
           plane_failures == 0 && time_area_failures == 0 && order_failures == 0;
  }
};

namespace detail {

template <ArrowSource F>
bool coalescence_permanent(const F& f, Window w) {
  std::vector<LatticePath> fw, bw;
  for (coord h = w.h_min; h <= w.h_max; ++h) {
    if (is_primal({w.x_min, h})) fw.push_back(forward_path(f, {w.x_min, h}, w.x_max));
    if (is_dual({w.x_max, h})) bw.push_back(backward_path(f, {w.x_max, h}, w.x_min));
  }
  auto check = [](const std::vector<LatticePath>& ps) {
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        const auto c = coalescence_x(ps[i], ps[j]);
        if (!c) continue;
        const bool fwd = ps[i].direction == Direction::forward;
        for (coord x = *c; fwd ? x <= ps[i].x_end() : x >= ps[i].x_end(); fwd ? ++x : --x)
          if (ps[i].at(x) != ps[j].at(x)) return false;
      }
    return true;
  };
  return check(fw) && check(bw);
}

template <ArrowSource F>
bool dual_of_dual_recovers(const F& f, Window w) {
  const DenseArrows d1 = mirror_dual(f, w);
  const DenseArrows d2 = mirror_dual(d1, d1.window());
  for (coord x = w.x_min + 1; x <= w.x_max - 1; ++x)
    for (coord h = w.h_min; h <= w.h_max; ++h)
      if (is_primal({x, h}) && d2.arrow({x, h}) != f.arrow({x, h})) return false;
  return true;
}

}  // namespace detail

/// Ray-Knight check at the given doors: after area(D) steps, the number of
/// cells swept in each strip equals the frontier excess of D in that strip.
inline std::int64_t ray_knight_failures(const ProfiledWeb& web, const std::vector<Door>& doors,
                                        std::int64_t* checked = nullptr) {
  struct Target {
    std::int64_t area;
    FrontierStrips fs;
  };
  std::vector<Target> ts;
  for (const auto& d : doors) {
    auto fs = frontier_strips(web, d);
    if (!fs) continue;
    const std::int64_t a = fs->total();
    if (a < 0) continue;
    ts.push_back({a, std::move(*fs)});
  }
  std::sort(ts.begin(), ts.end(), [](const Target& a, const Target& b) { return a.area < b.area; });
  std::unordered_map<coord, std::int64_t> count;
  ContourWalker w(web);
  std::int64_t fails = 0;
  for (const auto& t : ts) {
    while (w.cells() < t.area) ++count[w.step().x];
    bool good = true;
    std::int64_t inside = 0;
    for (std::size_t i = 0; i < t.fs.excess.size(); ++i) {
      const coord s = t.fs.left + static_cast<coord>(i);
      const auto it = count.find(s);
      const std::int64_t c = it == count.end() ? 0 : it->second;
      inside += c;
      good &= c == t.fs.excess[i];
    }
    good &= inside == t.area;  // nothing swept outside the frontier's strips
    fails += !good;
  }
  if (checked) *checked += static_cast<std::int64_t>(ts.size());
  return fails;
}

inline InvariantReport run_invariant_suite(const InvariantOptions& opt) {
  InvariantReport rep;
  const coord hw = opt.half_width;
  const Window win{-hw, hw, -hw, hw};
  for (int i = 0; i < opt.windows; ++i) {
    const StreamSpec spec{opt.seed, substream(static_cast<std::uint64_t>(i), 0x494E56u)};
    const ProfileKind kind = (i % 2 == 0) ? ProfileKind::stationary : ProfileKind::flat;
    ProfiledWeb web(ArrowField(spec, Window::unbounded()), kind);
    ++rep.windows;

    rep.crossing_failures += count_crossings(web, win) != 0;
    rep.coalescence_failures += !detail::coalescence_permanent(web, win);
    rep.duality_failures += !detail::dual_of_dual_recovers(web, win);

    // Ray-Knight at random dual sites above the profile
    RandomStream rs({opt.seed, substream(static_cast<std::uint64_t>(i), 0x524Bu)});
    std::vector<Door> doors;
    for (int tries = 0; static_cast<int>(doors.size()) < opt.rk_points_per_window && tries < 100 * opt.rk_points_per_window; ++tries) {
      const coord x = win.x_min + static_cast<coord>(rs.next_uniform() * static_cast<double>(2 * hw + 1));
      const coord h = win.h_min + static_cast<coord>(rs.next_uniform() * static_cast<double>(2 * hw + 1));
      if (!is_dual({x, h}) || h <= web.profile().height(x)) continue;
      const auto a = door_area(web, Door{x, h - 1, true}, 4 * opt.walk_cells);
      if (!a || *a < 0) continue;
      doors.push_back(Door{x, h - 1, true});
    }
    rep.rk_failures += ray_knight_failures(web, doors, &rep.rk_checks);

    // plane-filling, time = area, and walk order == area order inside the window
    ContourWalker w(web);
    std::unordered_set<Cell, CellHash> seen;
    std::vector<Cell> in_window;
    bool plane_ok = true, time_ok = true;
    for (std::int64_t k = 1; k <= opt.walk_cells; ++k) {
      const Cell c = w.step();
      plane_ok &= seen.insert(c).second;
      const auto [d1, d2] = cell_doors(c);
      const auto a1 = door_area(web, d1, k + 1), a2 = door_area(web, d2, k + 1);
      time_ok &= a1 && a2 && std::max(*a1, *a2) == k && std::min(*a1, *a2) == k - 1;
      if (c.x >= win.x_min && c.x < win.x_max && c.row >= win.h_min && c.row < win.h_max) in_window.push_back(c);
    }
    const auto sorted = area_sorted_cells(web, win, opt.walk_cells, opt.walk_cells);
    bool order_ok = sorted.size() == in_window.size();
    for (std::size_t j = 0; order_ok && j < sorted.size(); ++j) order_ok = sorted[j].cell == in_window[j];
    rep.plane_failures += !plane_ok;
    rep.time_area_failures += !time_ok;
    rep.order_failures += !order_ok;
  }
  return rep;
}

}  // namespace tsrm
