#pragma once
// The self-repelling motion as the contour of the lattice web.
//
// Each unit square [x,x+1]x[r,r+1] is cut by its single diagonal (rising iff
// the primal corner on its left side has arrow +1) into two triangles. These
// triangles are the cells. A cell has two grid-edge sides that are not its
// diagonal; call them doors. The corridor between the forward tree and the
// dual tree is a chain of cells linked through doors, and walking it from the
// origin door (0,0)-(0,1) upwards is the plane-filling contour.
//
// Every door D has a frontier: the dual path from D's dual endpoint run left,
// the door itself, and the forward path from D's primal endpoint run right.
// The cells swept before the contour reaches D are exactly those between the
// initial profile and that frontier; one cell is half a unit of area. So the
// time at which a cell is swept can be computed two ways: by walking, or from
// the signed area between frontier and profile. Both routes are implemented.
//
// Physical units for mesh eps: x -> eps*x, h -> sqrt(eps)*h,
// time -> eps^{3/2} * (cells / 2).

#include <array>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "tsrm/errors.hpp"
#include "tsrm/lattice_web.hpp"

namespace tsrm {

/// Grid edge: vertical (x,y)-(x,y+1) or horizontal (x,y)-(x+1,y).
struct Door {
  coord x = 0, y = 0;
  bool vertical = true;
  friend bool operator==(const Door&, const Door&) = default;

  std::pair<Site, Site> endpoints() const {
    return vertical ? std::pair{Site{x, y}, Site{x, y + 1}} : std::pair{Site{x, y}, Site{x + 1, y}};
  }
  Site primal_end() const {
    auto [a, b] = endpoints();
    return is_primal(a) ? a : b;
  }
  Site dual_end() const {
    auto [a, b] = endpoints();
    return is_primal(a) ? b : a;
  }
  /// Midpoint in lattice units.
  double mid_x() const { return vertical ? double(x) : double(x) + 0.5; }
  double mid_y() const { return vertical ? double(y) + 0.5 : double(y); }
};

/// The door joining the two halves of the initial profile.
inline constexpr Door origin_door{0, 0, true};

enum class Tri : std::uint8_t { upper_left, lower_right, lower_left, upper_right };

struct Cell {
  coord x = 0, row = 0;
  Tri tri = Tri::upper_left;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept {
    return static_cast<std::size_t>(detail::mix64(detail::mix64(static_cast<std::uint64_t>(c.x)) +
                                                  static_cast<std::uint64_t>(c.row) * 4 +
                                                  static_cast<std::uint64_t>(c.tri)));
  }
};

/// Diagonal orientation of square (x,row).
template <ArrowSource F>
bool square_rising(const F& f, coord x, coord row) {
  const coord hp = ((x + row) & 1) == 0 ? row : row + 1;
  return f.arrow({x, hp}) > 0;
}

inline bool square_rising(const ProfiledWeb& w, coord x, coord row) {
  const coord hp = ((x + row) & 1) == 0 ? row : row + 1;
  return w.arrow_unchecked(x, hp) > 0;
}

inline std::pair<Door, Door> cell_doors(const Cell& c) {
  const Door left{c.x, c.row, true}, right{c.x + 1, c.row, true};
  const Door bottom{c.x, c.row, false}, top{c.x, c.row + 1, false};
  switch (c.tri) {
    case Tri::upper_left: return {left, top};
    case Tri::lower_right: return {bottom, right};
    case Tri::lower_left: return {left, bottom};
    case Tri::upper_right: return {top, right};
  }
  return {left, top};
}

/// The cell on the far side of `d` as seen from `from`.
template <class W>
Cell cell_across(const W& web, const Door& d, const Cell& from) {
  if (d.vertical) {
    if (from.x == d.x) {  // go left into square (x-1, y), entering via its right side
      const bool r = square_rising(web, d.x - 1, d.y);
      return {d.x - 1, d.y, r ? Tri::lower_right : Tri::upper_right};
    }
    const bool r = square_rising(web, d.x, d.y);
    return {d.x, d.y, r ? Tri::upper_left : Tri::lower_left};
  }
  if (from.row == d.y) {  // go down into square (x, y-1), entering via its top
    const bool r = square_rising(web, d.x, d.y - 1);
    return {d.x, d.y - 1, r ? Tri::upper_left : Tri::upper_right};
  }
  const bool r = square_rising(web, d.x, d.y);
  return {d.x, d.y, r ? Tri::lower_right : Tri::lower_left};
}

/// Frontier of a door relative to the profile, strip by strip. excess[i] is
/// the number of cells of strip left+i lying between profile and frontier;
/// outside [left, left+size) the frontier runs on the profile.
struct FrontierStrips {
  coord left = 0;
  std::vector<std::int64_t> excess;
  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto v : excess) s += v;
    return s;
  }
  std::int64_t at(coord s) const {
    if (s < left || s >= left + static_cast<coord>(excess.size())) return 0;
    return excess[static_cast<std::size_t>(s - left)];
  }
};

/// nullopt if a frontier half has not merged with the profile after max_steps.
inline std::optional<FrontierStrips> frontier_strips(const ProfiledWeb& web, const Door& d,
                                                     std::int64_t max_steps = std::int64_t{1} << 26) {
  const auto& g = web.profile();
  const Site p = d.primal_end(), q = d.dual_end();
  // Doubled strip areas: a diagonal from height a to b over one strip adds a+b;
  // a horizontal door at height y adds +2y traversed rightwards, -2y leftwards.
  std::vector<std::int64_t> right_part, left_part;  // strips p.x.. and q.x-1 downwards
  coord x = p.x, h = p.h;
  std::int64_t steps = 0;
  while (!(x >= 0 && h == g.height(x))) {
    const coord h2 = h + web.arrow_unchecked(x, h);
    right_part.push_back(h + h2);
    h = h2;
    ++x;
    if (++steps > max_steps) return std::nullopt;
  }
  const coord right = x;
  x = q.x;
  h = q.h;
  while (!(x <= 0 && h == g.dual_height(x))) {
    const coord h2 = h - web.arrow_unchecked(x - 1, h);
    left_part.push_back(h + h2);
    h = h2;
    --x;
    if (++steps > max_steps) return std::nullopt;
  }
  FrontierStrips fs;
  fs.left = std::min(x, std::min(p.x, q.x));
  const coord hi = std::max(right, std::max(p.x, q.x));
  fs.excess.assign(static_cast<std::size_t>(hi - fs.left), 0);
  auto add = [&](coord s, std::int64_t v) { fs.excess[static_cast<std::size_t>(s - fs.left)] += v; };
  for (std::size_t i = 0; i < right_part.size(); ++i) add(p.x + static_cast<coord>(i), right_part[i]);
  for (std::size_t i = 0; i < left_part.size(); ++i) add(q.x - 1 - static_cast<coord>(i), left_part[i]);
  if (!d.vertical) add(d.x, (q.x > p.x) ? -2 * d.y : 2 * d.y);
  for (coord s = x; s < right; ++s) {
    const coord a = s >= 0 ? g.height(s) : g.dual_height(s);
    const coord b = s + 1 > 0 ? g.height(s + 1) : g.dual_height(s + 1);
    add(s, -(a + b));
  }
  return fs;
}

/// Signed area, in cells, between the frontier of `d` and the initial profile.
/// Zero for the origin door, positive for doors the contour reaches later.
inline std::optional<std::int64_t> door_area(const ProfiledWeb& web, const Door& d,
                                             std::int64_t max_steps = std::int64_t{1} << 26) {
  const auto fs = frontier_strips(web, d, max_steps);
  if (!fs) return std::nullopt;
  return fs->total();
}

/// Time (in cells) at which the contour has swept `c`: the larger of its two
/// door areas. Throws domain_error for cells on or below the initial profile.
inline std::optional<std::int64_t> area_time(const ProfiledWeb& web, const Cell& c,
                                             std::int64_t max_steps = std::int64_t{1} << 26) {
  const auto [d1, d2] = cell_doors(c);
  const auto a1 = door_area(web, d1, max_steps);
  const auto a2 = door_area(web, d2, max_steps);
  if (!a1 || !a2) return std::nullopt;
  const std::int64_t s = std::max(*a1, *a2);
  if (s <= 0) throw domain_error("area_time: cell lies on or below the initial profile");
  return s;
}

/// Area (in cells) enclosed under the frontier through the dual site (x,h),
/// i.e. of the vertical door just below it. (0, g(0)+1) gives 0.
inline std::optional<std::int64_t> area_time_at(const ProfiledWeb& web, coord x, coord h,
                                                std::int64_t max_steps = std::int64_t{1} << 26) {
  if (!is_dual({x, h})) throw domain_error("area_time_at: (x,h) must have odd parity");
  if (h <= web.profile().height(x)) throw domain_error("area_time_at: point on or below profile");
  const auto a = door_area(web, Door{x, h - 1, true}, max_steps);
  if (a && *a < 0) throw domain_error("area_time_at: point below the dual half of the profile");
  return a;
}

// ---------------------------------------------------------------------------
// Contour walk.

/// Streaming contour walk: each step sweeps one cell and lands on its exit door.
class ContourWalker {
 public:
  explicit ContourWalker(const ProfiledWeb& web) : web_(&web) {
    const bool r = square_rising(web, 0, 0);
    cell_ = {0, 0, r ? Tri::upper_left : Tri::lower_left};
    door_ = origin_door;
  }

  /// Sweep the next cell. Returns it; door() is then its exit door.
  const Cell& step() {
    if (started_) cell_ = cell_across(*web_, door_, cell_);
    started_ = true;
    const auto [d1, d2] = cell_doors(cell_);
    door_ = (d1 == door_) ? d2 : d1;
    ++cells_;
    return cell_;
  }

  const Cell& cell() const { return cell_; }
  const Door& door() const { return door_; }
  std::int64_t cells() const { return cells_; }

 private:
  const ProfiledWeb* web_;
  Cell cell_;
  Door door_;
  std::int64_t cells_ = 0;
  bool started_ = false;
};

struct TracePoint {
  double t, x, h;
};

struct TsrmTrace {
  double mesh = 1.0;
  std::vector<TracePoint> samples;   // physical units; samples[k] is the door after k cells
  std::vector<Cell> cells;           // cells[k] swept between samples[k] and samples[k+1]
  bool complete = true;              // false if a resource cap cut the walk short

  double cell_time() const { return 0.5 * std::pow(mesh, 1.5); }
  double duration() const { return samples.empty() ? 0.0 : samples.back().t; }
};

struct ContourLimits {
  std::int64_t max_cells = std::int64_t{1} << 31;
};

struct contour_resource_error : resource_error {
  contour_resource_error(const char* what, TsrmTrace t) : resource_error(what), partial(std::move(t)) {}
  TsrmTrace partial;
};

inline TracePoint door_point(const Door& d, std::int64_t k, double mesh) {
  const double unit = 0.5 * std::pow(mesh, 1.5);
  return {static_cast<double>(k) * unit, mesh * d.mid_x(), std::sqrt(mesh) * (d.mid_y() - 0.5)};
}

inline std::int64_t cells_for_time(double t, double mesh) {
  return static_cast<std::int64_t>(std::ceil(t / (0.5 * std::pow(mesh, 1.5)) - 1e-9));
}

/// Contour from the origin door until time t_budget (physical units).
inline TsrmTrace build_contour(const ProfiledWeb& web, double t_budget, double mesh = 1.0,
                               ContourLimits lim = {}) {
  if (!(t_budget > 0)) throw domain_error("build_contour: t_budget must be positive");
  if (!(mesh > 0)) throw domain_error("build_contour: mesh must be positive");
  TsrmTrace tr;
  tr.mesh = mesh;
  const std::int64_t n = cells_for_time(t_budget, mesh);
  const std::int64_t cap = std::min(n, lim.max_cells);
  tr.samples.reserve(static_cast<std::size_t>(cap + 1));
  tr.cells.reserve(static_cast<std::size_t>(cap));
  ContourWalker w(web);
  tr.samples.push_back(door_point(w.door(), 0, mesh));
  for (std::int64_t k = 1; k <= cap; ++k) {
    tr.cells.push_back(w.step());
    tr.samples.push_back(door_point(w.door(), k, mesh));
  }
  if (cap < n) {
    tr.complete = false;
    throw contour_resource_error("build_contour: cell budget exceeds max_cells", std::move(tr));
  }
  return tr;
}

/// Normative ordering: every cell of the window with 1 <= area_time <= max_area,
/// sorted by (area_time, x, row, tri). Cells whose frontier does not merge within
/// the step cap are skipped (they cannot have small area).
struct TimedCell {
  Cell cell;
  std::int64_t time;
};

inline std::vector<TimedCell> area_sorted_cells(const ProfiledWeb& web, Window w, std::int64_t max_area,
                                                std::int64_t max_steps = 4096) {
  std::vector<TimedCell> out;
  for (coord x = w.x_min; x < w.x_max; ++x)
    for (coord r = w.h_min; r < w.h_max; ++r) {
      const bool rising = square_rising(web, x, r);
      for (Tri t : rising ? std::array{Tri::upper_left, Tri::lower_right}
                          : std::array{Tri::lower_left, Tri::upper_right}) {
        const Cell c{x, r, t};
        const auto [d1, d2] = cell_doors(c);
        const auto a1 = door_area(web, d1, max_steps), a2 = door_area(web, d2, max_steps);
        if (!a1 || !a2) continue;
        const std::int64_t s = std::max(*a1, *a2);
        if (s >= 1 && s <= max_area) out.push_back({c, s});
      }
    }
  std::sort(out.begin(), out.end(), [](const TimedCell& a, const TimedCell& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.cell.x != b.cell.x) return a.cell.x < b.cell.x;
    if (a.cell.row != b.cell.row) return a.cell.row < b.cell.row;
    return a.cell.tri < b.cell.tri;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Observables on a trace.

struct LocalTimeProfile {
  double t = 0;
  coord strip_lo = 0;               // lattice strip of values[0]
  std::vector<std::int64_t> cells;  // cells swept per strip
  double mesh = 1.0;

  /// Continuum local time at strip s: sqrt(eps) * cells/2.
  double value(coord s) const {
    if (s < strip_lo || s >= strip_lo + static_cast<coord>(cells.size())) return 0.0;
    return std::sqrt(mesh) * 0.5 * static_cast<double>(cells[static_cast<std::size_t>(s - strip_lo)]);
  }
  double x_of(coord s) const { return mesh * (static_cast<double>(s) + 0.5); }
  /// Sum of L(x) dx; equals t up to floating rounding.
  double mass() const {
    double m = 0;
    for (auto c : cells) m += 0.5 * static_cast<double>(c);
    return m * std::pow(mesh, 1.5);
  }
};

inline LocalTimeProfile local_time_profile(const TsrmTrace& tr, double t) {
  if (t < 0 || t > tr.duration() * (1 + 1e-12)) throw domain_error("local_time_profile: t out of range");
  const double unit = tr.cell_time();
  auto k = static_cast<std::size_t>(std::floor(t / unit + 1e-9));
  k = std::min(k, tr.cells.size());
  LocalTimeProfile lp;
  lp.t = static_cast<double>(k) * unit;
  lp.mesh = tr.mesh;
  if (k == 0) return lp;
  coord lo = tr.cells[0].x, hi = lo;
  for (std::size_t i = 0; i < k; ++i) {
    lo = std::min(lo, tr.cells[i].x);
    hi = std::max(hi, tr.cells[i].x);
  }
  lp.strip_lo = lo;
  lp.cells.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  for (std::size_t i = 0; i < k; ++i) ++lp.cells[static_cast<std::size_t>(tr.cells[i].x - lo)];
  return lp;
}

/// First time the contour stands on the vertical line through x (physical).
inline std::optional<double> hitting_time(const TsrmTrace& tr, double x) {
  const double xl = std::round(x / tr.mesh) * tr.mesh;
  const double eps = 1e-9 * tr.mesh;
  for (const auto& s : tr.samples) {
    if ((xl >= 0 && s.x >= xl - eps) || (xl < 0 && s.x <= xl + eps)) return s.t;
  }
  return std::nullopt;
}

/// sigma for lattice column x_lat > 0 without walking: the area of the door
/// (x_lat, g(x_lat))-(x_lat, g(x_lat)+1), in cells.
inline std::optional<std::int64_t> lattice_sigma_cells(const ProfiledWeb& web, coord x_lat,
                                                        std::int64_t max_steps = std::int64_t{1} << 26) {
  return door_area(web, Door{x_lat, web.profile().height(x_lat), true}, max_steps);
}

/// X at time t by linear interpolation between door samples.
inline double position_at(const TsrmTrace& tr, double t) {
  const double unit = tr.cell_time();
  const double u = t / unit;
  if (u <= 0) return tr.samples.front().x;
  const auto k = static_cast<std::size_t>(u);
  if (k + 1 >= tr.samples.size()) return tr.samples.back().x;
  const double f = u - static_cast<double>(k);
  return tr.samples[k].x * (1 - f) + tr.samples[k + 1].x * f;
}

struct VariationPoint {
  int level;
  double value;
};

/// Sum of |dX|^p over dyadic partitions of [0, duration] at each level.
inline std::vector<VariationPoint> p_variation(const TsrmTrace& tr, double p, const std::vector<int>& levels) {
  if (tr.samples.size() < 2) throw domain_error("p_variation: empty trace");
  if (!(p > 0)) throw domain_error("p_variation: p must be positive");
  std::vector<VariationPoint> out;
  const double T = tr.duration();
  for (int lv : levels) {
    const std::int64_t n = std::int64_t{1} << lv;
    double sum = 0, prev = position_at(tr, 0);
    for (std::int64_t i = 1; i <= n; ++i) {
      const double cur = position_at(tr, T * static_cast<double>(i) / static_cast<double>(n));
      sum += std::pow(std::abs(cur - prev), p);
      prev = cur;
    }
    out.push_back({lv, sum});
  }
  return out;
}

/// Position and running extremes of the contour at a given time, computed by
/// walking without storing the trace.
struct ContourSnapshot {
  double t = 0, x = 0, h = 0;
  double sup_x = 0, inf_x = 0, sup_h = 0, inf_h = 0;
};

/// Snapshots at increasing physical times.
inline std::vector<ContourSnapshot> walk_snapshots(const ProfiledWeb& web, const std::vector<double>& times,
                                                   double mesh) {
  if (!std::is_sorted(times.begin(), times.end())) throw domain_error("walk_snapshots: times must increase");
  std::vector<ContourSnapshot> out;
  out.reserve(times.size());
  ContourWalker w(web);
  ContourSnapshot cur;
  const TracePoint p0 = door_point(w.door(), 0, mesh);
  cur.x = cur.sup_x = cur.inf_x = p0.x;
  cur.h = cur.sup_h = cur.inf_h = p0.h;
  const double sx = mesh, sh = std::sqrt(mesh);
  for (double t : times) {
    if (t < 0) throw domain_error("walk_snapshots: negative time");
    const std::int64_t target = static_cast<std::int64_t>(std::floor(t / (0.5 * std::pow(mesh, 1.5)) + 1e-9));
    while (w.cells() < target) {
      w.step();
      const Door& d = w.door();
      const double x = sx * d.mid_x(), h = sh * (d.mid_y() - 0.5);
      cur.sup_x = std::max(cur.sup_x, x);
      cur.inf_x = std::min(cur.inf_x, x);
      cur.sup_h = std::max(cur.sup_h, h);
      cur.inf_h = std::min(cur.inf_h, h);
    }
    const TracePoint p = door_point(w.door(), w.cells(), mesh);
    cur.t = p.t;
    cur.x = p.x;
    cur.h = p.h;
    out.push_back(cur);
  }
  return out;
}

inline ContourSnapshot walk_to(const ProfiledWeb& web, double t, double mesh) {
  return walk_snapshots(web, {t}, mesh).front();
}

}  // namespace tsrm
