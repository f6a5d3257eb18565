#pragma once
// Discrete Brownian web on Z^2.
//
// Coordinates are (x, h): x is the web-time axis, h the height. Sites with
// x+h even are forward (primal) vertices and carry an arrow a(x,h) in {+1,-1};
// the forward step is (x,h) -> (x+1, h+a(x,h)). Sites with x+h odd are dual
// vertices; the dual step is (x,h) -> (x-1, h - a(x-1,h)). With this rule every
// unit square [x,x+1]x[r,r+1] carries exactly one diagonal, primal or dual, so
// no two edges of the picture ever cross.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsrm/errors.hpp"
#include "tsrm/rng.hpp"

namespace tsrm {

using coord = std::int64_t;

struct Site {
  coord x = 0;
  coord h = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

constexpr bool is_primal(Site s) { return ((s.x + s.h) & 1) == 0; }
constexpr bool is_dual(Site s) { return !is_primal(s); }

struct SiteHash {
  std::size_t operator()(Site s) const noexcept {
    return static_cast<std::size_t>(detail::mix64(detail::mix64(static_cast<std::uint64_t>(s.x)) +
                                                  static_cast<std::uint64_t>(s.h)));
  }
};

struct Window {
  coord x_min = 0, x_max = 0;
  coord h_min = 0, h_max = 0;

  static constexpr Window unbounded() {
    constexpr coord big = coord{1} << 40;
    return {-big, big, -big, big};
  }
  constexpr bool contains(Site s) const {
    return s.x >= x_min && s.x <= x_max && s.h >= h_min && s.h <= h_max;
  }
  void validate() const {
    if (!(x_min < x_max && h_min < h_max)) throw domain_error("window: need x_min < x_max and h_min < h_max");
  }
};

/// Anything that can answer arrow queries at primal sites.
template <class F>
concept ArrowSource = requires(const F& f, Site s) {
  { f.arrow(s) } -> std::convertible_to<int>;
  { f.window() } -> std::convertible_to<Window>;
};

/// iid fair arrows, materialized lazily from a keyed hash of the site.
/// Immutable after construction apart from test overrides; safe to share
/// between threads once overrides are set.
class ArrowField {
 public:
  ArrowField(StreamSpec spec, Window w) : spec_(spec), window_(w) {
    window_.validate();
    key_ = detail::mix64(spec.master_seed ^ detail::mix64(spec.stream_id ^ 0xA5A5A5A5DEADBEEFull));
  }

  /// Fixture: every arrow equal to `sign`.
  static ArrowField constant(Window w, int sign) {
    ArrowField f(StreamSpec{}, w);
    f.constant_ = sign > 0 ? 1 : -1;
    return f;
  }

  const StreamSpec& spec() const { return spec_; }
  const Window& window() const { return window_; }

  void set_override(Site s, int sign) {
    require_primal(s);
    overrides_[s] = sign > 0 ? 1 : -1;
  }

  int arrow(Site s) const {
    require_primal(s);
    if (!overrides_.empty()) {
      if (auto it = overrides_.find(s); it != overrides_.end()) return it->second;
    }
    if (constant_ != 0) return constant_;
    return hashed(s.x, s.h);
  }

  /// Arrow without parity/override checks; hot path for contour walks.
  int hashed(coord x, coord h) const {
    const std::uint64_t z =
        detail::mix64(detail::mix64(key_ ^ static_cast<std::uint64_t>(x)) + static_cast<std::uint64_t>(h));
    return (z >> 63) ? 1 : -1;
  }

  bool plain() const { return overrides_.empty() && constant_ == 0; }

  static void require_primal(Site s) {
    if (!is_primal(s)) throw domain_error("arrow requested at a dual-parity site");
  }

 private:
  StreamSpec spec_;
  Window window_;
  std::uint64_t key_ = 0;
  int constant_ = 0;
  std::unordered_map<Site, int, SiteHash> overrides_;
};

/// A fully materialized arrow configuration on a window (primal sites only).
class DenseArrows {
 public:
  explicit DenseArrows(Window w)
      : window_(w), nx_(w.x_max - w.x_min + 1), nh_(w.h_max - w.h_min + 1),
        bits_(static_cast<std::size_t>(nx_ * nh_), 0) {
    window_.validate();
  }

  template <ArrowSource F>
  static DenseArrows materialize(const F& f, Window w) {
    DenseArrows d(w);
    for (coord x = w.x_min; x <= w.x_max; ++x)
      for (coord h = w.h_min; h <= w.h_max; ++h)
        if (is_primal({x, h})) d.set({x, h}, f.arrow({x, h}));
    return d;
  }

  const Window& window() const { return window_; }
  int arrow(Site s) const {
    if (!window_.contains(s)) throw domain_error("dense arrow lookup outside window");
    ArrowField::require_primal(s);
    return bits_[index(s)];
  }
  void set(Site s, int sign) { bits_[index(s)] = static_cast<std::int8_t>(sign > 0 ? 1 : -1); }

  friend bool operator==(const DenseArrows& a, const DenseArrows& b) {
    return a.window_.x_min == b.window_.x_min && a.window_.x_max == b.window_.x_max &&
           a.window_.h_min == b.window_.h_min && a.window_.h_max == b.window_.h_max && a.bits_ == b.bits_;
  }

 private:
  std::size_t index(Site s) const {
    return static_cast<std::size_t>((s.x - window_.x_min) * nh_ + (s.h - window_.h_min));
  }
  Window window_;
  coord nx_, nh_;
  std::vector<std::int8_t> bits_;
};

/// The dual configuration seen in the mirror x -> 1-x, re-expressed as a
/// primal arrow field: the dual vertex (x,h) stepping to (x-1, h+s) becomes the
/// primal vertex (1-x, h) with arrow s. Dual edges are computed with the dual
/// step rule, so applying the map twice recovers the original arrows on the
/// window shrunk by one column on each side.
template <ArrowSource F>
DenseArrows mirror_dual(const F& f, Window w) {
  const Window out{1 - w.x_max, -w.x_min, w.h_min, w.h_max};
  DenseArrows d(out);
  for (coord x = w.x_min + 1; x <= w.x_max; ++x)
    for (coord h = w.h_min; h <= w.h_max; ++h) {
      if (!is_dual({x, h})) continue;
      const coord target = h - f.arrow({x - 1, h});
      d.set({1 - x, h}, static_cast<int>(target - h));
    }
  return d;
}

enum class Direction { forward, backward };

struct LatticePath {
  Direction direction = Direction::forward;
  coord x_start = 0;
  std::vector<coord> heights;  // forward: x_start, x_start+1, ...; backward: x_start, x_start-1, ...

  coord x_at(std::size_t k) const {
    return direction == Direction::forward ? x_start + static_cast<coord>(k) : x_start - static_cast<coord>(k);
  }
  coord x_end() const { return x_at(heights.size() - 1); }
  bool covers(coord x) const {
    if (heights.empty()) return false;
    return direction == Direction::forward ? (x >= x_start && x <= x_end()) : (x <= x_start && x >= x_end());
  }
  coord at(coord x) const {
    if (!covers(x)) throw domain_error("path does not cover column " + std::to_string(x));
    return heights[static_cast<std::size_t>(direction == Direction::forward ? x - x_start : x_start - x)];
  }
};

template <ArrowSource F>
LatticePath forward_path(const F& f, Site start, coord x_stop) {
  const Window w = f.window();
  if (!w.contains(start)) throw domain_error("forward_path: start outside window");
  if (!is_primal(start)) throw domain_error("forward_path: start must have even parity");
  if (x_stop > w.x_max) throw domain_error("forward_path: x_stop beyond window");
  if (x_stop < start.x) throw domain_error("forward_path: x_stop before start");
  LatticePath p{Direction::forward, start.x, {}};
  p.heights.reserve(static_cast<std::size_t>(x_stop - start.x + 1));
  coord h = start.h;
  p.heights.push_back(h);
  for (coord x = start.x; x < x_stop; ++x) {
    h += f.arrow({x, h});
    p.heights.push_back(h);
  }
  return p;
}

template <ArrowSource F>
LatticePath backward_path(const F& f, Site start, coord x_stop) {
  const Window w = f.window();
  if (!w.contains(start)) throw domain_error("backward_path: start outside window");
  if (!is_dual(start)) throw domain_error("backward_path: start must have odd parity");
  if (x_stop < w.x_min) throw domain_error("backward_path: x_stop beyond window");
  if (x_stop > start.x) throw domain_error("backward_path: x_stop after start");
  LatticePath p{Direction::backward, start.x, {}};
  p.heights.reserve(static_cast<std::size_t>(start.x - x_stop + 1));
  coord h = start.h;
  p.heights.push_back(h);
  for (coord x = start.x; x > x_stop; --x) {
    h -= f.arrow({x - 1, h});
    p.heights.push_back(h);
  }
  return p;
}

/// First column, in the direction of travel, where the two paths agree.
inline std::optional<coord> coalescence_x(const LatticePath& p, const LatticePath& q) {
  if (p.direction != q.direction) throw domain_error("coalescence_x: paths have different directions");
  if (p.heights.empty() || q.heights.empty()) return std::nullopt;
  if (p.direction == Direction::forward) {
    const coord lo = std::max(p.x_start, q.x_start), hi = std::min(p.x_end(), q.x_end());
    for (coord x = lo; x <= hi; ++x)
      if (p.at(x) == q.at(x)) return x;
  } else {
    const coord hi = std::min(p.x_start, q.x_start), lo = std::max(p.x_end(), q.x_end());
    for (coord x = hi; x >= lo; --x)
      if (p.at(x) == q.at(x)) return x;
  }
  return std::nullopt;
}

enum class ProfileKind { stationary, flat };

/// Initial profile Gamma_0: a two-sided path g with g(0) = 0 and g(x) = x mod 2.
/// Right of the origin it is a forward path of the web, left of it the dual
/// path q = g + 1 is a backward path; the vertical door (0,0)-(0,1) joins them.
/// Stationary profiles are simple random walks drawn from dedicated streams
/// (independent of the arrows); the flat profile is the zigzag |x| mod 2.
/// Heights are generated lazily, so a profile is not safe to share between
/// threads unless it has been pre-extended with reserve().
class InitialProfile {
 public:
  InitialProfile(ProfileKind kind, StreamSpec field_spec)
      : kind_(kind),
        right_stream_({field_spec.master_seed, substream(field_spec.stream_id, 0x5052u)}),
        left_stream_({field_spec.master_seed, substream(field_spec.stream_id, 0x504Cu)}) {
    right_.push_back(0);
    left_.push_back(0);
  }

  ProfileKind kind() const { return kind_; }

  /// g(x): the primal-parity profile height.
  coord height(coord x) const {
    if (kind_ == ProfileKind::flat) return x >= 0 ? (x & 1) : ((-x) & 1);
    if (x >= 0) {
      extend(right_, right_stream_, static_cast<std::size_t>(x));
      return right_[static_cast<std::size_t>(x)];
    }
    extend(left_, left_stream_, static_cast<std::size_t>(-x));
    return left_[static_cast<std::size_t>(-x)];
  }

  /// q(x) = g(x) + 1: the dual-parity part of the profile for x <= 0.
  coord dual_height(coord x) const { return height(x) + 1; }

  void reserve(coord x_lo, coord x_hi) const {
    height(x_lo);
    height(x_hi);
  }

 private:
  static void extend(std::vector<coord>& v, RandomStream& s, std::size_t upto) {
    while (v.size() <= upto) v.push_back(v.back() + s.next_bit());
  }

  ProfileKind kind_;
  mutable RandomStream right_stream_, left_stream_;
  mutable std::vector<coord> right_, left_;
};

/// Arrow field together with an initial profile. Arrows along the profile are
/// forced so that g (x >= 0) is a forward path and q (x <= 0) a backward path;
/// all other arrows are those of the underlying field. This has the same law
/// as reading the profile off an unconditioned web, because the two profile
/// halves only ever inspect the arrows they force.
class ProfiledWeb {
 public:
  ProfiledWeb(ArrowField field, ProfileKind kind)
      : field_(std::move(field)), profile_(kind, field_.spec()) {}

  const ArrowField& field() const { return field_; }
  const InitialProfile& profile() const { return profile_; }
  Window window() const { return field_.window(); }

  int arrow(Site s) const {
    ArrowField::require_primal(s);
    return arrow_unchecked(s.x, s.h);
  }

  int arrow_unchecked(coord x, coord h) const {
    if (x >= 0) {
      const coord g = profile_.height(x);
      if (h == g) return static_cast<int>(profile_.height(x + 1) - g);
    } else {
      const coord q_next = profile_.dual_height(x + 1);
      if (h == q_next) return static_cast<int>(q_next - profile_.dual_height(x));
    }
    return field_.plain() ? field_.hashed(x, h) : field_.arrow({x, h});
  }

 private:
  ArrowField field_;
  InitialProfile profile_;
};

/// The profile over [x_lo, x_hi] as a forward-indexed path of g.
inline LatticePath initial_profile(const ProfiledWeb& web, coord x_lo, coord x_hi) {
  if (x_lo > x_hi) throw domain_error("initial_profile: empty range");
  LatticePath p{Direction::forward, x_lo, {}};
  for (coord x = x_lo; x <= x_hi; ++x) p.heights.push_back(web.profile().height(x));
  return p;
}

/// Dual path from (x_anchor, g(x_anchor)+1) run left until it glues onto the
/// dual half of the profile (first x <= 0 with gap q - g equal to 1). On
/// [0, x_anchor] it is reflected on g by planarity. Returns nullopt if it has
/// not glued after max_len steps.
inline std::optional<LatticePath> reflected_coalescing_dual(const ProfiledWeb& web, coord x_anchor,
                                                            std::size_t max_len = 1u << 26) {
  if (x_anchor < 0) throw domain_error("reflected_coalescing_dual: anchor must be >= 0");
  const auto& g = web.profile();
  LatticePath p{Direction::backward, x_anchor, {}};
  coord x = x_anchor, h = g.height(x_anchor) + 1;
  p.heights.push_back(h);
  while (!(x <= 0 && h == g.dual_height(x))) {
    if (p.heights.size() > max_len) return std::nullopt;
    h -= web.arrow_unchecked(x - 1, h);
    --x;
    p.heights.push_back(h);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Exhaustive planarity checks on a window.

struct Segment {
  Site a, b;
};

/// All forward edges starting in the window and all dual edges starting in it.
template <ArrowSource F>
void collect_edges(const F& f, Window w, std::vector<Segment>& forward, std::vector<Segment>& dual) {
  for (coord x = w.x_min; x <= w.x_max; ++x)
    for (coord h = w.h_min; h <= w.h_max; ++h) {
      if (is_primal({x, h})) {
        if (x < w.x_max) forward.push_back({{x, h}, {x + 1, h + f.arrow({x, h})}});
      } else if (x > w.x_min) {
        dual.push_back({{x, h}, {x - 1, h - f.arrow({x - 1, h})}});
      }
    }
}

/// Proper crossing (interiors intersect in a single point, no shared endpoint).
inline bool segments_cross(const Segment& s, const Segment& t) {
  auto orient = [](Site p, Site q, Site r) {
    const coord v = (q.x - p.x) * (r.h - p.h) - (q.h - p.h) * (r.x - p.x);
    return (v > 0) - (v < 0);
  };
  const int o1 = orient(s.a, s.b, t.a), o2 = orient(s.a, s.b, t.b);
  const int o3 = orient(t.a, t.b, s.a), o4 = orient(t.a, t.b, s.b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

/// Number of crossing edge pairs among forward/forward, dual/dual and
/// forward/dual edges of the window (brute force over all pairs).
template <ArrowSource F>
std::size_t count_crossings(const F& f, Window w) {
  std::vector<Segment> fw, du;
  collect_edges(f, w, fw, du);
  std::vector<Segment> all = fw;
  all.insert(all.end(), du.begin(), du.end());
  std::size_t n = 0;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (segments_cross(all[i], all[j])) ++n;
  return n;
}

/// CSV dump (x,h,arrow) of every primal site of the window.
template <ArrowSource F>
void dump_arrows_csv(const F& f, Window w, std::ostream& os) {
  os << "x,h,arrow\n";
  for (coord x = w.x_min; x <= w.x_max; ++x)
    for (coord h = w.h_min; h <= w.h_max; ++h)
      if (is_primal({x, h})) os << x << ',' << h << ',' << f.arrow({x, h}) << '\n';
}

inline void dump_path_csv(const LatticePath& p, std::ostream& os) {
  os << "x,h\n";
  for (std::size_t k = 0; k < p.heights.size(); ++k) os << p.x_at(k) << ',' << p.heights[k] << '\n';
}

}  // namespace tsrm
