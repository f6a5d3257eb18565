// tsrm: command-line driver for the lattice web, the contour walk and the
// continuum estimators. Every run writes CSV files plus manifest.json into --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsrm/area_laws.hpp"
#include "tsrm/config.hpp"
#include "tsrm/csv.hpp"
#include "tsrm/estimators.hpp"
#include "tsrm/experiments.hpp"
#include "tsrm/invariants.hpp"
#include "tsrm/lattice_web.hpp"
#include "tsrm/samplers.hpp"
#include "tsrm/stats.hpp"
#include "tsrm/tsrm_contour.hpp"

#ifndef TSRM_VERSION
#define TSRM_VERSION "dev"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tsrm;

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Run {
 public:
  Run(std::string sub, Config cfg, fs::path out)
      : sub_(std::move(sub)), cfg_(std::move(cfg)), out_(std::move(out)), started_(utc_now()),
        t0_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec || !fs::is_directory(out_)) throw io_error("cannot create output directory " + out_.string());
  }

  const Config& cfg() const { return cfg_; }
  json& schedule() { return schedule_; }

  void emit(const std::string& name, const CsvTable& t) {
    const std::string text = t.str();
    write_text_file((out_ / name).string(), text);
    outputs_.push_back({{"file", name}, {"rows", t.rows().size()}, {"fnv1a64", fnv1a64_hex(text)}});
  }

  void lap(const std::string& what) {
    const auto now = std::chrono::steady_clock::now();
    timings_[what] = std::chrono::duration<double>(now - lap_).count();
    lap_ = now;
  }

  void finish() {
    json m;
    m["subcommand"] = sub_;
    m["tool_version"] = TSRM_VERSION;
    m["master_seed"] = cfg_.seed;
    json snap = json::object();
    for (const auto& [sec, kv] : config_snapshot(cfg_)) snap[sec] = kv;
    m["config_snapshot"] = snap;
    m["schedule"] = schedule_;
    m["started"] = started_;
    m["finished"] = utc_now();
    timings_["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    m["timings_s"] = timings_;
    m["outputs"] = outputs_;
    write_text_file((out_ / "manifest.json").string(), m.dump(2) + "\n");
  }

 private:
  std::string sub_;
  Config cfg_;
  fs::path out_;
  std::string started_;
  std::chrono::steady_clock::time_point t0_, lap_ = std::chrono::steady_clock::now();
  json schedule_ = json::object(), timings_ = json::object(), outputs_ = json::array();
};

/// "a:b:step" -> a, a+step, ..., b (inclusive up to rounding).
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      parts.push_back(parse_number(item));
    } catch (const io_error&) {
      throw usage_error("bad grid '" + s + "': expected a:b:step");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) throw usage_error("bad grid '" + s + "': expected a:b:step");
  std::vector<double> g;
  const auto n = static_cast<int>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (int i = 0; i <= n; ++i) g.push_back(parts[0] + i * parts[2]);
  return g;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(parse_number(item));
    } catch (const io_error&) {
      throw usage_error("bad list '" + s + "'");
    }
  }
  if (v.empty()) throw usage_error("empty list");
  return v;
}

/// Counts like 1e6 are accepted; they must be positive integers.
std::int64_t parse_count(const std::string& s, const char* what) {
  double v = 0;
  try {
    v = parse_number(s);
  } catch (const io_error&) {
    throw usage_error(std::string(what) + ": expected a count, got '" + s + "'");
  }
  if (!(v >= 1) || v != std::floor(v) || v > 9e15) throw usage_error(std::string(what) + ": expected a positive integer");
  return static_cast<std::int64_t>(v);
}

ProfileKind parse_profile(const std::string& s) {
  if (s == "stationary") return ProfileKind::stationary;
  if (s == "flat") return ProfileKind::flat;
  throw usage_error("profile must be stationary or flat");
}

struct Common {
  std::string config_path, out = "out", profile;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> dt, mesh, t_budget;
  std::string replicas;
  std::optional<int> levels;

  Config resolve() const {
    Config c = config_path.empty() ? Config{} : load_config(config_path);
    if (seed) c.seed = *seed;
    if (threads) c.threads = *threads;
    if (dt) c.sde.dt = *dt;
    if (mesh) c.mesh = *mesh;
    if (t_budget) c.t_budget = *t_budget;
    if (levels) c.levels = *levels;
    if (!replicas.empty()) c.replicas = parse_count(replicas, "--replicas");
    if (!profile.empty()) c.profile = parse_profile(profile);
    validate_config(c);
    return c;
  }
};

// ---------------------------------------------------------------------------

int cmd_web(const Common& co, int half) {
  Run run("web", co.resolve(), co.out);
  const Config& c = run.cfg();
  const ProfiledWeb web(ArrowField({c.seed, 0}, Window::unbounded()), c.profile);
  const Window w{-half, half, -half, half};
  run.schedule()["window"] = {w.x_min, w.x_max, w.h_min, w.h_max};

  CsvTable arrows({"x", "h", "arrow"});
  for (coord x = w.x_min; x <= w.x_max; ++x)
    for (coord h = w.h_min; h <= w.h_max; ++h)
      if (is_primal({x, h})) arrows.row(x, h, web.arrow({x, h}));
  run.emit("arrows.csv", arrows);

  CsvTable paths({"path", "direction", "x", "h"});
  std::int64_t id = 0;
  for (coord h = w.h_min; h <= w.h_max; ++h) {
    if (is_primal({w.x_min, h})) {
      const auto p = forward_path(web, {w.x_min, h}, w.x_max);
      for (std::size_t k = 0; k < p.heights.size(); ++k) paths.row(id, "forward", p.x_at(k), p.heights[k]);
      ++id;
    }
    if (is_dual({w.x_max, h})) {
      const auto p = backward_path(web, {w.x_max, h}, w.x_min);
      for (std::size_t k = 0; k < p.heights.size(); ++k) paths.row(id, "dual", p.x_at(k), p.heights[k]);
      ++id;
    }
  }
  run.emit("paths.csv", paths);

  CsvTable prof({"x", "g"});
  for (coord x = w.x_min; x <= w.x_max; ++x) prof.row(x, web.profile().height(x));
  run.emit("profile.csv", prof);

  const std::size_t crossings = count_crossings(web, w);
  run.lap("web");
  std::cout << "web: " << id << " paths on [" << w.x_min << "," << w.x_max << "]^2, crossings " << crossings << "\n";
  run.finish();
  return crossings == 0 ? 0 : 2;
}

int cmd_contour(const Common& co, std::int64_t max_cells) {
  Config c = co.resolve();
  if (max_cells > 0) c.max_cells = max_cells;
  Run run("contour", c, co.out);
  const ProfiledWeb web(ArrowField({c.seed, 0}, Window::unbounded()), c.profile);
  run.schedule()["cells"] = cells_for_time(c.t_budget, c.mesh);
  try {
    const TsrmTrace tr = build_contour(web, c.t_budget, c.mesh, {c.max_cells});
    run.lap("walk");
    run.emit("trace.csv", trace_table(tr));
    run.emit("local_time.csv", local_time_table(local_time_profile(tr, tr.duration())));
    const auto& e = tr.samples.back();
    std::cout << "contour: " << tr.cells.size() << " cells, X=" << format_number(e.x) << " H=" << format_number(e.h)
              << " t=" << format_number(e.t) << "\n";
    run.finish();
    return 0;
  } catch (const contour_resource_error& e) {
    run.schedule()["complete"] = false;
    run.emit("trace_partial.csv", trace_table(e.partial));
    run.finish();
    throw;
  }
}

CsvTable estimate_table(const std::vector<double>& grid, const std::vector<Estimate>& est, const char* name) {
  CsvTable t({name, "p_hat", "stderr", "ci_lo", "ci_hi", "censored_fraction", "method"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.row(grid[i], est[i].value, est[i].stderr_, est[i].ci_lo, est[i].ci_hi, est[i].censored_fraction,
          method_name(est[i].method));
  return t;
}

CsvTable fit_table(const TailFit& f, double reference) {
  CsvTable t({"model", "slope", "slope_lo", "slope_hi", "log_coefficient", "intercept", "reference"});
  t.row(tail_model_name(f.model), f.slope, f.slope_lo, f.slope_hi, f.log_coefficient, f.intercept, reference);
  return t;
}

json level_schedule(const std::vector<double>& grid, const std::vector<Estimate>& est, int m) {
  json s = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i)
    s.push_back({{"abscissa", grid[i]}, {"levels", m}, {"level_probabilities", est[i].level_probabilities}});
  return s;
}

int cmd_tail_x(const Common& co, const std::string& grid_s) {
  Run run("tail-x", co.resolve(), co.out);
  const Config& c = run.cfg();
  const auto grid = parse_grid(grid_s);
  std::vector<Estimate> est;
  std::vector<TailPoint> pts;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SigmaTailSplitting m{grid[i], c.levels, c.sde, 1.0};
    est.push_back(run_splitting(m, c.replicas, substream(c.seed, i), c.threads));
    pts.push_back({grid[i], est.back().value, est.back().stderr_});
    std::cerr << "tail-x: x=" << grid[i] << " p=" << est.back().value << "\n";
  }
  run.lap("splitting");
  run.schedule()["levels"] = level_schedule(grid, est, c.levels);
  run.emit("tail_x.csv", estimate_table(grid, est, "x"));
  const double ref = 2 * kappa();
  if (grid.size() >= 3) {
    const TailFit f = fit_tail(pts, TailModel::x_cubed, grid.size() >= 4);
    run.emit("tail_x_fit.csv", fit_table(f, ref));
    std::cout << "tail-x: slope " << format_number(f.slope) << " [" << format_number(f.slope_lo) << ", "
              << format_number(f.slope_hi) << "], 2kappa = " << format_number(ref) << "\n";
  }
  run.finish();
  return 0;
}

int cmd_tail_h(const Common& co, const std::string& grid_s) {
  Run run("tail-h", co.resolve(), co.out);
  const Config& c = run.cfg();
  const auto grid = parse_grid(grid_s);
  std::vector<Estimate> est;
  std::vector<TailPoint> pts;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    HeightTailSplitting m{grid[i], c.levels, c.sde, 1.0};
    Estimate e = run_splitting(m, c.replicas, substream(c.seed, i), c.threads);
    // both signs of H: P(inf H <= -h) + P(sup H >= h) by symmetry
    e.value *= 2;
    e.stderr_ *= 2;
    e.ci_lo *= 2;
    e.ci_hi = std::min(1.0, 2 * e.ci_hi);
    est.push_back(e);
    pts.push_back({grid[i], e.value, e.stderr_});
    std::cerr << "tail-h: h=" << grid[i] << " p=" << e.value << "\n";
  }
  run.lap("splitting");
  run.schedule()["levels"] = level_schedule(grid, est, c.levels);
  CsvTable t = estimate_table(grid, est, "h");
  CsvTable rates({"h", "rate"});
  double lo = INFINITY, hi = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = -std::log(est[i].value) / std::pow(grid[i], 1.5);
    rates.row(grid[i], r);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  run.emit("tail_h.csv", t);
  run.emit("tail_h_rate.csv", rates);
  std::cout << "tail-h: rate -log p / h^1.5 in [" << format_number(lo) << ", " << format_number(hi)
            << "], max/min " << format_number(hi / lo) << "\n";
  run.finish();
  return 0;
}

int cmd_tail_h_flat(const Common& co, const std::string& grid_s, bool mc) {
  Run run("tail-h-flat", co.resolve(), co.out);
  const Config& c = run.cfg();
  const auto grid = parse_grid(grid_s);
  CsvTable t({"h", "x", "p_quadrature", "x_neg_log_p", "p_mc", "stderr_mc"});
  std::vector<TailPoint> pts;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = grid[i], x = 1 / (h * h * h);
    const double p = convolution_sum_tail(x);
    double pm = NAN, se = NAN;
    if (mc) {
      const Estimate e = run_direct(
          [h](RandomStream& s) { return sample_flat_height_area(h, s) <= 1.0 ? Outcome::hit : Outcome::miss; },
          c.replicas, substream(c.seed, i), c.threads);
      pm = e.value;
      se = e.stderr_;
    }
    t.row(h, x, p, -x * std::log(p), pm, se);
    pts.push_back({h, p, 0.0});
  }
  run.lap("quadrature");
  run.emit("tail_h_flat.csv", t);
  if (grid.size() >= 3) {
    const TailFit f = fit_tail(pts, TailModel::h_cubed, grid.size() >= 4);
    run.emit("tail_h_flat_fit.csv", fit_table(f, 8.0 / 9.0));
    std::cout << "tail-h-flat: slope " << format_number(f.slope) << ", 8/9 = " << format_number(8.0 / 9.0) << "\n";
  }
  run.finish();
  return 0;
}

int cmd_area_law(const Common& co) {
  Run run("area-law", co.resolve(), co.out);
  const Config& c = run.cfg();
  const AreaLawTable tab(c.a_min, c.a_max, static_cast<std::size_t>(c.points));
  CsvTable t({"a", "cdf", "pdf"});
  for (const auto& r : tab.rows()) t.row(r.a, r.cdf, r.pdf);
  run.lap("table");
  run.emit("area_law.csv", t);
  std::cout << "area-law: " << tab.rows().size() << " rows, Z = " << format_number(tab.normalization())
            << ", median = " << format_number(absorption_area_quantile(0.5)) << "\n";
  run.finish();
  return 0;
}

int cmd_kappa(const Common& co) {
  Run run("kappa", co.resolve(), co.out);
  const RootReport nr = first_airy_prime_zero();
  const double a1 = nr.root, k = 2 * std::pow(std::fabs(a1), 3) / 27;
  std::cout.precision(17);
  std::cout << "a1' = " << a1 << "  (newton, " << nr.iterations << " iterations, |Ai'| = " << nr.residual << ")\n"
            << "kappa = " << k << "\n2kappa = " << 2 * k << "\n(2kappa)^(-1/3) = " << std::pow(2 * k, -1.0 / 3)
            << "\n\nODE step   root                    |root - newton|\n";
  CsvTable t({"step", "root", "abs_diff"});
  for (double h = 0.25; h > 1e-3; h *= 0.5) {
    const double r = airy_prime_zero_at_step(h);
    t.row(h, r, std::fabs(r - a1));
    std::printf("%-10.6g %-23.17g %.3g\n", h, r, std::fabs(r - a1));
  }
  run.lap("roots");
  run.emit("kappa_convergence.csv", t);
  CsvTable s({"a1_prime", "kappa", "two_kappa", "lil_constant"});
  s.row(a1, k, 2 * k, std::pow(2 * k, -1.0 / 3));
  run.emit("kappa.csv", s);
  run.finish();
  return 0;
}

int cmd_pvar(const Common& co, const std::string& traces_s, const std::string& levels_s, const std::string& ps_s) {
  Run run("pvar", co.resolve(), co.out);
  const Config& c = run.cfg();
  const auto n = parse_count(traces_s, "--traces");
  std::vector<int> levels;
  for (double v : parse_list(levels_s)) levels.push_back(static_cast<int>(v));
  const auto ps = parse_list(ps_s);
  run.schedule()["levels"] = levels;
  CsvTable all({"trace", "p", "level", "variation"});
  CsvTable summary({"p", "level", "mean_variation"});
  for (double p : ps) {
    const auto v = lattice_p_variation(static_cast<std::size_t>(n), c.seed, c.mesh, c.profile, p, levels, c.t_budget,
                                       c.threads);
    for (std::size_t li = 0; li < levels.size(); ++li) {
      double m = 0;
      for (std::size_t r = 0; r < v.size(); ++r) {
        all.row(static_cast<std::int64_t>(r), p, levels[li], v[r][li].value);
        m += v[r][li].value;
      }
      m /= static_cast<double>(v.size());
      summary.row(p, levels[li], m);
      std::cout << "pvar: p=" << format_number(p) << " level " << levels[li] << " mean " << format_number(m) << "\n";
    }
  }
  run.lap("traces");
  run.emit("pvar.csv", all);
  run.emit("pvar_summary.csv", summary);
  run.finish();
  return 0;
}

int cmd_lil(const Common& co, const std::string& traces_s, int first, int decades) {
  Run run("lil", co.resolve(), co.out);
  const Config& c = run.cfg();
  const auto n = parse_count(traces_s, "--traces");
  if (first < 1) throw usage_error("--first-decade must be >= 1");
  run.schedule()["decades"] = {first, first + decades - 1};
  const auto series = lattice_lil_series(static_cast<std::size_t>(n), c.seed, c.mesh, c.profile, first, decades, c.threads);
  const LilReport rep = lil_band_report(series, decades);
  run.lap("traces");
  CsvTable t({"trace", "t", "sup_x", "x_statistic", "sup_abs_h", "h_statistic"});
  for (std::size_t r = 0; r < series.size(); ++r)
    for (std::size_t k = 0; k < series[r].t.size(); ++k) {
      const auto& s = series[r];
      t.row(static_cast<std::int64_t>(r), s.t[k], s.sup_x[k], lil_x_statistic(s.t[k], s.sup_x[k]), s.sup_abs_h[k],
            lil_h_statistic(s.t[k], s.sup_abs_h[k]));
    }
  run.emit("lil.csv", t);
  std::cout << "lil: " << rep.inside << "/" << rep.total << " trace-decades in [" << format_number(rep.band_lo) << ", "
            << format_number(rep.band_hi) << "] (" << format_number(rep.fraction_inside) << ")\n";
  run.finish();
  return 0;
}

int cmd_selftest(const Common& co, int windows) {
  Run run("selftest", co.resolve(), co.out);
  InvariantOptions opt;
  opt.seed = run.cfg().seed;
  opt.windows = windows;
  const InvariantReport r = run_invariant_suite(opt);
  run.lap("suite");
  CsvTable t({"check", "failures"});
  t.row("crossing", r.crossing_failures);
  t.row("coalescence", r.coalescence_failures);
  t.row("dual_of_dual", r.duality_failures);
  t.row("ray_knight", r.rk_failures);
  t.row("plane_filling", r.plane_failures);
  t.row("time_is_area", r.time_area_failures);
  t.row("area_order", r.order_failures);
  run.emit("selftest.csv", t);
  run.finish();
  std::cout << "selftest: " << r.windows << " windows, " << r.rk_checks << " Ray-Knight checks: "
            << (r.ok() ? "ok" : "FAILED") << "\n";
  return r.ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsrm: lattice web, contour walk and continuum estimators"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Common co;
  app.add_option("--config", co.config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--out", co.out, "output directory")->capture_default_str();
  app.add_option("--seed", co.seed, "master seed");
  app.add_option("--threads", co.threads, "worker threads")->check(CLI::PositiveNumber);

  auto add_sde = [&](CLI::App* s) {
    s->add_option("--dt", co.dt, "SDE time step")->check(CLI::PositiveNumber);
    s->add_option("--replicas", co.replicas, "replicas per level (e.g. 1e5)");
    s->add_option("--levels", co.levels, "splitting levels")->check(CLI::PositiveNumber);
  };
  auto add_lattice = [&](CLI::App* s) {
    s->add_option("--mesh", co.mesh, "lattice mesh")->check(CLI::PositiveNumber);
    s->add_option("--profile", co.profile, "stationary | flat");
  };

  int half = 10;
  auto* web = app.add_subcommand("web", "arrows, forward/dual paths and profile on a window");
  web->add_option("--half-width", half, "window is [-w,w]^2")->check(CLI::Range(1, 2000));
  add_lattice(web);

  std::int64_t max_cells = 0;
  auto* contour = app.add_subcommand("contour", "contour trace (t, X, H) and local time");
  contour->add_option("--t-budget", co.t_budget, "duration")->check(CLI::PositiveNumber);
  contour->add_option("--max-cells", max_cells, "cell cap");
  add_lattice(contour);

  std::string x_grid = "1.5:3:0.5";
  auto* tx = app.add_subcommand("tail-x", "P(sigma_x <= 1) by splitting, with tail fit");
  tx->add_option("--x-grid", x_grid, "a:b:step")->capture_default_str();
  add_sde(tx);

  std::string h_grid = "2:5:1";
  auto* th = app.add_subcommand("tail-h", "P(sup_[0,1] |H| >= h) by splitting");
  th->add_option("--h-grid", h_grid, "a:b:step")->capture_default_str();
  add_sde(th);

  std::string hf_grid = "1.5:2.5:0.25";
  bool flat_mc = false;
  auto* thf = app.add_subcommand("tail-h-flat", "flat-profile height tail by quadrature");
  thf->add_option("--h-grid", hf_grid, "a:b:step")->capture_default_str();
  thf->add_flag("--mc", flat_mc, "add a direct Monte Carlo column");
  add_sde(thf);

  auto* al = app.add_subcommand("area-law", "(a, cdf, pdf) of the absorption area");
  auto* kp = app.add_subcommand("kappa", "first zero of Ai' and the small-ball constant");

  std::string traces = "100", levels = "8,9,10", ps = "1.5,2";
  auto* pv = app.add_subcommand("pvar", "dyadic p-variation of unit-duration traces");
  pv->add_option("--traces", traces)->capture_default_str();
  pv->add_option("--dyadic", levels, "dyadic levels")->capture_default_str();
  pv->add_option("--p", ps, "powers")->capture_default_str();
  pv->add_option("--t-budget", co.t_budget, "trace duration")->check(CLI::PositiveNumber);
  add_lattice(pv);

  std::string lil_traces = "100";
  int first = 4, decades = 3;
  auto* lil = app.add_subcommand("lil", "LIL band statistics at decade times");
  lil->add_option("--traces", lil_traces)->capture_default_str();
  lil->add_option("--first-decade", first)->capture_default_str();
  lil->add_option("--decades", decades)->capture_default_str()->check(CLI::Range(3, 9));
  add_lattice(lil);

  int windows = 1000;
  auto* st = app.add_subcommand("selftest", "exact lattice invariants on random windows");
  st->add_option("--windows", windows)->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*web) return cmd_web(co, half);
    if (*contour) return cmd_contour(co, max_cells);
    if (*tx) return cmd_tail_x(co, x_grid);
    if (*th) return cmd_tail_h(co, h_grid);
    if (*thf) return cmd_tail_h_flat(co, hf_grid, flat_mc);
    if (*al) return cmd_area_law(co);
    if (*kp) return cmd_kappa(co);
    if (*pv) {
      if (!co.mesh) co.mesh = 1.0 / 1024;
      return cmd_pvar(co, traces, levels, ps);
    }
    if (*lil) {
      if (!co.mesh) co.mesh = 1.0;
      return cmd_lil(co, lil_traces, first, decades);
    }
    if (*st) return cmd_selftest(co, windows);
  } catch (const usage_error& e) {
    std::cerr << "usage: " << e.what() << "\n" << app.help();
    return 1;
  } catch (const config_error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 1;
  } catch (const tsrm::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const resource_error& e) {
    std::cerr << "resource: " << e.what() << "\n";
    return 2;
  } catch (const estimation_error& e) {
    std::cerr << "estimation: " << e.what() << "\n";
    return 2;
  } catch (const fit_error& e) {
    std::cerr << "fit: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "io: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
