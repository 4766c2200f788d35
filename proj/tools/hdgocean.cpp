// Command-line driver: elliptic benchmarks, convergence study and slice simulations.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdg/benchmarks.hpp"
#include "hdg/config.hpp"
#include "hdg/output.hpp"
#include "hdg/slice.hpp"

namespace fs = std::filesystem;
using namespace hdg;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  int degree = -1;
  std::string refinements;
  std::string out = ".";
  bool timing = true;
};

Config load_config(const Options& o, const std::string& ns, const std::string& degree_key = "degree") {
  Config c = o.config_path.empty() ? Config{} : Config::from_file(o.config_path);
  for (const auto& s : o.overrides) c.set(s);
  if (o.degree >= 0) c.set(ns + "." + degree_key, std::to_string(o.degree));
  if (!o.refinements.empty()) c.set(ns + ".refinements", o.refinements);
  return c;
}

void check_unused(const Config& c, const std::string& ns) {
  const auto unused = c.unused_keys(ns + ".");
  if (!unused.empty()) {
    std::string msg = "unknown configuration keys:";
    for (const auto& k : unused) msg += " " + k;
    throw ConfigError(msg);
  }
}

void check_increasing(const std::vector<int>& list, const std::string& what) {
  if (list.empty()) throw ConfigError(what + " is empty");
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i] < 1) throw ConfigError(what + " entries must be positive");
    if (i > 0 && list[i] <= list[i - 1]) throw ConfigError(what + " must be strictly increasing");
  }
}

SolverOptions solver_options(const Config& c, const std::string& ns) {
  SolverOptions opt;
  const std::string sampling = c.get_string(ns + ".sampling", "quadrature");
  if (sampling == "quadrature") {
    opt.sampling = CoefficientSampling::Quadrature;
  } else if (sampling == "center") {
    opt.sampling = CoefficientSampling::ElementCenter;
  } else {
    throw ConfigError(ns + ".sampling must be 'quadrature' or 'center'");
  }
  opt.rcond_floor = c.get_double(ns + ".rcond_floor", opt.rcond_floor);
  return opt;
}

std::string path_in(const Options& o, const std::string& name) {
  fs::create_directories(o.out);
  return (fs::path(o.out) / name).string();
}

// Wall-clock columns differ between runs; --no-timing drops them from the CSV files.
void write_table(const Options& o, const std::string& name, CsvTable t, const std::string& echo) {
  if (!o.timing) {
    const auto it = std::find(t.header.begin(), t.header.end(), "seconds");
    if (it != t.header.end()) {
      const auto col = it - t.header.begin();
      t.header.erase(it);
      for (auto& row : t.rows) row.erase(row.begin() + col);
    }
  }
  write_csv(path_in(o, name), t, echo);
}

std::string status_of(const ErrorRow& r) { return r.error.empty() ? "ok" : "failed: " + r.error; }

int print_table(const std::vector<ErrorRow>& rows, const std::vector<double>& orders) {
  int failures = 0;
  std::printf("%8s %8s %14s %8s %10s\n", "n", "ny", "E2", "order", "seconds");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double order = i > 0 ? orders[i - 1] : std::nan("");
    std::printf("%8d %8d %14.6e %8.3f %10.3f\n", r.n, r.ny, r.e2, order, r.seconds);
    if (!r.error.empty()) {
      std::fprintf(stderr, "  n=%d failed: %s\n", r.n, r.error.c_str());
      ++failures;
    }
  }
  return failures;
}

int run_channel(const Options& o) {
  const Config c = load_config(o, "channel");
  const ChannelParams p = channel_params(c);
  const int degree = c.get_int("channel.degree", 2);
  const auto ns = c.get_ints("channel.refinements", {10, 20, 40, 80, 160, 320, 640, 1280});
  const SolverOptions opt = solver_options(c, "channel");
  check_unused(c, "channel");
  check_increasing(ns, "channel.refinements");

  std::vector<ErrorRow> rows;
  for (int n : ns) rows.push_back(run_channel_case(p, n, degree, opt));
  const auto orders = observed_orders(rows);
  std::printf("channel, HDG degree %d, E2 at element midpoints\n", degree);
  const int failures = print_table(rows, orders);

  CsvTable t{{"elements", "e2", "seconds", "status"}, {}};
  for (const auto& r : rows) t.rows.push_back({std::to_string(r.n), format_number(r.e2), format_number(r.seconds), status_of(r)});
  write_table(o, "channel_errors.csv", t, c.echo());
  return failures ? 2 : 0;
}

int run_sector(const Options& o) {
  const Config c = load_config(o, "sector");
  const SectorParams p = sector_params(c);
  const int degree = c.get_int("sector.degree", 4);
  const auto grids = c.get_ints("sector.refinements", {5, 10, 35, 40});
  const auto cut_r = c.get_doubles("sector.cut_radii", {100e3, 120e3, 140e3, 155e3});
  const int cut_samples = c.get_int("sector.cut_samples", 41);
  const SolverOptions opt = solver_options(c, "sector");
  check_unused(c, "sector");
  check_increasing(grids, "sector.refinements");

  std::vector<ErrorRow> rows;
  for (int n : grids) rows.push_back(run_sector_case(p, n, n, degree, opt));
  const auto orders = observed_orders(rows);
  std::printf("sector, HDG degree %d, E2 at element centers\n", degree);
  const int failures = print_table(rows, orders);

  CsvTable t{{"nr", "ntheta", "e2", "seconds", "status"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.n), std::to_string(r.ny), format_number(r.e2), format_number(r.seconds), status_of(r)});
  write_table(o, "sector_errors.csv", t, c.echo());

  // Angular cuts at fixed radii on the finest grid.
  const int n = grids.back();
  const Mesh mesh = sector_mesh(p, n, n);
  const auto [sol, diag] = solve_elliptic(mesh, sector_problem(p), degree, opt);
  const SectorSolution exact(p);
  CsvTable cuts{{"r", "theta", "numeric", "exact"}, {}};
  for (double r : cut_r) {
    if (r < p.L1 || r > p.L) throw ConfigError("sector.cut_radii entries must lie in [L1, L]");
    for (int k = 0; k < cut_samples; ++k) {
      const double th = -0.5 * p.alpha + p.alpha * k / (cut_samples - 1);
      cuts.add_row({r, th, sol.pressure({r, th}), exact(r, th)});
    }
  }
  write_csv(path_in(o, "sector_cuts.csv"), cuts, c.echo());
  return failures ? 2 : 0;
}

int run_convergence(const Options& o) {
  const Config c = load_config(o, "convergence", "degrees");
  const auto degrees = c.get_ints("convergence.degrees", {2, 4});
  const auto ns = c.get_ints("convergence.refinements", {2, 4, 8, 16, 32});
  const SolverOptions opt = solver_options(c, "convergence");
  check_unused(c, "convergence");
  check_increasing(ns, "convergence.refinements");

  CsvTable t{{"degree", "n", "e2", "order", "seconds", "status"}, {}};
  int failures = 0;
  for (int p : degrees) {
    std::vector<ErrorRow> rows;
    for (int n : ns) rows.push_back(run_manufactured_case(n, p, opt));
    const auto orders = observed_orders(rows);
    std::printf("manufactured solution on [0,1]^2, degree %d, relative L2 error of p\n", p);
    failures += print_table(rows, orders);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      t.rows.push_back({std::to_string(p), std::to_string(r.n), format_number(r.e2),
                        format_number(i ? orders[i - 1] : std::nan("")), format_number(r.seconds), status_of(r)});
    }
  }
  write_table(o, "convergence.csv", t, c.echo());
  return failures ? 2 : 0;
}

GridField grid_of(const SliceState& s, const ScenarioConfig& cfg, const std::string& name, const std::vector<double>& v) {
  GridField f;
  f.name = name;
  f.time = s.t;
  f.nx = s.nx;
  f.nz = s.nz;
  f.x_min = cfg.x_min;
  f.x_max = cfg.x_max;
  f.z_min = cfg.z_min;
  f.z_max = cfg.z_max;
  f.values = v;
  f.solid.resize(s.fluid.size());
  for (std::size_t k = 0; k < s.fluid.size(); ++k) f.solid[k] = !s.fluid[k];
  return f;
}

std::string time_tag(double t) { return std::to_string(static_cast<long>(std::lround(t))); }

void report_run(const SliceRunResult& r) {
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("steps %zu, wall time %.2f s, worst divergence ratio (after/before) %.3e\n", r.steps.size(), r.seconds,
              r.worst_divergence_ratio);
}

int run_standing_wave(const Options& o) {
  Config c = load_config(o, "slice");
  ScenarioConfig cfg = slice_config(c, ScenarioKind::StandingWave);
  const auto cut_times = c.get_doubles("slice.cut_times", {120.0, 240.0, 600.0});
  const double cut_z = c.get_double("slice.cut_z", -1.0);
  check_unused(c, "slice");
  cfg.snapshot_times.insert(cfg.snapshot_times.end(), cut_times.begin(), cut_times.end());

  SliceModel model(cfg);
  const std::string echo = c.echo();
  CsvTable summary{{"t", "relative_rms", "normalized_rms", "numeric_peak", "analytic_peak"}, {}};
  const auto wave = standing_wave_fields(cfg.wave_params());
  auto on_snapshot = [&](const SliceState& s) {
    const auto e = standing_wave_cut_error(s, cfg, cut_z);
    summary.add_row({s.t, e.relative_rms, e.normalized_rms, e.numeric_peak, e.analytic_peak});
    const auto cut = pressure_line_cut(s, cfg, cut_z);
    CsvTable t{{"x", "q", "q_exact"}, {}};
    for (std::size_t i = 0; i < cut.size(); ++i) {
      const double x = (static_cast<double>(i) + 0.5) * cfg.dx();
      t.add_row({cfg.x_min + x, cut[i], wave.q(s.t, x, cut_z)});
    }
    write_csv(path_in(o, "standing_wave_cut_t" + time_tag(s.t) + ".csv"), t, echo);
    write_grid(path_in(o, "standing_wave_q_t" + time_tag(s.t) + ".grid"), grid_of(s, cfg, "q", s.q), echo);
    std::printf("t = %7.1f s  line cut z = %g: relative RMS %.4f, peaks %.4g (numeric) %.4g (exact)\n", s.t, cut_z,
                e.relative_rms, e.numeric_peak, e.analytic_peak);
  };
  int code = 0;
  try {
    const auto r = model.run(on_snapshot);
    report_run(r);
    std::printf("surface amplitude: max %.5g m, lowest period envelope %.5g m (eta0 = %g)\n", r.max_surface_amplitude,
                r.min_surface_amplitude, cfg.eta0);
  } catch (const SliceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    code = 1;
  }
  write_csv(path_in(o, "standing_wave_summary.csv"), summary, echo);
  return code;
}

int run_density_flow(const Options& o) {
  Config c = load_config(o, "slice");
  ScenarioConfig cfg = slice_config(c, ScenarioKind::DensityFlow);
  const auto grid_times = c.get_doubles("slice.grid_times", {600.0, 900.0, 1200.0});
  const bool compare = c.get_bool("slice.compare", false);
  const int ref_degree = c.get_int("slice.reference_degree", 4);
  const auto compare_times = c.get_doubles("slice.compare_times", {420.0, 540.0, 780.0});
  check_unused(c, "slice");
  const std::string echo = c.echo();

  auto run_one = [&](ScenarioConfig sc, const std::vector<double>& grids) {
    for (double t : grids) sc.snapshot_times.push_back(t);
    SliceModel model(sc);
    auto on_snapshot = [&](const SliceState& s) {
      for (double t : grids) {
        if (std::abs(s.t - t) < 0.5 * sc.dt) {
          const std::string tag = "_p" + std::to_string(sc.degree) + "_t" + time_tag(s.t) + ".grid";
          write_grid(path_in(o, "density" + tag), grid_of(s, sc, "rho", s.rho), echo);
        }
      }
    };
    const auto r = model.run(on_snapshot);
    std::printf("density flow, degree %d:\n", sc.degree);
    report_run(r);
    std::printf("density range over the run: [%.9f, %.9f] kg/m^3\n", r.min_rho, r.max_rho);
    return r;
  };

  ScenarioConfig main_cfg = cfg;
  if (compare) main_cfg.snapshot_times.insert(main_cfg.snapshot_times.end(), compare_times.begin(), compare_times.end());
  try {
    const auto main_run = run_one(main_cfg, grid_times);
    if (compare) {
      ScenarioConfig ref = cfg;
      ref.degree = ref_degree;
      ref.snapshot_times = compare_times;
      double last = 0.0;
      for (double t : compare_times) last = std::max(last, t);
      ref.t_end = std::min(cfg.t_end, last);
      const auto ref_run = run_one(ref, {});
      CsvTable t{{"t", "e2"}, {}};
      for (const auto& snap : ref_run.snapshots) {
        if (snap.t == 0.0) continue;
        for (const auto& other : main_run.snapshots) {
          if (std::abs(other.t - snap.t) > 0.5 * cfg.dt) continue;
          std::vector<double> a, b;
          for (std::size_t k = 0; k < snap.state.rho.size(); ++k) {
            if (!snap.state.fluid[k]) continue;
            a.push_back(other.state.rho[k]);
            b.push_back(snap.state.rho[k]);
          }
          const double e2 = e2_error(a, b);
          t.add_row({snap.t, e2});
          std::printf("t = %6.1f s  E2(HDG%d vs HDG%d) = %.4e\n", snap.t, cfg.degree, ref_degree, e2);
          break;
        }
      }
      write_csv(path_in(o, "density_e2.csv"), t, echo);
    }
  } catch (const SliceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG elliptic solver and pressure-projection ocean slice"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--degree", o.degree, "HDG polynomial degree")->check(CLI::Range(1, 12));
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--refinements", o.refinements, "comma-separated mesh sizes");
    sub->add_option("--set", o.overrides, "override key=value (repeatable)")->take_all();
    sub->add_flag("!--no-timing", o.timing, "omit wall-clock columns from CSV output");
  };
  struct Entry {
    CLI::App* app;
    int (*run)(const Options&);
  };
  const std::vector<Entry> entries = {
      {app.add_subcommand("channel", "1D tidal channel error table"), run_channel},
      {app.add_subcommand("sector", "2D annular sector error table and line cuts"), run_sector},
      {app.add_subcommand("standing-wave", "standing wave in a closed basin"), run_standing_wave},
      {app.add_subcommand("density-flow", "density-driven flow over a ramp and a bar"), run_density_flow},
      {app.add_subcommand("convergence", "manufactured-solution convergence study"), run_convergence},
  };
  for (const auto& e : entries) add_common(e.app);
  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& e : entries)
      if (e.app->parsed()) return e.run(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
