// Acceptance run: one PASS/FAIL line per criterion, with INFO lines for the
// measured values behind each verdict. Exit code is the number of FAIL lines.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hdg/benchmarks.hpp"
#include "hdg/oracles.hpp"
#include "hdg/slice.hpp"
#include "monolithic.hpp"

using namespace hdg;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& what) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class... Args>
void info(const char* fmt, Args... args) {
  std::printf("  INFO ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within_factor_two(double value, double target) { return value >= 0.5 * target && value <= 2.0 * target; }

double worst_flux_jump = 0.0;

void track_flux_jump(const ElementSolution& s) { worst_flux_jump = std::max(worst_flux_jump, flux_jump_residual(s)); }

void channel() {
  const int ns[] = {10, 20, 40, 80, 160, 320, 640, 1280};
  const double table[] = {0.180784, 0.0748017, 0.0235224, 0.00684013, 0.00187985, 0.000495726, 0.000127432, 0.0000324};
  const ChannelParams p;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ErrorRow> rows;
  bool all_within = true;
  for (std::size_t i = 0; i < std::size(ns); ++i) {
    rows.push_back(run_channel_case(p, ns[i], 2));
    const auto& r = rows.back();
    const bool ok = r.error.empty() && within_factor_two(r.e2, table[i]);
    all_within = all_within && ok;
    info("channel N=%4d  E2=%.6e  reference=%.6e  ratio=%.3g%s", r.n, r.e2, table[i], r.e2 / table[i],
         r.error.empty() ? "" : ("  error: " + r.error).c_str());
  }
  const double secs = seconds_since(t0);
  const auto orders = observed_orders(rows);
  const double order = std::min(orders[orders.size() - 1], orders[orders.size() - 2]);
  info("channel orders over the three finest meshes: %.3f %.3f; wall %.2f s", orders[orders.size() - 2],
       orders.back(), secs);
  for (int n : {40, 1280}) {
    const Mesh mesh = build_interval_mesh(p.L1, p.L, n);
    track_flux_jump(solve_elliptic(mesh, channel_problem(p), 2).first);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "channel HDG2 E2 within x2 of the table for all N (%s), order %.3f >= 1.8, %.2f s < 10 s",
                all_within ? "yes" : "no", order, secs);
  verdict(1, all_within && order >= 1.8 && secs < 10.0, buf);
}

void sector() {
  const int ns[] = {5, 10, 35, 40};
  const double table[] = {0.441213, 0.009879, 0.0026408, 0.00115041};
  const SectorParams p;
  const auto t0 = std::chrono::steady_clock::now();
  bool all_within = true;
  for (std::size_t i = 0; i < std::size(ns); ++i) {
    const auto r = run_sector_case(p, ns[i], ns[i], 4);
    const bool ok = r.error.empty() && within_factor_two(r.e2, table[i]);
    all_within = all_within && ok;
    info("sector %2dx%-2d  E2=%.6e  reference=%.6e  ratio=%.3g%s", ns[i], ns[i], r.e2, table[i], r.e2 / table[i],
         r.error.empty() ? "" : ("  error: " + r.error).c_str());
  }
  const double secs = seconds_since(t0);
  for (int n : {10, 40}) track_flux_jump(solve_elliptic(sector_mesh(p, n, n), sector_problem(p), 4).first);
  char buf[200];
  std::snprintf(buf, sizeof buf, "sector HDG4 E2 within x2 of the table on 5, 10, 35, 40 (%s), %.2f s < 60 s",
                all_within ? "yes" : "no", secs);
  verdict(2, all_within && secs < 60.0, buf);
}

void monolithic() {
  auto hole = [](const Point& c) { return std::abs(c.x - 0.5) < 0.2 && std::abs(c.y - 0.5) < 0.2; };
  const std::vector<Mesh> meshes = {
      build_interval_mesh(0.0, 1.0, 1),
      build_interval_mesh(0.0, 1.0, 5),
      build_interval_mesh(-0.5, 1.5, 8),
      build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, 1, 1),
      build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, 2, 2),
      build_rect_mesh({0.0, 2.0}, {0.0, 1.0}, 4, 2),
      build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, 3, 3, hole),
  };
  struct Variant {
    bool advection;
    double reaction;
    bool mixed;
  };
  const Variant variants[] = {{false, 1.0, false}, {true, -3.0, false}, {true, -3.0, true}};
  double worst = 0.0;
  int cases = 0;
  for (int degree : {2, 4})
    for (const auto& mesh : meshes)
      for (const auto& v : variants) {
        const auto pb = hdgtest::linear_coefficient_problem(mesh.dimension(), v.advection, v.reaction, v.mixed);
        const auto sol = solve_elliptic(mesh, pb, degree).first;
        worst = std::max(worst, hdgtest::relative_difference(sol, hdgtest::solve_monolithic(mesh, pb, degree)));
        track_flux_jump(sol);
        ++cases;
      }
  char buf[200];
  std::snprintf(buf, sizeof buf, "condensed vs monolithic dense solve, %d cases on meshes <= 8 elements: max rel diff %.3e <= 1e-10",
                cases, worst);
  verdict(3, worst <= 1e-10, buf);
}

void manufactured() {
  bool pass = true;
  for (int p : {2, 4}) {
    std::vector<ErrorRow> rows;
    for (int n : {2, 4, 8, 16, 32}) {
      rows.push_back(run_manufactured_case(n, p));
      info("manufactured p=%d n=%2d  E2=%.6e", p, n, rows.back().e2);
    }
    const auto orders = observed_orders(rows);
    const double worst = *std::min_element(orders.begin(), orders.end());
    info("manufactured p=%d orders %.3f %.3f %.3f %.3f (need >= %.1f)", p, orders[0], orders[1], orders[2], orders[3],
         p - 0.2);
    pass = pass && worst >= p - 0.2;
  }
  const auto pb = manufactured_problem();
  for (int p : {2, 4}) track_flux_jump(solve_elliptic(build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, 16, 16), pb, p).first);
  verdict(5, pass, "manufactured-solution L2 order >= p - 0.2 for p = 2, 4 over four refinements");
}

void conservation() {
  char buf[200];
  std::snprintf(buf, sizeof buf, "weak flux-jump residual over all solutions above: max %.3e <= 1e-10", worst_flux_jump);
  verdict(4, worst_flux_jump <= 1e-10, buf);
}

struct WaveOutcome {
  bool completed = false;
  std::string error;
  double rms2 = NAN, rms4 = NAN, min_amp = NAN, max_amp = NAN, div_ratio = NAN, seconds = 0.0;
};

WaveOutcome standing_wave_run(double dt) {
  auto c = ScenarioConfig::standing_wave();
  c.dt = dt;
  c.t_end = 600.0;
  c.snapshot_times = {120.0, 240.0};
  WaveOutcome w;
  SliceModel m(c);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto r = m.run();
    w.completed = true;
    for (const auto& s : r.snapshots) {
      if (std::abs(s.t - 120.0) < 0.5 * dt) w.rms2 = standing_wave_cut_error(s.state, c, -1.0).relative_rms;
      if (std::abs(s.t - 240.0) < 0.5 * dt) w.rms4 = standing_wave_cut_error(s.state, c, -1.0).relative_rms;
    }
    w.min_amp = r.min_surface_amplitude;
    w.max_amp = r.max_surface_amplitude;
    w.div_ratio = r.worst_divergence_ratio;
  } catch (const SliceError& e) {
    w.error = e.what();
  }
  w.seconds = seconds_since(t0);
  return w;
}

void standing_wave() {
  const double eta0 = ScenarioConfig::standing_wave().eta0;
  for (double dt : {0.1, 0.05}) {
    const auto w = standing_wave_run(dt);
    if (!w.completed) {
      info("standing wave dt=%.2f: %s", dt, w.error.c_str());
      continue;
    }
    info("standing wave dt=%.2f: rms(2 min)=%.3g rms(4 min)=%.3g amplitude [%.4g, %.4g] divergence ratio %.2e, %.1f s",
         dt, w.rms2, w.rms4, w.min_amp, w.max_amp, w.div_ratio, w.seconds);
  }
  const auto w = standing_wave_run(0.5);
  char buf[400];
  if (!w.completed) {
    std::snprintf(buf, sizeof buf, "standing wave at dt=0.5 did not complete: %s (%.1f s)", w.error.c_str(), w.seconds);
    verdict(6, false, buf);
    return;
  }
  const bool pass = w.rms2 <= 0.1 && w.rms4 <= 0.1 && w.min_amp >= 0.5 * eta0 && w.max_amp <= 1.5 * eta0 &&
                    w.div_ratio <= 1e-2 && w.seconds < 300.0;
  std::snprintf(buf, sizeof buf,
                "standing wave dt=0.5: rms %.3g, %.3g <= 0.1; amplitude [%.4g, %.4g] in [%.3g, %.3g]; divergence ratio %.2e <= 1e-2; %.1f s",
                w.rms2, w.rms4, w.min_amp, w.max_amp, 0.5 * eta0, 1.5 * eta0, w.div_ratio, w.seconds);
  verdict(6, pass, buf);
}

void density_flow() {
  auto c2 = ScenarioConfig::density_flow();
  c2.snapshot_times = {420.0};
  auto c4 = c2;
  c4.degree = 4;
  c4.t_end = 420.0;
  const double rho_lo = c2.rho0, rho_hi = c2.rho1;
  SliceModel m2(c2), m4(c4);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r2 = m2.run();
  const double secs2 = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  const auto r4 = m4.run();
  const double secs4 = seconds_since(t1);
  const SliceState* a = nullptr;
  const SliceState* b = nullptr;
  for (const auto& s : r2.snapshots)
    if (std::abs(s.t - 420.0) < 0.5 * c2.dt) a = &s.state;
  for (const auto& s : r4.snapshots)
    if (std::abs(s.t - 420.0) < 0.5 * c4.dt) b = &s.state;
  double e2 = NAN;
  if (a && b) {
    std::vector<double> num, ref;
    for (std::size_t k = 0; k < a->rho.size(); ++k) {
      if (!a->fluid[k]) continue;
      num.push_back(a->rho[k]);
      ref.push_back(b->rho[k]);
    }
    e2 = e2_error(num, ref);
  }
  info("density flow HDG2 1200 s run: %.1f s; HDG4 reference to 420 s: %.1f s; divergence ratio %.2e", secs2, secs4,
       r2.worst_divergence_ratio);
  info("density range [%.9f, %.9f]", r2.min_rho, r2.max_rho);
  const bool bounds = r2.min_rho >= rho_lo - 1e-6 && r2.max_rho <= rho_hi + 1e-6;
  const bool band = e2 >= 6.55e-6 && e2 <= 6.55e-4;
  char buf[300];
  std::snprintf(buf, sizeof buf,
                "density flow: E2(HDG2 vs HDG4) at 7 min %.4e in [6.55e-6, 6.55e-4] (%s); density bounds held (%s); %.1f s < 900 s",
                e2, band ? "yes" : "no", bounds ? "yes" : "no", secs2 + secs4);
  verdict(7, band && bounds && secs2 + secs4 < 900.0, buf);
}

void bessel_accuracy() {
  using HP = boost::multiprecision::cpp_bin_float_50;
  double worst = 0.0, worst_w = 0.0;
  for (double order : {0.0, 4.0})
    for (int i = 0; i <= 950; ++i) {
      const double x = 0.5 + 0.01 * i;
      const HP nu(order), z(x);
      const double ref[4] = {static_cast<double>(boost::math::cyl_bessel_j(nu, z)),
                             static_cast<double>(boost::math::cyl_bessel_j_prime(nu, z)),
                             static_cast<double>(boost::math::cyl_neumann(nu, z)),
                             static_cast<double>(boost::math::cyl_neumann_prime(nu, z))};
      const double val[4] = {bessel(BesselKind::First, order, x), bessel_derivative(BesselKind::First, order, x),
                             bessel(BesselKind::Second, order, x), bessel_derivative(BesselKind::Second, order, x)};
      for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(val[k] - ref[k]) / std::max(1.0, std::abs(ref[k])));
      const double w = val[0] * val[3] - val[1] * val[2];
      const double exact = 2.0 / (3.14159265358979323846 * x);
      worst_w = std::max(worst_w, std::abs(w - exact) / exact);
    }
  char buf[250];
  std::snprintf(buf, sizeof buf,
                "J0, Y0, J4, Y4 and derivatives vs 50-digit reference on [0.5, 10]: max dev %.2e <= 1e-10; Wronskian rel dev %.2e <= 1e-10",
                worst, worst_w);
  verdict(8, worst <= 1e-10 && worst_w <= 1e-10, buf);
}

}  // namespace

int main() {
  channel();
  sector();
  monolithic();
  manufactured();
  conservation();
  bessel_accuracy();
  standing_wave();
  density_flow();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
