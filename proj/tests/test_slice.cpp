#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hdg/slice.hpp"

using namespace hdg;

namespace {

ScenarioConfig small_wave(double dt, int steps) {
  auto c = ScenarioConfig::standing_wave();
  c.nx = 20;
  c.nz = 20;
  c.dt = dt;
  c.t_end = dt * steps;
  c.snapshot_times = {c.t_end};
  return c;
}

ScenarioConfig small_density(double t_end) {
  auto c = ScenarioConfig::density_flow();
  c.nx = 50;
  c.nz = 20;
  c.dt = 0.1;
  c.t_end = t_end;
  c.snapshot_times = {t_end};
  return c;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("uniform density at rest stays exactly at rest") {
  auto c = small_density(5.0);
  c.rho1 = c.rho0;
  SliceModel m(c);
  const SliceState s0 = m.state();
  const auto r = m.run();
  const auto& s = r.snapshots.back().state;
  CHECK(s.u == s0.u);
  CHECK(s.w == s0.w);
  CHECK(s.q == s0.q);
  CHECK(s.rho == s0.rho);
  CHECK(s.eta == s0.eta);
}

TEST_CASE("the initial line cut reproduces the analytic wave") {
  SliceModel m(small_wave(0.05, 1));
  const auto e = standing_wave_cut_error(m.state(), m.config(), -1.0);
  CHECK(e.relative_rms < 1e-2);
  const auto fine = ScenarioConfig::standing_wave();
  SliceModel mf(fine);
  CHECK(standing_wave_cut_error(mf.state(), fine, -1.0).relative_rms < 1e-3);
}

TEST_CASE("the standing wave is linear in its amplitude") {
  auto a = small_wave(0.05, 20), b = a;
  b.eta0 = 0.5 * a.eta0;
  SliceModel ma(a), mb(b);
  for (int k = 0; k < 20; ++k) {
    (void)ma.step();
    (void)mb.step();
  }
  const auto& qa = ma.state().q;
  const auto& qb = mb.state().q;
  const double scale = max_abs(qa);
  for (std::size_t i = 0; i < qa.size(); ++i) CHECK(std::abs(qa[i] - 2.0 * qb[i]) <= 1e-10 * scale);
}

TEST_CASE("surface pressure and elevation stay hydrostatically tied") {
  SliceModel m(small_wave(0.05, 1));
  const auto& c = m.config();
  for (int k = 0; k < 30; ++k) {
    (void)m.step();
    const auto& s = m.state();
    for (int i = 0; i < s.nx; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      CHECK(s.qs[ii] == doctest::Approx(c.rho0 * c.g * s.eta[ii]).scale(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("the projection removes the face divergence") {
  SliceModel m(small_wave(0.05, 1));
  for (int k = 0; k < 20; ++k) {
    const auto d = m.step();
    CHECK(d.divergence_before > 0.0);
    CHECK(d.divergence_after <= 1e-8 * d.divergence_before);
    CHECK(max_abs(m.face_divergence(m.state().U, m.state().W)) == doctest::Approx(d.divergence_after));
  }
}

TEST_CASE("antisymmetry about the basin center is preserved") {
  SliceModel m(small_wave(0.05, 1));
  for (int k = 0; k < 40; ++k) (void)m.step();
  const auto& s = m.state();
  const double scale = max_abs(s.q);
  for (int j = 0; j < s.nz; ++j)
    for (int i = 0; i < s.nx; ++i)
      CHECK(std::abs(s.q[static_cast<std::size_t>(s.cell(i, j))] +
                     s.q[static_cast<std::size_t>(s.cell(s.nx - 1 - i, j))]) <= 1e-9 * scale);
}

TEST_CASE("short standing-wave run keeps shape and amplitude") {
  auto c = ScenarioConfig::standing_wave();
  c.dt = 0.05;
  c.t_end = 5.0;
  c.snapshot_times = {5.0};
  SliceModel m(c);
  const auto r = m.run();
  const auto e = standing_wave_cut_error(r.snapshots.back().state, c, -1.0);
  CHECK(e.normalized_rms < 1e-6);
  CHECK(e.relative_rms < 0.1);
  CHECK(r.warnings.empty());
}

TEST_CASE("density flow conserves mass and respects the density bounds") {
  auto diffusive = small_density(30.0);
  diffusive.advection = false;
  SliceModel md(diffusive);
  const double mass_d = md.total_mass();
  (void)md.run();
  CHECK(std::abs(md.total_mass() - mass_d) <= 1e-13 * mass_d);

  // with advection the moving surface exchanges a little mass with the fixed grid
  const auto c = small_density(30.0);
  SliceModel m(c);
  const double mass0 = m.total_mass();
  const auto r = m.run();
  CHECK(std::abs(m.total_mass() - mass0) <= 1e-6 * mass0);
  CHECK(r.min_rho >= c.rho0 - 1e-9);
  CHECK(r.max_rho <= c.rho1 + 1e-9);
  // the dense water has started to move into the basin
  const auto& s = m.state();
  double front = 0.0;
  for (int j = 0; j < s.nz; ++j)
    for (int i = 0; i < s.nx; ++i) {
      const double x = c.x_min + (i + 0.5) * c.dx();
      if (x > c.dense_x_max && s.is_fluid(i, j))
        front = std::max(front, s.rho[static_cast<std::size_t>(s.cell(i, j))] - c.rho0);
    }
  CHECK(front > 1e-3);
}

TEST_CASE("hydrostatic pressure integrates the density anomaly") {
  auto c = small_density(1.0);
  c.bathymetry = false;
  SliceModel m(c);
  auto& s = m.mutable_state();
  for (int j = 0; j < s.nz; ++j)
    for (int i = 0; i < s.nx; ++i) s.rho[static_cast<std::size_t>(s.cell(i, j))] = c.rho0 + 0.01 * (i + 1);
  m.update_hydrostatic();
  for (int j = 0; j < s.nz; ++j)
    for (int i = 0; i < s.nx; ++i) {
      const double z = c.z_max - (s.nz - j - 0.5) * c.dz();
      const double expect = c.g * 0.01 * (i + 1) * (-z);
      CHECK(s.p[static_cast<std::size_t>(s.cell(i, j))] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("bathymetry mask") {
  const auto c = ScenarioConfig::density_flow();
  CHECK(c.solid(300.0, -90.0));
  CHECK_FALSE(c.solid(300.0, -70.0));
  CHECK(c.solid(410.0, -80.0));
  CHECK_FALSE(c.solid(410.0, -50.0));
  CHECK_FALSE(c.solid(100.0, -99.0));
  auto flat = c;
  flat.bathymetry = false;
  CHECK_FALSE(flat.solid(410.0, -80.0));
}

TEST_CASE("invalid configurations are rejected") {
  auto bad = [](auto edit) {
    auto c = ScenarioConfig::standing_wave();
    edit(c);
    return c;
  };
  CHECK_THROWS_AS(SliceModel(bad([](ScenarioConfig& c) { c.nx = 1; })), SliceError);
  CHECK_THROWS_AS(SliceModel(bad([](ScenarioConfig& c) { c.dt = 0.0; })), SliceError);
  CHECK_THROWS_AS(SliceModel(bad([](ScenarioConfig& c) { c.z_max = 1.0; })), SliceError);
  CHECK_THROWS_AS(SliceModel(bad([](ScenarioConfig& c) { c.x_max = c.x_min; })), SliceError);
  auto d = ScenarioConfig::density_flow();
  d.Kh = -1.0;
  CHECK_THROWS_AS(d.validate(), SliceError);
}

TEST_CASE("an explicitly unstable step size is detected") {
  auto c = ScenarioConfig::standing_wave();
  c.dt = 0.5;
  c.t_end = 60.0;
  c.snapshot_times = {};
  SliceModel m(c);
  CHECK_THROWS_WITH_AS(m.run(), doctest::Contains("unstable"), SliceError);
}
