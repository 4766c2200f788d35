#include "hdg/slice.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace hdg {

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ScenarioConfig ScenarioConfig::standing_wave() { return {}; }

ScenarioConfig ScenarioConfig::density_flow() {
  ScenarioConfig c;
  c.kind = ScenarioKind::DensityFlow;
  c.x_min = 0.0;
  c.x_max = 500.0;
  c.z_min = -100.0;
  c.z_max = 0.0;
  c.nx = 100;
  c.nz = 50;
  c.dt = 0.1;
  c.t_end = 1200.0;
  c.degree = 2;
  c.rho0 = 1028.0;
  c.advection = true;
  c.snapshot_times = {420.0, 540.0, 600.0, 780.0, 900.0, 1200.0};
  return c;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& m) { throw SliceError("invalid slice configuration: " + m); };
  if (!(x_max > x_min) || !(z_max > z_min)) fail("empty domain");
  if (z_max != 0.0) fail("the free surface must be at z = 0");
  if (nx < 2 || nz < 2) fail("need at least 2 x 2 cells");
  if (!(dt > 0.0) || !(t_end >= 0.0)) fail("dt must be positive and t_end non-negative");
  if (degree < 1) fail("degree must be >= 1");
  if (!(rho0 > 0.0) || !(g > 0.0)) fail("rho0 and g must be positive");
  if (Kh < 0.0 || Kz < 0.0) fail("negative diffusivity");
  for (double t : snapshot_times)
    if (t < 0.0) fail("negative snapshot time");
  if (kind == ScenarioKind::StandingWave) wave_params().validate();
}

bool ScenarioConfig::solid(double x, double z) const {
  if (kind != ScenarioKind::DensityFlow || !bathymetry) return false;
  if (x >= ramp.x0 && x <= ramp.x1) {
    const double zb = ramp.z0 + (ramp.z1 - ramp.z0) * (x - ramp.x0) / (ramp.x1 - ramp.x0);
    if (z < zb) return true;
  }
  return x >= bar.x0 && x <= bar.x1 && z >= bar.z0 && z <= bar.z1;
}

StandingWaveParams ScenarioConfig::wave_params() const {
  StandingWaveParams p;
  p.L = x_max - x_min;
  p.H = z_max - z_min;
  p.kappa = kappa;
  p.eta0 = eta0;
  p.rho0 = rho0;
  p.g = g;
  return p;
}

SliceModel::SliceModel(ScenarioConfig config) : cfg_(std::move(config)) {
  cfg_.validate();
  dx_ = cfg_.dx();
  dz_ = cfg_.dz();
  const int nx = cfg_.nx, nz = cfg_.nz;
  const ScenarioConfig& c = cfg_;
  mesh_ = std::make_shared<const Mesh>(build_rect_mesh({c.x_min, c.x_max}, {c.z_min, c.z_max}, nx, nz,
                                                       [&c](const Point& p) { return c.solid(p.x, p.y); }));
  const double top = c.z_max;
  EllipticProblem problem;
  problem.coeffs.k1 = [](const Point&) { return 1.0; };
  problem.coeffs.k2 = [](const Point&) { return 1.0; };
  problem.coeffs.beta = [](const Point&) { return Vec2{}; };
  problem.coeffs.c = [](const Point&) { return 0.0; };
  problem.coeffs.f = [](const Point&) { return 0.0; };
  problem.boundary = [top](const Face& f) {
    BoundaryCondition bc;
    const bool surface = f.axis == FaceAxis::Y && std::abs(f.a.y - top) < 1e-9 && f.normal.y > 0.0;
    bc.kind = surface ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
    bc.value = [](const Point&) { return 0.0; };
    return bc;
  };
  poisson_ = std::make_unique<EllipticOperator>(mesh_, std::move(problem), c.degree);

  elem_of_cell_.assign(static_cast<std::size_t>(nx * nz), -1);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) elem_of_cell_[static_cast<std::size_t>(i + nx * j)] = mesh_->element_of_cell(i, j);
  xface_.assign(static_cast<std::size_t>((nx + 1) * nz), -1);
  zface_.assign(static_cast<std::size_t>(nx * (nz + 1)), -1);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      const int e = elem_of_cell_[static_cast<std::size_t>(i + nx * j)];
      if (e < 0) continue;
      const auto& el = mesh_->element(e);
      xface_[static_cast<std::size_t>(i + (nx + 1) * j)] = el.faces[0];
      xface_[static_cast<std::size_t>(i + 1 + (nx + 1) * j)] = el.faces[1];
      zface_[static_cast<std::size_t>(i + nx * j)] = el.faces[2];
      zface_[static_cast<std::size_t>(i + nx * (j + 1))] = el.faces[3];
    }
  xcenters_.resize(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) xcenters_[static_cast<std::size_t>(i)] = c.x_min + (i + 0.5) * dx_;
  init_state();
}

void SliceModel::init_state() {
  const int nx = cfg_.nx, nz = cfg_.nz, n = nx * nz;
  s_ = SliceState{};
  s_.nx = nx;
  s_.nz = nz;
  s_.fluid.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) s_.fluid[static_cast<std::size_t>(k)] = elem_of_cell_[static_cast<std::size_t>(k)] >= 0;
  for (auto* v : {&s_.u, &s_.w, &s_.q, &s_.dqdx, &s_.dqdz, &s_.rho, &s_.p}) v->assign(static_cast<std::size_t>(n), 0.0);
  s_.U.assign(static_cast<std::size_t>((nx + 1) * nz), 0.0);
  s_.W.assign(static_cast<std::size_t>(nx * (nz + 1)), 0.0);
  s_.eta.assign(static_cast<std::size_t>(nx), 0.0);
  s_.qs.assign(static_cast<std::size_t>(nx), 0.0);
  us_.assign(static_cast<std::size_t>(n), 0.0);
  ws_ = us_;
  dq_ = us_;
  dqx_ = us_;
  dqz_ = us_;
  dqs_.assign(static_cast<std::size_t>(nx), 0.0);

  if (cfg_.kind == ScenarioKind::StandingWave) {
    const auto wave = standing_wave_fields(cfg_.wave_params());
    for (int j = 0; j < nz; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(i + nx * j);
        const double x = xcenters_[static_cast<std::size_t>(i)] - cfg_.x_min;
        const double z = cfg_.z_min + (j + 0.5) * dz_;
        s_.q[k] = wave.q(0.0, x, z);
        s_.dqdx[k] = wave.dq_dx(0.0, x, z);
        s_.dqdz[k] = wave.dq_dz(0.0, x, z);
      }
    for (int i = 0; i < nx; ++i) {
      const double x = xcenters_[static_cast<std::size_t>(i)] - cfg_.x_min;
      s_.eta[static_cast<std::size_t>(i)] = wave.eta(0.0, x);
      s_.qs[static_cast<std::size_t>(i)] = cfg_.rho0 * cfg_.g * s_.eta[static_cast<std::size_t>(i)];
    }
  } else {
    for (int j = 0; j < nz; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(i + nx * j);
        if (!s_.fluid[k]) continue;
        s_.rho[k] = xcenters_[static_cast<std::size_t>(i)] < cfg_.dense_x_max ? cfg_.rho1 : cfg_.rho0;
      }
    update_hydrostatic();
  }
  velocity_scale_ = std::max({max_abs(s_.q), max_abs(s_.p), cfg_.rho0 * cfg_.g * 1e-3});
}

void SliceModel::update_hydrostatic() {
  const int nx = cfg_.nx, nz = cfg_.nz;
  const double g = cfg_.g, rho0 = cfg_.rho0;
  for (int i = 0; i < nx; ++i) {
    double above = 0.0;
    int prev = -1;
    for (int j = nz - 1; j >= 0; --j) {
      const std::size_t k = static_cast<std::size_t>(s_.cell(i, j));
      if (!s_.fluid[k]) {
        s_.p[k] = 0.0;
        prev = -1;
        continue;
      }
      if (j == nz - 1) {
        above = (s_.rho[k] - rho0) * g * 0.5 * dz_;
      } else if (prev >= 0) {
        const double rbar = 0.5 * (s_.rho[k] + s_.rho[static_cast<std::size_t>(prev)]);
        above += (rbar - rho0) * g * dz_;
      }
      s_.p[k] = above;
      prev = static_cast<int>(k);
    }
  }
}

double SliceModel::total_mass() const {
  double m = 0.0;
  for (std::size_t k = 0; k < s_.rho.size(); ++k)
    if (s_.fluid[k]) m += s_.rho[k] * dx_ * dz_;
  return m;
}

void SliceModel::density_step() {
  const int nx = cfg_.nx, nz = cfg_.nz;
  const double dt = cfg_.dt;
  const auto& rho = s_.rho;
  std::vector<double> next = rho;
  const double cx = cfg_.Kh / (dx_ * dx_), cz = cfg_.Kz / (dz_ * dz_);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!s_.is_fluid(i, j)) continue;
      const std::size_t k = static_cast<std::size_t>(s_.cell(i, j));
      const double rc = rho[k];
      double tend = 0.0;
      // diffusion, zero flux through walls, solids and the surface
      if (s_.is_fluid(i - 1, j)) tend += cx * (rho[k - 1] - rc);
      if (s_.is_fluid(i + 1, j)) tend += cx * (rho[k + 1] - rc);
      if (s_.is_fluid(i, j - 1)) tend += cz * (rho[k - static_cast<std::size_t>(nx)] - rc);
      if (s_.is_fluid(i, j + 1)) tend += cz * (rho[k + static_cast<std::size_t>(nx)] - rc);
      if (cfg_.advection) {
        // first-order upwind in advective form: each inflow face pulls towards its upstream value
        auto inflow = [&](double v_in, int ii, int jj, double h) {
          if (v_in <= 0.0 || !s_.is_fluid(ii, jj)) return 0.0;
          return v_in / h * (rho[static_cast<std::size_t>(s_.cell(ii, jj))] - rc);
        };
        tend += inflow(s_.U[static_cast<std::size_t>(i + (nx + 1) * j)], i - 1, j, dx_);
        tend += inflow(-s_.U[static_cast<std::size_t>(i + 1 + (nx + 1) * j)], i + 1, j, dx_);
        tend += inflow(s_.W[static_cast<std::size_t>(i + nx * j)], i, j - 1, dz_);
        tend += inflow(-s_.W[static_cast<std::size_t>(i + nx * (j + 1))], i, j + 1, dz_);
      }
      next[k] = rc + dt * tend;
    }
  s_.rho = std::move(next);
  update_hydrostatic();
  check_finite("density update");
}

void SliceModel::predictor() {
  const int nx = cfg_.nx, nz = cfg_.nz;
  const double dt = cfg_.dt, inv_rho0 = 1.0 / cfg_.rho0;
  const bool density = cfg_.kind == ScenarioKind::DensityFlow;
  const auto& u = s_.u;
  const auto& w = s_.w;
  const auto& p = s_.p;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(s_.cell(i, j));
      if (!s_.fluid[k]) {
        us_[k] = ws_[k] = 0.0;
        continue;
      }
      double dpdx = 0.0;
      if (density) {
        const bool l = s_.is_fluid(i - 1, j), r = s_.is_fluid(i + 1, j);
        if (l && r)
          dpdx = (p[k + 1] - p[k - 1]) / (2.0 * dx_);
        else if (r)
          dpdx = (p[k + 1] - p[k]) / dx_;
        else if (l)
          dpdx = (p[k] - p[k - 1]) / dx_;
      }
      double adv_u = 0.0, adv_w = 0.0;
      if (cfg_.advection) {
        auto upwind_d = [&](const std::vector<double>& f, double vel, int di, int dj, double h) {
          const int ii = vel > 0.0 ? i - di : i + di;
          const int jj = vel > 0.0 ? j - dj : j + dj;
          if (!s_.is_fluid(ii, jj)) return 0.0;
          const double d = f[k] - f[static_cast<std::size_t>(s_.cell(ii, jj))];
          return vel > 0.0 ? d / h : -d / h;
        };
        adv_u = u[k] * upwind_d(u, u[k], 1, 0, dx_) + w[k] * upwind_d(u, w[k], 0, 1, dz_);
        adv_w = u[k] * upwind_d(w, u[k], 1, 0, dx_) + w[k] * upwind_d(w, w[k], 0, 1, dz_);
      }
      us_[k] = u[k] - dt * (inv_rho0 * (dpdx + s_.dqdx[k]) + adv_u);
      ws_[k] = w[k] - dt * (inv_rho0 * s_.dqdz[k] + adv_w);
    }
  face_velocities(us_, ws_, Us_, Ws_);
  check_finite("predictor");
}

void SliceModel::face_velocities(const std::vector<double>& u, const std::vector<double>& w, std::vector<double>& U,
                                 std::vector<double>& W) const {
  const int nx = cfg_.nx, nz = cfg_.nz;
  U.assign(static_cast<std::size_t>((nx + 1) * nz), 0.0);
  W.assign(static_cast<std::size_t>(nx * (nz + 1)), 0.0);
  for (int j = 0; j < nz; ++j)
    for (int i = 1; i < nx; ++i)
      if (s_.is_fluid(i - 1, j) && s_.is_fluid(i, j))
        U[static_cast<std::size_t>(i + (nx + 1) * j)] =
            0.5 * (u[static_cast<std::size_t>(s_.cell(i - 1, j))] + u[static_cast<std::size_t>(s_.cell(i, j))]);
  for (int j = 1; j < nz; ++j)
    for (int i = 0; i < nx; ++i)
      if (s_.is_fluid(i, j - 1) && s_.is_fluid(i, j))
        W[static_cast<std::size_t>(i + nx * j)] =
            0.5 * (w[static_cast<std::size_t>(s_.cell(i, j - 1))] + w[static_cast<std::size_t>(s_.cell(i, j))]);
  for (int i = 0; i < nx; ++i)
    if (s_.is_fluid(i, nz - 1))
      W[static_cast<std::size_t>(i + nx * nz)] = w[static_cast<std::size_t>(s_.cell(i, nz - 1))];
}

std::vector<double> SliceModel::face_divergence(const std::vector<double>& U, const std::vector<double>& W) const {
  const int nx = cfg_.nx, nz = cfg_.nz;
  std::vector<double> d(static_cast<std::size_t>(nx * nz), 0.0);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!s_.is_fluid(i, j)) continue;
      d[static_cast<std::size_t>(s_.cell(i, j))] =
          (U[static_cast<std::size_t>(i + 1 + (nx + 1) * j)] - U[static_cast<std::size_t>(i + (nx + 1) * j)]) / dx_ +
          (W[static_cast<std::size_t>(i + nx * (j + 1))] - W[static_cast<std::size_t>(i + nx * j)]) / dz_;
    }
  return d;
}

double SliceModel::max_cell_divergence(const std::vector<double>& u, const std::vector<double>& w) const {
  double m = 0.0;
  for (int j = 0; j < cfg_.nz; ++j)
    for (int i = 0; i < cfg_.nx; ++i) {
      if (!s_.is_fluid(i, j) || !s_.is_fluid(i - 1, j) || !s_.is_fluid(i + 1, j) || !s_.is_fluid(i, j - 1) ||
          !s_.is_fluid(i, j + 1))
        continue;
      const auto c = [&](int ii, int jj) { return static_cast<std::size_t>(s_.cell(ii, jj)); };
      const double d = (u[c(i + 1, j)] - u[c(i - 1, j)]) / (2.0 * dx_) + (w[c(i, j + 1)] - w[c(i, j - 1)]) / (2.0 * dz_);
      m = std::max(m, std::abs(d));
    }
  return m;
}

void SliceModel::surface_update() {
  const int nx = cfg_.nx, nz = cfg_.nz;
  std::vector<double> transport(static_cast<std::size_t>(nx + 1), 0.0);
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j < nz; ++j) transport[static_cast<std::size_t>(i)] += s_.U[static_cast<std::size_t>(i + (nx + 1) * j)] * dz_;
  const double factor = -(cfg_.dt / dx_) * cfg_.rho0 * cfg_.g;
  for (int i = 0; i < nx; ++i) {
    const auto k = static_cast<std::size_t>(i);
    dqs_[k] = factor * (transport[k + 1] - transport[k]);
    s_.qs[k] += dqs_[k];
    s_.eta[k] = s_.qs[k] / (cfg_.rho0 * cfg_.g);
  }
}

double SliceModel::surface_value(double x) const {
  const int nx = cfg_.nx;
  const double s = (x - xcenters_.front()) / dx_;
  if (s <= 0.0) return dqs_.front();
  if (s >= nx - 1) return dqs_.back();
  const int i = std::min(static_cast<int>(s), nx - 2);
  const double a = s - i;
  return (1.0 - a) * dqs_[static_cast<std::size_t>(i)] + a * dqs_[static_cast<std::size_t>(i + 1)];
}

void SliceModel::pressure_correction() {
  const int nx = cfg_.nx, nz = cfg_.nz;
  const std::vector<double> div = face_divergence(Us_, Ws_);
  last_.divergence_before = max_abs(div);
  const int ne = mesh_->num_elements();
  std::vector<double> source(static_cast<std::size_t>(ne), 0.0);
  const double scale = -cfg_.rho0 / cfg_.dt;
  for (int k = 0; k < nx * nz; ++k) {
    const int e = elem_of_cell_[static_cast<std::size_t>(k)];
    if (e >= 0) source[static_cast<std::size_t>(e)] = scale * div[static_cast<std::size_t>(k)];
  }
  const BoundaryValues values = [this](const Face& f, const Point& p) {
    return poisson_->boundary_kind(f.id) == BoundaryKind::Dirichlet ? surface_value(p.x) : 0.0;
  };
  const auto sol = poisson_->solve_centers(source, values);
  last_.trace_residual = sol.trace_residual;

  std::fill(dq_.begin(), dq_.end(), 0.0);
  std::fill(dqx_.begin(), dqx_.end(), 0.0);
  std::fill(dqz_.begin(), dqz_.end(), 0.0);
  for (int k = 0; k < nx * nz; ++k) {
    const int e = elem_of_cell_[static_cast<std::size_t>(k)];
    if (e < 0) continue;
    const auto ks = static_cast<std::size_t>(k);
    // flux unknown z = -grad(dq)
    dqx_[ks] = -sol.centers(0, e);
    dqz_[ks] = -sol.centers(1, e);
    dq_[ks] = sol.centers(2, e);
  }
  // face-normal correction from the mean normal flux of each face
  const double c = cfg_.dt / cfg_.rho0;
  for (std::size_t f = 0; f < xface_.size(); ++f) {
    const int id = xface_[f];
    if (id < 0 || mesh_->face(id).kind == FaceKind::Boundary) continue;
    Us_[f] += c * mesh_->face(id).normal.x * poisson_->face_average(sol.trace, id, 0);
  }
  for (std::size_t f = 0; f < zface_.size(); ++f) {
    const int id = zface_[f];
    if (id < 0) continue;
    const auto& face = mesh_->face(id);
    if (face.kind == FaceKind::Boundary && poisson_->boundary_kind(id) != BoundaryKind::Dirichlet) continue;
    Ws_[f] += c * face.normal.y * poisson_->face_average(sol.trace, id, 0);
  }
  check_finite("pressure correction");
}

void SliceModel::corrector() {
  const double c = cfg_.dt / cfg_.rho0;
  for (std::size_t k = 0; k < s_.u.size(); ++k) {
    if (!s_.fluid[k]) {
      s_.u[k] = s_.w[k] = 0.0;
      continue;
    }
    s_.u[k] = us_[k] - c * dqx_[k];
    s_.w[k] = ws_[k] - c * dqz_[k];
    s_.q[k] += dq_[k];
    s_.dqdx[k] += dqx_[k];
    s_.dqdz[k] += dqz_[k];
  }
  s_.U = Us_;
  s_.W = Ws_;
  last_.divergence_after = max_abs(face_divergence(s_.U, s_.W));
  last_.cell_divergence_after = max_cell_divergence(s_.u, s_.w);
  last_.max_speed = std::max(max_abs(s_.u), max_abs(s_.w));
  last_.cfl = cfg_.dt * std::max(max_abs(s_.u) / dx_, max_abs(s_.w) / dz_);
  check_finite("corrector");
}

StepDiagnostics SliceModel::step() {
  last_ = StepDiagnostics{};
  if (cfg_.kind == ScenarioKind::DensityFlow) density_step();
  predictor();
  surface_update();
  pressure_correction();
  corrector();
  s_.t += cfg_.dt;
  const double big = cfg_.instability_factor * velocity_scale_;
  if (max_abs(s_.q) > big || max_abs(s_.qs) > big) {
    std::ostringstream os;
    os << "slice run unstable at t = " << s_.t << " s: max |q| = " << max_abs(s_.q) << " exceeds " << big;
    throw SliceError(os.str());
  }
  return last_;
}

void SliceModel::check_finite(const char* stage) const {
  const std::pair<const char*, const std::vector<double>*> fields[] = {
      {"u", &s_.u}, {"w", &s_.w}, {"q", &s_.q}, {"rho", &s_.rho}, {"u*", &us_}, {"w*", &ws_}, {"dq", &dq_}};
  for (const auto& [name, v] : fields)
    for (std::size_t k = 0; k < v->size(); ++k)
      if (!std::isfinite((*v)[k])) {
        std::ostringstream os;
        os << "non-finite " << name << " after " << stage << " at cell (" << k % static_cast<std::size_t>(cfg_.nx)
           << ", " << k / static_cast<std::size_t>(cfg_.nx) << "), t = " << s_.t << " s";
        throw SliceError(os.str());
      }
}

SliceRunResult SliceModel::run(const std::function<void(const SliceState&)>& on_snapshot) {
  const auto t0 = std::chrono::steady_clock::now();
  SliceRunResult out;
  const int steps = static_cast<int>(std::llround(cfg_.t_end / cfg_.dt));
  std::vector<int> snap_steps;
  for (double t : cfg_.snapshot_times) snap_steps.push_back(static_cast<int>(std::llround(t / cfg_.dt)));
  auto emit = [&] {
    out.snapshots.push_back({s_.t, s_});
    if (on_snapshot) on_snapshot(s_);
  };
  auto track_rho = [&](bool first) {
    if (cfg_.kind != ScenarioKind::DensityFlow) return;
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 0; k < s_.rho.size(); ++k)
      if (s_.fluid[k]) {
        lo = std::min(lo, s_.rho[k]);
        hi = std::max(hi, s_.rho[k]);
      }
    out.min_rho = first ? lo : std::min(out.min_rho, lo);
    out.max_rho = first ? hi : std::max(out.max_rho, hi);
  };
  const double diff = cfg_.dt * (cfg_.Kh / (dx_ * dx_) + cfg_.Kz / (dz_ * dz_));
  if (cfg_.kind == ScenarioKind::DensityFlow && diff > 0.5)
    out.warnings.push_back("explicit diffusion stability number " + std::to_string(diff) + " exceeds 0.5");
  track_rho(true);
  out.max_surface_amplitude = max_abs(s_.eta);
  out.min_surface_amplitude = out.max_surface_amplitude;
  emit();
  bool cfl_warned = false;
  // envelope of the surface: max |eta| over consecutive windows of one wave period
  int window = 0;
  if (cfg_.kind == ScenarioKind::StandingWave)
    window = std::max(1, static_cast<int>(std::ceil(2.0 * kPi / cfg_.wave_params().omega() / cfg_.dt)));
  double window_max = 0.0;
  for (int n = 1; n <= steps; ++n) {
    const auto d = step();
    out.steps.push_back(d);
    if (d.divergence_before > 0.0)
      out.worst_divergence_ratio = std::max(out.worst_divergence_ratio, d.divergence_after / d.divergence_before);
    if (d.cfl >= 1.0 && !cfl_warned) {
      out.warnings.push_back("CFL number " + std::to_string(d.cfl) + " >= 1 at t = " + std::to_string(s_.t) + " s");
      cfl_warned = true;
    }
    track_rho(false);
    out.max_surface_amplitude = std::max(out.max_surface_amplitude, max_abs(s_.eta));
    if (window > 0) {
      window_max = std::max(window_max, max_abs(s_.eta));
      if (n % window == 0) {
        out.min_surface_amplitude = std::min(out.min_surface_amplitude, window_max);
        window_max = 0.0;
      }
    }
    if (std::find(snap_steps.begin(), snap_steps.end(), n) != snap_steps.end()) emit();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<double> pressure_line_cut(const SliceState& state, const ScenarioConfig& cfg, double z) {
  const double dz = cfg.dz();
  const double s = (z - cfg.z_min) / dz - 0.5;
  const int j0 = std::clamp(static_cast<int>(std::floor(s)), 0, state.nz - 2);
  const double a = std::clamp(s - j0, 0.0, 1.0);
  std::vector<double> cut(static_cast<std::size_t>(state.nx));
  for (int i = 0; i < state.nx; ++i)
    cut[static_cast<std::size_t>(i)] = (1.0 - a) * state.q[static_cast<std::size_t>(state.cell(i, j0))] +
                                       a * state.q[static_cast<std::size_t>(state.cell(i, j0 + 1))];
  return cut;
}

LineCutError standing_wave_cut_error(const SliceState& state, const ScenarioConfig& cfg, double z) {
  const auto wave = standing_wave_fields(cfg.wave_params());
  const auto cut = pressure_line_cut(state, cfg, z);
  std::vector<double> ref(cut.size());
  for (std::size_t i = 0; i < cut.size(); ++i) ref[i] = wave.q(state.t, (static_cast<double>(i) + 0.5) * cfg.dx(), z);
  LineCutError e;
  e.numeric_peak = max_abs(cut);
  e.analytic_peak = max_abs(ref);
  double num = 0.0, den = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < cut.size(); ++i) {
    num += (cut[i] - ref[i]) * (cut[i] - ref[i]);
    den += ref[i] * ref[i];
    const double a = e.numeric_peak > 0.0 ? cut[i] / e.numeric_peak : 0.0;
    const double b = e.analytic_peak > 0.0 ? ref[i] / e.analytic_peak : 0.0;
    nn += (a - b) * (a - b);
  }
  e.relative_rms = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  e.normalized_rms = std::sqrt(nn / static_cast<double>(cut.size()));
  return e;
}

}  // namespace hdg
