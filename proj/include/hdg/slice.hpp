#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdg/hdg_solver.hpp"
#include "hdg/oracles.hpp"

namespace hdg {

class SliceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { StandingWave, DensityFlow };

// Triangle below the segment (x0, z0)-(x1, z1), closed by the vertical x = x1.
struct Ramp {
  double x0 = 250.0, z0 = -100.0;
  double x1 = 350.0, z1 = -60.0;
};

struct Bar {
  double x0 = 400.0, x1 = 420.0;
  double z0 = -100.0, z1 = -60.0;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::StandingWave;
  double x_min = 0.0, x_max = 10.0;
  double z_min = -10.0, z_max = 0.0;
  int nx = 40, nz = 40;
  double dt = 0.5;
  double t_end = 600.0;
  int degree = 2;
  std::vector<double> snapshot_times;  // seconds; the initial state is always recorded
  double rho0 = 1000.0;
  double g = 9.81;
  // standing wave
  double eta0 = 0.1;
  double kappa = 3.14159265358979323846 / 10.0;
  // density flow
  double rho1 = 1029.0;
  double dense_x_max = 50.0;  // dense water fills x < dense_x_max
  double Kh = 1e-4, Kz = 1e-4;
  bool bathymetry = true;
  Ramp ramp;
  Bar bar;
  bool advection = false;
  double instability_factor = 1e6;

  // Benchmark-scale defaults for the two scenarios.
  static ScenarioConfig standing_wave();
  static ScenarioConfig density_flow();
  void validate() const;
  [[nodiscard]] double dx() const { return (x_max - x_min) / nx; }
  [[nodiscard]] double dz() const { return (z_max - z_min) / nz; }
  [[nodiscard]] bool solid(double x, double z) const;  // cell-center predicate
  [[nodiscard]] StandingWaveParams wave_params() const;
};

/// Time-level fields of the slice on an nx x nz grid of cells (index i + nx * j,
/// j = 0 at the bottom). Cell-centered u, w, q, rho, p; face-normal
/// velocities on x-faces (index i + (nx + 1) * j, face left of cell i) and
/// z-faces (index i + nx * j, face below cell j); surface arrays per column.
struct SliceState {
  double t = 0.0;
  int nx = 0, nz = 0;
  std::vector<char> fluid;  // per cell
  std::vector<double> u, w, q, dqdx, dqdz, rho, p;
  std::vector<double> U, W;  // face-normal velocities
  std::vector<double> eta, qs;

  [[nodiscard]] int cell(int i, int j) const { return i + nx * j; }
  [[nodiscard]] bool is_fluid(int i, int j) const {
    return i >= 0 && i < nx && j >= 0 && j < nz && fluid[static_cast<std::size_t>(cell(i, j))] != 0;
  }
};

struct StepDiagnostics {
  double divergence_before = 0.0;  // max |D(U*)| over fluid cells
  double divergence_after = 0.0;   // max |D(U^{n+1})|
  double cell_divergence_after = 0.0;  // centered differences of cell velocities, interior cells
  double trace_residual = 0.0;
  double cfl = 0.0;
  double max_speed = 0.0;
};

struct Snapshot {
  double t = 0.0;
  SliceState state;
};

struct SliceRunResult {
  std::vector<Snapshot> snapshots;
  std::vector<StepDiagnostics> steps;
  double min_rho = 0.0, max_rho = 0.0;  // over all steps (density runs)
  double max_surface_amplitude = 0.0;   // max |eta| over all steps
  double min_surface_amplitude = 0.0;   // min over whole wave periods of the period max of |eta|
  double worst_divergence_ratio = 0.0;  // max over steps of after / before
  double seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Pressure-projection stepper: density update, momentum predictor, surface
/// pressure update, HDG Poisson correction and velocity corrector.
class SliceModel {
 public:
  explicit SliceModel(ScenarioConfig config);

  [[nodiscard]] const ScenarioConfig& config() const { return cfg_; }
  [[nodiscard]] const SliceState& state() const { return s_; }
  SliceState& mutable_state() { return s_; }
  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const EllipticOperator& poisson() const { return *poisson_; }

  // Individual stages, in loop order.
  void density_step();
  void predictor();
  void surface_update();
  void pressure_correction();
  void corrector();
  StepDiagnostics step();

  // Fields of the last step: intermediate velocity, pressure correction, surface correction.
  [[nodiscard]] const std::vector<double>& intermediate_u() const { return us_; }
  [[nodiscard]] const std::vector<double>& intermediate_w() const { return ws_; }
  [[nodiscard]] const std::vector<double>& correction() const { return dq_; }  // per cell
  [[nodiscard]] const std::vector<double>& surface_correction() const { return dqs_; }

  // Face-flux divergence per cell of face velocity arrays (0 in solid cells).
  [[nodiscard]] std::vector<double> face_divergence(const std::vector<double>& U, const std::vector<double>& W) const;
  // Centered-difference divergence of cell velocities at cells with four fluid neighbours.
  [[nodiscard]] double max_cell_divergence(const std::vector<double>& u, const std::vector<double>& w) const;
  // Hydrostatic pressure from the current density, integrated down from p(0) = 0.
  void update_hydrostatic();
  [[nodiscard]] double total_mass() const;  // sum rho * cell area over fluid cells

  SliceRunResult run(const std::function<void(const SliceState&)>& on_snapshot = {});

 private:
  void init_state();
  void face_velocities(const std::vector<double>& u, const std::vector<double>& w, std::vector<double>& U,
                       std::vector<double>& W) const;
  [[nodiscard]] double surface_value(double x) const;
  void check_finite(const char* stage) const;

  ScenarioConfig cfg_;
  double dx_, dz_;
  std::shared_ptr<const Mesh> mesh_;
  std::unique_ptr<EllipticOperator> poisson_;
  std::vector<int> elem_of_cell_;
  std::vector<int> xface_;  // mesh face of each structured x-face, -1 if none
  std::vector<int> zface_;
  SliceState s_;
  std::vector<double> us_, ws_, Us_, Ws_;
  std::vector<double> dq_, dqx_, dqz_, dqs_;
  std::vector<double> xcenters_;
  StepDiagnostics last_;
  double velocity_scale_ = 0.0;
};

/// Line cut of q at height z (linear interpolation between the two nearest cell rows).
std::vector<double> pressure_line_cut(const SliceState& state, const ScenarioConfig& cfg, double z);

/// Relative RMS of the line cut at z against the analytic standing wave at time t,
/// and the same after scaling both curves to [-1, 1] by their max modulus.
struct LineCutError {
  double relative_rms = 0.0;
  double normalized_rms = 0.0;
  double numeric_peak = 0.0;
  double analytic_peak = 0.0;
};
LineCutError standing_wave_cut_error(const SliceState& state, const ScenarioConfig& cfg, double z);

}  // namespace hdg
