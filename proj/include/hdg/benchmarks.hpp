#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hdg/hdg_solver.hpp"
#include "hdg/oracles.hpp"

namespace hdg {

// Tidal channel in (L1, L): -(H z')' ... as the system H^-1 z + p' = 0, z' - (sigma^2/g) p = 0,
// wall at L1, forcing A at L.
EllipticProblem channel_problem(const ChannelParams& params);
// Sector in polar coordinates (x = r, y = theta), wall everywhere except r = L.
EllipticProblem sector_problem(const SectorParams& params);
Mesh sector_mesh(const SectorParams& params, int nr, int ntheta);

struct ErrorRow {
  int n = 0;       // elements (channel) or cells per direction (sector)
  int ny = 0;
  double e2 = 0.0;
  double seconds = 0.0;
  Diagnostics diagnostics;
  std::string error;  // nonempty when the solve failed
};

ErrorRow run_channel_case(const ChannelParams& params, int n_elements, int degree, SolverOptions options = {});
ErrorRow run_sector_case(const SectorParams& params, int nr, int ntheta, int degree, SolverOptions options = {});

// Smooth manufactured solution p = exp(x) sin(2y) on [0,1]^2 with variable
// diagonal K, advection, negative reaction and Dirichlet data everywhere.
struct ManufacturedSolution {
  [[nodiscard]] double p(const Point& x) const;
  [[nodiscard]] Vec2 gradient(const Point& x) const;
};
EllipticProblem manufactured_problem();

// Relative L2 norm of (component of solution) - exact over the fluid mesh, by volume quadrature.
double l2_error(const ElementSolution& solution, const std::function<double(const Point&)>& exact, int component);

// e2 is the relative L2 error of p on an n x n mesh.
ErrorRow run_manufactured_case(int n, int degree, SolverOptions options = {});

// log2 ratio of successive errors for meshes refined by a factor 2
std::vector<double> observed_orders(const std::vector<ErrorRow>& rows);

}  // namespace hdg
