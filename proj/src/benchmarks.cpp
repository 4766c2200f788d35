#include "hdg/benchmarks.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace hdg {

EllipticProblem channel_problem(const ChannelParams& params) {
  params.validate();
  EllipticProblem prob;
  prob.coeffs.k1 = [params](const Point& p) { return params.depth(p.x); };
  const double c = -params.sigma * params.sigma / params.g;
  prob.coeffs.c = [c](const Point&) { return c; };
  const double mid = 0.5 * (params.L1 + params.L);
  const double amplitude = params.A;
  prob.boundary = [mid, amplitude](const Face& f) {
    if (f.a.x > mid) return BoundaryCondition{BoundaryKind::Dirichlet, [amplitude](const Point&) { return amplitude; }};
    return BoundaryCondition{BoundaryKind::Neumann, {}};
  };
  return prob;
}

EllipticProblem sector_problem(const SectorParams& params) {
  params.validate();
  EllipticProblem prob;
  prob.coeffs.k1 = [](const Point&) { return 1.0; };
  prob.coeffs.k2 = [](const Point& p) { return 1.0 / (p.x * p.x); };
  prob.coeffs.beta = [](const Point& p) { return Vec2{-1.0 / p.x, 0.0}; };
  const double c = -params.omega * params.omega / (params.g * params.H0);
  prob.coeffs.c = [c](const Point&) { return c; };
  const double L = params.L;
  const double tol = 1e-9 * (params.L - params.L1);
  const double m = params.m;
  const double alpha = params.alpha;
  const double A = params.A;
  prob.boundary = [=](const Face& f) {
    if (f.axis == FaceAxis::X && std::abs(f.a.x - L) < tol) {
      return BoundaryCondition{BoundaryKind::Dirichlet, [=](const Point& p) {
                                 return A * std::cos(m * std::numbers::pi * (p.y + 0.5 * alpha) / alpha);
                               }};
    }
    return BoundaryCondition{BoundaryKind::Neumann, {}};
  };
  return prob;
}

Mesh sector_mesh(const SectorParams& params, int nr, int ntheta) {
  return build_rect_mesh({params.L1, params.L}, {-0.5 * params.alpha, 0.5 * params.alpha}, nr, ntheta);
}

namespace {

template <class F>
ErrorRow timed(int n, int ny, F&& body) {
  ErrorRow row;
  row.n = n;
  row.ny = ny;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(row);
  } catch (const std::exception& ex) {
    row.error = ex.what();
    row.e2 = std::nan("");
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

ErrorRow run_channel_case(const ChannelParams& params, int n_elements, int degree, SolverOptions options) {
  return timed(n_elements, 1, [&](ErrorRow& row) {
    const ChannelSolution exact(params);
    const Mesh mesh = build_interval_mesh(params.L1, params.L, n_elements);
    auto [sol, diag] = solve_elliptic(mesh, channel_problem(params), degree, options);
    std::vector<double> num, ref;
    for (const auto& el : mesh.elements()) {
      num.push_back(sol.pressure_at_center(el.id));
      ref.push_back(exact(el.center().x));
    }
    row.e2 = e2_error(num, ref);
    row.diagnostics = diag;
  });
}

ErrorRow run_sector_case(const SectorParams& params, int nr, int ntheta, int degree, SolverOptions options) {
  return timed(nr, ntheta, [&](ErrorRow& row) {
    const SectorSolution exact(params);
    const Mesh mesh = sector_mesh(params, nr, ntheta);
    auto [sol, diag] = solve_elliptic(mesh, sector_problem(params), degree, options);
    std::vector<double> num, ref;
    for (const auto& el : mesh.elements()) {
      const auto c = el.center();
      num.push_back(sol.pressure_at_center(el.id));
      ref.push_back(exact(c.x, c.y));
    }
    row.e2 = e2_error(num, ref);
    row.diagnostics = diag;
  });
}

double ManufacturedSolution::p(const Point& x) const { return std::exp(x.x) * std::sin(2.0 * x.y); }

Vec2 ManufacturedSolution::gradient(const Point& x) const {
  return {std::exp(x.x) * std::sin(2.0 * x.y), 2.0 * std::exp(x.x) * std::cos(2.0 * x.y)};
}

EllipticProblem manufactured_problem() {
  EllipticProblem prob;
  prob.coeffs.k1 = [](const Point& p) { return 1.0 + p.x * p.x; };
  prob.coeffs.k2 = [](const Point& p) { return 1.0 + 0.5 * p.y; };
  prob.coeffs.beta = [](const Point& p) { return Vec2{0.5, -0.3 * p.x}; };
  prob.coeffs.c = [](const Point&) { return -1.0; };
  prob.coeffs.f = [](const Point& p) {
    const double e = std::exp(p.x), s = std::sin(2.0 * p.y), c = std::cos(2.0 * p.y);
    // -(k1 p_x)_x - (k2 p_y)_y + beta . grad p + c p
    const double diff_x = -e * s * (1.0 + 2.0 * p.x + p.x * p.x);
    const double diff_y = -e * c + 4.0 * (1.0 + 0.5 * p.y) * e * s;
    const double adv = 0.5 * e * s - 0.6 * p.x * e * c;
    return diff_x + diff_y + adv - e * s;
  };
  prob.boundary = [](const Face&) {
    return BoundaryCondition{BoundaryKind::Dirichlet, [](const Point& p) { return ManufacturedSolution{}.p(p); }};
  };
  return prob;
}

double l2_error(const ElementSolution& solution, const std::function<double(const Point&)>& exact, int component) {
  const auto& t = solution.tables();
  const auto& rule = t.volume_rule;
  double num = 0.0, den = 0.0;
  for (const auto& el : solution.mesh().elements()) {
    const double jac = t.volume_jacobian(el);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto [xi, eta] = rule.points[q];
      const double uh = solution.evaluate(el.id, xi, eta)(component);
      const double u = exact(t.map(el, xi, eta));
      num += rule.weights[q] * jac * (uh - u) * (uh - u);
      den += rule.weights[q] * jac * u * u;
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

ErrorRow run_manufactured_case(int n, int degree, SolverOptions options) {
  return timed(n, n, [&](ErrorRow& row) {
    const Mesh mesh = build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, n, n);
    auto [sol, diag] = solve_elliptic(mesh, manufactured_problem(), degree, options);
    row.e2 = l2_error(sol, [](const Point& p) { return ManufacturedSolution{}.p(p); }, sol.tables().components - 1);
    row.diagnostics = diag;
  });
}

std::vector<double> observed_orders(const std::vector<ErrorRow>& rows) {
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = static_cast<double>(rows[i].n) / rows[i - 1].n;
    out.push_back(std::log(rows[i - 1].e2 / rows[i].e2) / std::log(ratio));
  }
  return out;
}

}  // namespace hdg
