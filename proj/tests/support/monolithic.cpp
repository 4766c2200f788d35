#include "monolithic.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace hdgtest {

using namespace hdg;

namespace {

// Normal Jacobian n1 A1 + n2 A2 of the system z + K grad p = 0, div z + ... = f.
Eigen::MatrixXd normal_jacobian(const Vec2& n, int dim) {
  const int m = dim + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  A(0, m - 1) = A(m - 1, 0) = n.x;
  if (dim == 2) A(1, m - 1) = A(m - 1, 1) = n.y;
  return A;
}

Eigen::MatrixXd abs_symmetric(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  return es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd reaction(const CoefficientField::Values& v, int dim) {
  const int m = dim + 1;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  B(0, 0) = 1.0 / v.k1;
  B(m - 1, 0) = -v.beta.x / v.k1;
  if (dim == 2) {
    B(1, 1) = 1.0 / v.k2;
    B(m - 1, 1) = -v.beta.y / v.k2;
  }
  B(m - 1, m - 1) = v.c;
  return B;
}

}  // namespace

MonolithicSolution solve_monolithic(const Mesh& mesh, const EllipticProblem& problem, int degree, int extra_points) {
  const int dim = mesh.dimension();
  const int m = dim + 1;
  const ElementBasis basis(degree, dim);
  const int P = basis.size();
  const int Q = dim == 1 ? 1 : degree + 1;
  const Lagrange1D& trace_basis = basis.line();
  const int ne = mesh.num_elements();
  const int nf = mesh.num_faces();
  const int n_el = m * P;
  const int T0 = ne * n_el;
  const int N = T0 + 2 * Q * nf;
  auto U = [&](int e, int a, int i) { return e * n_el + a * P + i; };
  auto T = [&](int f, int c, int k) { return T0 + (f * 2 + c) * Q + k; };

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  const QuadratureRule vol = gauss_rule(degree + 1 + extra_points, dim);
  const QuadratureRule line = gauss_rule(degree + 1 + extra_points, 1);
  const Eigen::MatrixXd A1 = normal_jacobian({1.0, 0.0}, dim);
  const Eigen::MatrixXd A2 = normal_jacobian({0.0, 1.0}, dim);

  auto ref_coords = [&](const Element& el, const Point& x) {
    const double xi = 2.0 * (x.x - el.lo.x) / el.hx() - 1.0;
    const double eta = dim == 2 ? 2.0 * (x.y - el.lo.y) / el.hy() - 1.0 : 0.0;
    return std::array<double, 2>{xi, eta};
  };
  // Quadrature points of a face in physical coordinates with weights (ds included) and face coordinate.
  struct FacePoint {
    Point x;
    double w;
    double s;
  };
  auto face_points = [&](const Face& f) {
    std::vector<FacePoint> pts;
    if (dim == 1) {
      pts.push_back({f.a, 1.0, 0.0});
      return pts;
    }
    const double len = f.measure();
    for (std::size_t q = 0; q < line.size(); ++q) {
      const double s = line.points[q][0];
      const double t = 0.5 * (s + 1.0);
      pts.push_back({{f.a.x + t * (f.b.x - f.a.x), f.a.y + t * (f.b.y - f.a.y)}, 0.5 * len * line.weights[q], s});
    }
    return pts;
  };
  auto trace_value = [&](int k, double s) { return dim == 1 ? 1.0 : trace_basis.value(k, s); };
  // trace direction of component c seen from a side with outward normal n and sign s_e
  auto trace_direction = [&](int c, const Vec2& n_out, double s_e) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    if (c == 0) {
      v(0) = s_e * n_out.x;
      if (dim == 2) v(1) = s_e * n_out.y;
    } else {
      v(m - 1) = 1.0;
    }
    return v;
  };
  auto outward = [&](const Face& f, int e) {
    return f.minus == e ? f.normal : Vec2{-f.normal.x, -f.normal.y};
  };

  // Element equations: -(F(u), grad v) + (B u, v) + <A u + |A| (u - u_hat), v> = (f, v).
  for (int e = 0; e < ne; ++e) {
    const auto& el = mesh.element(e);
    const double jac = dim == 1 ? 0.5 * el.hx() : 0.25 * el.hx() * el.hy();
    const double sx = 2.0 / el.hx();
    const double sy = dim == 2 ? 2.0 / el.hy() : 0.0;
    for (std::size_t q = 0; q < vol.size(); ++q) {
      const double xi = vol.points[q][0];
      const double eta = dim == 2 ? vol.points[q][1] : 0.0;
      const Point x{el.lo.x + 0.5 * (xi + 1.0) * el.hx(), dim == 2 ? el.lo.y + 0.5 * (eta + 1.0) * el.hy() : 0.0};
      const auto v = problem.coeffs.at(x, dim);
      const Eigen::MatrixXd B = reaction(v, dim);
      const double w = vol.weights[q] * jac;
      for (int i = 0; i < P; ++i) {
        const double vi = basis.value(i, xi, eta);
        const auto g = basis.gradient(i, xi, eta);
        rhs(U(e, m - 1, i)) += w * v.f * vi;
        for (int j = 0; j < P; ++j) {
          const double vj = basis.value(j, xi, eta);
          for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
              M(U(e, a, i), U(e, b, j)) += w * (B(a, b) * vj * vi - A1(a, b) * vj * g[0] * sx -
                                                 (dim == 2 ? A2(a, b) * vj * g[1] * sy : 0.0));
        }
      }
    }
    for (int lf = 0; lf < (dim == 1 ? 2 : 4); ++lf) {
      const int fid = el.faces[static_cast<std::size_t>(lf)];
      const Face& f = mesh.face(fid);
      const Vec2 n = outward(f, e);
      const double s_e = f.minus == e ? 1.0 : -1.0;
      const Eigen::MatrixXd A = normal_jacobian(n, dim);
      const Eigen::MatrixXd absA = abs_symmetric(A);
      const Eigen::MatrixXd ApA = A + absA;
      for (const auto& fp : face_points(f)) {
        const auto r = ref_coords(el, fp.x);
        for (int i = 0; i < P; ++i) {
          const double vi = basis.value(i, r[0], r[1]);
          if (vi == 0.0) continue;
          for (int j = 0; j < P; ++j) {
            const double vj = basis.value(j, r[0], r[1]);
            for (int a = 0; a < m; ++a)
              for (int b = 0; b < m; ++b) M(U(e, a, i), U(e, b, j)) += fp.w * ApA(a, b) * vj * vi;
          }
          for (int c = 0; c < 2; ++c) {
            const Eigen::VectorXd d = absA * trace_direction(c, n, s_e);
            for (int k = 0; k < Q; ++k) {
              const double psi = trace_value(k, fp.s);
              for (int a = 0; a < m; ++a) M(U(e, a, i), T(fid, c, k)) -= fp.w * d(a) * psi * vi;
            }
          }
        }
      }
    }
  }

  // Trace conditions.
  for (const Face& f : mesh.faces()) {
    std::vector<int> sides{f.minus};
    if (f.kind == FaceKind::Interior) sides.push_back(f.plus);
    const auto bc = f.kind == FaceKind::Boundary ? problem.boundary(f) : BoundaryCondition{};
    const bool dirichlet = bc.kind == BoundaryKind::Dirichlet;
    for (const auto& fp : face_points(f)) {
      for (int c = 0; c < 2; ++c) {
        const bool data_row = f.kind == FaceKind::Boundary && ((dirichlet && c == 1) || (!dirichlet && c == 0));
        for (int k = 0; k < Q; ++k) {
          const double psi_k = trace_value(k, fp.s);
          const int row = T(f.id, c, k);
          if (data_row) {
            // projection of the boundary data onto the trace space
            for (int l = 0; l < Q; ++l) M(row, T(f.id, c, l)) += fp.w * psi_k * trace_value(l, fp.s);
            if (bc.value) rhs(row) += fp.w * psi_k * bc.value(fp.x);
            continue;
          }
          for (int e : sides) {
            const auto& el = mesh.element(e);
            const Vec2 n = outward(f, e);
            const double s_e = f.minus == e ? 1.0 : -1.0;
            const Eigen::MatrixXd A = normal_jacobian(n, dim);
            const Eigen::MatrixXd absA = abs_symmetric(A);
            const Eigen::RowVectorXd pi = trace_direction(c, n, s_e).transpose();
            // interior faces: conservation of the upwind flux A u + |A| (u - u_hat);
            // boundary faces: the outgoing characteristic (A + |A|)(u - u_hat) = 0
            const Eigen::RowVectorXd on_u = pi * (A + absA);
            const Eigen::MatrixXd on_hat = f.kind == FaceKind::Interior ? absA : Eigen::MatrixXd(A + absA);
            const auto r = ref_coords(el, fp.x);
            for (int j = 0; j < P; ++j) {
              const double vj = basis.value(j, r[0], r[1]);
              if (vj == 0.0) continue;
              for (int b = 0; b < m; ++b) M(row, U(e, b, j)) += fp.w * psi_k * on_u(b) * vj;
            }
            for (int c2 = 0; c2 < 2; ++c2) {
              const double coef = pi * on_hat * trace_direction(c2, n, s_e);
              for (int l = 0; l < Q; ++l) M(row, T(f.id, c2, l)) -= fp.w * psi_k * coef * trace_value(l, fp.s);
            }
          }
        }
      }
    }
  }

  // Row equilibration, then a dense pivoted solve.
  for (int r = 0; r < N; ++r) {
    const double s = M.row(r).lpNorm<Eigen::Infinity>();
    if (s > 0.0) {
      M.row(r) /= s;
      rhs(r) /= s;
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  const Eigen::VectorXd x = lu.solve(rhs);
  MonolithicSolution out;
  out.residual = (M * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
  for (int e = 0; e < ne; ++e) out.elements.push_back(x.segment(e * n_el, n_el));
  out.trace = x.tail(N - T0);
  return out;
}

double relative_difference(const ElementSolution& hdg, const MonolithicSolution& mono) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t e = 0; e < mono.elements.size(); ++e) {
    const auto& a = hdg.coefficients(static_cast<int>(e));
    diff = std::max(diff, (a - mono.elements[e]).lpNorm<Eigen::Infinity>());
    scale = std::max(scale, mono.elements[e].lpNorm<Eigen::Infinity>());
  }
  diff = std::max(diff, (hdg.trace() - mono.trace).lpNorm<Eigen::Infinity>());
  scale = std::max(scale, mono.trace.lpNorm<Eigen::Infinity>());
  return diff / scale;
}

EllipticProblem linear_coefficient_problem(int dim, bool advection, double reaction, bool mixed_boundary) {
  EllipticProblem pb;
  auto& c = pb.coeffs;
  c.k1 = [](const Point& x) { return 1.0 / (1.0 + 0.3 * x.x); };
  if (dim == 2) c.k2 = [](const Point& x) { return 1.0 / (1.2 - 0.4 * x.y); };
  if (advection) {
    if (dim == 1) {
      c.beta = [](const Point&) { return Vec2{0.7, 0.0}; };
    } else {
      c.beta = [](const Point& x) { return Vec2{0.7 + 0.4 * x.y, -0.5 + 0.6 * x.x}; };
    }
  }
  c.c = [reaction, dim](const Point& x) { return reaction + 0.5 * x.x * (dim == 2 ? x.y : 1.0); };
  c.f = [](const Point& x) { return 1.0 + x.x - 2.0 * x.y + x.x * x.y; };
  pb.boundary = [mixed_boundary, dim](const Face& f) {
    const bool neumann = mixed_boundary && (dim == 1 ? f.normal.x > 0.0 : f.axis == FaceAxis::Y);
    if (neumann) return BoundaryCondition{BoundaryKind::Neumann, [](const Point& x) { return 0.2 + 0.1 * x.x; }};
    return BoundaryCondition{BoundaryKind::Dirichlet, [](const Point& x) { return 0.3 + x.x - 0.5 * x.y; }};
  };
  return pb;
}

}  // namespace hdgtest
