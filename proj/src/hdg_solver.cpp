#include "hdg/hdg_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

namespace hdg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> face_trace_nodes(const ElementBasis& basis, int dim) {
  if (dim == 1) return {0.0};
  return basis.line().nodes();
}

}  // namespace

// ---------------------------------------------------------------------------
// ElementTables

ElementTables::ElementTables(int degree_, int dim_)
    : dim(dim_),
      degree(degree_),
      components(dim_ + 1),
      n_basis(0),
      n_face_basis(dim_ == 1 ? 1 : degree_ + 1),
      n_faces(dim_ == 1 ? 2 : 4),
      basis(degree_, dim_),
      face_basis(face_trace_nodes(basis, dim_)),
      volume_rule(gauss_rule(degree_ + 1, dim_)),
      volume(tabulate(basis, volume_rule)) {
  n_basis = basis.size();
  if (dim == 1) {
    face_rule.dim = 1;
    face_rule.points = {{0.0, 0.0}};
    face_rule.weights = {1.0};
  } else {
    face_rule = gauss_rule(degree + 1, 1);
  }
  const int nq = static_cast<int>(face_rule.size());
  face_values.assign(static_cast<std::size_t>(n_faces), std::vector<double>(static_cast<std::size_t>(nq * n_basis)));
  for (int lf = 0; lf < n_faces; ++lf) {
    for (int q = 0; q < nq; ++q) {
      const auto ref = face_point(lf, q);
      for (int i = 0; i < n_basis; ++i) {
        face_values[static_cast<std::size_t>(lf)][static_cast<std::size_t>(q * n_basis + i)] =
            basis.value(i, ref[0], ref[1]);
      }
    }
  }
  trace_values.resize(static_cast<std::size_t>(nq * n_face_basis));
  for (int q = 0; q < nq; ++q) {
    for (int k = 0; k < n_face_basis; ++k) {
      trace_values[static_cast<std::size_t>(q * n_face_basis + k)] =
          face_basis.value(k, face_rule.points[static_cast<std::size_t>(q)][0]);
    }
  }
  center_values.resize(static_cast<std::size_t>(n_basis));
  for (int i = 0; i < n_basis; ++i) center_values[static_cast<std::size_t>(i)] = basis.value(i, 0.0, 0.0);
}

Point ElementTables::map(const Element& e, double xi, double eta) const {
  Point p{e.lo.x + 0.5 * (xi + 1.0) * e.hx(), 0.0};
  if (dim == 2) p.y = e.lo.y + 0.5 * (eta + 1.0) * e.hy();
  return p;
}

std::array<double, 2> ElementTables::face_point(int lf, int q) const {
  if (dim == 1) return {lf == 0 ? -1.0 : 1.0, 0.0};
  const double t = face_rule.points[static_cast<std::size_t>(q)][0];
  switch (lf) {
    case 0: return {-1.0, t};
    case 1: return {1.0, t};
    case 2: return {t, -1.0};
    default: return {t, 1.0};
  }
}

double ElementTables::face_jacobian(const Element& e, int lf) const {
  if (dim == 1) return 1.0;
  return lf < 2 ? 0.5 * e.hy() : 0.5 * e.hx();
}

double ElementTables::volume_jacobian(const Element& e) const {
  return dim == 1 ? 0.5 * e.hx() : 0.25 * e.hx() * e.hy();
}

// ---------------------------------------------------------------------------
// EquilibratedLU

void EquilibratedLU::compute(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd s = a;
  row_ = Eigen::VectorXd::Ones(a.rows());
  col_ = Eigen::VectorXd::Ones(a.cols());
  for (int sweep = 0; sweep < 8; ++sweep) {
    Eigen::VectorXd r = s.rowwise().lpNorm<Eigen::Infinity>();
    Eigen::VectorXd c = s.colwise().lpNorm<Eigen::Infinity>().transpose();
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = r(i) > 0.0 ? 1.0 / std::sqrt(r(i)) : 1.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = c(i) > 0.0 ? 1.0 / std::sqrt(c(i)) : 1.0;
    s = r.asDiagonal() * s * c.asDiagonal();
    row_ = row_.cwiseProduct(r);
    col_ = col_.cwiseProduct(c);
    const double spread = std::max((r.array() - 1.0).abs().maxCoeff(), (c.array() - 1.0).abs().maxCoeff());
    if (spread < 1e-3) break;
  }
  lu_.compute(s);
  const Eigen::VectorXd d = lu_.matrixLU().diagonal().cwiseAbs();
  const double hi = d.maxCoeff();
  pivot_ratio_ = hi > 0.0 && std::isfinite(hi) ? d.minCoeff() / hi : 0.0;
}

Eigen::MatrixXd EquilibratedLU::solve(const Eigen::MatrixXd& b) const {
  return col_.asDiagonal() * lu_.solve(row_.asDiagonal() * b);
}

Eigen::VectorXd EquilibratedLU::solve(const Eigen::VectorXd& b) const {
  return col_.cwiseProduct(lu_.solve(row_.cwiseProduct(b)));
}

// ---------------------------------------------------------------------------
// Local element matrices

namespace {

struct IntrinsicMatrices {
  Eigen::MatrixXd matrix;      // L
  Eigen::MatrixXd coupling;    // C with element outward normals
  Eigen::MatrixXd extraction;  // E with element outward normals
  Eigen::VectorXd source_moments;  // rhs for a unit source
};

// Assembles L, C, E for coefficient values sampled at the volume quadrature points.
IntrinsicMatrices assemble_intrinsic(const Element& e, const std::vector<CoefficientField::Values>& samples,
                                     const ElementTables& t) {
  const int m = t.components;
  const int d = t.dim;
  const int P = t.n_basis;
  const int Q = t.n_face_basis;
  const int n = t.n_local();
  IntrinsicMatrices out;
  out.matrix = Eigen::MatrixXd::Zero(n, n);
  out.coupling = Eigen::MatrixXd::Zero(n, t.n_trace_local());
  out.extraction = Eigen::MatrixXd::Zero(t.n_trace_local(), n);
  out.source_moments = Eigen::VectorXd::Zero(n);

  const Eigen::MatrixXd A1 = face_matrices({1.0, 0.0}, d).A;
  const Eigen::MatrixXd A2 = d == 2 ? face_matrices({0.0, 1.0}, d).A : Eigen::MatrixXd();
  const double jac = t.volume_jacobian(e);
  const double sx = 2.0 / e.hx();
  const double sy = d == 2 ? 2.0 / e.hy() : 0.0;
  auto idx = [P](int comp, int i) { return comp * P + i; };

  // -(F(u), grad v) + (B u, v)
  for (int q = 0; q < t.volume.n_points; ++q) {
    const double w = t.volume_rule.weights[static_cast<std::size_t>(q)] * jac;
    const Eigen::MatrixXd B = reaction_matrix(samples[static_cast<std::size_t>(q)], d);
    for (int i = 0; i < P; ++i) {
      const double vi = t.volume.v(q, i);
      const double gx = t.volume.dx(q, i) * sx;
      const double gy = d == 2 ? t.volume.dy(q, i) * sy : 0.0;
      out.source_moments(idx(m - 1, i)) += w * vi;
      for (int j = 0; j < P; ++j) {
        const double vj = t.volume.v(q, j);
        for (int a = 0; a < m; ++a) {
          for (int b = 0; b < m; ++b) {
            double val = B(a, b) * vj * vi;
            val -= A1(a, b) * vj * gx;
            if (d == 2) val -= A2(a, b) * vj * gy;
            if (val != 0.0) out.matrix(idx(a, i), idx(b, j)) += w * val;
          }
        }
      }
    }
  }

  // <(A + |A|) u, v> on each face, coupling <|A| u-hat, v>, extraction <(A + |A|) u, w>
  const int nq = static_cast<int>(t.face_rule.size());
  for (int lf = 0; lf < t.n_faces; ++lf) {
    const auto fm = face_matrices(local_face_normal(d, lf), d);
    const Eigen::MatrixXd ApA = fm.A + fm.abs_A;
    Eigen::VectorXd uhat_mu = Eigen::VectorXd::Zero(m);
    uhat_mu(0) = fm.normal.x;
    if (d == 2) uhat_mu(1) = fm.normal.y;
    Eigen::VectorXd uhat_p = Eigen::VectorXd::Zero(m);
    uhat_p(m - 1) = 1.0;
    const Eigen::VectorXd coup_mu = fm.abs_A * uhat_mu;
    const Eigen::VectorXd coup_p = fm.abs_A * uhat_p;
    // projections selecting the mu row (along the normal) and the p-hat row
    const Eigen::RowVectorXd row_mu = uhat_mu.transpose() * ApA;
    const Eigen::RowVectorXd row_p = uhat_p.transpose() * ApA;
    const double fj = t.face_jacobian(e, lf);
    const auto& fv = t.face_values[static_cast<std::size_t>(lf)];
    const auto nodes = t.basis.face_nodes(lf);
    for (int q = 0; q < nq; ++q) {
      const double w = t.face_rule.weights[static_cast<std::size_t>(q)] * fj;
      for (int i : nodes) {
        const double vi = fv[static_cast<std::size_t>(q * P + i)];
        for (int j : nodes) {
          const double vj = fv[static_cast<std::size_t>(q * P + j)];
          for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
              if (ApA(a, b) != 0.0) out.matrix(idx(a, i), idx(b, j)) += w * ApA(a, b) * vj * vi;
            }
          }
        }
        for (int k = 0; k < Q; ++k) {
          const double mk = t.trace_values[static_cast<std::size_t>(q * Q + k)];
          for (int a = 0; a < m; ++a) {
            out.coupling(idx(a, i), t.trace_index(lf, 0, k)) += w * coup_mu(a) * mk * vi;
            out.coupling(idx(a, i), t.trace_index(lf, 1, k)) += w * coup_p(a) * mk * vi;
            out.extraction(t.trace_index(lf, 0, k), idx(a, i)) += w * row_mu(a) * vi * mk;
            out.extraction(t.trace_index(lf, 1, k), idx(a, i)) += w * row_p(a) * vi * mk;
          }
        }
      }
    }
  }
  return out;
}

std::vector<CoefficientField::Values> sample_coefficients(
    const Element& e, const CoefficientField& coeffs, const ElementTables& t,
    CoefficientSampling sampling = CoefficientSampling::Quadrature) {
  std::vector<CoefficientField::Values> out;
  out.reserve(t.volume_rule.size());
  if (sampling == CoefficientSampling::ElementCenter) {
    const auto center = coeffs.at(t.map(e, 0.0, 0.0), t.dim);
    for (const auto& pt : t.volume_rule.points) {
      auto v = center;
      v.f = coeffs.f ? coeffs.f(t.map(e, pt[0], pt[1])) : 0.0;
      out.push_back(v);
    }
    return out;
  }
  for (const auto& pt : t.volume_rule.points) out.push_back(coeffs.at(t.map(e, pt[0], pt[1]), t.dim));
  return out;
}

constexpr double kLocalPivotFloor = 1e-13;

// +1 when the element is the minus side of its local face, -1 otherwise.
std::vector<double> face_signs(const Mesh& mesh, int element, const ElementTables& t) {
  const auto& el = mesh.element(element);
  std::vector<double> s(static_cast<std::size_t>(t.n_faces));
  for (int lf = 0; lf < t.n_faces; ++lf) {
    s[static_cast<std::size_t>(lf)] = mesh.face(el.faces[static_cast<std::size_t>(lf)]).minus == element ? 1.0 : -1.0;
  }
  return s;
}

// Diagonal sign matrix acting on the mu components of an element's trace vector.
Eigen::VectorXd trace_sign_vector(const std::vector<double>& signs, const ElementTables& t) {
  Eigen::VectorXd s = Eigen::VectorXd::Ones(t.n_trace_local());
  for (int lf = 0; lf < t.n_faces; ++lf) {
    for (int k = 0; k < t.n_face_basis; ++k) s(t.trace_index(lf, 0, k)) = signs[static_cast<std::size_t>(lf)];
  }
  return s;
}

}  // namespace

LocalSystem assemble_local(const Mesh& mesh, int element, const CoefficientField& coeffs,
                           const ElementTables& tables) {
  if (mesh.dimension() != tables.dim) throw SolverError("mesh and basis dimensions differ");
  const auto& el = mesh.element(element);
  const auto samples = sample_coefficients(el, coeffs, tables);
  auto mats = assemble_intrinsic(el, samples, tables);
  const Eigen::VectorXd s = trace_sign_vector(face_signs(mesh, element, tables), tables);

  LocalSystem local;
  local.element = element;
  local.matrix = std::move(mats.matrix);
  local.coupling = mats.coupling * s.asDiagonal();
  local.extraction = s.asDiagonal() * mats.extraction;
  local.rhs = Eigen::VectorXd::Zero(tables.n_local());
  const double jac = tables.volume_jacobian(el);
  for (int q = 0; q < tables.volume.n_points; ++q) {
    const double w = tables.volume_rule.weights[static_cast<std::size_t>(q)] * jac * samples[static_cast<std::size_t>(q)].f;
    for (int i = 0; i < tables.n_basis; ++i) {
      local.rhs((tables.components - 1) * tables.n_basis + i) += w * tables.volume.v(q, i);
    }
  }
  local.lu.compute(local.matrix);
  const double ratio = local.lu.pivot_ratio();
  if (!(ratio > kLocalPivotFloor)) {
    std::ostringstream msg;
    msg << "local matrix of element " << element << " is singular (equilibrated pivot ratio " << ratio << ")";
    throw SolverError(msg.str());
  }
  return local;
}

CondensedBlocks condense(const LocalSystem& local, const ElementTables& tables) {
  CondensedBlocks out;
  out.n_faces = tables.n_faces;
  out.block_size = 2 * tables.n_face_basis;
  out.blocks = local.extraction * local.lu.solve(local.coupling);
  out.vector = local.extraction * local.lu.solve(local.rhs);
  return out;
}

// ---------------------------------------------------------------------------
// ElementSolution

ElementSolution::ElementSolution(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const ElementTables> tables,
                                 std::vector<Eigen::VectorXd> coefficients, Eigen::VectorXd trace)
    : mesh_(std::move(mesh)), tables_(std::move(tables)), coeffs_(std::move(coefficients)), trace_(std::move(trace)) {}

double ElementSolution::trace(int face, int comp, int k) const {
  return trace_((face * 2 + comp) * tables_->n_face_basis + k);
}

Eigen::VectorXd ElementSolution::evaluate(int element, double xi, double eta) const {
  const auto& t = *tables_;
  const auto& c = coefficients(element);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(t.components);
  for (int i = 0; i < t.n_basis; ++i) {
    const double v = t.basis.value(i, xi, eta);
    if (v == 0.0) continue;
    for (int a = 0; a < t.components; ++a) u(a) += c(a * t.n_basis + i) * v;
  }
  return u;
}

Eigen::VectorXd ElementSolution::evaluate(const Point& p) const {
  const int e = mesh_->locate(p);
  if (e < 0) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") is outside the fluid mesh";
    throw SolverError(msg.str());
  }
  const auto& el = mesh_->element(e);
  const double xi = 2.0 * (p.x - el.lo.x) / el.hx() - 1.0;
  const double eta = tables_->dim == 2 ? 2.0 * (p.y - el.lo.y) / el.hy() - 1.0 : 0.0;
  return evaluate(e, std::clamp(xi, -1.0, 1.0), std::clamp(eta, -1.0, 1.0));
}

double ElementSolution::pressure(const Point& p) const {
  return evaluate(p)(tables_->components - 1);
}

Eigen::VectorXd ElementSolution::at_center(int element) const {
  const auto& t = *tables_;
  const auto& c = coefficients(element);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(t.components);
  for (int i = 0; i < t.n_basis; ++i) {
    const double v = t.center_values[static_cast<std::size_t>(i)];
    for (int a = 0; a < t.components; ++a) u(a) += c(a * t.n_basis + i) * v;
  }
  return u;
}

double ElementSolution::pressure_at_center(int element) const {
  return at_center(element)(tables_->components - 1);
}

// ---------------------------------------------------------------------------
// EllipticOperator

struct EllipticOperator::ElementClass {
  EquilibratedLU lu;
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd coupling;
  Eigen::MatrixXd extraction;
  Eigen::VectorXd source_moments;
  Eigen::MatrixXd linv_coupling;        // L^-1 C
  Eigen::MatrixXd extraction_linv_c;    // E L^-1 C
  Eigen::VectorXd extraction_linv_src;  // E L^-1 (unit source)
  Eigen::MatrixXd center_linv_c;        // center evaluation of L^-1 C, m x n_trace
  Eigen::VectorXd center_linv_src;      // center evaluation of L^-1 (unit source), m
};

std::vector<std::pair<std::string, double>> Diagnostics::records() const {
  return {{"elements", elements},
          {"trace_dofs", trace_dofs},
          {"element_classes", element_classes},
          {"trace_residual", trace_residual},
          {"max_element_residual", max_element_residual},
          {"min_pivot", min_pivot},
          {"pivot_ratio", pivot_ratio},
          {"seconds_setup", seconds_setup},
          {"seconds_solve", seconds_solve}};
}

EllipticOperator::EllipticOperator(const Mesh& mesh, EllipticProblem problem, int degree, SolverOptions options)
    : EllipticOperator(std::make_shared<const Mesh>(mesh), std::move(problem), degree, options) {}

EllipticOperator::EllipticOperator(std::shared_ptr<const Mesh> mesh, EllipticProblem problem, int degree,
                                   SolverOptions options)
    : mesh_(std::move(mesh)), problem_(std::move(problem)), options_(options) {
  tables_ = std::make_shared<const ElementTables>(degree, mesh_->dimension());
  build();
}

double EllipticOperator::sign(int element, int local_face) const {
  const auto& el = mesh_->element(element);
  return mesh_->face(el.faces[static_cast<std::size_t>(local_face)]).minus == element ? 1.0 : -1.0;
}

BoundaryKind EllipticOperator::boundary_kind(int face) const {
  return kinds_.at(static_cast<std::size_t>(face));
}

void EllipticOperator::build() {
  const auto t0 = Clock::now();
  const auto& mesh = *mesh_;
  const auto& t = *tables_;
  const int ne = mesh.num_elements();
  const int nf = mesh.num_faces();
  const int Q = t.n_face_basis;

  // Boundary kinds and row roles.
  kinds_.assign(static_cast<std::size_t>(nf), BoundaryKind::Dirichlet);
  row_kind_.assign(static_cast<std::size_t>(2 * nf), RowKind::Jump);
  for (const auto& f : mesh.faces()) {
    if (f.kind == FaceKind::Interior) continue;
    if (!problem_.boundary) throw SolverError("boundary face " + std::to_string(f.id) + " has no boundary condition");
    const auto bc = problem_.boundary(f);
    kinds_[static_cast<std::size_t>(f.id)] = bc.kind;
    const bool dirichlet = bc.kind == BoundaryKind::Dirichlet;
    row_kind_[static_cast<std::size_t>(2 * f.id)] = dirichlet ? RowKind::Characteristic : RowKind::Projection;
    row_kind_[static_cast<std::size_t>(2 * f.id + 1)] = dirichlet ? RowKind::Projection : RowKind::Characteristic;
  }

  // Group elements with identical geometry and coefficient samples.
  std::map<std::vector<double>, int> class_index;
  std::vector<std::vector<CoefficientField::Values>> class_samples;
  std::vector<int> class_rep;
  class_of_.assign(static_cast<std::size_t>(ne), -1);
  for (int e = 0; e < ne; ++e) {
    const auto& el = mesh.element(e);
    auto samples = sample_coefficients(el, problem_.coeffs, t, options_.sampling);
    std::vector<double> key{el.hx(), t.dim == 2 ? el.hy() : 0.0};
    key.reserve(2 + 5 * samples.size());
    for (const auto& s : samples) key.insert(key.end(), {s.k1, s.k2, s.beta.x, s.beta.y, s.c});
    auto [it, inserted] = class_index.try_emplace(std::move(key), static_cast<int>(class_rep.size()));
    if (inserted) {
      class_rep.push_back(e);
      class_samples.push_back(std::move(samples));
    }
    class_of_[static_cast<std::size_t>(e)] = it->second;
  }

  const int nc = static_cast<int>(class_rep.size());
  classes_.assign(static_cast<std::size_t>(nc), nullptr);
  std::vector<std::string> failures(static_cast<std::size_t>(nc));
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < nc; ++c) {
    const int e = class_rep[static_cast<std::size_t>(c)];
    auto mats = assemble_intrinsic(mesh.element(e), class_samples[static_cast<std::size_t>(c)], t);
    auto cls = std::make_shared<ElementClass>();
    cls->lu.compute(mats.matrix);
    const double ratio = cls->lu.pivot_ratio();
    if (!(ratio > kLocalPivotFloor)) {
      std::ostringstream msg;
      msg << "local matrix of element " << e << " is singular (equilibrated pivot ratio " << ratio << ")";
      failures[static_cast<std::size_t>(c)] = msg.str();
      continue;
    }
    cls->matrix = std::move(mats.matrix);
    cls->coupling = std::move(mats.coupling);
    cls->extraction = std::move(mats.extraction);
    cls->source_moments = std::move(mats.source_moments);
    cls->linv_coupling = cls->lu.solve(cls->coupling);
    cls->extraction_linv_c = cls->extraction * cls->linv_coupling;
    const Eigen::VectorXd linv_src = cls->lu.solve(cls->source_moments);
    cls->extraction_linv_src = cls->extraction * linv_src;
    Eigen::MatrixXd center = Eigen::MatrixXd::Zero(t.components, t.n_local());
    for (int a = 0; a < t.components; ++a) {
      for (int i = 0; i < t.n_basis; ++i) center(a, a * t.n_basis + i) = t.center_values[static_cast<std::size_t>(i)];
    }
    cls->center_linv_c = center * cls->linv_coupling;
    cls->center_linv_src = center * linv_src;
    classes_[static_cast<std::size_t>(c)] = std::move(cls);
  }
  for (const auto& msg : failures) {
    if (!msg.empty()) throw SolverError(msg);
  }

  // Reference face mass matrix.
  const int nq = static_cast<int>(t.face_rule.size());
  face_mass_ref_ = Eigen::MatrixXd::Zero(Q, Q);
  for (int q = 0; q < nq; ++q) {
    const double w = t.face_rule.weights[static_cast<std::size_t>(q)];
    for (int k = 0; k < Q; ++k) {
      for (int l = 0; l < Q; ++l) {
        face_mass_ref_(k, l) += w * t.trace_values[static_cast<std::size_t>(q * Q + k)] *
                                t.trace_values[static_cast<std::size_t>(q * Q + l)];
      }
    }
  }

  face_mean_ref_ = Eigen::VectorXd::Zero(Q);
  for (int q = 0; q < nq; ++q) {
    for (int k = 0; k < Q; ++k) {
      face_mean_ref_(k) += (t.dim == 1 ? 1.0 : 0.5) * t.face_rule.weights[static_cast<std::size_t>(q)] *
                           t.trace_values[static_cast<std::size_t>(q * Q + k)];
    }
  }

  // Trace matrix: element Schur blocks on jump/characteristic rows, plus trace mass terms.
  const int ndof = 2 * Q * nf;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(ne) * static_cast<std::size_t>(t.n_trace_local() * t.n_trace_local()) +
                   static_cast<std::size_t>(4 * nf * Q * Q));
  auto gidx = [Q](int face, int comp, int k) { return (face * 2 + comp) * Q + k; };
  for (int e = 0; e < ne; ++e) {
    const auto& cls = *classes_[static_cast<std::size_t>(class_of_[static_cast<std::size_t>(e)])];
    const auto& el = mesh.element(e);
    for (int lr = 0; lr < t.n_faces; ++lr) {
      const int fr = el.faces[static_cast<std::size_t>(lr)];
      for (int cr = 0; cr < 2; ++cr) {
        if (row_kind_[static_cast<std::size_t>(2 * fr + cr)] == RowKind::Projection) continue;
        const double sr = cr == 0 ? sign(e, lr) : 1.0;
        for (int kr = 0; kr < Q; ++kr) {
          const int row = t.trace_index(lr, cr, kr);
          for (int lc = 0; lc < t.n_faces; ++lc) {
            const int fc = el.faces[static_cast<std::size_t>(lc)];
            for (int cc = 0; cc < 2; ++cc) {
              const double sc = cc == 0 ? sign(e, lc) : 1.0;
              for (int kc = 0; kc < Q; ++kc) {
                const double v = sr * sc * cls.extraction_linv_c(row, t.trace_index(lc, cc, kc));
                if (v != 0.0) triplets.emplace_back(gidx(fr, cr, kr), gidx(fc, cc, kc), v);
              }
            }
          }
        }
      }
    }
  }
  for (const auto& f : mesh.faces()) {
    const double fj = t.dim == 1 ? 1.0 : 0.5 * f.measure();
    for (int comp = 0; comp < 2; ++comp) {
      const auto kind = row_kind_[static_cast<std::size_t>(2 * f.id + comp)];
      for (int k = 0; k < Q; ++k) {
        for (int l = 0; l < Q; ++l) {
          const double mkl = fj * face_mass_ref_(k, l);
          switch (kind) {
            case RowKind::Jump:
              triplets.emplace_back(gidx(f.id, comp, k), gidx(f.id, comp, l), -2.0 * mkl);
              break;
            case RowKind::Characteristic:
              triplets.emplace_back(gidx(f.id, comp, k), gidx(f.id, 0, l), -mkl);
              triplets.emplace_back(gidx(f.id, comp, k), gidx(f.id, 1, l), -mkl);
              break;
            case RowKind::Projection:
              triplets.emplace_back(gidx(f.id, comp, k), gidx(f.id, comp, l), mkl);
              break;
          }
        }
      }
    }
  }
  if (ndof == 0) throw SolverError("empty trace system");
  trace_matrix_.resize(ndof, ndof);
  trace_matrix_.setFromTriplets(triplets.begin(), triplets.end());
  trace_matrix_.makeCompressed();
  std::vector<int> ordering;
  ordering.reserve(static_cast<std::size_t>(ndof));
  for (int f : nested_dissection_faces(mesh))
    for (int k = 0; k < 2 * Q; ++k) ordering.push_back(f * 2 * Q + k);
  lu_ = std::make_unique<SparseLU>(trace_matrix_, options_.rcond_floor, ordering);

  setup_diag_.elements = ne;
  setup_diag_.trace_dofs = ndof;
  setup_diag_.element_classes = nc;
  setup_diag_.min_pivot = lu_->min_pivot();
  setup_diag_.pivot_ratio = lu_->rcond();
  setup_diag_.seconds_setup = seconds_since(t0);
}

Eigen::VectorXd EllipticOperator::assemble_rhs(const std::function<Eigen::VectorXd(int)>& condensed,
                                               const BoundaryValues& values) const {
  const auto& mesh = *mesh_;
  const auto& t = *tables_;
  const int Q = t.n_face_basis;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(trace_dofs());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Eigen::VectorXd g = condensed(e);
    const auto& el = mesh.element(e);
    for (int lf = 0; lf < t.n_faces; ++lf) {
      const int f = el.faces[static_cast<std::size_t>(lf)];
      for (int comp = 0; comp < 2; ++comp) {
        if (row_kind_[static_cast<std::size_t>(2 * f + comp)] == RowKind::Projection) continue;
        const double s = comp == 0 ? sign(e, lf) : 1.0;
        for (int k = 0; k < Q; ++k) b((f * 2 + comp) * Q + k) -= s * g(t.trace_index(lf, comp, k));
      }
    }
  }
  const int nq = static_cast<int>(t.face_rule.size());
  for (const auto& f : mesh.faces()) {
    if (f.kind == FaceKind::Interior || !values) continue;
    const int comp = kinds_[static_cast<std::size_t>(f.id)] == BoundaryKind::Dirichlet ? 1 : 0;
    const double fj = t.dim == 1 ? 1.0 : 0.5 * f.measure();
    for (int q = 0; q < nq; ++q) {
      const double s = 0.5 * (t.face_rule.points[static_cast<std::size_t>(q)][0] + 1.0);
      const Point x{f.a.x + s * (f.b.x - f.a.x), f.a.y + s * (f.b.y - f.a.y)};
      const double w = t.face_rule.weights[static_cast<std::size_t>(q)] * fj * values(f, x);
      if (w == 0.0) continue;
      for (int k = 0; k < Q; ++k) b((f.id * 2 + comp) * Q + k) += w * t.trace_values[static_cast<std::size_t>(q * Q + k)];
    }
  }
  return b;
}

Eigen::VectorXd EllipticOperator::trace_rhs(const std::vector<Eigen::VectorXd>& element_rhs,
                                            const BoundaryValues& values) const {
  return assemble_rhs(
      [&](int e) {
        const auto& cls = *classes_[static_cast<std::size_t>(class_of_[static_cast<std::size_t>(e)])];
        return Eigen::VectorXd(cls.extraction * cls.lu.solve(element_rhs[static_cast<std::size_t>(e)]));
      },
      values);
}

double EllipticOperator::checked_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& b) const {
  const double bnorm = b.norm();
  const double residual = (trace_matrix_ * x - b).norm() / (bnorm > 0.0 ? bnorm : 1.0);
  if (!(residual <= options_.max_trace_residual)) {
    std::ostringstream msg;
    msg << "trace solve residual " << residual << " exceeds " << options_.max_trace_residual
        << " (smallest pivot " << lu_->min_pivot() << ")";
    throw SolverError(msg.str());
  }
  return residual;
}

EllipticOperator::CenterSolution EllipticOperator::solve_centers(std::span<const double> source,
                                                                 const BoundaryValues& values) const {
  const auto& mesh = *mesh_;
  const auto& t = *tables_;
  const int ne = mesh.num_elements();
  const int Q = t.n_face_basis;
  if (static_cast<int>(source.size()) != ne) throw SolverError("cellwise source needs one value per element");
  auto cls_of = [this](int e) -> const ElementClass& {
    return *classes_[static_cast<std::size_t>(class_of_[static_cast<std::size_t>(e)])];
  };
  const Eigen::VectorXd b = assemble_rhs(
      [&](int e) { return Eigen::VectorXd(source[static_cast<std::size_t>(e)] * cls_of(e).extraction_linv_src); },
      values);
  CenterSolution out;
  out.trace = lu_->solve(b);
  out.trace_residual = checked_residual(out.trace, b);
  out.centers.resize(t.components, ne);
  Eigen::VectorXd tl(t.n_trace_local());
  for (int e = 0; e < ne; ++e) {
    const auto& cls = cls_of(e);
    const auto& el = mesh.element(e);
    for (int lf = 0; lf < t.n_faces; ++lf) {
      const int f = el.faces[static_cast<std::size_t>(lf)];
      const double s = sign(e, lf);
      for (int k = 0; k < Q; ++k) {
        tl(t.trace_index(lf, 0, k)) = s * out.trace((f * 2) * Q + k);
        tl(t.trace_index(lf, 1, k)) = out.trace((f * 2 + 1) * Q + k);
      }
    }
    out.centers.col(e) = source[static_cast<std::size_t>(e)] * cls.center_linv_src + cls.center_linv_c * tl;
  }
  return out;
}

double EllipticOperator::face_average(const Eigen::VectorXd& trace, int face, int comp) const {
  const int Q = tables_->n_face_basis;
  return face_mean_ref_.dot(trace.segment((face * 2 + comp) * Q, Q));
}

ElementSolution EllipticOperator::solve_with(const std::vector<Eigen::VectorXd>& element_rhs,
                                             const BoundaryValues& values, Diagnostics* diag) const {
  const auto t0 = Clock::now();
  const auto& mesh = *mesh_;
  const auto& t = *tables_;
  const int ne = mesh.num_elements();
  const int Q = t.n_face_basis;

  const Eigen::VectorXd b = trace_rhs(element_rhs, values);
  const Eigen::VectorXd x = lu_->solve(b);
  const double residual = checked_residual(x, b);

  std::vector<Eigen::VectorXd> coeffs(static_cast<std::size_t>(ne));
  std::vector<double> elem_res(static_cast<std::size_t>(ne), 0.0);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    const auto& cls = *classes_[static_cast<std::size_t>(class_of_[static_cast<std::size_t>(e)])];
    const auto& el = mesh.element(e);
    Eigen::VectorXd tl(t.n_trace_local());
    for (int lf = 0; lf < t.n_faces; ++lf) {
      const int f = el.faces[static_cast<std::size_t>(lf)];
      const double s = sign(e, lf);
      for (int k = 0; k < Q; ++k) {
        tl(t.trace_index(lf, 0, k)) = s * x((f * 2) * Q + k);
        tl(t.trace_index(lf, 1, k)) = x((f * 2 + 1) * Q + k);
      }
    }
    const auto& r = element_rhs[static_cast<std::size_t>(e)];
    const Eigen::VectorXd full_rhs = r + cls.coupling * tl;
    Eigen::VectorXd u = cls.lu.solve(full_rhs);
    if (diag) {
      const double scale = std::max(full_rhs.cwiseAbs().maxCoeff(), 1e-300);
      elem_res[static_cast<std::size_t>(e)] = (cls.matrix * u - full_rhs).cwiseAbs().maxCoeff() / scale;
    }
    coeffs[static_cast<std::size_t>(e)] = std::move(u);
  }

  if (diag) {
    *diag = setup_diag_;
    diag->trace_residual = residual;
    diag->max_element_residual = elem_res.empty() ? 0.0 : *std::max_element(elem_res.begin(), elem_res.end());
    diag->seconds_solve = seconds_since(t0);
  }
  return ElementSolution(mesh_, tables_, std::move(coeffs), x);
}

ElementSolution EllipticOperator::solve(Diagnostics* diag) const {
  BoundaryValues values = [this](const Face& f, const Point& p) {
    const auto bc = problem_.boundary(f);
    return bc.value ? bc.value(p) : 0.0;
  };
  return solve(problem_.coeffs.f, values, diag);
}

ElementSolution EllipticOperator::solve(const std::function<double(const Point&)>& source,
                                        const BoundaryValues& values, Diagnostics* diag) const {
  const auto& mesh = *mesh_;
  const auto& t = *tables_;
  std::vector<Eigen::VectorXd> rhs(static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.element(e);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(t.n_local());
    if (source) {
      const double jac = t.volume_jacobian(el);
      for (int q = 0; q < t.volume.n_points; ++q) {
        const auto& pt = t.volume_rule.points[static_cast<std::size_t>(q)];
        const double w = t.volume_rule.weights[static_cast<std::size_t>(q)] * jac * source(t.map(el, pt[0], pt[1]));
        for (int i = 0; i < t.n_basis; ++i) r((t.components - 1) * t.n_basis + i) += w * t.volume.v(q, i);
      }
    }
    rhs[static_cast<std::size_t>(e)] = std::move(r);
  }
  return solve_with(rhs, values, diag);
}

ElementSolution EllipticOperator::solve_cellwise(std::span<const double> source, const BoundaryValues& values,
                                                 Diagnostics* diag) const {
  const auto& mesh = *mesh_;
  if (static_cast<int>(source.size()) != mesh.num_elements()) {
    throw SolverError("cellwise source needs one value per element");
  }
  std::vector<Eigen::VectorXd> rhs(static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& cls = *classes_[static_cast<std::size_t>(class_of_[static_cast<std::size_t>(e)])];
    rhs[static_cast<std::size_t>(e)] = source[static_cast<std::size_t>(e)] * cls.source_moments;
  }
  return solve_with(rhs, values, diag);
}

std::pair<ElementSolution, Diagnostics> solve_elliptic(const Mesh& mesh, const EllipticProblem& problem, int degree,
                                                        SolverOptions options) {
  EllipticOperator op(mesh, problem, degree, options);
  Diagnostics diag;
  auto sol = op.solve(&diag);
  diag.seconds_setup = op.setup_diagnostics().seconds_setup;
  return {std::move(sol), diag};
}

// ---------------------------------------------------------------------------
// Residual checks recomputed from the reconstructed fields

double flux_jump_residual(const ElementSolution& solution) {
  const auto& mesh = solution.mesh();
  const auto& t = solution.tables();
  const int d = t.dim;
  const int m = t.components;
  const int P = t.n_basis;
  const int Q = t.n_face_basis;
  const int nq = static_cast<int>(t.face_rule.size());
  double max_jump = 0.0;
  double max_flux = 0.0;
  for (const auto& f : mesh.faces()) {
    if (f.kind != FaceKind::Interior) continue;
    const double nf[2] = {f.normal.x, f.normal.y};
    const double fj = d == 1 ? 1.0 : 0.5 * f.measure();
    Eigen::MatrixXd jump = Eigen::MatrixXd::Zero(m, Q);
    for (int side = 0; side < 2; ++side) {
      const int e = side == 0 ? f.minus : f.plus;
      const int lf = side == 0 ? f.minus_local : f.plus_local;
      const double sigma = side == 0 ? 1.0 : -1.0;
      const auto& c = solution.coefficients(e);
      const auto& fv = t.face_values[static_cast<std::size_t>(lf)];
      Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(m, Q);
      for (int q = 0; q < nq; ++q) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
        for (int i = 0; i < P; ++i) {
          const double v = fv[static_cast<std::size_t>(q * P + i)];
          if (v == 0.0) continue;
          for (int a = 0; a < m; ++a) u(a) += c(a * P + i) * v;
        }
        double mu = 0.0;
        double ph = 0.0;
        for (int k = 0; k < Q; ++k) {
          const double mk = t.trace_values[static_cast<std::size_t>(q * Q + k)];
          mu += solution.trace(f.id, 0, k) * mk;
          ph += solution.trace(f.id, 1, k) * mk;
        }
        const double p = u(m - 1);
        double nz = 0.0;
        for (int a = 0; a < d; ++a) nz += nf[a] * u(a);
        // F-hat . n_s = A_s u + |A| (u - u-hat), with n_s = sigma n_f and u-hat = (n_f mu, p-hat)
        Eigen::VectorXd flux(m);
        for (int a = 0; a < d; ++a) flux(a) = sigma * nf[a] * p + nf[a] * (nz - mu);
        flux(m - 1) = sigma * nz + p - ph;
        const double w = t.face_rule.weights[static_cast<std::size_t>(q)] * fj;
        for (int k = 0; k < Q; ++k) {
          moments.col(k) += w * t.trace_values[static_cast<std::size_t>(q * Q + k)] * flux;
        }
      }
      jump += moments;
      max_flux = std::max(max_flux, moments.cwiseAbs().maxCoeff());
    }
    max_jump = std::max(max_jump, jump.cwiseAbs().maxCoeff());
  }
  return max_flux > 0.0 ? max_jump / max_flux : max_jump;
}

double element_residual(const ElementSolution& solution, const CoefficientField& coeffs) {
  const auto& mesh = solution.mesh();
  const auto& t = solution.tables();
  const int Q = t.n_face_basis;
  double worst = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto local = assemble_local(mesh, e, coeffs, t);
    const auto& el = mesh.element(e);
    Eigen::VectorXd tl(t.n_trace_local());
    for (int lf = 0; lf < t.n_faces; ++lf) {
      const int f = el.faces[static_cast<std::size_t>(lf)];
      for (int comp = 0; comp < 2; ++comp) {
        for (int k = 0; k < Q; ++k) tl(t.trace_index(lf, comp, k)) = solution.trace(f, comp, k);
      }
    }
    const Eigen::VectorXd rhs = local.rhs + local.coupling * tl;
    const double scale = std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
    worst = std::max(worst, (local.matrix * solution.coefficients(e) - rhs).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

}  // namespace hdg
