#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hdg/basis.hpp"
#include "hdg/fluxops.hpp"
#include "hdg/mesh.hpp"
#include "hdg/sparse_lu.hpp"

namespace hdg {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BoundaryKind { Dirichlet, Neumann };

// Dirichlet values prescribe p; Neumann values prescribe the outward normal
// flux n . z = -n . K grad p (zero on a wall).
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Dirichlet;
  std::function<double(const Point&)> value;
};

using BoundaryTagger = std::function<BoundaryCondition(const Face&)>;
using BoundaryValues = std::function<double(const Face&, const Point&)>;

struct EllipticProblem {
  CoefficientField coeffs;
  BoundaryTagger boundary;
};

/// Reference-element tables shared by every element of one discretization.
struct ElementTables {
  ElementTables(int degree, int dim);

  int dim;
  int degree;
  int components;  // m = dim + 1, ordered (z_1, .., z_dim, p)
  int n_basis;     // P, element basis cardinality
  int n_face_basis;  // Q, trace basis cardinality per face component
  int n_faces;     // faces per element
  ElementBasis basis;
  Lagrange1D face_basis;
  QuadratureRule volume_rule;
  BasisTable volume;
  QuadratureRule face_rule;
  // element basis values at face quadrature points, per local face: [lf][q * P + i]
  std::vector<std::vector<double>> face_values;
  // trace basis values at face quadrature points: [q * Q + k]
  std::vector<double> trace_values;
  // element basis values at the element center
  std::vector<double> center_values;

  [[nodiscard]] int n_local() const { return components * n_basis; }
  [[nodiscard]] int n_trace_local() const { return 2 * n_face_basis * n_faces; }
  [[nodiscard]] int trace_index(int local_face, int comp, int k) const {
    return (local_face * 2 + comp) * n_face_basis + k;
  }
  // physical point of reference coordinates in an element
  [[nodiscard]] Point map(const Element& e, double xi, double eta) const;
  // reference coordinates of face quadrature point q on local face lf
  [[nodiscard]] std::array<double, 2> face_point(int lf, int q) const;
  [[nodiscard]] double face_jacobian(const Element& e, int lf) const;
  [[nodiscard]] double volume_jacobian(const Element& e) const;
};

/// Dense LU of a row- and column-equilibrated matrix. Element matrices mix
/// entries of very different magnitude (1/k2 = r^2 in polar coordinates).
class EquilibratedLU {
 public:
  EquilibratedLU() = default;
  explicit EquilibratedLU(const Eigen::MatrixXd& a) { compute(a); }
  void compute(const Eigen::MatrixXd& a);
  [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  // min |U_ii| / max |U_ii| of the equilibrated factorization
  [[nodiscard]] double pivot_ratio() const { return pivot_ratio_; }

 private:
  Eigen::VectorXd row_;
  Eigen::VectorXd col_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double pivot_ratio_ = 0.0;
};

/// Element system of the hybridized upwind scheme,  L u = rhs + C t,
/// with t the element's trace unknowns (per local face: mu then p-hat, each
/// with Q coefficients). `extraction` maps u to the element's contribution
/// <F(u) . n + |A| u, w> to the two trace equations of each face. Signs follow
/// the stored face normals, so these are the matrices of this element on this mesh.
struct LocalSystem {
  int element = -1;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  Eigen::MatrixXd coupling;
  Eigen::MatrixXd extraction;
  EquilibratedLU lu;
};

LocalSystem assemble_local(const Mesh& mesh, int element, const CoefficientField& coeffs,
                           const ElementTables& tables);

/// Schur blocks of one element: block(r, c) = E_r L^-1 C_c and vector(r) = E_r L^-1 rhs,
/// each of size 2Q (x 2Q), indexed by local face.
struct CondensedBlocks {
  int n_faces = 0;
  int block_size = 0;
  Eigen::MatrixXd blocks;  // (n_faces * block_size) square, face-major
  Eigen::VectorXd vector;

  [[nodiscard]] Eigen::MatrixXd block(int r, int c) const {
    return blocks.block(r * block_size, c * block_size, block_size, block_size);
  }
};

CondensedBlocks condense(const LocalSystem& local, const ElementTables& tables);

/// Per-element polynomial solution u = (z, p) plus the solved trace unknowns.
class ElementSolution {
 public:
  ElementSolution(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const ElementTables> tables,
                  std::vector<Eigen::VectorXd> coefficients, Eigen::VectorXd trace);

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const ElementTables& tables() const { return *tables_; }
  [[nodiscard]] const Eigen::VectorXd& coefficients(int element) const {
    return coeffs_.at(static_cast<std::size_t>(element));
  }
  [[nodiscard]] const Eigen::VectorXd& trace() const { return trace_; }
  // trace coefficient of component comp (0 = mu, 1 = p-hat) on a face
  [[nodiscard]] double trace(int face, int comp, int k) const;

  // all components at reference coordinates of an element
  [[nodiscard]] Eigen::VectorXd evaluate(int element, double xi, double eta = 0.0) const;
  // all components at a physical point; throws when the point is outside the fluid mesh
  [[nodiscard]] Eigen::VectorXd evaluate(const Point& p) const;
  [[nodiscard]] double pressure(const Point& p) const;
  [[nodiscard]] double pressure_at_center(int element) const;
  [[nodiscard]] Eigen::VectorXd at_center(int element) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const ElementTables> tables_;
  std::vector<Eigen::VectorXd> coeffs_;
  Eigen::VectorXd trace_;
};

// Where the coefficients K, beta, c are sampled inside an element. The
// element-center variant freezes them per element (a lower-order model of the
// coefficients, kept for comparison runs).
enum class CoefficientSampling { Quadrature, ElementCenter };

struct SolverOptions {
  double rcond_floor = SparseLU::kDefaultRcondFloor;
  CoefficientSampling sampling = CoefficientSampling::Quadrature;
  double max_trace_residual = 1e-10;
};

struct Diagnostics {
  int elements = 0;
  int trace_dofs = 0;
  int element_classes = 0;
  double trace_residual = 0.0;
  double max_element_residual = 0.0;
  double min_pivot = 0.0;
  double pivot_ratio = 0.0;
  double seconds_setup = 0.0;
  double seconds_solve = 0.0;

  [[nodiscard]] std::vector<std::pair<std::string, double>> records() const;
};

/// Assembled and factorized trace system for fixed coefficients, boundary
/// kinds and degree. Sources and boundary values may change between solves.
///
/// Elements with identical geometry and coefficient samples share one local
/// factorization.
class EllipticOperator {
 public:
  EllipticOperator(std::shared_ptr<const Mesh> mesh, EllipticProblem problem, int degree,
                   SolverOptions options = {});
  EllipticOperator(const Mesh& mesh, EllipticProblem problem, int degree, SolverOptions options = {});

  // Uses the source and boundary values of the problem.
  [[nodiscard]] ElementSolution solve(Diagnostics* diag = nullptr) const;
  [[nodiscard]] ElementSolution solve(const std::function<double(const Point&)>& source,
                                      const BoundaryValues& values, Diagnostics* diag = nullptr) const;
  // Source constant on each element.
  [[nodiscard]] ElementSolution solve_cellwise(std::span<const double> source, const BoundaryValues& values,
                                               Diagnostics* diag = nullptr) const;

  // Fast path for cellwise sources: trace unknowns plus every component at
  // each element center (column e of `centers`), without full reconstruction.
  struct CenterSolution {
    Eigen::VectorXd trace;
    Eigen::MatrixXd centers;  // components x elements
    double trace_residual = 0.0;
  };
  [[nodiscard]] CenterSolution solve_centers(std::span<const double> source, const BoundaryValues& values) const;
  // Mean of a trace component over a face.
  [[nodiscard]] double face_average(const Eigen::VectorXd& trace, int face, int comp) const;

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const ElementTables& tables() const { return *tables_; }
  [[nodiscard]] const SparseMatrix& trace_matrix() const { return trace_matrix_; }
  [[nodiscard]] int trace_dofs() const { return static_cast<int>(trace_matrix_.rows()); }
  [[nodiscard]] BoundaryKind boundary_kind(int face) const;
  [[nodiscard]] const Diagnostics& setup_diagnostics() const { return setup_diag_; }

  // Trace right-hand side for given element right-hand sides and boundary values.
  [[nodiscard]] Eigen::VectorXd trace_rhs(const std::vector<Eigen::VectorXd>& element_rhs,
                                          const BoundaryValues& values) const;

 private:
  struct ElementClass;
  enum class RowKind : unsigned char { Jump, Characteristic, Projection };

  void build();
  [[nodiscard]] Eigen::VectorXd assemble_rhs(const std::function<Eigen::VectorXd(int)>& condensed,
                                             const BoundaryValues& values) const;
  [[nodiscard]] double checked_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& b) const;
  [[nodiscard]] ElementSolution solve_with(const std::vector<Eigen::VectorXd>& element_rhs,
                                           const BoundaryValues& values, Diagnostics* diag) const;
  [[nodiscard]] double sign(int element, int local_face) const;

  std::shared_ptr<const Mesh> mesh_;
  EllipticProblem problem_;
  SolverOptions options_;
  std::shared_ptr<const ElementTables> tables_;
  std::vector<std::shared_ptr<const ElementClass>> classes_;
  std::vector<int> class_of_;
  std::vector<BoundaryKind> kinds_;  // per face; meaningful on boundary faces
  std::vector<RowKind> row_kind_;    // per face and component
  Eigen::MatrixXd face_mass_ref_;    // Q x Q on the reference face
  Eigen::VectorXd face_mean_ref_;    // mean of each trace basis function over the reference face
  SparseMatrix trace_matrix_;
  std::unique_ptr<SparseLU> lu_;
  Diagnostics setup_diag_;
};

/// Full pipeline: assemble, condense, factorize and solve the trace system, reconstruct.
std::pair<ElementSolution, Diagnostics> solve_elliptic(const Mesh& mesh, const EllipticProblem& problem,
                                                        int degree, SolverOptions options = {});

/// Weak flux-jump residual over interior faces, recomputed from the element
/// fields and traces: max |<[[F-hat . n]], w>| divided by max |<F-hat . n^-, w>|.
double flux_jump_residual(const ElementSolution& solution);

/// Max-norm residual of the element equations  L u - rhs - C t  for a solved problem.
double element_residual(const ElementSolution& solution, const CoefficientField& coeffs);

}  // namespace hdg
