#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace hdg {

class BasisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gauss-Legendre rule on [-1,1] (dim 1) or its tensor product on [-1,1]^2 (dim 2).
struct QuadratureRule {
  int dim = 1;
  std::vector<std::array<double, 2>> points;  // second coordinate unused in 1D
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

QuadratureRule gauss_rule(int n_points, int dim = 1);

/// Gauss-Lobatto-Legendre nodes on [-1,1], ascending, n_points >= 2.
std::vector<double> gauss_lobatto_nodes(int n_points);

/// Lagrange polynomials through a set of nodes on [-1,1].
class Lagrange1D {
 public:
  explicit Lagrange1D(std::vector<double> nodes);

  [[nodiscard]] int size() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] double value(int i, double xi) const;
  [[nodiscard]] double derivative(int i, double xi) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> denom_;
};

/// Nodal tensor-product basis of degree p on the reference interval or square.
///
/// Nodes are equispaced for p <= 2 (for p = 2 the functions are
/// (x^2-x)/2, 1-x^2, (x^2+x)/2) and Gauss-Lobatto for p >= 3. In 2D, basis
/// function (a, b) = N_a(xi) N_b(eta) has flat index a + (p+1) b.
class ElementBasis {
 public:
  ElementBasis(int degree, int dim);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int size() const { return dim_ == 1 ? n1_ : n1_ * n1_; }
  [[nodiscard]] int size_1d() const { return n1_; }
  [[nodiscard]] const Lagrange1D& line() const { return line_; }

  [[nodiscard]] double value(int i, double xi, double eta = 0.0) const;
  [[nodiscard]] std::array<double, 2> gradient(int i, double xi, double eta = 0.0) const;
  [[nodiscard]] std::array<double, 2> node(int i) const;

  // Flat indices of the basis functions that do not vanish on local face `local`,
  // ordered by increasing position along the face. In 1D a single index.
  [[nodiscard]] std::vector<int> face_nodes(int local) const;

 private:
  int degree_;
  int dim_;
  int n1_;
  Lagrange1D line_;
};

ElementBasis nodal_basis_1d(int degree);
ElementBasis nodal_basis_2d(int degree);

/// Basis values and reference gradients tabulated at the points of a rule.
struct BasisTable {
  int n_points = 0;
  int n_basis = 0;
  std::vector<double> value;  // [q * n_basis + i]
  std::vector<double> d_xi;
  std::vector<double> d_eta;

  [[nodiscard]] double v(int q, int i) const { return value[static_cast<std::size_t>(q * n_basis + i)]; }
  [[nodiscard]] double dx(int q, int i) const { return d_xi[static_cast<std::size_t>(q * n_basis + i)]; }
  [[nodiscard]] double dy(int q, int i) const { return d_eta[static_cast<std::size_t>(q * n_basis + i)]; }
};

BasisTable tabulate(const ElementBasis& basis, const QuadratureRule& rule);

}  // namespace hdg
