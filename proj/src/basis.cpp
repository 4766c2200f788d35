#include "hdg/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hdg {

namespace {

// Legendre P_n and its derivative at x via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  const double dp = std::abs(1.0 - x * x) < 1e-300 ? 0.5 * n * (n + 1.0) : n * (p0 - x * p1) / (1.0 - x * x);
  return {p1, dp};
}

std::vector<double> gauss_legendre_points(int n, std::vector<double>& weights) {
  std::vector<double> x(static_cast<std::size_t>(n));
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double r = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, r);
      const double dr = p / dp;
      r -= dr;
      if (std::abs(dr) < 1e-16) break;
    }
    const auto [p, dp] = legendre(n, r);
    (void)p;
    x[static_cast<std::size_t>(i)] = r;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - r * r) * dp * dp);
  }
  return x;
}

std::vector<double> default_nodes(int degree) {
  if (degree <= 2) {
    std::vector<double> nodes(static_cast<std::size_t>(degree + 1));
    for (int i = 0; i <= degree; ++i) nodes[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / degree;
    return nodes;
  }
  return gauss_lobatto_nodes(degree + 1);
}

}  // namespace

QuadratureRule gauss_rule(int n_points, int dim) {
  if (n_points < 1) throw BasisError("quadrature needs at least one point");
  if (dim != 1 && dim != 2) throw BasisError("quadrature dimension must be 1 or 2");
  std::vector<double> w;
  const auto x = gauss_legendre_points(n_points, w);
  QuadratureRule rule;
  rule.dim = dim;
  if (dim == 1) {
    for (int i = 0; i < n_points; ++i) {
      rule.points.push_back({x[static_cast<std::size_t>(i)], 0.0});
      rule.weights.push_back(w[static_cast<std::size_t>(i)]);
    }
  } else {
    for (int j = 0; j < n_points; ++j) {
      for (int i = 0; i < n_points; ++i) {
        rule.points.push_back({x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]});
        rule.weights.push_back(w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)]);
      }
    }
  }
  return rule;
}

std::vector<double> gauss_lobatto_nodes(int n_points) {
  if (n_points < 2) throw BasisError("Gauss-Lobatto rule needs at least two points");
  const int n = n_points - 1;
  std::vector<double> x(static_cast<std::size_t>(n_points));
  x.front() = -1.0;
  x.back() = 1.0;
  // interior nodes are the roots of P_n'
  for (int i = 1; i < n; ++i) {
    double r = -std::cos(std::numbers::pi * i / n);
    for (int it = 0; it < 100; ++it) {
      // P_n'' from the Legendre ODE: (1-x^2) P'' = 2x P' - n(n+1) P
      const auto [p, dp] = legendre(n, r);
      const double d2p = (2.0 * r * dp - n * (n + 1.0) * p) / (1.0 - r * r);
      const double dr = dp / d2p;
      r -= dr;
      if (std::abs(dr) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = r;
  }
  return x;
}

Lagrange1D::Lagrange1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  const auto n = nodes_.size();
  denom_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) denom_[i] *= nodes_[i] - nodes_[j];
    }
  }
}

double Lagrange1D::value(int i, double xi) const {
  double num = 1.0;
  for (int j = 0; j < size(); ++j) {
    if (j != i) num *= xi - nodes_[static_cast<std::size_t>(j)];
  }
  return num / denom_[static_cast<std::size_t>(i)];
}

double Lagrange1D::derivative(int i, double xi) const {
  double sum = 0.0;
  for (int k = 0; k < size(); ++k) {
    if (k == i) continue;
    double prod = 1.0;
    for (int j = 0; j < size(); ++j) {
      if (j != i && j != k) prod *= xi - nodes_[static_cast<std::size_t>(j)];
    }
    sum += prod;
  }
  return sum / denom_[static_cast<std::size_t>(i)];
}

ElementBasis::ElementBasis(int degree, int dim)
    : degree_(degree), dim_(dim), n1_(degree + 1), line_(degree >= 1 ? default_nodes(degree) : std::vector<double>{}) {
  if (degree < 1) throw BasisError("basis degree must be >= 1, got " + std::to_string(degree));
  if (dim != 1 && dim != 2) throw BasisError("basis dimension must be 1 or 2");
}

double ElementBasis::value(int i, double xi, double eta) const {
  if (dim_ == 1) return line_.value(i, xi);
  return line_.value(i % n1_, xi) * line_.value(i / n1_, eta);
}

std::array<double, 2> ElementBasis::gradient(int i, double xi, double eta) const {
  if (dim_ == 1) return {line_.derivative(i, xi), 0.0};
  const int a = i % n1_;
  const int b = i / n1_;
  return {line_.derivative(a, xi) * line_.value(b, eta), line_.value(a, xi) * line_.derivative(b, eta)};
}

std::array<double, 2> ElementBasis::node(int i) const {
  const auto& x = line_.nodes();
  if (dim_ == 1) return {x[static_cast<std::size_t>(i)], 0.0};
  return {x[static_cast<std::size_t>(i % n1_)], x[static_cast<std::size_t>(i / n1_)]};
}

std::vector<int> ElementBasis::face_nodes(int local) const {
  if (dim_ == 1) {
    if (local != 0 && local != 1) throw BasisError("1D element has faces 0 and 1 only");
    return {local == 0 ? 0 : degree_};
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n1_));
  for (int k = 0; k < n1_; ++k) {
    switch (local) {
      case 0: out.push_back(k * n1_); break;
      case 1: out.push_back(k * n1_ + degree_); break;
      case 2: out.push_back(k); break;
      case 3: out.push_back(degree_ * n1_ + k); break;
      default: throw BasisError("2D element has faces 0..3 only");
    }
  }
  return out;
}

ElementBasis nodal_basis_1d(int degree) {
  return ElementBasis(degree, 1);
}

ElementBasis nodal_basis_2d(int degree) {
  return ElementBasis(degree, 2);
}

BasisTable tabulate(const ElementBasis& basis, const QuadratureRule& rule) {
  BasisTable t;
  t.n_points = static_cast<int>(rule.size());
  t.n_basis = basis.size();
  const auto n = static_cast<std::size_t>(t.n_points * t.n_basis);
  t.value.resize(n);
  t.d_xi.resize(n);
  t.d_eta.resize(n);
  for (int q = 0; q < t.n_points; ++q) {
    const auto& pt = rule.points[static_cast<std::size_t>(q)];
    for (int i = 0; i < t.n_basis; ++i) {
      const auto k = static_cast<std::size_t>(q * t.n_basis + i);
      t.value[k] = basis.value(i, pt[0], pt[1]);
      const auto g = basis.gradient(i, pt[0], pt[1]);
      t.d_xi[k] = g[0];
      t.d_eta[k] = g[1];
    }
  }
  return t;
}

}  // namespace hdg
