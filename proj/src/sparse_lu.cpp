#include "hdg/sparse_lu.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace hdg {

namespace {

// Exposes the diagonal of U, which Eigen keeps inside the supernodal L store.
template <class Ordering>
class PivotedLU : public Eigen::SparseLU<SparseMatrix, Ordering> {
  using Base = Eigen::SparseLU<SparseMatrix, Ordering>;

 public:
  [[nodiscard]] std::pair<double, double> pivot_range() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index j = 0; j < this->cols(); ++j) {
      double d = 0.0;
      for (typename Base::SCMatrix::InnerIterator it(this->m_Lstore, j); it; ++it) {
        if (it.row() == j) {
          d = std::abs(it.value());
          break;
        }
      }
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return {lo, hi};
  }
};

using Permutation = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>;

// Ruiz equilibration: a few sweeps scaling rows and columns to unit max norm.
void equilibrate(SparseMatrix& a, Eigen::VectorXd& row_scale, Eigen::VectorXd& col_scale) {
  row_scale = Eigen::VectorXd::Ones(a.rows());
  col_scale = Eigen::VectorXd::Ones(a.cols());
  for (int sweep = 0; sweep < 8; ++sweep) {
    Eigen::VectorXd rmax = Eigen::VectorXd::Zero(a.rows());
    Eigen::VectorXd cmax = Eigen::VectorXd::Zero(a.cols());
    for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
        const double v = std::abs(it.value());
        rmax(it.row()) = std::max(rmax(it.row()), v);
        cmax(j) = std::max(cmax(j), v);
      }
    }
    double spread = 0.0;
    for (Eigen::Index i = 0; i < rmax.size(); ++i) {
      rmax(i) = rmax(i) > 0.0 ? 1.0 / std::sqrt(rmax(i)) : 1.0;
      cmax(i) = cmax(i) > 0.0 ? 1.0 / std::sqrt(cmax(i)) : 1.0;
      spread = std::max({spread, std::abs(1.0 - rmax(i)), std::abs(1.0 - cmax(i))});
    }
    a = rmax.asDiagonal() * a * cmax.asDiagonal();
    row_scale = row_scale.cwiseProduct(rmax);
    col_scale = col_scale.cwiseProduct(cmax);
    if (spread < 1e-3) break;
  }
}

}  // namespace

struct SparseLU::Impl {
  std::variant<PivotedLU<Eigen::COLAMDOrdering<int>>, PivotedLU<Eigen::NaturalOrdering<int>>> lu;
  Permutation perm;  // identity unless an ordering was given
  bool permuted = false;
  Eigen::VectorXd row_scale;
  Eigen::VectorXd col_scale;
  Eigen::Index rows = 0;
  double min_pivot = 0.0;
  double max_pivot = 0.0;
};

SparseLU::SparseLU(const SparseMatrix& matrix, double rcond_floor, const std::vector<int>& ordering)
    : impl_(std::make_unique<Impl>()) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw std::invalid_argument("sparse LU needs a nonempty square matrix");
  }
  auto& m = *impl_;
  m.rows = matrix.rows();
  SparseMatrix a = matrix;
  equilibrate(a, m.row_scale, m.col_scale);
  if (!ordering.empty()) {
    if (static_cast<Eigen::Index>(ordering.size()) != m.rows) throw std::invalid_argument("ordering has the wrong size");
    m.perm.resize(m.rows);
    std::vector<char> seen(ordering.size(), 0);
    for (std::size_t k = 0; k < ordering.size(); ++k) {
      const int old = ordering[k];
      if (old < 0 || old >= m.rows || seen[static_cast<std::size_t>(old)]) {
        throw std::invalid_argument("ordering is not a permutation");
      }
      seen[static_cast<std::size_t>(old)] = 1;
      m.perm.indices()[old] = static_cast<int>(k);
    }
    m.permuted = true;
    a = m.perm * a * m.perm.inverse();
    m.lu.emplace<1>();
  }
  a.makeCompressed();
  std::visit(
      [&](auto& lu) {
        lu.analyzePattern(a);
        lu.factorize(a);
        if (lu.info() != Eigen::Success) {
          throw SingularSystemError("trace system is singular: " + lu.lastErrorMessage(), 0.0, 0.0);
        }
        std::tie(m.min_pivot, m.max_pivot) = lu.pivot_range();
      },
      m.lu);
  const double ratio = m.max_pivot > 0.0 ? m.min_pivot / m.max_pivot : 0.0;
  if (!(ratio >= rcond_floor)) {
    std::ostringstream msg;
    msg << "trace system is numerically singular: smallest pivot " << m.min_pivot << ", pivot ratio " << ratio;
    throw SingularSystemError(msg.str(), m.min_pivot, ratio);
  }
}

SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != impl_->rows) throw std::invalid_argument("right-hand side has the wrong size");
  const auto& m = *impl_;
  Eigen::VectorXd b = m.row_scale.cwiseProduct(rhs);
  if (m.permuted) b = m.perm * b;
  Eigen::VectorXd y = std::visit([&](const auto& lu) -> Eigen::VectorXd { return lu.solve(b); }, m.lu);
  if (m.permuted) y = m.perm.inverse() * y;
  return m.col_scale.cwiseProduct(y);
}

int SparseLU::rows() const { return static_cast<int>(impl_->rows); }
double SparseLU::min_pivot() const { return impl_->min_pivot; }
double SparseLU::max_pivot() const { return impl_->max_pivot; }
long SparseLU::factor_nonzeros() const {
  return std::visit([](const auto& lu) { return static_cast<long>(lu.nnzL() + lu.nnzU()); }, impl_->lu);
}
double SparseLU::rcond() const { return impl_->max_pivot > 0.0 ? impl_->min_pivot / impl_->max_pivot : 0.0; }

}  // namespace hdg
