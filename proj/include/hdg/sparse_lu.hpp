#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

namespace hdg {

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double min_pivot, double rcond)
      : std::runtime_error(what), min_pivot_(min_pivot), rcond_(rcond) {}
  [[nodiscard]] double min_pivot() const { return min_pivot_; }
  [[nodiscard]] double rcond() const { return rcond_; }

 private:
  double min_pivot_;
  double rcond_;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Sparse direct LU with partial pivoting (supernodal), factorized once and reused.
/// Without an explicit ordering the columns are ordered by COLAMD; a given
/// ordering (order[new] = old) is applied symmetrically to rows and columns.
///
/// The factorization is rejected as singular when a pivot is exactly zero
/// or when the pivot ratio min|U_ii| / max|U_ii| of the row- and
/// column-equilibrated matrix falls below `rcond_floor`.
class SparseLU {
 public:
  static constexpr double kDefaultRcondFloor = 1e-14;

  explicit SparseLU(const SparseMatrix& matrix, double rcond_floor = kDefaultRcondFloor,
                    const std::vector<int>& ordering = {});
  ~SparseLU();
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;

  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  [[nodiscard]] int rows() const;
  [[nodiscard]] double min_pivot() const;
  [[nodiscard]] double max_pivot() const;
  [[nodiscard]] double rcond() const;
  [[nodiscard]] long factor_nonzeros() const;  // nnz(L) + nnz(U)

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hdg
