#pragma once

#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "hdg/mesh.hpp"

namespace hdg {

class CoefficientError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Coefficients of  -div(K grad p) + beta . grad p + c p = f  with K = diag(k1, k2).
/// Unset functions take the defaults k = 1, beta = 0, c = 0, f = 0. In 1D only
/// k1, beta.x, c and f are used.
struct CoefficientField {
  std::function<double(const Point&)> k1;
  std::function<double(const Point&)> k2;
  std::function<Vec2(const Point&)> beta;
  std::function<double(const Point&)> c;
  std::function<double(const Point&)> f;

  struct Values {
    double k1 = 1.0;
    double k2 = 1.0;
    Vec2 beta;
    double c = 0.0;
    double f = 0.0;
  };

  // Evaluates every coefficient at p; throws CoefficientError when a diffusion entry is not positive.
  [[nodiscard]] Values at(const Point& p, int dim) const;
};

// First-order system  d/dx(A1 u) + d/dy(A2 u) + B u = f  for u = (z, p) with z = -K grad p.
struct SystemMatrices {
  Eigen::MatrixXd A1;
  Eigen::MatrixXd A2;  // empty in 1D
  Eigen::MatrixXd B;
  Eigen::VectorXd f;
};

SystemMatrices system_matrices_2d(const CoefficientField& coeffs, const Point& point);
SystemMatrices system_matrices_1d(const CoefficientField& coeffs, const Point& point);

// Same matrices from already evaluated coefficients; dim selects the layout.
Eigen::MatrixXd reaction_matrix(const CoefficientField::Values& v, int dim);

/// Face Jacobian A = n1 A1 + n2 A2 with A = R D R^-1 and |A| = R |D| R^-1.
struct FaceMatrixSet {
  int dim = 2;
  Vec2 normal;
  Eigen::MatrixXd A;
  Eigen::MatrixXd R;
  Eigen::VectorXd D;  // eigenvalues, ordered as the columns of R
  Eigen::MatrixXd abs_A;
};

// Normalizes `normal`; throws CoefficientError for a zero vector. |A| comes from its closed form.
FaceMatrixSet face_matrices(Vec2 normal, int dim);

}  // namespace hdg
