#include "hdg/fluxops.hpp"

#include <cmath>
#include <sstream>

namespace hdg {

CoefficientField::Values CoefficientField::at(const Point& p, int dim) const {
  Values v;
  if (k1) v.k1 = k1(p);
  if (dim == 2 && k2) v.k2 = k2(p);
  if (beta) v.beta = beta(p);
  if (c) v.c = c(p);
  if (f) v.f = f(p);
  if (!(v.k1 > 0.0) || (dim == 2 && !(v.k2 > 0.0))) {
    std::ostringstream msg;
    msg << "diffusion coefficient not positive at (" << p.x << ", " << p.y << "): k1=" << v.k1;
    if (dim == 2) msg << ", k2=" << v.k2;
    throw CoefficientError(msg.str());
  }
  return v;
}

Eigen::MatrixXd reaction_matrix(const CoefficientField::Values& v, int dim) {
  if (dim == 1) {
    Eigen::MatrixXd B(2, 2);
    B << 1.0 / v.k1, 0.0, -v.beta.x / v.k1, v.c;
    return B;
  }
  Eigen::MatrixXd B(3, 3);
  B << 1.0 / v.k1, 0.0, 0.0,
       0.0, 1.0 / v.k2, 0.0,
       -v.beta.x / v.k1, -v.beta.y / v.k2, v.c;
  return B;
}

SystemMatrices system_matrices_2d(const CoefficientField& coeffs, const Point& point) {
  const auto v = coeffs.at(point, 2);
  SystemMatrices s;
  s.A1 = Eigen::MatrixXd::Zero(3, 3);
  s.A1(0, 2) = s.A1(2, 0) = 1.0;
  s.A2 = Eigen::MatrixXd::Zero(3, 3);
  s.A2(1, 2) = s.A2(2, 1) = 1.0;
  s.B = reaction_matrix(v, 2);
  s.f = Eigen::Vector3d(0.0, 0.0, v.f);
  return s;
}

SystemMatrices system_matrices_1d(const CoefficientField& coeffs, const Point& point) {
  const auto v = coeffs.at(point, 1);
  SystemMatrices s;
  s.A1 = Eigen::MatrixXd::Zero(2, 2);
  s.A1(0, 1) = s.A1(1, 0) = 1.0;
  s.B = reaction_matrix(v, 1);
  s.f = Eigen::Vector2d(0.0, v.f);
  return s;
}

FaceMatrixSet face_matrices(Vec2 normal, int dim) {
  const double len = dim == 1 ? std::abs(normal.x) : std::hypot(normal.x, normal.y);
  if (!(len > 0.0)) throw CoefficientError("face normal must be nonzero");
  FaceMatrixSet s;
  s.dim = dim;
  if (dim == 1) {
    const double n = normal.x / len;
    s.normal = {n, 0.0};
    s.A = Eigen::MatrixXd(2, 2);
    s.A << 0.0, n, n, 0.0;
    s.R = Eigen::MatrixXd(2, 2);
    s.R << 1.0, 1.0, -n, n;
    s.D = Eigen::Vector2d(-1.0, 1.0);
    s.abs_A = Eigen::MatrixXd::Identity(2, 2);
    return s;
  }
  const double n1 = normal.x / len;
  const double n2 = normal.y / len;
  s.normal = {n1, n2};
  s.A = Eigen::MatrixXd(3, 3);
  s.A << 0.0, 0.0, n1,
         0.0, 0.0, n2,
         n1, n2, 0.0;
  s.R = Eigen::MatrixXd(3, 3);
  s.R << -n2, n1, n1,
         n1, n2, n2,
         0.0, -1.0, 1.0;
  s.D = Eigen::Vector3d(0.0, -1.0, 1.0);
  s.abs_A = Eigen::MatrixXd(3, 3);
  s.abs_A << n1 * n1, n1 * n2, 0.0,
             n1 * n2, n2 * n2, 0.0,
             0.0, 0.0, 1.0;
  return s;
}

}  // namespace hdg
