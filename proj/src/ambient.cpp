#include "branchkit/ambient.hpp"

#include <cmath>

namespace branchkit {

double AmbientMetric::phi(const Eigen::VectorXd& y) const {
  if (is_euclidean()) return 0.0;
  return std::log(2.0 / (1.0 + y.squaredNorm()));
}

Eigen::VectorXd AmbientMetric::grad_phi(const Eigen::VectorXd& y) const {
  if (is_euclidean()) return Eigen::VectorXd::Zero(y.size());
  return -2.0 / (1.0 + y.squaredNorm()) * y;
}

Eigen::MatrixXd AmbientMetric::hess_phi(const Eigen::VectorXd& y) const {
  const auto n = y.size();
  if (is_euclidean()) return Eigen::MatrixXd::Zero(n, n);
  const double q = 1.0 + y.squaredNorm();
  return -2.0 / q * Eigen::MatrixXd::Identity(n, n) + 4.0 / (q * q) * y * y.transpose();
}

double AmbientMetric::factor(const Eigen::VectorXd& y) const {
  return std::exp(2.0 * phi(y));
}

Eigen::VectorXd AmbientMetric::christoffel(const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                                           const Eigen::VectorXd& v) const {
  if (is_euclidean()) return Eigen::VectorXd::Zero(y.size());
  const Eigen::VectorXd g = grad_phi(y);
  return g.dot(v) * u + g.dot(u) * v - u.dot(v) * g;
}

double AmbientMetric::sectional(const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& v) const {
  if (is_euclidean()) return 0.0;
  // Orthonormalize in the flat metric; the formula below expects that.
  const Eigen::VectorXd e1 = u.normalized();
  Eigen::VectorXd e2 = v - v.dot(e1) * e1;
  e2.normalize();
  const Eigen::VectorXd g = grad_phi(y);
  const Eigen::MatrixXd h = hess_phi(y);
  const double a = g.dot(e1), b = g.dot(e2);
  return std::exp(-2.0 * phi(y)) *
         (-e1.dot(h * e1) - e2.dot(h * e2) + a * a + b * b - g.squaredNorm());
}

const char* AmbientMetric::name() const {
  return is_euclidean() ? "euclidean" : "inverse_stereographic";
}

}  // namespace branchkit
