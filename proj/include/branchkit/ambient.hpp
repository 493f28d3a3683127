#pragma once

#include <Eigen/Dense>

namespace branchkit {

enum class AmbientKind { Euclidean, InverseStereographic };

// Conformally flat ambient metric e^{2 phi(y)} delta on R^n, with phi in closed
// form. InverseStereographic uses phi = log(2 / (1 + |y|^2)), the round sphere.
struct AmbientMetric {
  AmbientKind kind = AmbientKind::Euclidean;

  static AmbientMetric euclidean() { return {}; }
  static AmbientMetric inverse_stereographic() { return {AmbientKind::InverseStereographic}; }

  bool is_euclidean() const { return kind == AmbientKind::Euclidean; }
  double phi(const Eigen::VectorXd& y) const;
  Eigen::VectorXd grad_phi(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd hess_phi(const Eigen::VectorXd& y) const;
  // e^{2 phi}
  double factor(const Eigen::VectorXd& y) const;
  // Christoffel contraction Gamma(u, v) = (dphi.v) u + (dphi.u) v - (u.v) grad phi.
  Eigen::VectorXd christoffel(const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v) const;
  // Sectional curvature of the plane spanned by two Euclidean-independent vectors.
  double sectional(const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v) const;
  const char* name() const;
};

}  // namespace branchkit
