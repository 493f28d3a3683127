#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "branchkit/builder.hpp"

namespace branchkit::testkit {

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Random polynomial phi_h of degree 2s+4 with phi_h(0) = 0, random cubic F_h, and
// F_h(0) chosen so the representation constraint holds.
inline RepresentationData random_representation(std::mt19937_64& rng, int s, int n,
                                                double amplitude = 0.2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RepresentationData data;
  data.s = s;
  const int deg = 2 * s + 4;
  const double sign = (s % 2 == 0) ? 1.0 : -1.0;
  for (int h = 0; h < n; ++h) {
    BiJet phi(deg);
    for (int d = 1; d <= deg; ++d)
      for (int k = 0; k <= d; ++k) phi.set(d - k, k, amplitude * cplx(u(rng), u(rng)));
    phi = phi.real_part();
    phi.set_real_flag(true);
    std::vector<cplx> F(4);
    for (auto& c : F) c = amplitude * cplx(u(rng), u(rng));
    F[0] = -sign * factorial(s) * factorial(s + 1) * phi.coeff(s + 1, 0);
    data.phi.push_back(phi);
    data.F.push_back(F);
  }
  return data;
}

// dfhat/dz written directly from the derivative form of the representation:
// z^s (sum_j (-1)^{s-j} (s!/j!) d^{j+s+1}phi/dzbar^j dz^{s+1} zbar^j + F), plus the
// derivative of the leading term for the first two components.
inline BiJet representation_dz(const RepresentationData& data, int h, int order) {
  const int s = data.s;
  const BiJet phi = data.phi[h].padded(order + 1);
  BiJet inner(order);
  for (int j = 0; j <= s; ++j) {
    const double sign = ((s - j) % 2 == 0) ? 1.0 : -1.0;
    inner += mul_monomial(wirtinger_d(phi, s + 1, j), 0, j, sign * factorial(s) / factorial(j))
                 .truncated(order);
  }
  for (std::size_t m = 0; m < data.F[h].size(); ++m)
    if (static_cast<int>(m) <= order) inner.add_to(static_cast<int>(m), 0, data.F[h][m]);
  BiJet out = mul_monomial(inner, s, 0).truncated(order);
  if (h == 0) out.add_to(s, 0, 0.5 * (s + 1));
  if (h == 1) out.add_to(s, 0, cplx(0.0, -0.5 * (s + 1)));
  return out;
}

inline std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<cplx> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// Conformal minimal map with dfhat/dz = (s+1) z^s d for the holomorphic null vector
// d = ((1-p)/2, -i(1+p)/2, q_3, ..., q_n), p = sum q_j^2.
inline SurfaceMap null_curve_map(int s, const std::vector<std::vector<cplx>>& q, int order) {
  std::vector<cplx> p;
  for (const auto& qj : q) {
    const auto sq = poly_mul(qj, qj);
    if (sq.size() > p.size()) p.resize(sq.size(), 0.0);
    for (std::size_t i = 0; i < sq.size(); ++i) p[i] += sq[i];
  }
  std::vector<std::vector<cplx>> d(2 + q.size());
  d[0].assign(std::max<std::size_t>(p.size(), 1), 0.0);
  d[1].assign(std::max<std::size_t>(p.size(), 1), 0.0);
  d[0][0] += 0.5;
  d[1][0] += cplx(0.0, -0.5);
  for (std::size_t i = 0; i < p.size(); ++i) {
    d[0][i] -= 0.5 * p[i];
    d[1][i] += cplx(0.0, -0.5) * p[i];
  }
  for (std::size_t j = 0; j < q.size(); ++j) d[2 + j] = q[j];
  SurfaceMap f;
  f.n = static_cast<int>(d.size());
  f.s = s;
  f.label = "null-curve";
  for (const auto& dh : d) {
    BiJet c(order);
    for (std::size_t m = 0; m < dh.size(); ++m) {
      const int pw = static_cast<int>(m) + s + 1;
      if (pw > order) continue;
      const cplx A = 2.0 * (s + 1.0) * dh[m] / static_cast<double>(pw);
      c.add_to(pw, 0, 0.5 * A);
      c.add_to(0, pw, 0.5 * std::conj(A));
    }
    c.set_real_flag(true);
    f.components.push_back(c);
  }
  f.radius = 0.5;
  return f;
}

// h(z) = omega z (1 + c1 z + c2 z^2 + c3 zbar^{s+1}) with omega^{s+1} = e^{-i alpha}, so
// composing with h and rotating the tangent plane by alpha keeps branch coordinates.
inline BiJet branch_preserving_germ(std::mt19937_64& rng, int s, int order, double alpha) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  const cplx omega = std::polar(1.0, -alpha / (s + 1));
  BiJet h(order);
  h.set(1, 0, omega);
  h.add_to(2, 0, omega * cplx(u(rng), u(rng)));
  h.add_to(3, 0, omega * cplx(u(rng), u(rng)));
  if (s + 2 <= order) h.add_to(1, s + 1, omega * cplx(u(rng), u(rng)));
  return h;
}

// Gauss curvature of the minimal surface with g = z^k and eta = 2(s+1) z^s dz.
inline double weierstrass_gauss(int s, int k, cplx z) {
  const double r = std::abs(z);
  const double t = 2.0 * k * std::pow(r, k - 1 - s) / ((s + 1.0) * std::pow(1.0 + std::pow(r, 2 * k), 2));
  return -t * t;
}

inline Eigen::MatrixXd block_rotation(std::mt19937_64& rng, int n, double alpha) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  M(0, 0) = std::cos(alpha);
  M(0, 1) = -std::sin(alpha);
  M(1, 0) = std::sin(alpha);
  M(1, 1) = std::cos(alpha);
  Eigen::MatrixXd A(n - 2, n - 2);
  for (int i = 0; i < n - 2; ++i)
    for (int j = 0; j < n - 2; ++j) A(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  M.bottomRightCorner(n - 2, n - 2) = qr.householderQ();
  return M;
}

}  // namespace branchkit::testkit
