#include <Eigen/Dense>
#include <cmath>

#include "branchkit/error.hpp"
#include "branchkit/fields.hpp"
#include "fft.hpp"

namespace branchkit {

JetFit fit_jet(const GridField& f, int order, int comp, double fit_radius) {
  const DiskGrid& g = f.grid();
  if (g.mode() != GridMode::Polar) throw Error(ErrorCode::InvalidInput, "jet fit needs a polar grid");
  if (order < 0) throw Error(ErrorCode::InvalidInput, "negative jet order");
  const int nt = g.n_theta();
  if (2 * order >= nt)
    throw Error(ErrorCode::GridTooCoarse, "angular resolution too low for the jet order");
  const double rmax = fit_radius > 0.0 ? fit_radius : 0.5 * g.radius();

  std::vector<int> rings;
  for (int ir = 0; ir < g.n_r(); ++ir)
    if (g.radii()[ir] <= rmax * (1.0 + 1e-12)) rings.push_back(ir);
  const int nrings = static_cast<int>(rings.size());
  const double rho = g.radii()[rings.back()];

  RingFFT fft(nt);
  std::vector<std::vector<cplx>> spectra(nrings);
  std::vector<cplx> ring(nt);
  for (int q = 0; q < nrings; ++q) {
    for (int it = 0; it < nt; ++it) ring[it] = f.at(g.polar_index(rings[q], it), comp);
    fft.forward(ring);
    for (cplx& v : ring) v /= static_cast<double>(nt);
    spectra[q] = ring;
  }

  JetFit out;
  out.jet = BiJet(order);
  for (int m = -order; m <= order; ++m) {
    std::vector<int> degrees;
    for (int d = std::abs(m); d <= order; d += 2) degrees.push_back(d);
    const int K = static_cast<int>(degrees.size());
    if (nrings < K) throw Error(ErrorCode::IllConditionedFit, "fewer rings than radial unknowns");
    Eigen::MatrixXd A(nrings, K);
    Eigen::VectorXcd b(nrings);
    const int slot = m >= 0 ? m : m + nt;
    for (int q = 0; q < nrings; ++q) {
      const double t = g.radii()[rings[q]] / rho;
      for (int c = 0; c < K; ++c) A(q, c) = std::pow(t, degrees[c]);
      b(q) = spectra[q][slot];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(K - 1);
    out.condition = std::max(out.condition, cond);
    if (!(cond <= kMaxFitCondition))
      throw Error(ErrorCode::IllConditionedFit, "radial Vandermonde is ill-conditioned",
                  {{"condition", std::to_string(cond)}, {"mode", std::to_string(m)}});
    const Eigen::VectorXd xr = svd.solve(b.real());
    const Eigen::VectorXd xi = svd.solve(b.imag());
    for (int c = 0; c < K; ++c) {
      const int d = degrees[c];
      const cplx v = cplx(xr(c), xi(c)) / std::pow(rho, d);
      out.jet.set((d + m) / 2, (d - m) / 2, v);
    }
  }
  if (f.real_flag()) {
    out.jet = out.jet.real_part();
  }
  for (int q = 0; q < nrings; ++q)
    for (int it = 0; it < nt; ++it) {
      const std::size_t i = g.polar_index(rings[q], it);
      out.residual = std::max(out.residual, std::abs(f.at(i, comp) - out.jet.eval(g.node(i))));
    }
  return out;
}

}  // namespace branchkit
