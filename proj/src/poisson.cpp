#include <algorithm>
#include <cmath>

#include "branchkit/error.hpp"
#include "branchkit/fields.hpp"
#include "fft.hpp"

namespace branchkit {

namespace {

constexpr int kMaxDefectIterations = 200;
constexpr double kDefectTol = 1e-13;

// Radial problem for one Fourier mode: u'' + u'/r - m^2 u / r^2 = f with
// u(R) = 0. A second-order tridiagonal operator preconditions defect
// correction against the fourth-order stencils of the grid.
class ModeSolver {
 public:
  ModeSolver(const DiskGrid& g, int m) : g_(g), m2_(static_cast<double>(m) * m) {
    parity_ = (m % 2 == 0) ? 1.0 : -1.0;
    const auto& r = g.radii();
    const int n = g.n_r() - 1;
    const double dr = r[1] - r[0];
    lower_.resize(n);
    diag_.resize(n);
    upper_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double rm = i == 0 ? 0.0 : r[i] - 0.5 * dr;
      const double rp = r[i] + 0.5 * dr;
      lower_[i] = rm / (r[i] * dr * dr);
      upper_[i] = rp / (r[i] * dr * dr);
      diag_[i] = -(rm + rp) / (r[i] * dr * dr) - m2_ / (r[i] * r[i]);
    }
  }

  std::vector<cplx> solve(const std::vector<cplx>& f, int& iterations, double& defect) const {
    const int n = g_.n_r() - 1;
    std::vector<cplx> u(n + 1, 0.0), res(n);
    double fmax = 0.0;
    for (int i = 0; i < n; ++i) fmax = std::max(fmax, std::abs(f[i]));
    iterations = 0;
    defect = 0.0;
    if (fmax == 0.0) return u;
    for (int it = 0; it < kMaxDefectIterations; ++it) {
      apply_high_order(u, res);
      double rmax = 0.0;
      for (int i = 0; i < n; ++i) {
        res[i] = f[i] - res[i];
        rmax = std::max(rmax, std::abs(res[i]));
      }
      defect = rmax / fmax;
      iterations = it;
      if (defect <= kDefectTol) return u;
      const std::vector<cplx> du = thomas(res);
      for (int i = 0; i < n; ++i) u[i] += du[i];
    }
    if (defect <= 1e-10) return u;
    throw Error(ErrorCode::SolverDiverged, "defect correction did not converge",
                {{"defect", std::to_string(defect)}, {"m2", std::to_string(m2_)}});
  }

 private:
  void apply_high_order(const std::vector<cplx>& u, std::vector<cplx>& out) const {
    const int nr = g_.n_r();
    const auto& r = g_.radii();
    const auto& st = g_.radial_stencils();
    for (int i = 0; i < nr - 1; ++i) {
      cplx acc = -m2_ / (r[i] * r[i]) * u[i];
      for (std::size_t q = 0; q < st[i].idx.size(); ++q) {
        const int e = st[i].idx[q];
        const cplx v = e >= nr ? u[e - nr] : parity_ * u[nr - 1 - e];
        acc += (st[i].d2[q] + st[i].d1[q] / r[i]) * v;
      }
      out[i] = acc;
    }
  }

  std::vector<cplx> thomas(const std::vector<cplx>& rhs) const {
    const int n = static_cast<int>(rhs.size());
    std::vector<cplx> c(n), d(n), x(n);
    c[0] = upper_[0] / diag_[0];
    d[0] = rhs[0] / diag_[0];
    for (int i = 1; i < n; ++i) {
      const double den = diag_[i] - lower_[i] * c[i - 1].real();
      c[i] = upper_[i] / den;
      d[i] = (rhs[i] - lower_[i] * d[i - 1]) / den;
    }
    x[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  }

  const DiskGrid& g_;
  double m2_;
  double parity_;
  std::vector<double> lower_, diag_, upper_;
};

}  // namespace

GridField poisson_solve(const GridField& rhs, PoissonStats* stats) {
  const DiskGrid& g = rhs.grid();
  if (g.mode() != GridMode::Polar || g.spacing() != RadialSpacing::Uniform)
    throw Error(ErrorCode::InvalidInput, "Poisson solver needs a uniform polar grid");
  if (rhs.components() != 1) throw Error(ErrorCode::ShapeMismatch, "Poisson rhs must be scalar");
  const int nr = g.n_r(), nt = g.n_theta();
  RingFFT fft(nt);

  // Fourier coefficients per ring, stored mode-major.
  std::vector<std::vector<cplx>> modes(nt, std::vector<cplx>(nr, 0.0));
  std::vector<cplx> ring(nt);
  for (int ir = 0; ir < nr; ++ir) {
    for (int it = 0; it < nt; ++it) ring[it] = rhs.at(g.polar_index(ir, it));
    fft.forward(ring);
    for (int k = 0; k < nt; ++k) modes[k][ir] = ring[k] / static_cast<double>(nt);
  }

  PoissonStats st;
  for (int k = 0; k < nt; ++k) {
    const ModeSolver solver(g, fft.wavenumber(k));
    int iters = 0;
    double defect = 0.0;
    modes[k] = solver.solve(modes[k], iters, defect);
    st.iterations = std::max(st.iterations, iters);
    st.defect = std::max(st.defect, defect);
  }

  GridField out(rhs.grid_ptr(), 1, rhs.real_flag());
  for (int ir = 0; ir < nr; ++ir) {
    for (int k = 0; k < nt; ++k) ring[k] = modes[k][ir];
    fft.backward(ring);
    for (int it = 0; it < nt; ++it) {
      const cplx v = ring[it];
      out.at(g.polar_index(ir, it)) = rhs.real_flag() ? cplx(v.real(), 0.0) : v;
    }
  }
  if (stats) *stats = st;
  return out;
}

std::vector<GridField> iterated_poisson_stages(const GridField& l, int s) {
  if (s < 0) throw Error(ErrorCode::InvalidInput, "negative branch order");
  std::vector<GridField> stages;
  stages.push_back(l);
  const double scale = std::pow(4.0, s + 1);
  for (std::size_t i = 0; i < l.node_count(); ++i) stages[0].at(i) *= scale;
  for (int n = 0; n <= s; ++n) stages.push_back(poisson_solve(stages.back()));
  return stages;
}

GridField iterated_poisson(const GridField& l, int s) { return iterated_poisson_stages(l, s).back(); }

double compounded_poisson_residual(const std::vector<GridField>& stages, double inner_radius,
                                   double outer_radius) {
  double total = 0.0;
  for (std::size_t n = 1; n < stages.size(); ++n) {
    const GridField lap = laplacian_grid(stages[n]);
    const DiskGrid& g = lap.grid();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lap.node_count(); ++i) {
      const double r = std::abs(g.node(i));
      if (r < inner_radius || r > outer_radius) continue;
      num = std::max(num, std::abs(lap.at(i) - stages[n - 1].at(i)));
      den = std::max(den, std::abs(stages[n - 1].at(i)));
    }
    if (den > 0.0) total += num / den;
  }
  return total;
}

}  // namespace branchkit
