#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "branchkit/error.hpp"
#include "branchkit/fields.hpp"

namespace branchkit {

namespace {

using Gauss32 = boost::math::quadrature::gauss<double, 32>;

constexpr cplx kI(0.0, 1.0);

// Gauss-Legendre rule on [a, b] for a complex integrand; tracks max |g|.
template <class G>
cplx quad(const G& g, double a, double b, double& max_abs) {
  const auto& x = Gauss32::abscissa();
  const auto& w = Gauss32::weights();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double sgn : {-1.0, 1.0}) {
      if (x[i] == 0.0 && sgn > 0.0) continue;
      const cplx v = g(mid + sgn * half * x[i]);
      max_abs = std::max(max_abs, std::abs(v));
      acc += w[i] * v;
    }
  }
  return half * acc;
}

// Radial leg along angle alpha to radius rho, then the arc to angle theta_end.
cplx path_integral(const std::function<cplx(cplx)>& F, int s, double rho, double alpha,
                   double theta_end, double& max_abs) {
  const cplx dir = std::polar(1.0, alpha);
  auto radial = [&](double t) {
    const cplx w = t * dir;
    return std::pow(w, s) * F(w) * dir;
  };
  auto arc = [&](double phi) {
    const cplx w = std::polar(rho, phi);
    return std::pow(w, s) * F(w) * kI * w;
  };
  cplx total = quad(radial, 0.0, rho, max_abs);
  if (theta_end != alpha) total += quad(arc, alpha, theta_end, max_abs);
  return total;
}

}  // namespace

LineIntegral line_integral(const std::function<cplx(cplx)>& F, cplx z, int s) {
  if (s < 0) throw Error(ErrorCode::InvalidInput, "negative power in line integral");
  const double rho = std::abs(z);
  if (rho == 0.0) return {0.0, 0.0, 0.0};
  const double th = std::arg(z);
  // The comparison path starts a quarter turn away from both the real axis and z.
  const double alpha_b = th > 0.0 ? th + 0.5 * std::numbers::pi : th - 0.5 * std::numbers::pi;
  double max_abs = 0.0;
  const cplx a = path_integral(F, s, rho, 0.0, th, max_abs);
  const cplx b = path_integral(F, s, rho, alpha_b, th, max_abs);
  const double length = std::max(rho * (1.0 + std::abs(th)), rho * (1.0 + 0.5 * std::numbers::pi));
  LineIntegral out{a, std::abs(a - b), 1e-6 * length * max_abs};
  if (out.discrepancy > out.tolerance) {
    std::ostringstream d, t;
    d.precision(17);
    t.precision(17);
    d << out.discrepancy;
    t << out.tolerance;
    throw Error(ErrorCode::NotClosedForm, "line integral depends on the path",
                {{"discrepancy", d.str()}, {"tolerance", t.str()}});
  }
  return out;
}

LineIntegral line_integral(const GridField& F, cplx z, int s, int comp) {
  const PolarInterpolator interp(F, comp);
  return line_integral([&](cplx w) { return interp(w); }, z, s);
}

LineIntegral line_integral(const BiJet& F, cplx z, int s) {
  return line_integral([&](cplx w) { return F.eval(w); }, z, s);
}

}  // namespace branchkit
