#include "branchkit/jets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "branchkit/error.hpp"

namespace branchkit {

namespace {

std::string slot_list(const std::vector<std::pair<int, int>>& slots) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i) os << ',';
    os << '[' << slots[i].first << ',' << slots[i].second << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace

BiJet::BiJet(int order) : order_(order) {
  if (order < 0) throw Error(ErrorCode::OrderTooLow, "jet order must be non-negative");
  c_.assign(index(0, order) + 1, cplx(0.0, 0.0));
}

BiJet BiJet::constant(int order, cplx value) {
  BiJet f(order);
  f.c_[0] = value;
  f.real_ = value.imag() == 0.0;
  return f;
}

BiJet BiJet::monomial(int order, int j, int k, cplx coeff) {
  BiJet f(order);
  if (j + k <= order) f.set(j, k, coeff);
  return f;
}

cplx BiJet::coeff(int j, int k) const {
  if (j < 0 || k < 0 || j + k > order_) return cplx(0.0, 0.0);
  return c_[index(j, k)];
}

void BiJet::set(int j, int k, cplx value) {
  if (j < 0 || k < 0 || j + k > order_)
    throw Error(ErrorCode::InvalidInput, "jet slot outside the truncation table");
  c_[index(j, k)] = value;
}

void BiJet::add_to(int j, int k, cplx value) {
  if (j < 0 || k < 0 || j + k > order_)
    throw Error(ErrorCode::InvalidInput, "jet slot outside the truncation table");
  c_[index(j, k)] += value;
}

bool BiJet::satisfies_reality(double tol) const {
  for (int d = 0; d <= order_; ++d)
    for (int k = 0; k <= d; ++k)
      if (std::abs(coeff(d - k, k) - std::conj(coeff(k, d - k))) > tol) return false;
  return true;
}

BiJet BiJet::truncated(int order) const {
  BiJet f(std::min(order, order_));
  for (int d = 0; d <= f.order_; ++d)
    for (int k = 0; k <= d; ++k) f.c_[index(d - k, k)] = c_[index(d - k, k)];
  f.real_ = real_;
  return f;
}

BiJet BiJet::padded(int order) const {
  BiJet f(std::max(order, order_));
  std::copy(c_.begin(), c_.end(), f.c_.begin());
  f.real_ = real_;
  return f;
}

cplx BiJet::eval(cplx z) const {
  std::vector<cplx> zp(order_ + 1), zbp(order_ + 1);
  zp[0] = zbp[0] = 1.0;
  for (int i = 1; i <= order_; ++i) {
    zp[i] = zp[i - 1] * z;
    zbp[i] = zbp[i - 1] * std::conj(z);
  }
  cplx acc = 0.0;
  for (int d = order_; d >= 0; --d)
    for (int k = 0; k <= d; ++k) acc += c_[index(d - k, k)] * zp[d - k] * zbp[k];
  return acc;
}

BiJet BiJet::conj() const {
  BiJet f(order_);
  for (int d = 0; d <= order_; ++d)
    for (int k = 0; k <= d; ++k) f.c_[index(d - k, k)] = std::conj(c_[index(k, d - k)]);
  f.real_ = real_;
  return f;
}

BiJet BiJet::real_part() const {
  BiJet f = (*this + conj()) * cplx(0.5, 0.0);
  f.real_ = true;
  return f;
}

BiJet BiJet::imag_part() const {
  BiJet f = (*this - conj()) * cplx(0.0, -0.5);
  f.real_ = true;
  return f;
}

double BiJet::max_abs() const {
  double m = 0.0;
  for (const cplx& v : c_) m = std::max(m, std::abs(v));
  return m;
}

bool BiJet::is_zero(double tol) const { return max_abs() <= tol; }

BiJet BiJet::operator-() const {
  BiJet f = *this;
  for (cplx& v : f.c_) v = -v;
  return f;
}

BiJet& BiJet::operator+=(const BiJet& other) {
  *this = *this + other;
  return *this;
}

BiJet& BiJet::operator-=(const BiJet& other) {
  *this = *this - other;
  return *this;
}

BiJet& BiJet::operator*=(cplx scalar) {
  for (cplx& v : c_) v *= scalar;
  real_ = real_ && scalar.imag() == 0.0;
  return *this;
}

BiJet operator+(const BiJet& a, const BiJet& b) {
  BiJet f(std::min(a.order(), b.order()));
  for (int d = 0; d <= f.order(); ++d)
    for (int k = 0; k <= d; ++k) f.set(d - k, k, a.coeff(d - k, k) + b.coeff(d - k, k));
  f.set_real_flag(a.real_flag() && b.real_flag());
  return f;
}

BiJet operator-(const BiJet& a, const BiJet& b) { return a + (-b); }

BiJet operator*(const BiJet& a, const BiJet& b) {
  const int n = std::min(a.order(), b.order());
  BiJet f(n);
  for (int d1 = 0; d1 <= n; ++d1)
    for (int k1 = 0; k1 <= d1; ++k1) {
      const cplx x = a.coeff(d1 - k1, k1);
      if (x == cplx(0.0, 0.0)) continue;
      for (int d2 = 0; d1 + d2 <= n; ++d2)
        for (int k2 = 0; k2 <= d2; ++k2) {
          const cplx y = b.coeff(d2 - k2, k2);
          if (y == cplx(0.0, 0.0)) continue;
          f.add_to(d1 - k1 + d2 - k2, k1 + k2, x * y);
        }
    }
  f.set_real_flag(a.real_flag() && b.real_flag());
  return f;
}

BiJet operator*(cplx s, const BiJet& a) {
  BiJet f = a;
  f *= s;
  return f;
}

BiJet operator*(const BiJet& a, cplx s) { return s * a; }

BiJet jet_add(const BiJet& a, const BiJet& b) { return a + b; }
BiJet jet_mul(const BiJet& a, const BiJet& b) { return a * b; }
BiJet jet_scale(const BiJet& a, cplx s) { return s * a; }

BiJet jet_mul_full(const BiJet& a, const BiJet& b) {
  return a.padded(a.order() + b.order()) * b.padded(a.order() + b.order());
}

BiJet mul_monomial(const BiJet& f, int p, int q, cplx coeff) {
  BiJet g(f.order() + p + q);
  for (int d = 0; d <= f.order(); ++d)
    for (int k = 0; k <= d; ++k) g.set(d - k + p, k + q, coeff * f.coeff(d - k, k));
  g.set_real_flag(f.real_flag() && p == q && coeff.imag() == 0.0);
  return g;
}

BiJet wirtinger_dz(const BiJet& f) {
  if (f.order() == 0) throw Error(ErrorCode::ZeroOrderJet, "cannot differentiate an order-0 jet");
  BiJet g(f.order() - 1);
  for (int d = 1; d <= f.order(); ++d)
    for (int k = 0; k < d; ++k) {
      const int j = d - k;
      g.set(j - 1, k, static_cast<double>(j) * f.coeff(j, k));
    }
  return g;
}

BiJet wirtinger_dzbar(const BiJet& f) {
  if (f.order() == 0) throw Error(ErrorCode::ZeroOrderJet, "cannot differentiate an order-0 jet");
  BiJet g(f.order() - 1);
  for (int d = 1; d <= f.order(); ++d)
    for (int k = 1; k <= d; ++k) g.set(d - k, k - 1, static_cast<double>(k) * f.coeff(d - k, k));
  return g;
}

BiJet wirtinger_d(const BiJet& f, int a, int b) {
  BiJet g = f;
  for (int i = 0; i < a; ++i) g = wirtinger_dz(g);
  for (int i = 0; i < b; ++i) g = wirtinger_dzbar(g);
  return g;
}

std::string ZOrder::to_string() const {
  if (limited_) return "≥" + std::to_string(value_);
  return std::to_string(value_);
}

ZOrder ord_z(const BiJet& f, double tol) {
  for (int j = 0; j <= f.order(); ++j)
    if (std::abs(f.coeff(j, 0)) > tol) return ZOrder::finite(j);
  return ZOrder::truncation_limited(f.order() + 1);
}

ZOrder ord_z(const std::vector<BiJet>& fs, double tol) {
  if (fs.empty()) throw Error(ErrorCode::InvalidInput, "ord_z of an empty jet tuple");
  ZOrder best = ord_z(fs.front(), tol);
  for (std::size_t i = 1; i < fs.size(); ++i) best = std::min(best, ord_z(fs[i], tol));
  return best;
}

bool in_class_C(const BiJet& f, int s, int k, double tol) {
  if (k > f.order())
    throw Error(ErrorCode::OrderTooLow, "class index exceeds the jet order",
                {{"k", std::to_string(k)}, {"order", std::to_string(f.order())}});
  for (int hp = 0; hp <= s; ++hp)
    for (int h = 0; h <= k - hp; ++h)
      if (std::abs(f.coeff(hp, h)) > tol) return false;
  return true;
}

BiJet divide_z_pow(const BiJet& f, int p, double tol) {
  if (p < 0) throw Error(ErrorCode::InvalidInput, "negative power");
  if (p > f.order())
    throw Error(ErrorCode::OrderTooLow, "power exceeds the jet order",
                {{"p", std::to_string(p)}, {"order", std::to_string(f.order())}});
  std::vector<std::pair<int, int>> bad;
  for (int j = 0; j < p; ++j)
    for (int k = 0; j + k <= f.order(); ++k)
      if (std::abs(f.coeff(j, k)) > tol) bad.emplace_back(j, k);
  if (!bad.empty())
    throw Error(ErrorCode::NotDivisible, "jet is not divisible by z^" + std::to_string(p),
                {{"slots", slot_list(bad)}});
  BiJet g(f.order() - p);
  for (int d = 0; d <= g.order(); ++d)
    for (int k = 0; k <= d; ++k) g.set(d - k, k, f.coeff(d - k + p, k));
  return g;
}

BiJet divide_zbar_pow(const BiJet& f, int p, double tol) {
  BiJet g = divide_z_pow(f.conj(), p, tol).conj();
  g.set_real_flag(false);
  return g;
}

BiJet conj_ratio_extend(const BiJet& e, int s, double tol) {
  if (s < 0) throw Error(ErrorCode::InvalidInput, "negative branch order");
  // (zbar/z)^s z^j zbar^k is a polynomial exactly when j >= s, so every slot
  // with j < s must vanish; report the lowest-degree violation.
  for (int d = 0; d <= e.order(); ++d)
    for (int j = 0; j < s && j <= d; ++j)
      if (std::abs(e.coeff(j, d - j)) > tol)
        throw Error(ErrorCode::NonExtendable,
                    "d^" + std::to_string(d) + "e/dz^" + std::to_string(j) + "dzbar^" +
                        std::to_string(d - j) + "(0) != 0",
                    {{"j", std::to_string(j)}, {"k", std::to_string(d - j)}});
  BiJet w(e.order());
  for (int d = 0; d + s <= e.order(); ++d)
    for (int k = 0; k <= d; ++k) w.set(d - k, k + s, e.coeff(d - k + s, k));
  return w;
}

BiJet jet_pow(const BiJet& f, double alpha) {
  const cplx f0 = f.coeff(0, 0);
  if (std::abs(f0) <= kJetTol)
    throw Error(ErrorCode::InvalidInput, "jet power needs a nonvanishing constant term");
  BiJet u = f * (1.0 / f0);
  u.set(0, 0, 0.0);
  BiJet acc = BiJet::constant(f.order(), 1.0);
  BiJet up = BiJet::constant(f.order(), 1.0);
  double binom = 1.0;
  for (int n = 1; n <= f.order(); ++n) {
    binom *= (alpha - (n - 1)) / n;
    up = up * u;
    acc += up * cplx(binom, 0.0);
  }
  acc *= std::pow(f0, alpha);
  acc.set_real_flag(false);
  return acc;
}

BiJet jet_reciprocal(const BiJet& f) { return jet_pow(f, -1.0); }

BiJet jet_compose(const BiJet& f, const BiJet& h) {
  if (std::abs(h.coeff(0, 0)) > kJetTol)
    throw Error(ErrorCode::InvalidInput, "inner jet must vanish at 0");
  const int n = std::min(f.order(), h.order());
  const BiJet hn = h.truncated(n);
  const BiJet hb = hn.conj();
  // Horner in h over rows j, each row a Horner polynomial in conj(h).
  BiJet acc(n);
  for (int j = n; j >= 0; --j) {
    BiJet row(n);
    for (int k = n - j; k >= 0; --k) {
      row = row * hb;
      row.add_to(0, 0, f.coeff(j, k));
    }
    acc = acc * hn + row;
  }
  acc.set_real_flag(f.real_flag());
  return acc;
}

}  // namespace branchkit
