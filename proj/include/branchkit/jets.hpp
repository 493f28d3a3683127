#pragma once

#include <complex>
#include <string>
#include <vector>

namespace branchkit {

using cplx = std::complex<double>;

// Coefficient magnitude at or below which a jet coefficient counts as zero.
inline constexpr double kJetTol = 1e-12;

// Truncated series sum c_jk z^j zbar^k over j + k <= N.
class BiJet {
 public:
  BiJet() : BiJet(0) {}
  explicit BiJet(int order);

  static BiJet constant(int order, cplx value);
  static BiJet monomial(int order, int j, int k, cplx coeff = 1.0);

  int order() const { return order_; }
  cplx coeff(int j, int k) const;
  void set(int j, int k, cplx value);
  void add_to(int j, int k, cplx value);

  bool real_flag() const { return real_; }
  void set_real_flag(bool real) { real_ = real; }
  // Checks c_jk = conj(c_kj) to the given tolerance.
  bool satisfies_reality(double tol = kJetTol) const;

  BiJet truncated(int order) const;
  // Same coefficients, larger table; the extra slots are zero.
  BiJet padded(int order) const;
  cplx eval(cplx z) const;
  // Coefficientwise conjugate function: coefficient (j,k) becomes conj(c_kj).
  BiJet conj() const;
  BiJet real_part() const;
  BiJet imag_part() const;
  double max_abs() const;
  bool is_zero(double tol = kJetTol) const;

  BiJet operator-() const;
  BiJet& operator+=(const BiJet& other);
  BiJet& operator-=(const BiJet& other);
  BiJet& operator*=(cplx scalar);

  const std::vector<cplx>& raw() const { return c_; }

 private:
  static std::size_t index(int j, int k) {
    const int d = j + k;
    return static_cast<std::size_t>(d) * (d + 1) / 2 + k;
  }

  int order_;
  bool real_ = false;
  std::vector<cplx> c_;
};

BiJet operator+(const BiJet& a, const BiJet& b);
BiJet operator-(const BiJet& a, const BiJet& b);
BiJet operator*(const BiJet& a, const BiJet& b);
BiJet operator*(cplx s, const BiJet& a);
BiJet operator*(const BiJet& a, cplx s);

BiJet jet_add(const BiJet& a, const BiJet& b);
BiJet jet_mul(const BiJet& a, const BiJet& b);
BiJet jet_scale(const BiJet& a, cplx s);
// Full polynomial product without truncation; output order Na + Nb.
BiJet jet_mul_full(const BiJet& a, const BiJet& b);
// Multiplies by z^p zbar^q; the order grows by p + q since the factor is exact.
BiJet mul_monomial(const BiJet& f, int p, int q, cplx coeff = 1.0);

BiJet wirtinger_dz(const BiJet& f);
BiJet wirtinger_dzbar(const BiJet& f);
// Mixed derivative d^{a+b} f / dz^a dzbar^b.
BiJet wirtinger_d(const BiJet& f, int a, int b);

class ZOrder {
 public:
  static ZOrder finite(int value) { return ZOrder(value, false); }
  static ZOrder truncation_limited(int bound) { return ZOrder(bound, true); }

  bool limited() const { return limited_; }
  // The order itself, or the lower bound N+1 when truncation limited.
  int value() const { return value_; }
  std::string to_string() const;

  friend bool operator==(const ZOrder& a, const ZOrder& b) {
    return a.value_ == b.value_ && a.limited_ == b.limited_;
  }
  friend bool operator<(const ZOrder& a, const ZOrder& b) {
    if (a.value_ != b.value_) return a.value_ < b.value_;
    return !a.limited_ && b.limited_;
  }

 private:
  ZOrder(int v, bool l) : value_(v), limited_(l) {}
  int value_;
  bool limited_;
};

ZOrder ord_z(const BiJet& f, double tol = kJetTol);
ZOrder ord_z(const std::vector<BiJet>& fs, double tol = kJetTol);

bool in_class_C(const BiJet& f, int s, int k, double tol = kJetTol);

BiJet divide_z_pow(const BiJet& f, int p, double tol = kJetTol);
BiJet divide_zbar_pow(const BiJet& f, int p, double tol = kJetTol);

// Jet of (zbar^s / z^s) e, defined when e is divisible by z^s.
BiJet conj_ratio_extend(const BiJet& e, int s, double tol = kJetTol);

// Series reciprocal; requires f(0) != 0.
BiJet jet_reciprocal(const BiJet& f);
// f^alpha with the principal branch at f(0); requires f(0) != 0.
BiJet jet_pow(const BiJet& f, double alpha);
// f(h, conj h) for a jet h with h(0) = 0; output order min(Nf, Nh).
BiJet jet_compose(const BiJet& f, const BiJet& h);

}  // namespace branchkit
