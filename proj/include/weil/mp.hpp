#pragma once

// Arbitrary-precision real and complex scalars on top of MPFR.
//
// Every MpReal carries its own precision. Binary operations produce a result
// at the larger of the two operand precisions, so a computation started from
// values created at the context precision stays at that precision without any
// thread-local or global state.

#include <mpfr.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>

namespace weil {

/// Working precision in bits plus the guard bits reserved for round-off.
/// Target accuracy of every routine is eps = 2^(-bits+guard).
struct PrecisionContext {
  int bits = 256;
  int guard = 32;

  PrecisionContext() = default;
  PrecisionContext(int bits_, int guard_ = 32);

  /// bits = ceil(digits * log2(10)) + guard.
  static PrecisionContext from_digits(int digits, int guard = 32);

  /// Same target, `extra` more working bits (used for oracles and for
  /// cancellation-prone evaluations).
  PrecisionContext widened(int extra) const { return {bits + extra, guard}; }
  PrecisionContext doubled() const { return {2 * bits, guard}; }

  /// log2(eps) = -bits + guard.
  int eps_exponent() const { return -bits + guard; }

  friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;
};

class MpReal {
 public:
  /// Zero at the given precision.
  explicit MpReal(long bits = 64);
  MpReal(int value, long bits);
  MpReal(long value, long bits);
  MpReal(double value, long bits);
  /// Parses a decimal literal (anything mpfr_set_str accepts in base 10).
  MpReal(std::string_view decimal, long bits);

  MpReal(const MpReal& other);
  MpReal(MpReal&& other) noexcept;
  MpReal& operator=(const MpReal& other);
  MpReal& operator=(MpReal&& other) noexcept;
  ~MpReal();

  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }
  /// Rounds to a new precision in place.
  void set_precision(long bits);
  MpReal rounded_to(long bits) const;

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  /// Decimal scientific string. digits == 0 selects enough digits for an
  /// exact round trip at this precision.
  std::string to_string(int digits = 0) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// Binary exponent e with |x| in [2^(e-1), 2^e); very negative for zero.
  long exponent() const;

  MpReal& operator+=(const MpReal& o);
  MpReal& operator-=(const MpReal& o);
  MpReal& operator*=(const MpReal& o);
  MpReal& operator/=(const MpReal& o);
  MpReal& operator+=(long o);
  MpReal& operator-=(long o);
  MpReal& operator*=(long o);
  MpReal& operator/=(long o);
  MpReal operator-() const;

  friend MpReal operator+(const MpReal& a, const MpReal& b);
  friend MpReal operator-(const MpReal& a, const MpReal& b);
  friend MpReal operator*(const MpReal& a, const MpReal& b);
  friend MpReal operator/(const MpReal& a, const MpReal& b);
  friend MpReal operator+(const MpReal& a, long b);
  friend MpReal operator-(const MpReal& a, long b);
  friend MpReal operator*(const MpReal& a, long b);
  friend MpReal operator/(const MpReal& a, long b);
  friend MpReal operator+(long a, const MpReal& b);
  friend MpReal operator-(long a, const MpReal& b);
  friend MpReal operator*(long a, const MpReal& b);
  friend MpReal operator/(long a, const MpReal& b);

  friend bool operator==(const MpReal& a, const MpReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const MpReal& a, const MpReal& b);
  friend bool operator==(const MpReal& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const MpReal& a, long b);

  /// Bitwise identity: same precision, same sign, same mantissa and exponent.
  bool identical(const MpReal& o) const;

 private:
  mpfr_t v_;
};

std::ostream& operator<<(std::ostream& os, const MpReal& x);

// Elementary functions; results at the argument's precision.
MpReal abs(const MpReal& x);
MpReal sqrt(const MpReal& x);
MpReal exp(const MpReal& x);
MpReal expm1(const MpReal& x);
MpReal log(const MpReal& x);
MpReal log1p(const MpReal& x);
MpReal sin(const MpReal& x);
MpReal cos(const MpReal& x);
void sin_cos(const MpReal& x, MpReal& s, MpReal& c);
MpReal tan(const MpReal& x);
MpReal atan(const MpReal& x);
MpReal atan2(const MpReal& y, const MpReal& x);
MpReal sinh(const MpReal& x);
MpReal cosh(const MpReal& x);
MpReal pow(const MpReal& x, const MpReal& y);
MpReal pow(const MpReal& x, long n);
MpReal ldexp(const MpReal& x, long e);
MpReal max(const MpReal& a, const MpReal& b);
MpReal min(const MpReal& a, const MpReal& b);
MpReal floor(const MpReal& x);

// Constants computed fresh at the requested precision.
MpReal const_pi(long bits);
MpReal const_euler(long bits);
MpReal const_log2(long bits);
MpReal const_catalan(long bits);
/// 2^e at the given precision (exact).
MpReal pow2(long e, long bits);

class MpComplex {
 public:
  MpReal re;
  MpReal im;

  explicit MpComplex(long bits = 64) : re(bits), im(bits) {}
  MpComplex(MpReal r, MpReal i) : re(std::move(r)), im(std::move(i)) {}
  explicit MpComplex(MpReal r) : re(std::move(r)), im(re.precision()) {}
  MpComplex(double r, double i, long bits) : re(r, bits), im(i, bits) {}

  long precision() const { return std::max(re.precision(), im.precision()); }

  MpComplex& operator+=(const MpComplex& o);
  MpComplex& operator-=(const MpComplex& o);
  MpComplex& operator*=(const MpComplex& o);
  MpComplex& operator/=(const MpComplex& o);
  MpComplex& operator*=(const MpReal& o);
  MpComplex& operator/=(const MpReal& o);
  MpComplex operator-() const { return {-re, -im}; }

  friend MpComplex operator+(MpComplex a, const MpComplex& b) { return a += b; }
  friend MpComplex operator-(MpComplex a, const MpComplex& b) { return a -= b; }
  friend MpComplex operator*(MpComplex a, const MpComplex& b) { return a *= b; }
  friend MpComplex operator/(MpComplex a, const MpComplex& b) { return a /= b; }
  friend MpComplex operator*(MpComplex a, const MpReal& b) { return a *= b; }
  friend MpComplex operator*(const MpReal& b, MpComplex a) { return a *= b; }
  friend MpComplex operator/(MpComplex a, const MpReal& b) { return a /= b; }
  friend MpComplex operator+(MpComplex a, const MpReal& b) {
    a.re += b;
    return a;
  }
  friend MpComplex operator-(MpComplex a, const MpReal& b) {
    a.re -= b;
    return a;
  }
  friend MpComplex operator+(MpComplex a, long b) {
    a.re += b;
    return a;
  }
  friend MpComplex operator-(MpComplex a, long b) {
    a.re -= b;
    return a;
  }

  bool identical(const MpComplex& o) const { return re.identical(o.re) && im.identical(o.im); }
};

MpComplex conj(const MpComplex& z);
MpReal abs(const MpComplex& z);
MpReal norm(const MpComplex& z);  // |z|^2
MpReal arg(const MpComplex& z);
MpComplex inverse(const MpComplex& z);
MpComplex exp(const MpComplex& z);
/// Principal branch.
MpComplex log(const MpComplex& z);
MpComplex sin(const MpComplex& z);
MpComplex cos(const MpComplex& z);
MpComplex sqrt(const MpComplex& z);
/// The imaginary unit times x.
MpComplex times_i(const MpComplex& z);

std::ostream& operator<<(std::ostream& os, const MpComplex& z);

}  // namespace weil
