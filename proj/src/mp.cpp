#include "weil/mp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <ostream>

#include "weil/errors.hpp"

namespace weil {

PrecisionContext::PrecisionContext(int bits_, int guard_) : bits(bits_), guard(guard_) {
  if (bits < 128) throw DomainError("PrecisionContext: bits must be >= 128, got " + std::to_string(bits));
  if (guard < 0 || guard >= bits) throw DomainError("PrecisionContext: invalid guard bit count");
}

PrecisionContext PrecisionContext::from_digits(int digits, int guard) {
  const double b = std::ceil(digits * 3.321928094887362347870319429489390175864831393);
  return {static_cast<int>(b) + guard, guard};
}

// ---------------------------------------------------------------- MpReal

MpReal::MpReal(long bits) {
  mpfr_init2(v_, bits);
  mpfr_set_zero(v_, 1);
}

MpReal::MpReal(int value, long bits) : MpReal(static_cast<long>(value), bits) {}

MpReal::MpReal(long value, long bits) {
  mpfr_init2(v_, bits);
  mpfr_set_si(v_, value, MPFR_RNDN);
}

MpReal::MpReal(double value, long bits) {
  mpfr_init2(v_, bits);
  mpfr_set_d(v_, value, MPFR_RNDN);
}

MpReal::MpReal(std::string_view decimal, long bits) {
  mpfr_init2(v_, bits);
  std::string s(decimal);
  if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    mpfr_clear(v_);
    throw FormatError("not a decimal number: '" + s + "'");
  }
}

MpReal::MpReal(const MpReal& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

MpReal::MpReal(MpReal&& other) noexcept {
  // Steal the limbs; the source keeps a null mantissa pointer and only
  // supports destruction or assignment afterwards.
  v_[0] = other.v_[0];
  other.v_[0]._mpfr_d = nullptr;
}

MpReal& MpReal::operator=(const MpReal& other) {
  if (this == &other) return *this;
  if (v_[0]._mpfr_d == nullptr) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
  } else if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
  }
  mpfr_set(v_, other.v_, MPFR_RNDN);
  return *this;
}

MpReal& MpReal::operator=(MpReal&& other) noexcept {
  if (this == &other) return *this;
  if (v_[0]._mpfr_d != nullptr) mpfr_clear(v_);
  v_[0] = other.v_[0];
  other.v_[0]._mpfr_d = nullptr;
  return *this;
}

MpReal::~MpReal() {
  if (v_[0]._mpfr_d != nullptr) mpfr_clear(v_);
}

void MpReal::set_precision(long bits) { mpfr_prec_round(v_, bits, MPFR_RNDN); }

MpReal MpReal::rounded_to(long bits) const {
  MpReal r(bits);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

std::string MpReal::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (mpfr_zero_p(v_)) return mpfr_signbit(v_) ? "-0" : "0";
  mpfr_exp_t e = 0;
  char* s = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(digits), v_, MPFR_RNDN);
  std::unique_ptr<char, void (*)(char*)> guard(s, mpfr_free_str);
  std::string m(s);
  std::string out;
  if (!m.empty() && m[0] == '-') {
    out.push_back('-');
    m.erase(0, 1);
  }
  out.push_back(m[0]);
  if (m.size() > 1) {
    out.push_back('.');
    out.append(m, 1, std::string::npos);
  }
  out.push_back('e');
  out += std::to_string(static_cast<long>(e) - 1);
  return out;
}

long MpReal::exponent() const {
  if (!mpfr_regular_p(v_)) return mpfr_zero_p(v_) ? -(1L << 40) : (1L << 40);
  return static_cast<long>(mpfr_get_exp(v_));
}

namespace {
long maxprec(mpfr_srcptr a, mpfr_srcptr b) { return std::max<long>(mpfr_get_prec(a), mpfr_get_prec(b)); }

void widen(mpfr_ptr x, mpfr_srcptr o) {
  if (mpfr_get_prec(o) > mpfr_get_prec(x)) mpfr_prec_round(x, mpfr_get_prec(o), MPFR_RNDN);
}
}  // namespace

MpReal& MpReal::operator+=(const MpReal& o) {
  widen(v_, o.v_);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
MpReal& MpReal::operator-=(const MpReal& o) {
  widen(v_, o.v_);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
MpReal& MpReal::operator*=(const MpReal& o) {
  widen(v_, o.v_);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
MpReal& MpReal::operator/=(const MpReal& o) {
  widen(v_, o.v_);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
MpReal& MpReal::operator+=(long o) {
  mpfr_add_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
MpReal& MpReal::operator-=(long o) {
  mpfr_sub_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
MpReal& MpReal::operator*=(long o) {
  mpfr_mul_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
MpReal& MpReal::operator/=(long o) {
  mpfr_div_si(v_, v_, o, MPFR_RNDN);
  return *this;
}

MpReal MpReal::operator-() const {
  MpReal r(precision());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

MpReal operator+(const MpReal& a, const MpReal& b) {
  MpReal r(maxprec(a.v_, b.v_));
  mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}
MpReal operator-(const MpReal& a, const MpReal& b) {
  MpReal r(maxprec(a.v_, b.v_));
  mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}
MpReal operator*(const MpReal& a, const MpReal& b) {
  MpReal r(maxprec(a.v_, b.v_));
  mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}
MpReal operator/(const MpReal& a, const MpReal& b) {
  MpReal r(maxprec(a.v_, b.v_));
  mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}
MpReal operator+(const MpReal& a, long b) {
  MpReal r(a.precision());
  mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}
MpReal operator-(const MpReal& a, long b) {
  MpReal r(a.precision());
  mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}
MpReal operator*(const MpReal& a, long b) {
  MpReal r(a.precision());
  mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}
MpReal operator/(const MpReal& a, long b) {
  MpReal r(a.precision());
  mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}
MpReal operator+(long a, const MpReal& b) { return b + a; }
MpReal operator-(long a, const MpReal& b) {
  MpReal r(b.precision());
  mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN);
  return r;
}
MpReal operator*(long a, const MpReal& b) { return b * a; }
MpReal operator/(long a, const MpReal& b) {
  MpReal r(b.precision());
  mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const MpReal& a, const MpReal& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.v_, b.v_);
  return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
}

std::partial_ordering operator<=>(const MpReal& a, long b) {
  if (mpfr_nan_p(a.v_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_si(a.v_, b);
  return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
}

bool MpReal::identical(const MpReal& o) const {
  if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) return false;
  if (mpfr_nan_p(v_) || mpfr_nan_p(o.v_)) return mpfr_nan_p(v_) && mpfr_nan_p(o.v_);
  return mpfr_equal_p(v_, o.v_) && mpfr_signbit(v_) == mpfr_signbit(o.v_);
}

std::ostream& operator<<(std::ostream& os, const MpReal& x) {
  const auto p = os.precision();
  return os << x.to_string(p > 0 ? static_cast<int>(p) : 0);
}

// ------------------------------------------------------ elementary funcs

#define WEIL_UNARY(name, fn)                \
  MpReal name(const MpReal& x) {            \
    MpReal r(x.precision());                \
    fn(r.raw(), x.raw(), MPFR_RNDN);        \
    return r;                               \
  }

WEIL_UNARY(abs, mpfr_abs)
WEIL_UNARY(sqrt, mpfr_sqrt)
WEIL_UNARY(exp, mpfr_exp)
WEIL_UNARY(expm1, mpfr_expm1)
WEIL_UNARY(log, mpfr_log)
WEIL_UNARY(log1p, mpfr_log1p)
WEIL_UNARY(sin, mpfr_sin)
WEIL_UNARY(cos, mpfr_cos)
WEIL_UNARY(tan, mpfr_tan)
WEIL_UNARY(atan, mpfr_atan)
WEIL_UNARY(sinh, mpfr_sinh)
WEIL_UNARY(cosh, mpfr_cosh)

#undef WEIL_UNARY

MpReal floor(const MpReal& x) {
  MpReal r(x.precision());
  mpfr_floor(r.raw(), x.raw());
  return r;
}

void sin_cos(const MpReal& x, MpReal& s, MpReal& c) {
  if (s.precision() != x.precision()) s = MpReal(x.precision());
  if (c.precision() != x.precision()) c = MpReal(x.precision());
  mpfr_sin_cos(s.raw(), c.raw(), x.raw(), MPFR_RNDN);
}

MpReal atan2(const MpReal& y, const MpReal& x) {
  MpReal r(std::max(x.precision(), y.precision()));
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}

MpReal pow(const MpReal& x, const MpReal& y) {
  MpReal r(std::max(x.precision(), y.precision()));
  mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}

MpReal pow(const MpReal& x, long n) {
  MpReal r(x.precision());
  mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
  return r;
}

MpReal ldexp(const MpReal& x, long e) {
  MpReal r(x.precision());
  mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
  return r;
}

MpReal max(const MpReal& a, const MpReal& b) { return a < b ? b : a; }
MpReal min(const MpReal& a, const MpReal& b) { return b < a ? b : a; }

MpReal const_pi(long bits) {
  MpReal r(bits);
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}

MpReal const_euler(long bits) {
  MpReal r(bits);
  mpfr_const_euler(r.raw(), MPFR_RNDN);
  return r;
}

MpReal const_log2(long bits) {
  MpReal r(bits);
  mpfr_const_log2(r.raw(), MPFR_RNDN);
  return r;
}

MpReal const_catalan(long bits) {
  MpReal r(bits);
  mpfr_const_catalan(r.raw(), MPFR_RNDN);
  return r;
}

MpReal pow2(long e, long bits) {
  MpReal r(1L, bits);
  mpfr_mul_2si(r.raw(), r.raw(), e, MPFR_RNDN);
  return r;
}

// ------------------------------------------------------------- MpComplex

MpComplex& MpComplex::operator+=(const MpComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

MpComplex& MpComplex::operator-=(const MpComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

MpComplex& MpComplex::operator*=(const MpComplex& o) {
  const long p = std::max(precision(), o.precision());
  MpReal r(p), i(p);
  mpfr_fmms(r.raw(), re.raw(), o.re.raw(), im.raw(), o.im.raw(), MPFR_RNDN);
  mpfr_fmma(i.raw(), re.raw(), o.im.raw(), im.raw(), o.re.raw(), MPFR_RNDN);
  re = std::move(r);
  im = std::move(i);
  return *this;
}

MpComplex& MpComplex::operator/=(const MpComplex& o) {
  // Smith's algorithm keeps intermediate magnitudes bounded.
  if (abs(o.re) >= abs(o.im)) {
    const MpReal t = o.im / o.re;
    const MpReal d = o.re + o.im * t;
    MpReal r = (re + im * t) / d;
    MpReal i = (im - re * t) / d;
    re = std::move(r);
    im = std::move(i);
  } else {
    const MpReal t = o.re / o.im;
    const MpReal d = o.re * t + o.im;
    MpReal r = (re * t + im) / d;
    MpReal i = (im * t - re) / d;
    re = std::move(r);
    im = std::move(i);
  }
  return *this;
}

MpComplex& MpComplex::operator*=(const MpReal& o) {
  re *= o;
  im *= o;
  return *this;
}

MpComplex& MpComplex::operator/=(const MpReal& o) {
  re /= o;
  im /= o;
  return *this;
}

MpComplex conj(const MpComplex& z) { return {z.re, -z.im}; }

MpReal norm(const MpComplex& z) {
  MpReal r(z.precision());
  mpfr_fmma(r.raw(), z.re.raw(), z.re.raw(), z.im.raw(), z.im.raw(), MPFR_RNDN);
  return r;
}

MpReal abs(const MpComplex& z) {
  MpReal r(z.precision());
  mpfr_hypot(r.raw(), z.re.raw(), z.im.raw(), MPFR_RNDN);
  return r;
}

MpReal arg(const MpComplex& z) { return atan2(z.im, z.re); }

MpComplex inverse(const MpComplex& z) {
  MpComplex one(MpReal(1L, z.precision()), MpReal(z.precision()));
  return one / z;
}

MpComplex exp(const MpComplex& z) {
  const MpReal m = exp(z.re);
  MpReal s(z.precision()), c(z.precision());
  sin_cos(z.im, s, c);
  return {m * c, m * s};
}

MpComplex log(const MpComplex& z) { return {log(abs(z)), arg(z)}; }

MpComplex sin(const MpComplex& z) {
  MpReal s(z.precision()), c(z.precision());
  sin_cos(z.re, s, c);
  return {s * cosh(z.im), c * sinh(z.im)};
}

MpComplex cos(const MpComplex& z) {
  MpReal s(z.precision()), c(z.precision());
  sin_cos(z.re, s, c);
  return {c * cosh(z.im), -(s * sinh(z.im))};
}

MpComplex sqrt(const MpComplex& z) {
  const long p = z.precision();
  if (z.re.is_zero() && z.im.is_zero()) return MpComplex(p);
  const MpReal r = abs(z);
  MpReal a = sqrt(ldexp(r + abs(z.re), -1));
  if (z.re.sign() >= 0) {
    MpReal b = z.im / (a * 2L);
    return {std::move(a), std::move(b)};
  }
  MpReal b = z.im.sign() >= 0 ? a : -a;
  MpReal re = z.im / (b * 2L);
  return {std::move(re), std::move(b)};
}

MpComplex times_i(const MpComplex& z) { return {-z.im, z.re}; }

std::ostream& operator<<(std::ostream& os, const MpComplex& z) { return os << '(' << z.re << ", " << z.im << ')'; }

}  // namespace weil
