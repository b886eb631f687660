#include "weil/specfun.hpp"

#include <cmath>
#include <string>

#include "weil/errors.hpp"

namespace weil {

namespace {

bool is_nonpositive_integer(const MpComplex& z) {
  if (!z.im.is_zero()) return false;
  if (z.re.sign() > 0) return false;
  return mpfr_integer_p(z.re.raw()) != 0;
}

// |z|^2 >= r^2 for the shifted argument.
bool beyond_radius(const MpComplex& z, long r) { return norm(z) >= MpReal(r * r, z.precision()); }

// Number of B_2k terms that can be needed once |z| >= radius: the terms of
// both asymptotic series decay at least like (2k)!/(2 pi radius)^(2k).
int bernoulli_terms(long bits, long radius) {
  const double target = bits * std::log(2.0);
  double lg = 0.0;
  for (int k = 1; k < 100000; ++k) {
    // log((2k)! / (2 pi r)^(2k)) incrementally
    lg += std::log((2.0 * k - 1) * (2.0 * k)) - 2.0 * std::log(2.0 * M_PI * radius);
    if (-lg > target + 10) return k + 2;
  }
  return 100000;
}

}  // namespace

BernoulliTable::BernoulliTable(long bits, int count) {
  const long p = bits + 32;
  b2k_.reserve(static_cast<size_t>(count));
  const MpReal two_pi = const_pi(p) * 2L;
  MpReal zeta(p), fact(p), power(p);
  for (int k = 1; k <= count; ++k) {
    mpfr_zeta_ui(zeta.raw(), static_cast<unsigned long>(2 * k), MPFR_RNDN);
    mpfr_fac_ui(fact.raw(), static_cast<unsigned long>(2 * k), MPFR_RNDN);
    mpfr_pow_ui(power.raw(), two_pi.raw(), static_cast<unsigned long>(2 * k), MPFR_RNDN);
    MpReal b = zeta * fact / power * 2L;
    if (k % 2 == 0) b = -b;
    b.set_precision(bits);
    b2k_.push_back(std::move(b));
  }
}

SpecialFunctions::SpecialFunctions(const PrecisionContext& ctx)
    : ctx_(ctx),
      shift_radius_(static_cast<long>(std::ceil(ctx.bits * std::log(2.0) / (2.0 * M_PI))) + 8),
      bernoulli_(ctx.bits, bernoulli_terms(ctx.bits, shift_radius_)) {}

MpComplex SpecialFunctions::digamma(const MpComplex& z_in) const {
  if (is_nonpositive_integer(z_in)) throw PoleError("digamma: pole at " + z_in.re.to_string(20));
  const long p = ctx_.bits;
  MpComplex z(z_in.re.rounded_to(p), z_in.im.rounded_to(p));

  // psi(z) = psi(z + m) - sum_{k<m} 1/(z+k)
  MpComplex shift_sum(p);
  while (!beyond_radius(z, shift_radius_)) {
    shift_sum += inverse(z);
    z.re += 1L;
  }

  // psi(w) ~ log w - 1/(2w) - sum B_2k / (2k w^2k)
  const MpComplex inv = inverse(z);
  const MpComplex inv2 = inv * inv;
  MpComplex result = log(z) - inv * MpReal(0.5, p);
  const MpReal eps = pow2(ctx_.eps_exponent(), p);
  MpComplex power = inv2;
  for (int k = 1; k <= bernoulli_.size(); ++k) {
    MpComplex term = power * (bernoulli_.b2k(k) / (2L * k));
    result -= term;
    if (abs(term) < eps * abs(result)) break;
    if (k == bernoulli_.size()) throw NonConvergence("digamma: asymptotic series did not converge");
    power *= inv2;
  }
  return result - shift_sum;
}

MpComplex SpecialFunctions::trigamma(const MpComplex& z_in) const {
  if (is_nonpositive_integer(z_in)) throw PoleError("trigamma: pole at " + z_in.re.to_string(20));
  const long p = ctx_.bits;
  MpComplex z(z_in.re.rounded_to(p), z_in.im.rounded_to(p));

  // psi1(z) = psi1(z + m) + sum_{k<m} 1/(z+k)^2
  MpComplex shift_sum(p);
  while (!beyond_radius(z, shift_radius_)) {
    const MpComplex inv = inverse(z);
    shift_sum += inv * inv;
    z.re += 1L;
  }

  // psi1(w) ~ 1/w + 1/(2w^2) + sum B_2k / w^(2k+1)
  const MpComplex inv = inverse(z);
  const MpComplex inv2 = inv * inv;
  MpComplex result = inv + inv2 * MpReal(0.5, p);
  const MpReal eps = pow2(ctx_.eps_exponent(), p);
  MpComplex power = inv2 * inv;
  for (int k = 1; k <= bernoulli_.size(); ++k) {
    MpComplex term = power * bernoulli_.b2k(k);
    result += term;
    if (abs(term) < eps * abs(result)) break;
    if (k == bernoulli_.size()) throw NonConvergence("trigamma: asymptotic series did not converge");
    power *= inv2;
  }
  return result + shift_sum;
}

namespace {

MpComplex hyp2f1_series(const MpReal& a, const MpComplex& b, const MpComplex& c, const MpReal& z,
                        const PrecisionContext& ctx, const SeriesOptions& opt) {
  const long p = ctx.bits;
  const MpReal eps = pow2(ctx.eps_exponent(), p);
  const long cap = static_cast<long>(opt.cap_factor) * ctx.bits;
  const MpReal zz = z.rounded_to(p);

  MpComplex sum(MpReal(1L, p), MpReal(p));
  MpComplex term(MpReal(1L, p), MpReal(p));
  int quiet = 0;
  for (long k = 0; k < cap; ++k) {
    // term_{k+1} = term_k (a+k)(b+k) z / ((c+k)(k+1))
    MpComplex num = (b + k) * (a + k);
    MpComplex den = (c + k) * MpReal(k + 1, p);
    term *= num / den;
    term *= zz;
    sum += term;
    if (abs(term) <= eps * abs(sum)) {
      if (++quiet >= opt.quiet_terms) return sum;
    } else {
      quiet = 0;
    }
  }
  throw NonConvergence("hyp2f1: term cap " + std::to_string(cap) + " reached");
}

MpComplex lerch_series(const MpReal& z, const MpComplex& x, const PrecisionContext& ctx, const SeriesOptions& opt) {
  const long p = ctx.bits;
  const MpReal eps = pow2(ctx.eps_exponent(), p);
  const long cap = static_cast<long>(opt.cap_factor) * ctx.bits;
  const MpReal zz = z.rounded_to(p);
  const MpComplex xx(x.re.rounded_to(p), x.im.rounded_to(p));

  const MpComplex inv0 = inverse(xx);
  MpComplex sum = inv0 * inv0;
  MpReal zk(1L, p);
  int quiet = 0;
  for (long k = 1; k < cap; ++k) {
    zk *= zz;
    if (zk.is_zero()) return sum;
    const MpComplex inv = inverse(xx + k);
    const MpComplex term = inv * inv * zk;
    sum += term;
    if (abs(term) <= eps * abs(sum)) {
      if (++quiet >= opt.quiet_terms) return sum;
    } else {
      quiet = 0;
    }
  }
  throw NonConvergence("lerch_phi2: term cap " + std::to_string(cap) + " reached");
}

// One retry with doubled guard bits and a doubled cap.
template <class F>
MpComplex with_guard_retry(const PrecisionContext& ctx, const SeriesOptions& opt, F&& f) {
  try {
    return f(ctx, opt);
  } catch (const NonConvergence&) {
    PrecisionContext relaxed{ctx.bits, std::min(2 * ctx.guard, ctx.bits / 2)};
    SeriesOptions wider = opt;
    wider.cap_factor *= 2;
    MpComplex r = f(relaxed, wider);
    return r;
  }
}

}  // namespace

MpComplex SpecialFunctions::hyp2f1(const MpReal& a, const MpComplex& b, const MpComplex& c, const MpReal& z,
                                   const SeriesOptions& opt) const {
  return weil::hyp2f1(a, b, c, z, ctx_, opt);
}

MpComplex SpecialFunctions::lerch_phi2(const MpReal& z, const MpComplex& x, const SeriesOptions& opt) const {
  return weil::lerch_phi2(z, x, ctx_, opt);
}

MpComplex digamma(const MpComplex& z, const PrecisionContext& ctx) { return SpecialFunctions(ctx).digamma(z); }

MpComplex trigamma(const MpComplex& z, const PrecisionContext& ctx) { return SpecialFunctions(ctx).trigamma(z); }

MpComplex hyp2f1(const MpReal& a, const MpComplex& b, const MpComplex& c, const MpReal& z,
                 const PrecisionContext& ctx, const SeriesOptions& opt) {
  if (abs(z) >= 1L) throw DomainError("hyp2f1: requires |z| < 1");
  if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
  return with_guard_retry(ctx, opt, [&](const PrecisionContext& c2, const SeriesOptions& o2) {
    return hyp2f1_series(a, b, c, z, c2, o2);
  });
}

MpComplex lerch_phi2(const MpReal& z, const MpComplex& x, const PrecisionContext& ctx, const SeriesOptions& opt) {
  if (abs(z) >= 1L) throw DomainError("lerch_phi2: requires |z| < 1");
  if (is_nonpositive_integer(x)) throw DomainError("lerch_phi2: x is a non-positive integer");
  return with_guard_retry(ctx, opt, [&](const PrecisionContext& c2, const SeriesOptions& o2) {
    return lerch_series(z, x, c2, o2);
  });
}

}  // namespace weil
