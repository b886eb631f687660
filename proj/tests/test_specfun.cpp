#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "weil/errors.hpp"
#include "weil/specfun.hpp"

using namespace weil;

namespace {

const PrecisionContext ctx = PrecisionContext::from_digits(60);
const long bits = ctx.bits;
const long wide = 2 * bits;

// relative error against the target eps, with a factor 4 of slack
bool close(const MpComplex& got, const MpComplex& want) {
  const MpReal scale = max(MpReal(1L, wide), abs(want));
  return abs(got - want) <= pow2(ctx.eps_exponent() + 2, wide) * scale;
}
bool close(const MpReal& got, const MpReal& want) { return close(MpComplex(got), MpComplex(want)); }

MpComplex cx(double re, double im) { return MpComplex(re, im, bits); }

MpReal L3() { return log(MpReal(3L, bits)) * 2L; }

// 1/4 + i pi n / L
MpComplex quarter_point(long n, const MpReal& L) { return MpComplex(MpReal(0.25, bits), const_pi(bits) * n / L); }

}  // namespace

TEST_CASE("hyp2f1 values") {
  CHECK(close(hyp2f1(MpReal(1L, bits), cx(0.25, 0), cx(1.25, 0), MpReal(bits), ctx), cx(1, 0)));
  const MpComplex v = hyp2f1(MpReal(1L, bits), cx(1, 0), cx(2, 0), MpReal(0.5, bits), ctx);
  CHECK(close(v, MpComplex(log(MpReal(2L, wide)) * 2L)));
  CHECK(close(v, oracle::brute_hyp2f1(MpReal(1L, wide), cx(1, 0), cx(2, 0), MpReal(0.5, wide), 10 * wide)));

  const MpReal L = L3();
  const MpComplex b = quarter_point(1, L);
  const MpReal z = exp(-L * 2L);
  const MpComplex got = hyp2f1(MpReal(1L, bits), b, b + 1L, z, ctx);
  const MpComplex bw(b.re.rounded_to(wide), b.im.rounded_to(wide));
  CHECK(close(got, oracle::brute_hyp2f1(MpReal(1L, wide), bw, bw + 1L, z.rounded_to(wide), 10 * bits)));
}

TEST_CASE("lerch_phi2 values") {
  const MpComplex x = cx(0.75, 2.5);
  CHECK(close(lerch_phi2(MpReal(bits), x, ctx), inverse(x * x)));
  // 2 Li2(1/2) = pi^2/6 - log(2)^2
  const MpReal pi = const_pi(wide), l2 = log(MpReal(2L, wide));
  CHECK(close(lerch_phi2(MpReal(0.5, bits), cx(1, 0), ctx), MpComplex(pi * pi / 6L - l2 * l2)));
  const MpReal L = L3();
  const MpComplex a = quarter_point(1, L);
  const MpReal z = exp(-L * 2L);
  CHECK(close(lerch_phi2(z, a, ctx),
              oracle::brute_lerch2(z.rounded_to(wide), MpComplex(a.re.rounded_to(wide), a.im.rounded_to(wide)), 10 * bits)));
}

TEST_CASE("digamma and trigamma closed forms") {
  const MpReal g = const_euler(wide), pi = const_pi(wide);
  CHECK(close(digamma(cx(1, 0), ctx), MpComplex(-g)));
  CHECK(close(digamma(cx(1, 0), ctx), oracle::digamma_series(cx(1, 0), wide)));
  CHECK(close(digamma(cx(0.25, 0), ctx), MpComplex(-g - pi / 2L - log(MpReal(2L, wide)) * 3L)));
  CHECK(close(trigamma(cx(0.25, 0), ctx), MpComplex(pi * pi + const_catalan(wide) * 8L)));
}

TEST_CASE("digamma reflection") {
  const MpComplex z = cx(0.25, 1.0);
  const MpComplex lhs = digamma(MpComplex(MpReal(1L, bits)) - z, ctx) - digamma(z, ctx);
  const MpReal pi = const_pi(wide);
  const MpComplex zw(z.re.rounded_to(wide), z.im.rounded_to(wide));
  const MpComplex rhs = cos(zw * pi) / sin(zw * pi) * pi;
  CHECK(close(lhs, rhs));
}

TEST_CASE("conjugate symmetry") {
  const MpReal L = L3();
  const MpReal z = exp(-L * 2L);
  for (long n : {1L, 7L, 50L}) {
    const MpComplex a = quarter_point(n, L), ab = conj(a);
    CHECK(close(digamma(ab, ctx), conj(digamma(a, ctx))));
    CHECK(close(trigamma(ab, ctx), conj(trigamma(a, ctx))));
    CHECK(close(lerch_phi2(z, ab, ctx), conj(lerch_phi2(z, a, ctx))));
    CHECK(close(hyp2f1(MpReal(1L, bits), ab, ab + 1L, z, ctx), conj(hyp2f1(MpReal(1L, bits), a, a + 1L, z, ctx))));
  }
}

TEST_CASE("digamma recurrence on random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> part(-70.0, 70.0);
  for (int i = 0; i < 40; ++i) {
    const MpComplex z = cx(part(rng), part(rng));
    const MpComplex diff = digamma(z + 1L, ctx) - digamma(z, ctx) - inverse(z);
    CHECK(abs(diff) <= pow2(ctx.eps_exponent() + 4, bits) * max(MpReal(1L, bits), abs(digamma(z, ctx))));
  }
}

TEST_CASE("agreement with independent series on the arch domain") {
  // z = e^(-2L), x = 1/4 + i pi n / L, 0 <= n <= 200, 1 < L <= 6
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> Ld(1.0001, 6.0);
  std::uniform_int_distribution<long> nd(0, 200);
  for (int i = 0; i < 100; ++i) {
    const MpReal L(Ld(rng), bits);
    const long n = nd(rng);
    const MpComplex a = quarter_point(n, L);
    const MpComplex aw(a.re.rounded_to(wide), a.im.rounded_to(wide));
    const MpReal z = exp(-L * 2L);
    const MpReal zw = exp(-L.rounded_to(wide) * 2L);
    CAPTURE(n);
    CAPTURE(L.to_double());
    CHECK(close(digamma(a, ctx), oracle::digamma_series(aw, wide)));
    CHECK(close(trigamma(a, ctx), oracle::trigamma_series(aw, wide)));
    CHECK(close(hyp2f1(MpReal(1L, bits), a, a + 1L, z, ctx),
                oracle::brute_hyp2f1(MpReal(1L, wide), aw, aw + 1L, zw, 10 * bits)));
    CHECK(close(lerch_phi2(z, a, ctx), oracle::brute_lerch2(zw, aw, 10 * bits)));
  }
}

TEST_CASE("domain and pole errors") {
  CHECK_THROWS_AS(hyp2f1(MpReal(1L, bits), cx(1, 0), cx(2, 0), MpReal(1L, bits), ctx), DomainError);
  CHECK_THROWS_AS(hyp2f1(MpReal(1L, bits), cx(1, 0), cx(-2, 0), MpReal(0.5, bits), ctx), DomainError);
  CHECK_THROWS_AS(lerch_phi2(MpReal(-1L, bits), cx(1, 0), ctx), DomainError);
  CHECK_THROWS_AS(lerch_phi2(MpReal(0.5, bits), cx(-3, 0), ctx), DomainError);
  CHECK_THROWS_AS(digamma(cx(0, 0), ctx), PoleError);
  CHECK_THROWS_AS(trigamma(cx(-4, 0), ctx), PoleError);
  CHECK_NOTHROW(digamma(cx(-4, 1e-3), ctx));
}

TEST_CASE("term cap raises non-convergence") {
  SeriesOptions tight;
  tight.cap_factor = 0;
  CHECK_THROWS_AS(hyp2f1(MpReal(1L, bits), cx(1, 0), cx(2, 0), MpReal(0.9, bits), ctx, tight), NonConvergence);
  CHECK_THROWS_AS(lerch_phi2(MpReal(0.9, bits), cx(1, 0), ctx, tight), NonConvergence);
}

TEST_CASE("shared instance matches free functions") {
  const SpecialFunctions sf(ctx);
  const MpComplex z = cx(0.25, 3.7);
  CHECK(sf.digamma(z).identical(digamma(z, ctx)));
  CHECK(sf.trigamma(z).identical(trigamma(z, ctx)));
}

TEST_CASE("bernoulli table") {
  const BernoulliTable t(bits, 10);
  const auto exact = oracle::bernoulli(20);
  for (int k = 1; k <= 10; ++k) CHECK(close(t.b2k(k), oracle::to_mp(exact[static_cast<std::size_t>(2 * k)], wide)));
}
