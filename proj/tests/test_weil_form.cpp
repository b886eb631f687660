#include <doctest.h>

#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "weil/errors.hpp"
#include "weil/weil_form.hpp"

using namespace weil;

namespace {

const PrecisionContext ctx = PrecisionContext::from_digits(60);
const long bits = ctx.bits;
const long wide = 2 * bits;

WeilParams params_for(const std::string& lambda, int N) { return WeilParams::make(LambdaSpec::parse(lambda), N, ctx); }

bool within(const MpReal& a, const MpReal& b, long decimal_exponent) {
  return abs(a - b) <= oracle::pow10(decimal_exponent, wide);
}

}  // namespace

TEST_CASE("lambda parsing") {
  const auto s = LambdaSpec::parse("sqrt:13");
  CHECK(s.slug() == "sqrt13");
  const MpReal v = s.value(bits);
  CHECK(abs(v * v - 13L) <= pow2(-bits + 5, bits));
  CHECK(LambdaSpec::parse("1.2").slug() == "1p2");
  CHECK(LambdaSpec::parse("2").value(bits) == 2L);
  CHECK_THROWS_AS(LambdaSpec::parse("0.5"), DomainError);
  CHECK_THROWS_AS(LambdaSpec::parse("sqrt:1"), DomainError);
  CHECK_THROWS_AS(LambdaSpec::parse("sqrt:x"), DomainError);
  CHECK_THROWS_AS(LambdaSpec::parse("two"), DomainError);
}

TEST_CASE("parameters") {
  const auto p = params_for("sqrt:13", 120);
  CHECK(p.dim() == 241);
  CHECK(p.index(-120) == 0);
  CHECK(abs(p.L - log(MpReal(13L, bits))) <= pow2(ctx.eps_exponent(), bits));
  CHECK_THROWS_AS(params_for("2", 0), DomainError);
}

TEST_CASE("von Mangoldt and prime powers") {
  CHECK(von_mangoldt(8, bits) == log(MpReal(2L, bits)));
  CHECK(von_mangoldt(6, bits).is_zero());
  CHECK(von_mangoldt(13, bits) == log(MpReal(13L, bits)));
  CHECK(von_mangoldt(1, bits).is_zero());
  CHECK(prime_powers_upto(13) == std::vector<long>{2, 3, 4, 5, 7, 8, 9, 11, 13});
  CHECK(prime_powers_upto(1).empty());
}

TEST_CASE("archimedean coefficients against quadrature") {
  const auto p = params_for("3", 50);
  const auto c = arch_coefficients(p);
  CHECK(c.alpha[0].is_zero());
  for (int n : {0, 1, 7, 50}) {
    CAPTURE(n);
    CHECK(within(c.alpha[n], oracle::alpha_quadrature(n, p.L, wide), -40));
    CHECK(within(c.beta[n], oracle::beta_quadrature(n, p.L, wide), -40));
    CHECK(within(c.gamma[n], oracle::gamma_quadrature(n, p.L, wide), -40));
  }
  // gamma(n) - gamma(0) = int_0^L (cos(2 pi n x/L) - 1) rho(x) dx
  const MpReal Lw = p.L.rounded_to(wide);
  const MpReal w = const_pi(wide) * 14L / Lw;
  const MpReal diff = oracle::integrate(
      [&](const MpReal& x) { return (cos(w * x) - 1L) * exp(x / 2L) / (sinh(x) * 2L); }, MpReal(wide), Lw, wide);
  CHECK(within(c.gamma[7] - c.gamma[0], diff, -40));
}

TEST_CASE("archimedean coefficients: parity and serial agreement") {
  const auto p = params_for("2", 6);
  const auto c = arch_coefficients(p);
  const auto s = arch_coefficients_serial(p);
  for (int n = 0; n <= 6; ++n) {
    CHECK(c.alpha[n].identical(s.alpha[n]));
    CHECK(c.beta[n].identical(s.beta[n]));
    CHECK(c.gamma[n].identical(s.gamma[n]));
    CHECK(c.alpha_at(-n) == -c.alpha_at(n));
    CHECK(c.beta_at(-n).identical(c.beta_at(n)));
    CHECK(c.gamma_at(-n).identical(c.gamma_at(n)));
  }
  CHECK(abs(c.cL + c.wL - arch_correction(p.L)) <= pow2(ctx.eps_exponent(), bits));
}

TEST_CASE("pole term") {
  const auto p = params_for("3", 3);
  const MpReal sh = sinh(p.L / 4L);
  CHECK(abs(w02_entry(0, 0, p) - sh * sh * 32L / p.L) <= pow2(ctx.eps_exponent(), bits));
  CHECK(w02_entry(2, -1, p).identical(w02_entry(-2, 1, p)));
  const auto q = oracle::form_entry_quadrature(1, 0, p.lambda, wide);
  CHECK(within(w02_entry(1, 0, p), q.pole, -40));
}

TEST_CASE("prime term") {
  const auto small = params_for("1.2", 2);
  for (int n = -2; n <= 2; ++n)
    for (int m = -2; m <= 2; ++m) CHECK(prime_entry(n, m, small).is_zero());

  const auto p = params_for("2", 2);
  MpReal want(bits);
  for (long k : {2L, 3L, 4L}) {
    const MpReal lk = log(MpReal(k, bits));
    const MpReal lp = k == 4 ? log(MpReal(2L, bits)) : lk;
    want += lp / sqrt(MpReal(k, bits)) * (1L - lk / p.L) * 2L;
  }
  CHECK(abs(prime_entry(0, 0, p) - want) <= pow2(ctx.eps_exponent(), bits));
}

TEST_CASE("archimedean table") {
  const auto p = params_for("2", 3);
  const auto c = arch_coefficients(p);
  CHECK(arch_entry(2, 2, c) == (c.gamma[2] - c.beta[2]) * 2L);
  CHECK(arch_entry(2, 1, c).identical(arch_entry(1, 2, c)));
  CHECK(abs(arch_entry(1, -1, c) + c.alpha[1]) <= pow2(ctx.eps_exponent(), bits));
}

TEST_CASE("assembly without primes") {
  const auto p = params_for("1.2", 1);
  const auto m = assemble(p);
  const auto c = arch_coefficients(p);
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) CHECK(m.at(i, j) == w02_entry(i, j, p) - arch_entry(i, j, c));
}

TEST_CASE("assembly against direct quadrature of the form") {
  const auto p = params_for("2", 4);
  const auto m = assemble(p);
  for (int i = -4; i <= 4; ++i)
    for (int j = i; j <= 4; ++j) {
      if (i + j < 0) continue;  // parity covers the rest
      CAPTURE(i);
      CAPTURE(j);
      CHECK(within(m.at(i, j), oracle::form_entry_quadrature(i, j, p.lambda, wide).total(), -30));
    }
}

TEST_CASE("structure of the assembled matrix") {
  const auto p = params_for("sqrt:13", 12);
  const auto m = assemble(p);
  const auto r = check_structure(m);
  CHECK(r.ok());
  const int N = p.N;
  for (int i = -N; i <= N; ++i) {
    CHECK(m.b_at(-i) == -m.b_at(i));
    CHECK(m.a[p.index(-i)] == m.a[p.index(i)]);
    for (int j = -N; j <= N; ++j) {
      CHECK(m.at(i, j).identical(m.at(j, i)));
      CHECK(abs(m.at(-i, -j) - m.at(i, j)) <= r.tolerance);
    }
  }
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(-N, N);
  for (int t = 0; t < 200; ++t) {
    const int i = pick(rng), j = pick(rng), k = pick(rng);
    if (i == j || j == k || k == i) continue;
    const MpReal cyc = m.at(i, j) * static_cast<long>(i - j) + m.at(j, k) * static_cast<long>(j - k) +
                       m.at(k, i) * static_cast<long>(k - i);
    CHECK(abs(cyc) <= r.tolerance);
  }
  CHECK(m.b_at(0).is_zero());
}

TEST_CASE("parallel and serial assembly are identical") {
  const auto p = params_for("sqrt:13", 10);
  const auto a = assemble(p), b = assemble_serial(p);
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) CHECK(a.at(i, j).identical(b.at(i, j)));
}

TEST_CASE("structure violation is detected") {
  const auto p = params_for("2", 3);
  auto m = assemble(p);
  m.tau(p.index(1), p.index(-2)) += MpReal(1e-3, bits);
  CHECK_THROWS_AS(finish_structure(m), StructureError);
}

TEST_CASE("matrix file round trip") {
  const auto p = params_for("sqrt:13", 3);
  const auto m = assemble(p);
  std::stringstream ss;
  write_matrix(ss, m);
  const std::string text = ss.str();
  CHECK(text.rfind("weilmatrix v1\n", 0) == 0);
  CHECK(text.find("lambda=sqrt:13\n") != std::string::npos);
  CHECK(text.find("N=3\n") != std::string::npos);
  CHECK(text.find("bits=" + std::to_string(bits) + "\n") != std::string::npos);

  std::istringstream in(text);
  const auto back = read_matrix(in);
  CHECK(back.params.N == 3);
  CHECK(back.params.lambda_spec == p.lambda_spec);
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j) CHECK(back.at(i, j).identical(m.at(i, j)));

  std::stringstream again;
  write_matrix(again, back);
  CHECK(again.str() == text);
}

TEST_CASE("matrix file rejects bad input") {
  const auto p = params_for("2", 2);
  std::stringstream ss;
  write_matrix(ss, assemble(p));
  std::string text = ss.str();

  std::string v2 = text;
  v2.replace(0, std::string("weilmatrix v1").size(), "weilmatrix v2");
  std::istringstream a(v2);
  CHECK_THROWS_AS(read_matrix(a), FormatError);

  std::string cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  std::istringstream b(cut);
  CHECK_THROWS_AS(read_matrix(b), FormatError);

  std::istringstream c("weileig v1\n");
  CHECK_THROWS_AS(read_matrix(c), FormatError);
}
