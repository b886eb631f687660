#include <doctest.h>

#include <json.hpp>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "weil/dirac_pert.hpp"
#include "weil/errors.hpp"
#include "weil/spectral.hpp"

using namespace weil;

namespace {

const PrecisionContext ctx = PrecisionContext::from_digits(60);
const long bits = ctx.bits;

WeilParams params(int N, const std::string& lambda = "2") { return WeilParams::make(LambdaSpec::parse(lambda), N, ctx); }

// sqrt(L) e_0
PerturbedOperator concentrated(int N) {
  const auto p = params(N);
  std::vector<MpReal> xi(static_cast<std::size_t>(p.dim()), MpReal(bits));
  xi[p.index(0)] = sqrt(p.L);
  return PerturbedOperator::make(p, xi, MpReal(bits));
}

PerturbedOperator from_weights(const WeilParams& p, std::vector<MpReal> w) {
  MpReal s(bits);
  for (const auto& x : w) s += x;
  for (auto& x : w) x = x * sqrt(p.L) / s;
  return PerturbedOperator::make(p, std::move(w), MpReal(bits));
}

PerturbedOperator smoke_operator() {
  static const PerturbedOperator op = [] {
    const auto p = params(16);
    const auto d = jacobi_eig(assemble(p).tau, ctx);
    even_simple_check(d, p);
    return PerturbedOperator::make(p, minimal_vector(d, p), d.eps_N);
  }();
  return op;
}

MpReal rel(const MpComplex& a, const MpComplex& b) { return abs(a - b) / max(MpReal(1L, bits), abs(b)); }

}  // namespace

TEST_CASE("concentrated vector: spectrum is the free lattice minus zero") {
  const auto op = concentrated(4);
  const auto sp = spectrum(op);
  REQUIRE(sp.roots.size() == 8);
  CHECK(sp.vanishing.size() == 8);
  std::vector<long> want{-4, -3, -2, -1, 1, 2, 3, 4};
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(sp.roots[k] == want[k]);
    CHECK(abs(sp.interior[k] - sp.tail.step * want[k]) <= pow2(ctx.eps_exponent(), bits));
  }
  CHECK(sp.tail.contains(5));
  CHECK_FALSE(sp.tail.contains(4));
  CHECK(abs(sp.tail.value(5) - const_pi(bits) * 10L / op.params.L) <= pow2(ctx.eps_exponent(), bits));
}

TEST_CASE("positive weights: one root between neighbouring poles") {
  const auto p = params(5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::vector<MpReal> w;
  for (int j = 0; j < p.dim(); ++j) w.emplace_back(u(rng), bits);
  const auto op = from_weights(p, w);
  const auto sp = secular_roots(op);
  REQUIRE(sp.roots.size() == 10);
  for (int j = -5; j < 5; ++j) {
    const MpReal& r = sp.roots[static_cast<std::size_t>(j + 5)];
    CHECK(r > static_cast<long>(j));
    CHECK(r < static_cast<long>(j + 1));
  }
}

TEST_CASE("three-term case against the quadratic") {
  // xi = (c, sqrt L - 2c, c), c = sqrt(L)/4: roots s = +-1/sqrt 2
  const auto p = params(1);
  const MpReal c = sqrt(p.L) / 4L;
  const auto op = PerturbedOperator::make(p, {c, sqrt(p.L) - c * 2L, c}, MpReal(bits));
  const auto sp = spectrum(op);
  REQUIRE(sp.roots.size() == 2);
  const MpReal r = sqrt(MpReal(0.5, bits));
  const MpReal tol = pow2(ctx.eps_exponent(), bits) * 4L;
  CHECK(abs(sp.roots[0] + r) <= tol);
  CHECK(abs(sp.roots[1] - r) <= tol);
  CHECK(abs(sp.interior[1] - r * sp.tail.step) <= tol * 8L);
}

TEST_CASE("Fourier transform of the concentrated vector") {
  const auto op = concentrated(3);
  const MpReal& L = op.params.L;
  CHECK(rel(xi_hat(op, MpComplex(bits)), MpComplex(L)) <= pow2(ctx.eps_exponent(), bits));
  const MpComplex z(0.7, -0.3, bits);
  CHECK(rel(xi_hat(op, z), sin(z * (L / 2L)) * MpReal(2L, bits) / z) <= pow2(ctx.eps_exponent() + 2, bits));
  // det_reg vanishes on the lattice away from zero
  for (long j : {1L, 2L, 7L}) {
    const MpComplex zj(const_pi(bits) * 2L * j / L, MpReal(bits));
    CHECK(abs(det_reg(op, zj)) <= pow2(-bits / 2, bits));
  }
}

TEST_CASE("Fourier transform against quadrature") {
  const auto p = params(3);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<MpReal> w;
  for (int j = 0; j < p.dim(); ++j) w.emplace_back(u(rng) + 0.3, bits);
  const auto op = from_weights(p, w);

  // int_0^L xi(x) e^(-iz(x - L/2)) dx, xi(x) = L^(-1/2) sum_j xi_j e^(2 pi i j x/L)
  const long wide = 2 * bits;
  const MpReal L = p.L.rounded_to(wide);
  const MpComplex z(MpReal(1L, wide), MpReal(1L, wide));
  auto integrand = [&](const MpReal& x) {
    MpComplex f(wide);
    for (int j = -p.N; j <= p.N; ++j) {
      const MpReal ph = const_pi(wide) * 2L * static_cast<long>(j) * x / L;
      f += MpComplex(cos(ph), sin(ph)) * op.xi_at(j).rounded_to(wide);
    }
    const MpComplex arg = times_i(z) * (MpReal(wide) - (x - L / 2L));  // -iz(x - L/2)
    return f * exp(arg) / sqrt(L);
  };
  const MpReal re = oracle::integrate([&](const MpReal& x) { return integrand(x).re; }, MpReal(wide), L, wide);
  const MpReal im = oracle::integrate([&](const MpReal& x) { return integrand(x).im; }, MpReal(wide), L, wide);
  const MpComplex got = xi_hat(op, MpComplex(MpReal(1L, bits), MpReal(1L, bits)));
  CHECK(rel(got, MpComplex(re, im)) <= pow2(ctx.eps_exponent() + 4, bits));
}

TEST_CASE("free determinant") {
  const MpReal L = params(1).L;
  CHECK(abs(det_reg_free(MpComplex(bits), L)).is_zero());
  CHECK(abs(det_reg_free(MpComplex(const_pi(bits) * 2L / L, MpReal(bits)), L)) <= pow2(ctx.eps_exponent(), bits));
}

TEST_CASE("determinant identities at random points") {
  const auto op = smoke_operator();
  const MpReal& L = op.params.L;
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> re(-60.0, 60.0), im(-3.0, 3.0);
  const MpComplex i(MpReal(bits), MpReal(1L, bits));
  for (int t = 0; t < 50; ++t) {
    const MpComplex z(re(rng), t % 2 ? im(rng) : 0.0, bits);
    const MpComplex d = det_reg(op, z);
    // -i lambda^(-iz) xi_hat(z), lambda^(-iz) = exp(-iz L/2)
    const MpComplex want = -(i * exp(-(i * z) * (L / 2L)) * xi_hat(op, z));
    CHECK(rel(d, want) <= pow2(ctx.eps_exponent(), bits));
    CHECK(rel(det_reg_secular(op, z), d) <= pow2(-bits / 2, bits));
  }
}

TEST_CASE("conjugation symmetry of the transform") {
  const auto op = smoke_operator();
  const MpComplex z(3.25, 0.75, bits);
  const MpComplex mz(-z.re, z.im);
  CHECK(rel(xi_hat(op, mz), conj(xi_hat(op, z))) <= pow2(-bits / 2, bits));
}

TEST_CASE("spectrum of the smoke-scale operator") {
  const auto op = smoke_operator();
  CHECK(op.parity_defect() < pow2(-bits / 4, bits));
  const auto sp = spectrum(op);
  REQUIRE(sp.roots.size() == 32);
  MpReal mass(bits);
  for (const auto& x : op.xi) mass += abs(x);
  for (std::size_t k = 0; k < sp.roots.size(); ++k) {
    CHECK(sp.residuals[k] <= pow2(-bits / 4, bits) * mass);
    if (k) CHECK(sp.roots[k - 1] < sp.roots[k]);
  }
  // interlacing where neighbouring weights share a sign
  for (int j = -16; j < 16; ++j) {
    if (op.xi_at(j).sign() != op.xi_at(j + 1).sign()) continue;
    int inside = 0;
    for (const auto& r : sp.roots) inside += (r > static_cast<long>(j) && r < static_cast<long>(j + 1));
    CHECK(inside == 1);
  }
  const auto pos = sp.positive(), neg = sp.negative();
  REQUIRE(pos.size() == neg.size());
  for (std::size_t k = 0; k < pos.size(); ++k) CHECK(abs(pos[k] + neg[k]) <= pow2(-bits / 2, bits) * abs(pos[k]));

  const auto report = verify_det_spectrum(op, sp);
  CHECK(report.max_relative_residual <= report.threshold);
  CHECK(report.alternating);
  CHECK(report.points >= sp.roots.size());

  SpectrumResult broken = sp;
  broken.interior[3] += MpReal(1e-3, bits);
  CHECK_THROWS_AS(verify_det_spectrum(op, broken), IdentityViolation);
}

TEST_CASE("threaded and serial root finding are identical") {
  const auto op = smoke_operator();
  SecularOptions serial;
  serial.parallel = false;
  const auto a = secular_roots(op), b = secular_roots(op, serial);
  REQUIRE(a.roots.size() == b.roots.size());
  for (std::size_t k = 0; k < a.roots.size(); ++k) CHECK(a.roots[k].identical(b.roots[k]));
}

TEST_CASE("scan budget exhausted") {
  const auto op = smoke_operator();
  SecularOptions tight;
  tight.initial_grid = 1;
  tight.max_grid = 1;
  CHECK_THROWS_AS(secular_roots(op, tight), RootCountMismatch);
}

TEST_CASE("operator construction checks") {
  const auto p = params(1);
  CHECK_THROWS_AS(PerturbedOperator::make(p, {MpReal(1L, bits)}, MpReal(bits)), DomainError);
  CHECK_THROWS_AS(PerturbedOperator::make(p, {MpReal(1L, bits), MpReal(1L, bits), MpReal(1L, bits)}, MpReal(bits)),
                  DegenerateNormalization);
}

TEST_CASE("spectrum export") {
  const auto op = smoke_operator();
  const auto sp = spectrum(op);
  std::ostringstream csv;
  write_spectrum(csv, sp, op.params, OutputFormat::csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "index,eigenvalue,residual");
  int rows = 0;
  bool saw_minus_one = false, saw_one = false;
  while (std::getline(lines, line)) {
    ++rows;
    saw_minus_one = saw_minus_one || line.rfind("-1,", 0) == 0;
    saw_one = saw_one || line.rfind("1,", 0) == 0;
  }
  CHECK(rows == 32);
  CHECK(saw_one);
  CHECK(saw_minus_one);

  std::ostringstream js;
  write_spectrum(js, sp, op.params, OutputFormat::json);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j.at("N") == 16);
  CHECK(j.at("lambda") == "2");
  CHECK(j.at("bits") == bits);
  CHECK(j.at("spectrum").size() == 32);
}
