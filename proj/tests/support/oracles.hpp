#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library routines it is used to check; only the MpReal/MpComplex
// arithmetic layer is shared.

#include <functional>
#include <random>
#include <vector>

#include <gmpxx.h>

#include "weil/matrix.hpp"
#include "weil/mp.hpp"

namespace oracle {

using weil::MpComplex;
using weil::MpReal;

// Tanh-sinh quadrature on [a, b]. The integrand receives the abscissa x and
// its distances to both endpoints, which stay accurate where x - a or b - x
// underflows relative to x.
struct Node {
  const MpReal& x;
  const MpReal& from_a;
  const MpReal& to_b;
};
using Integrand = std::function<MpReal(const Node&)>;

struct QuadResult {
  MpReal value;
  MpReal last_change;  // difference between the last two levels
  int level = 0;
};
QuadResult tanh_sinh(const Integrand& f, const MpReal& a, const MpReal& b, long bits, int max_level = 12);
/// Convenience wrapper for integrands that only need x.
MpReal integrate(const std::function<MpReal(const MpReal&)>& f, const MpReal& a, const MpReal& b, long bits);

// Series summed for a fixed number of terms, no stopping test.
MpComplex brute_hyp2f1(const MpReal& a, const MpComplex& b, const MpComplex& c, const MpReal& z, long terms);
MpComplex brute_lerch2(const MpReal& z, const MpComplex& x, long terms);

/// B_0..B_n exactly, from sum_{k<=n} C(n+1,k) B_k = 0.
std::vector<mpq_class> bernoulli(int n);
MpReal to_mp(const mpq_class& q, long bits);

/// psi(z) = -gamma + sum_k (1/k - 1/(k+z-1)), first `direct` terms summed and
/// the rest by Euler-Maclaurin in k.
MpComplex digamma_series(const MpComplex& z, long bits, int direct = 400, int em_terms = 80);
/// psi'(z) = sum_k 1/(k+z)^2, same scheme.
MpComplex trigamma_series(const MpComplex& z, long bits, int direct = 400, int em_terms = 80);

// Zeta and log Gamma by textbook expansions.
MpComplex zeta_em(const MpComplex& s, long bits, int M = 300, int K = 250);
MpComplex lgamma_stirling(const MpComplex& w, long bits, int shift = 200, int K = 150);
/// Xi(t) = xi(1/2 + i t), xi(z) = (1/2) z (z-1) pi^(-z/2) Gamma(z/2) zeta(z).
MpReal xi_completed(const MpReal& t, long bits);

/// Roots of a polynomial with rational coefficients (ascending powers) whose
/// roots are all real and simple, by bisection between the roots of the
/// derivative.
std::vector<MpReal> real_roots(const std::vector<mpq_class>& coeffs, long bits);
/// Characteristic polynomial det(x I - A), exact, by Faddeev-LeVerrier.
std::vector<mpq_class> char_poly(const std::vector<std::vector<mpq_class>>& a);

// Matrix of the Weil form by quadrature of its defining distribution.
MpReal q_basis(int n, int m, const MpReal& y, const MpReal& L);
struct FormQuadrature {
  MpReal pole;    // W02 part
  MpReal arch;    // W_R part
  MpReal primes;  // sum over prime powers
  MpReal total() const { return pole - arch - primes; }
};
FormQuadrature form_entry_quadrature(int n, int m, const MpReal& lambda, long bits);

// The three archimedean integrals, by quadrature.
MpReal alpha_quadrature(int n, const MpReal& L, long bits);
MpReal beta_quadrature(int n, const MpReal& L, long bits);
/// int_0^L (cos(2 pi n x/L) - e^(-x/2)) rho(x) dx plus the principal-value
/// constants, the latter obtained by quadrature as well.
MpReal gamma_quadrature(int n, const MpReal& L, long bits);

/// Random symmetric matrix with small rational entries p/q.
std::vector<std::vector<mpq_class>> random_rational_symmetric(int n, std::mt19937_64& rng);
weil::Matrix to_matrix(const std::vector<std::vector<mpq_class>>& a, long bits);

MpReal pow10(long e, long bits);

}  // namespace oracle
