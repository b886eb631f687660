#pragma once

// Rank-one perturbation of the scaling operator on E_N: spectrum from the
// secular function S(s) = sum_j xi_j / (j - s), Fourier transform xi_hat and
// the regularized determinant.

#include <iosfwd>
#include <vector>

#include "weil/mp.hpp"
#include "weil/weil_form.hpp"

namespace weil {

struct PerturbedOperator {
  WeilParams params;
  std::vector<MpReal> xi;  // j = -N..N, sum = sqrt(L)
  MpReal eps_N;

  /// Checks the length and the normalization sum_j xi_j = sqrt(L).
  static PerturbedOperator make(const WeilParams& params, std::vector<MpReal> xi, MpReal eps_N);

  const MpReal& xi_at(int j) const { return xi.at(params.index(j)); }
  /// max_j |xi_{-j} - xi_j| / max_j |xi_j|
  MpReal parity_defect() const;
};

/// The points 2 pi j / L, |j| > N.
struct TailRule {
  MpReal step;  // 2 pi / L
  int N = 0;
  MpReal value(long j) const { return step * j; }
  bool contains(long j) const { return j > N || j < -N; }
};

struct SpectrumResult {
  std::vector<MpReal> roots;     // secular roots in s, ascending
  std::vector<MpReal> interior;  // roots * 2 pi / L
  std::vector<MpReal> residuals; // |S(root)|
  std::vector<int> vanishing;    // indices j with xi_j treated as 0
  TailRule tail;
  int grid = 0;                  // final scan resolution per region

  /// Interior values > 0 ascending; the k-th positive eigenvalue.
  std::vector<MpReal> positive() const;
  std::vector<MpReal> negative() const;  // ascending by |value|
};

struct SecularOptions {
  bool parallel = true;
  int initial_grid = 16;
  int max_grid = 1 << 14;
};

MpReal secular_function(const PerturbedOperator& op, const MpReal& s);

/// Throws RootCountMismatch if the scan cannot find 2N roots.
SpectrumResult secular_roots(const PerturbedOperator& op, const SecularOptions& opt = {});

MpComplex xi_hat(const PerturbedOperator& op, const MpComplex& z);
/// -i lambda^(-iz) xi_hat(z)
MpComplex det_reg(const PerturbedOperator& op, const MpComplex& z);
/// (1 - e^(-izL)) L^(-1/2) sum_j xi_j / (2 pi j/L - z); same function, second route.
MpComplex det_reg_secular(const PerturbedOperator& op, const MpComplex& z);
/// 1 - e^(-izL)
MpComplex det_reg_free(const MpComplex& z, const MpReal& L);

SpectrumResult spectrum(const PerturbedOperator& op, const SecularOptions& opt = {});

struct DetSpectrumReport {
  MpReal max_relative_residual;  // max |xi_hat(root)| / local scale
  MpReal threshold;              // 2^(-bits/4)
  std::size_t points = 0;        // interior plus merged tail points
  bool alternating = true;       // no extra sign change between neighbours
};

/// Throws IdentityViolation on failure.
DetSpectrumReport verify_det_spectrum(const PerturbedOperator& op, const SpectrumResult& spec);

enum class OutputFormat { csv, json };

/// Rows (index, eigenvalue, residual); index counts outward from zero,
/// negative for negative eigenvalues.
void write_spectrum(std::ostream& out, const SpectrumResult& spec, const WeilParams& params, OutputFormat format);

}  // namespace weil
