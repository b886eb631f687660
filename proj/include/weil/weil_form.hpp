#pragma once

// Matrix of the truncated Weil quadratic form in the basis V_n, n = -N..N:
// tau = W02 - W_R - sum_p W_p.

#include <iosfwd>
#include <string>
#include <vector>

#include "weil/matrix.hpp"
#include "weil/mp.hpp"

namespace weil {

/// lambda as entered: a decimal literal or "sqrt:<k>".
class LambdaSpec {
 public:
  LambdaSpec() = default;
  static LambdaSpec parse(const std::string& text);

  const std::string& text() const { return text_; }
  MpReal value(long bits) const;
  /// File-name friendly form, e.g. "sqrt13" or "1p2".
  std::string slug() const;

  friend bool operator==(const LambdaSpec&, const LambdaSpec&) = default;

 private:
  std::string text_;
  long radicand_ = 0;  // > 0 for sqrt:<k>
};

struct WeilParams {
  LambdaSpec lambda_spec;
  MpReal lambda;
  MpReal log_lambda;
  MpReal L;  // 2 log lambda
  int N = 0;
  PrecisionContext ctx;

  static WeilParams make(const LambdaSpec& spec, int N, const PrecisionContext& ctx);

  int dim() const { return 2 * N + 1; }
  std::size_t index(int n) const { return static_cast<std::size_t>(n + N); }
};

struct ArchCoefficients {
  MpReal L;
  std::vector<MpReal> alpha;  // n = 0..N
  std::vector<MpReal> beta;
  std::vector<MpReal> gamma;  // includes cL + wL
  MpReal cL;
  MpReal wL;

  MpReal alpha_at(int n) const;  // odd extension
  const MpReal& beta_at(int n) const { return beta.at(static_cast<std::size_t>(n < 0 ? -n : n)); }
  const MpReal& gamma_at(int n) const { return gamma.at(static_cast<std::size_t>(n < 0 ? -n : n)); }
};

/// The constant added to the closed-form integral of (cos - 1) rho so that
/// gamma(n) = int_0^L (cos(2 pi n x/L) - e^(-x/2)) rho(x) dx + w(L):
/// (1/2) log((e^(L/2)-1)/(e^(L/2)+1)) + atan(e^(L/2)) - pi/4 + gamma_E/2 + (1/2) log(8 pi).
MpReal arch_correction(const MpReal& L);

ArchCoefficients arch_coefficients(const WeilParams& params);
ArchCoefficients arch_coefficients_serial(const WeilParams& params);

/// q(U_n, U_m)(y) on [0, L].
MpReal q_form(int n, int m, const MpReal& y, const MpReal& L);

MpReal w02_entry(int n, int m, const WeilParams& params);
MpReal prime_entry(int n, int m, const WeilParams& params);
MpReal arch_entry(int n, int m, const ArchCoefficients& coeffs);

/// log p if k = p^r, else 0. Trial division.
MpReal von_mangoldt(long k, long bits);
/// Prime powers 1 < k <= kmax.
std::vector<long> prime_powers_upto(long kmax);

struct WeilMatrix {
  WeilParams params;
  Matrix tau;  // tau(index(i), index(j))
  std::vector<MpReal> a;
  std::vector<MpReal> b;

  const MpReal& at(int i, int j) const { return tau(params.index(i), params.index(j)); }
  const MpReal& b_at(int i) const { return b.at(params.index(i)); }
};

struct StructureReport {
  MpReal symmetry;     // max |tau_ij - tau_ji|
  MpReal parity;       // max |tau_{-i,-j} - tau_ij|
  MpReal telescoping;  // max |tau_ij (i-j) - (b_i - b_j)|
  MpReal tolerance;    // 2^(-bits/2) max(1, max |tau_ij (i-j)|)
  bool ok() const { return symmetry <= tolerance && parity <= tolerance && telescoping <= tolerance; }
};

/// Parallel over matrix rows; bit-identical to assemble_serial.
WeilMatrix assemble(const WeilParams& params);
WeilMatrix assemble_serial(const WeilParams& params);

/// Fills a and b from tau (b by least squares, b_0 = 0) and checks the
/// structure. Throws StructureError beyond tolerance.
StructureReport finish_structure(WeilMatrix& m);
StructureReport check_structure(const WeilMatrix& m);

void write_matrix(std::ostream& out, const WeilMatrix& m);
/// Rejects unknown versions; rebuilds params from the header.
WeilMatrix read_matrix(std::istream& in, int guard = 32);

}  // namespace weil
