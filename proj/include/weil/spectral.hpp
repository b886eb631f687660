#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "weil/matrix.hpp"
#include "weil/mp.hpp"
#include "weil/weil_form.hpp"

namespace weil {

struct EigenDecomposition {
  std::vector<MpReal> values;  // ascending
  Matrix vectors;              // column k belongs to values[k]
  MpReal eps_N;
  std::vector<MpReal> xi_raw;  // unit minimal eigenvector
  MpReal gap;
  MpReal parity_defect;        // |P xi - xi|, P the index flip
  int sweeps = 0;
};

struct JacobiOptions {
  int max_sweeps = 100;
  /// Split the row/column updates of every rotation over OpenMP threads.
  /// The rotation sequence is unchanged, so results are bit-identical to the
  /// serial run.
  bool parallel = true;
};

/// Cyclic Jacobi on a symmetric matrix, row-major upper triangle order.
/// Throws NonConvergence after max_sweeps.
EigenDecomposition jacobi_eig(const Matrix& M, const PrecisionContext& ctx, const JacobiOptions& opt = {});

struct EigenResiduals {
  MpReal max_residual;    // max_k |M v_k - mu_k v_k|
  MpReal orthogonality;   // |V^T V - I|_F
  MpReal reconstruction;  // |V^T M V - diag|_F
  MpReal norm;            // |M|_F
};
EigenResiduals check_decomposition(const Matrix& M, const EigenDecomposition& dec);

struct EvenSimpleReport {
  bool simple = false;
  bool even = false;
  MpReal gap;
  MpReal parity_defect;
  MpReal gap_threshold;     // 2^(-bits/2) max(1, max_k |mu_k|)
  MpReal parity_threshold;  // 2^(-bits/4)
  bool ok() const { return simple && even; }
  std::string describe() const;
};

/// Never throws; see even_simple_check.
EvenSimpleReport even_simple_report(const EigenDecomposition& dec, const PrecisionContext& ctx);
/// Throws EvenSimpleViolation unless simple and even.
EvenSimpleReport even_simple_check(const EigenDecomposition& dec, const WeilParams& params);

/// xi scaled so that sum_j xi_j = sqrt(L), with the sign fixed before
/// scaling. Throws DegenerateNormalization if |sum| < 2^(-bits/2).
std::vector<MpReal> minimal_vector(const EigenDecomposition& dec, const WeilParams& params);

struct EigenFile {
  std::string lambda;
  int N = 0;
  int bits = 0;
  EigenDecomposition dec;
};

void write_eigen(std::ostream& out, const EigenDecomposition& dec, const WeilParams& params);
EigenFile read_eigen(std::istream& in);

}  // namespace weil
