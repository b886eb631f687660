#pragma once

// Riemann Xi on the real line from the theta-series kernel
// k(u) = u^(1/2) sum_n h(n u), h(u) = (pi/2) u^2 (2 pi u^2 - 3) e^(-pi u^2):
//   Xi(s) = 8 int_1^inf k(u) cos(s log u) du/u
// and the zero table derived from it.

#include <iosfwd>
#include <string>
#include <vector>

#include "weil/mp.hpp"

namespace weil {

MpReal hermite_h(const MpReal& u);
/// int_R h(u)^power du by the trapezoid rule (power 1 or 2).
MpReal hermite_moment(int power, const PrecisionContext& ctx);

struct ThetaSeries {
  int n_max = 0;
  MpReal u_max;
  MpReal step;       // trapezoid step in t = log u
  double s_max = 200;
  PrecisionContext ctx;
  long work_bits = 0;  // ctx.bits plus the bits lost to cancellation at s_max

  /// Truncations chosen so that every neglected term is below 2^-work_bits.
  static ThetaSeries make(const PrecisionContext& ctx, double s_max = 200);
};

/// u^(1/2) sum_{n <= n_max} h(n u); u < 1 is evaluated as k(1/u).
MpReal k_classical(const MpReal& u, const ThetaSeries& ts);
/// u^(1/2) sum_n h(n u) summed directly for any u > 0, with the cutoff
/// stretched to n_max / u; checks k(u) = k(1/u) without the folding.
MpReal k_series(const MpReal& u, const ThetaSeries& ts);

/// Trapezoid rule in t on the whole line with the node values of k cached.
class XiEvaluator {
 public:
  explicit XiEvaluator(const ThetaSeries& ts, bool parallel = true);

  const ThetaSeries& series() const { return ts_; }
  std::size_t nodes() const { return k_.size(); }

  /// Throws OscillationBudgetExceeded for |s| > s_max.
  MpReal value(const MpReal& s) const;
  MpReal derivative(const MpReal& s) const;
  /// Xi(s0 + k ds), k = 0..count-1, by the cosine three-term recurrence.
  std::vector<MpReal> scan(const MpReal& s0, const MpReal& ds, int count) const;

 private:
  ThetaSeries ts_;
  bool parallel_;
  std::vector<MpReal> t_;  // node abscissae i h
  std::vector<MpReal> k_;  // weights: 4h k(1) for i = 0, 8h k(e^(ih)) otherwise
};

/// Node values k(e^(ih)); the kernel shared by XiEvaluator and the benchmark.
std::vector<MpReal> xi_node_values(const ThetaSeries& ts, bool parallel);

MpReal xi_function(const MpReal& s, const ThetaSeries& ts);

struct ZeroEntry {
  int index = 0;
  MpReal value;
  MpReal error_bound;
};

struct ZeroTable {
  std::vector<ZeroEntry> zeros;
  int bits = 0;
  int n_max = 0;
  MpReal u_max;
  std::string generator;
};

struct ZeroSearchOptions {
  double step = 0.05;
  bool parallel = true;
};

/// Grid scan for sign changes, half-step re-scan, bisection at low
/// precision and Newton polish at full precision; every zero is certified by
/// a sign change of Xi across value +- error_bound.
/// Throws MissedZeroSuspected if the re-scan disagrees.
ZeroTable zeta_zeros(int count, const ThetaSeries& ts, const ZeroSearchOptions& opt = {});

void write_zero_table(std::ostream& out, const ZeroTable& table);
ZeroTable read_zero_table(std::istream& in);

/// First five ordinates, 30 digits, as tabulated in the literature.
extern const char* const kLiteratureZeros[5];

}  // namespace weil
