#pragma once

// Special functions needed by the archimedean matrix elements: complex
// digamma/trigamma, the Gauss series 2F1 for small real argument and the
// Hurwitz-Lerch transcendent Phi(z, 2, x).

#include <vector>

#include "weil/mp.hpp"

namespace weil {

struct SeriesOptions {
  /// Maximum number of terms is cap_factor * bits.
  int cap_factor = 10;
  /// Consecutive small terms required before stopping.
  int quiet_terms = 3;
};

/// Even Bernoulli numbers B_2..B_2K at a fixed precision, obtained from
/// B_2k = (-1)^(k+1) 2 (2k)! zeta(2k) / (2 pi)^(2k).
class BernoulliTable {
 public:
  BernoulliTable(long bits, int count);
  int size() const { return static_cast<int>(b2k_.size()); }
  /// B_{2k}, k >= 1.
  const MpReal& b2k(int k) const { return b2k_.at(static_cast<size_t>(k - 1)); }

 private:
  std::vector<MpReal> b2k_;
};

/// Holds the per-precision constants shared by repeated digamma/trigamma
/// calls. Immutable after construction, so one instance may be shared by
/// threads; free functions below build a fresh one per call.
class SpecialFunctions {
 public:
  explicit SpecialFunctions(const PrecisionContext& ctx);

  const PrecisionContext& context() const { return ctx_; }

  MpComplex digamma(const MpComplex& z) const;
  MpComplex trigamma(const MpComplex& z) const;
  MpComplex hyp2f1(const MpReal& a, const MpComplex& b, const MpComplex& c, const MpReal& z,
                   const SeriesOptions& opt = {}) const;
  MpComplex lerch_phi2(const MpReal& z, const MpComplex& x, const SeriesOptions& opt = {}) const;

 private:
  PrecisionContext ctx_;
  long shift_radius_;  // asymptotic expansions used once |z| >= shift_radius_
  BernoulliTable bernoulli_;
};

MpComplex digamma(const MpComplex& z, const PrecisionContext& ctx);
MpComplex trigamma(const MpComplex& z, const PrecisionContext& ctx);

/// Sum_{k>=0} (a)_k (b)_k / ((c)_k k!) z^k for real |z| < 1.
/// Throws DomainError for |z| >= 1 or c a non-positive integer,
/// NonConvergence when the term cap is reached even after one retry with
/// doubled guard bits.
MpComplex hyp2f1(const MpReal& a, const MpComplex& b, const MpComplex& c, const MpReal& z,
                 const PrecisionContext& ctx, const SeriesOptions& opt = {});

/// Sum_{k>=0} z^k / (x + k)^2 for real |z| < 1.
MpComplex lerch_phi2(const MpReal& z, const MpComplex& x, const PrecisionContext& ctx,
                     const SeriesOptions& opt = {});

}  // namespace weil
