#include "weil/xi_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "weil/errors.hpp"
#include "weil/parallel.hpp"
#include "weil/textio.hpp"

namespace weil {

const char* const kLiteratureZeros[5] = {
    "14.134725141734693790457251983562",
    "21.022039638771554992628479593897",
    "25.010857580145688763213790992563",
    "30.424876125859513210311897530584",
    "32.935061587739189690662368964075",
};

namespace {
constexpr const char* kGenerator = "theta-trapezoid 1";
constexpr int kBlock = 64;
}  // namespace

MpReal hermite_h(const MpReal& u) {
  const long p = u.precision();
  const MpReal pi = const_pi(p);
  const MpReal u2 = u * u;
  return pi / 2L * u2 * (pi * u2 * 2L - 3L) * exp(-(pi * u2));
}

MpReal hermite_moment(int power, const PrecisionContext& ctx) {
  if (power < 1 || power > 2) throw DomainError("hermite_moment: power must be 1 or 2");
  const long p = ctx.bits + 32;
  const double budget = p * std::log(2.0) + 60;
  // Gaussian e^(-power pi u^2): aliasing error ~ exp(-pi / (power step^2))
  const MpReal step(std::sqrt(M_PI / (power * budget)), p);
  const double u_max = std::sqrt(budget / (power * M_PI)) + 1;
  const long count = static_cast<long>(std::ceil(u_max / step.to_double()));
  MpReal sum(p);
  for (long i = 1; i <= count; ++i) sum += pow(hermite_h(step * i), static_cast<long>(power));
  // even integrand, h(0) = 0
  return (sum * step * 2L).rounded_to(ctx.bits);
}

ThetaSeries ThetaSeries::make(const PrecisionContext& ctx, double s_max) {
  ThetaSeries ts;
  ts.ctx = ctx;
  ts.s_max = s_max;
  const double ln2 = std::log(2.0);
  // Xi(s) ~ e^(-pi s/4): that many bits cancel in the cosine sum
  ts.work_bits = ctx.bits + static_cast<long>(std::ceil(M_PI * s_max / (4 * ln2))) + 16;
  const double budget = ts.work_bits * ln2 + 20;
  double u = 2;
  for (int it = 0; it < 50; ++it) u = std::sqrt((budget + 8 * std::log(u)) / M_PI);
  ts.u_max = MpReal(std::ceil(u * 64) / 64, ts.work_bits);
  ts.n_max = static_cast<int>(std::ceil(u)) + 1;
  // trapezoid error ~ exp(-pi^2/(2h) + pi s/4) against |Xi(s)| ~ e^(-pi s/4)
  const MpReal pi = const_pi(ts.work_bits);
  const MpReal denom(2 * (ctx.bits * ln2 + M_PI * s_max / 2 + 20), ts.work_bits);
  ts.step = pi * pi / denom;
  return ts;
}

MpReal k_classical(const MpReal& u_in, const ThetaSeries& ts) {
  if (u_in.sign() <= 0) throw DomainError("k_classical: u must be positive");
  const long p = std::max(u_in.precision(), ts.work_bits);
  MpReal u = u_in.rounded_to(p);
  if (u < 1L) u = 1L / u;
  MpReal sum(p);
  for (long n = 1; n <= ts.n_max; ++n) sum += hermite_h(u * n);
  return sqrt(u) * sum;
}

MpReal k_series(const MpReal& u_in, const ThetaSeries& ts) {
  if (u_in.sign() <= 0) throw DomainError("k_series: u must be positive");
  const long p = std::max(u_in.precision(), ts.work_bits);
  const MpReal u = u_in.rounded_to(p);
  const long terms = (MpReal(ts.n_max, p) / min(u, MpReal(1L, p))).to_long() + 1;
  MpReal sum(p);
  for (long n = 1; n <= terms; ++n) sum += hermite_h(u * n);
  return sqrt(u) * sum;
}

std::vector<MpReal> xi_node_values(const ThetaSeries& ts, bool parallel) {
  const long p = ts.work_bits;
  const long count = floor(log(ts.u_max) / ts.step).to_long() + 1;
  std::vector<MpReal> k(static_cast<std::size_t>(count), MpReal(p));
  auto one = [&](long i) { k[static_cast<std::size_t>(i)] = k_classical(exp(ts.step * i), ts); };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < count; ++i) one(i);
  } else {
    for (long i = 0; i < count; ++i) one(i);
  }
  return k;
}

XiEvaluator::XiEvaluator(const ThetaSeries& ts, bool parallel) : ts_(ts), parallel_(parallel) {
  k_ = xi_node_values(ts, parallel);
  for (std::size_t i = 0; i < k_.size(); ++i) {
    t_.push_back(ts.step * static_cast<long>(i));
    k_[i] *= ts.step * (i == 0 ? 4L : 8L);
  }
}

namespace {

// Sums f(i) over nodes in fixed blocks; the block partial sums are added in
// order, so the result does not depend on the thread count.
template <class F>
MpReal blocked_sum(std::size_t n, long bits, bool parallel, F&& f) {
  const long blocks = static_cast<long>((n + kBlock - 1) / kBlock);
  std::vector<MpReal> part(static_cast<std::size_t>(blocks), MpReal(bits));
  auto run = [&](long b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock, hi = std::min(n, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) part[static_cast<std::size_t>(b)] += f(i);
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long b = 0; b < blocks; ++b) run(b);
  } else {
    for (long b = 0; b < blocks; ++b) run(b);
  }
  MpReal total(bits);
  for (const auto& x : part) total += x;
  return total;
}

void check_budget(const MpReal& s, const ThetaSeries& ts) {
  if (abs(s) > MpReal(ts.s_max, 64))
    throw OscillationBudgetExceeded("Xi: |s| = " + s.to_string(8) + " beyond the configured range " +
                                    std::to_string(ts.s_max));
}

}  // namespace

MpReal XiEvaluator::value(const MpReal& s_in) const {
  check_budget(s_in, ts_);
  const MpReal s = s_in.rounded_to(ts_.work_bits);
  return blocked_sum(k_.size(), ts_.work_bits, parallel_, [&](std::size_t i) { return k_[i] * cos(s * t_[i]); });
}

MpReal XiEvaluator::derivative(const MpReal& s_in) const {
  check_budget(s_in, ts_);
  const MpReal s = s_in.rounded_to(ts_.work_bits);
  return -blocked_sum(k_.size(), ts_.work_bits, parallel_,
                      [&](std::size_t i) { return k_[i] * t_[i] * sin(s * t_[i]); });
}

std::vector<MpReal> XiEvaluator::scan(const MpReal& s0_in, const MpReal& ds_in, int count) const {
  const long p = ts_.work_bits;
  const MpReal s0 = s0_in.rounded_to(p), ds = ds_in.rounded_to(p);
  check_budget(s0, ts_);
  check_budget(s0 + ds * static_cast<long>(std::max(count - 1, 0)), ts_);
  std::vector<MpReal> out(static_cast<std::size_t>(std::max(count, 0)), MpReal(p));
  const long blocks = (count + kBlock - 1) / kBlock;
  auto run = [&](long b) {
    const long lo = b * kBlock, hi = std::min<long>(count, lo + kBlock);
    const MpReal start = s0 + ds * lo;
    MpReal prev(p), cur(p), two_c(p), next(p);
    for (std::size_t i = 0; i < k_.size(); ++i) {
      // cos((s+ds)t) = 2 cos(ds t) cos(st) - cos((s-ds)t)
      cur = cos(start * t_[i]);
      prev = cos((start - ds) * t_[i]);
      two_c = cos(ds * t_[i]) * 2L;
      for (long k = lo; k < hi; ++k) {
        out[static_cast<std::size_t>(k)] += k_[i] * cur;
        next = two_c * cur - prev;
        std::swap(prev, cur);
        std::swap(cur, next);
      }
    }
  };
  if (parallel_) {
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < blocks; ++b) run(b);
  } else {
    for (long b = 0; b < blocks; ++b) run(b);
  }
  return out;
}

MpReal xi_function(const MpReal& s, const ThetaSeries& ts) { return XiEvaluator(ts).value(s); }

// ---------------------------------------------------------------- zeros

namespace {

struct SignBracket {
  MpReal lo, hi;
  int sign_lo;
};

int sign_of(const MpReal& x) { return x.sign() >= 0 ? 1 : -1; }

// Sign changes of Xi on the grid k*ds, k >= 0, until `want` brackets are
// found; scanned in chunks.
std::vector<SignBracket> grid_brackets(const XiEvaluator& xi, const MpReal& ds, int want, long max_points,
                                       long* points_used) {
  const long p = xi.series().work_bits;
  std::vector<SignBracket> out;
  const int chunk = 512;
  long start = 0;
  int prev = 0;
  MpReal prev_s(p);
  while (static_cast<int>(out.size()) < want) {
    if (start >= max_points)
      throw OscillationBudgetExceeded("zeta_zeros: only " + std::to_string(out.size()) + " zeros below s_max");
    const int n = static_cast<int>(std::min<long>(chunk, max_points - start));
    const auto vals = xi.scan(ds * start, ds, n);
    for (int k = 0; k < n && static_cast<int>(out.size()) < want; ++k) {
      MpReal s = ds * (start + k);
      const int sg = sign_of(vals[static_cast<std::size_t>(k)]);
      if (prev != 0 && sg != prev) out.push_back({prev_s, s, prev});
      prev = sg;
      prev_s = std::move(s);
      if (points_used) *points_used = start + k + 1;
    }
    start += n;
  }
  return out;
}

int count_sign_changes(const std::vector<MpReal>& vals) {
  int c = 0;
  for (std::size_t k = 1; k < vals.size(); ++k)
    if (sign_of(vals[k]) != sign_of(vals[k - 1])) ++c;
  return c;
}

// Illinois regula falsi on the low precision evaluator.
MpReal coarse_root(const XiEvaluator& xi, const SignBracket& b) {
  const long p = xi.series().work_bits;
  MpReal a = b.lo, c = b.hi;
  MpReal fa = xi.value(a), fc = xi.value(c);
  const MpReal tol = pow2(-64, p) * c;
  int side = 0;
  for (int it = 0; it < 200 && c - a > tol; ++it) {
    MpReal x = (a * fc - c * fa) / (fc - fa);
    if (!(x > a && x < c)) x = (a + c) / 2L;
    MpReal fx = xi.value(x);
    if (fx.is_zero()) return x;
    if (sign_of(fx) == sign_of(fa)) {
      a = std::move(x);
      fa = std::move(fx);
      if (side == -1) fc /= 2L;
      side = -1;
    } else {
      c = std::move(x);
      fc = std::move(fx);
      if (side == 1) fa /= 2L;
      side = 1;
    }
  }
  return (a + c) / 2L;
}

ZeroEntry polish(const XiEvaluator& xi, const MpReal& start, const SignBracket& b, int index) {
  const ThetaSeries& ts = xi.series();
  const long p = ts.work_bits;
  const long bits = ts.ctx.bits;
  MpReal x = start.rounded_to(p);
  const MpReal tol = pow2(ts.ctx.eps_exponent(), p) * x;
  bool done = false;
  for (int it = 0; it < 60 && !done; ++it) {
    const MpReal step = xi.value(x) / xi.derivative(x);
    x -= step;
    done = abs(step) <= tol;
  }
  if (!done || !(x > b.lo && x < b.hi)) throw NonConvergence("zeta_zeros: Newton polish failed for zero " + std::to_string(index));

  MpReal eb = pow2(ts.ctx.eps_exponent() + 8, p) * max(MpReal(1L, p), x);
  for (int attempt = 0; attempt < 12; ++attempt, eb *= 16L) {
    const int lo = sign_of(xi.value(x - eb));
    const int hi = sign_of(xi.value(x + eb));
    if (lo != hi && lo == b.sign_lo) return ZeroEntry{index, x.rounded_to(bits), eb.rounded_to(64)};
  }
  throw NonConvergence("zeta_zeros: could not certify zero " + std::to_string(index));
}

}  // namespace

ZeroTable zeta_zeros(int count, const ThetaSeries& ts, const ZeroSearchOptions& opt) {
  if (count < 1) throw DomainError("zeta_zeros: count must be positive");
  const ThetaSeries coarse_ts = ThetaSeries::make(PrecisionContext(128, 32), ts.s_max);
  const XiEvaluator coarse(coarse_ts, opt.parallel);
  const XiEvaluator fine(ts, opt.parallel);

  const MpReal ds(opt.step, coarse_ts.work_bits);
  const long max_points = static_cast<long>(std::floor(ts.s_max / opt.step));
  long used = 0;
  const auto brackets = grid_brackets(coarse, ds, count, max_points, &used);

  // half-step re-scan over the same range
  const MpReal half = ds / 2L;
  const int half_points = static_cast<int>(2 * (used - 1) + 1);
  const int again = count_sign_changes(coarse.scan(MpReal(coarse_ts.work_bits), half, half_points));
  if (again != count)
    throw MissedZeroSuspected("zeta_zeros: step " + std::to_string(opt.step) + " finds " + std::to_string(count) +
                              " sign changes, half step finds " + std::to_string(again));

  ZeroTable table;
  table.bits = ts.ctx.bits;
  table.n_max = ts.n_max;
  table.u_max = ts.u_max;
  table.generator = kGenerator;
  table.zeros.resize(static_cast<std::size_t>(count));
  for_each_index(count, opt.parallel, [&](long k) {
    table.zeros[k] = polish(fine, coarse_root(coarse, brackets[k]), brackets[k], static_cast<int>(k) + 1);
  });
  for (std::size_t k = 1; k < table.zeros.size(); ++k)
    if (!(table.zeros[k].value > table.zeros[k - 1].value))
      throw MissedZeroSuspected("zeta_zeros: zeros not strictly increasing at index " + std::to_string(k + 1));
  return table;
}

void write_zero_table(std::ostream& out, const ZeroTable& table) {
  textio::write_magic(out, "zetazeros", 1);
  out << "bits=" << table.bits << '\n';
  out << "n_max=" << table.n_max << '\n';
  out << "u_max=" << table.u_max.to_string(20) << '\n';
  out << "generator=" << table.generator << '\n';
  out << "count=" << table.zeros.size() << '\n';
  for (const auto& z : table.zeros)
    out << z.index << ' ' << z.value.to_string() << ' ' << z.error_bound.to_string(3) << '\n';
}

ZeroTable read_zero_table(std::istream& in) {
  const auto h = textio::read_header(in, "zetazeros", 1, {"bits", "n_max", "u_max", "generator", "count"});
  ZeroTable t;
  t.bits = static_cast<int>(h.integer("bits"));
  t.n_max = static_cast<int>(h.integer("n_max"));
  t.u_max = MpReal(std::string_view(h.at("u_max")), 64);
  t.generator = h.at("generator");
  const long count = h.integer("count");
  std::vector<std::string> tok;
  while (textio::next_record(in, tok)) {
    if (tok.size() != 3) throw FormatError("zetazeros: malformed line");
    t.zeros.push_back({std::stoi(tok[0]), MpReal(std::string_view(tok[1]), t.bits), MpReal(std::string_view(tok[2]), 64)});
    if (t.zeros.back().index != static_cast<int>(t.zeros.size())) throw FormatError("zetazeros: indices not consecutive");
  }
  if (static_cast<long>(t.zeros.size()) != count) throw FormatError("zetazeros: wrong number of zeros");
  return t;
}

}  // namespace weil
