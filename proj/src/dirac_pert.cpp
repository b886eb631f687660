#include "weil/dirac_pert.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

#include "weil/errors.hpp"
#include "weil/parallel.hpp"

namespace weil {

// ---------------------------------------------------------------- operator

PerturbedOperator PerturbedOperator::make(const WeilParams& params, std::vector<MpReal> xi, MpReal eps_N) {
  if (static_cast<int>(xi.size()) != params.dim()) throw DomainError("perturbed operator: xi has the wrong length");
  const long bits = params.ctx.bits;
  MpReal sum(bits), mass(bits);
  for (const auto& x : xi) {
    sum += x;
    mass += abs(x);
  }
  const MpReal target = sqrt(params.L);
  if (abs(sum - target) > pow2(params.ctx.eps_exponent(), bits) * max(mass, MpReal(1L, bits)))
    throw DegenerateNormalization("perturbed operator: xi is not normalized, sum " + sum.to_string(20));
  return PerturbedOperator{params, std::move(xi), std::move(eps_N)};
}

MpReal PerturbedOperator::parity_defect() const {
  const long bits = params.ctx.bits;
  MpReal worst(bits), top(bits);
  for (int j = -params.N; j <= params.N; ++j) {
    worst = max(worst, abs(xi_at(j) - xi_at(-j)));
    top = max(top, abs(xi_at(j)));
  }
  return top.is_zero() ? top : worst / top;
}

std::vector<MpReal> SpectrumResult::positive() const {
  std::vector<MpReal> out;
  for (const auto& v : interior)
    if (v.sign() > 0) out.push_back(v);
  return out;
}

std::vector<MpReal> SpectrumResult::negative() const {
  std::vector<MpReal> out;
  for (auto it = interior.rbegin(); it != interior.rend(); ++it)
    if (it->sign() < 0) out.push_back(*it);
  return out;
}

// ---------------------------------------------------------------- secular

namespace {

struct Pole {
  long j;
  MpReal weight;
};

struct Secular {
  std::vector<Pole> poles;
  std::vector<int> vanishing;
  int sum_sign = 1;
  long bits = 0;

  explicit Secular(const PerturbedOperator& op) : bits(op.params.ctx.bits) {
    MpReal top(bits), sum(bits);
    for (const auto& x : op.xi) {
      top = max(top, abs(x));
      sum += x;
    }
    const MpReal tiny = pow2(-bits / 2, bits) * top;
    for (int j = -op.params.N; j <= op.params.N; ++j) {
      const MpReal& x = op.xi_at(j);
      if (abs(x) <= tiny) vanishing.push_back(j);
      else poles.push_back({j, x});
    }
    sum_sign = sum.sign() >= 0 ? 1 : -1;
  }

  MpReal value(const MpReal& s) const {
    MpReal r(bits);
    for (const auto& p : poles) r += p.weight / (p.j - s);
    return r;
  }

  // S and S'
  void value_and_slope(const MpReal& s, MpReal& f, MpReal& d) const {
    f = MpReal(bits);
    d = MpReal(bits);
    for (const auto& p : poles) {
      const MpReal inv = 1L / (p.j - s);
      const MpReal t = p.weight * inv;
      f += t;
      d += t * inv;
    }
  }
};

// A region between consecutive poles, or an unbounded end, parametrised by
// u in (0, 1).
struct Region {
  int kind = 0;  // 0 bounded, +1 (lo, inf), -1 (-inf, hi)
  long lo = 0, hi = 0;
  int sign_lo = 0, sign_hi = 0;  // limits of sign(S) at u -> 0 and u -> 1

  MpReal at(const MpReal& u) const {
    if (kind == 0) return u * (hi - lo) + lo;
    const MpReal t = u / (1L - u);
    return kind > 0 ? t + lo : hi - t;
  }
};

struct Bracket {
  std::size_t region;
  MpReal u_lo, u_hi;
  int sign_lo;
};

std::vector<Region> make_regions(const Secular& S) {
  std::vector<Region> regions;
  const auto& P = S.poles;
  if (P.empty()) return regions;
  auto sgn = [](const MpReal& x) { return x.sign() > 0 ? 1 : -1; };
  regions.push_back({-1, 0, P.front().j, sgn(P.front().weight), S.sum_sign});
  for (std::size_t k = 0; k + 1 < P.size(); ++k)
    regions.push_back({0, P[k].j, P[k + 1].j, -sgn(P[k].weight), sgn(P[k + 1].weight)});
  regions.push_back({+1, P.back().j, 0, -sgn(P.back().weight), -S.sum_sign});
  return regions;
}

struct ScanResult {
  std::vector<Bracket> brackets;
  std::vector<MpReal> exact;  // grid points where S vanished
};

ScanResult scan_region(const Secular& S, const Region& r, std::size_t index, int grid) {
  const long bits = S.bits;
  ScanResult out;
  MpReal u_prev(bits);
  int sign_prev = r.sign_lo;
  bool prev_exact = false;
  for (int k = 1; k <= grid; ++k) {
    MpReal u = MpReal(static_cast<long>(k), bits) / static_cast<long>(grid);
    int sign;
    if (k == grid) {
      sign = r.sign_hi;
    } else {
      const MpReal f = S.value(r.at(u));
      sign = f.sign();
      if (sign == 0) {
        out.exact.push_back(r.at(u));
        prev_exact = true;
        u_prev = std::move(u);
        continue;
      }
    }
    if (!prev_exact && sign != sign_prev) out.brackets.push_back({index, u_prev, u, sign_prev});
    prev_exact = false;
    sign_prev = sign;
    u_prev = std::move(u);
  }
  return out;
}

MpReal refine(const Secular& S, const Region& r, const Bracket& b, const PrecisionContext& ctx) {
  const long bits = ctx.bits;
  // Bisection in u until the bracket is 2^-40 of its distance to the poles
  // that bound the region; a root hugging a pole with a tiny weight needs
  // this before Newton sees a smooth function.
  MpReal ulo = b.u_lo, uhi = b.u_hi;
  const MpReal coarse = pow2(-40, bits);
  for (int it = 0; it < 4 * bits; ++it) {
    if (r.kind == 0 || uhi < 1L) {
      const MpReal slo = r.at(ulo), shi = r.at(uhi);
      MpReal room = max(MpReal(1L, bits), abs(slo));
      if (r.kind == 0) room = min(room, min(abs(slo - r.lo), abs(shi - r.hi)));
      else room = min(room, abs(slo - (r.kind > 0 ? r.lo : r.hi)));
      if (abs(shi - slo) <= coarse * room) break;
    }
    MpReal mid = (ulo + uhi) / 2L;
    const int sm = S.value(r.at(mid)).sign();
    if (sm == 0) return r.at(mid);
    if (sm == b.sign_lo) ulo = std::move(mid);
    else uhi = std::move(mid);
  }

  // safeguarded Newton; a keeps the sign sign_lo, c the opposite one
  MpReal a = r.at(ulo), c = r.at(uhi);
  MpReal x = (a + c) / 2L;
  const MpReal tol = pow2(ctx.eps_exponent(), bits);
  MpReal f(bits), d(bits);
  for (int it = 0; it < 200; ++it) {
    S.value_and_slope(x, f, d);
    if (f.is_zero()) return x;
    if (f.sign() == b.sign_lo) a = x;
    else c = x;
    const MpReal scale = tol * max(MpReal(1L, bits), abs(x));
    const MpReal newton = f / d;
    // a Newton step below the target means f is at its rounding floor
    if (abs(newton) <= scale) return x - newton;
    const MpReal lo = min(a, c), hi = max(a, c);
    MpReal next = x - newton;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2L;
    x = std::move(next);
    if (hi - lo <= scale) return x;
  }
  throw NonConvergence("secular_roots: Newton refinement did not converge");
}

}  // namespace

MpReal secular_function(const PerturbedOperator& op, const MpReal& s) { return Secular(op).value(s); }

SpectrumResult secular_roots(const PerturbedOperator& op, const SecularOptions& opt) {
  const WeilParams& params = op.params;
  const long bits = params.ctx.bits;
  const Secular S(op);
  const std::vector<Region> regions = make_regions(S);
  const std::size_t expected = static_cast<std::size_t>(2 * params.N) - S.vanishing.size();

  SpectrumResult res;
  res.vanishing = S.vanishing;
  res.tail = {const_pi(bits) * 2L / params.L, params.N};

  std::vector<ScanResult> scans(regions.size());
  std::size_t found = 0;
  int grid = opt.initial_grid;
  for (;; grid *= 2) {
    if (grid > opt.max_grid)
      throw RootCountMismatch("secular_roots: found " + std::to_string(found) + " of " + std::to_string(expected) +
                              " roots at grid " + std::to_string(grid / 2));
    const long nreg = static_cast<long>(regions.size());
    for_each_index(nreg, opt.parallel,
                   [&](long k) { scans[k] = scan_region(S, regions[k], static_cast<std::size_t>(k), grid); });
    found = 0;
    for (const auto& sc : scans) found += sc.brackets.size() + sc.exact.size();
    if (found == expected) break;
    if (found > expected)
      throw RootCountMismatch("secular_roots: " + std::to_string(found) + " sign changes, expected " +
                              std::to_string(expected));
  }
  res.grid = grid;

  std::vector<Bracket> brackets;
  for (auto& sc : scans) {
    for (auto& b : sc.brackets) brackets.push_back(std::move(b));
    for (auto& x : sc.exact) res.roots.push_back(std::move(x));
  }
  std::vector<MpReal> refined(brackets.size(), MpReal(bits));
  const long nb = static_cast<long>(brackets.size());
  for_each_index(nb, opt.parallel,
                 [&](long k) { refined[k] = refine(S, regions[brackets[k].region], brackets[k], params.ctx); });
  for (auto& x : refined) res.roots.push_back(std::move(x));
  for (int j : S.vanishing) res.roots.emplace_back(static_cast<long>(j), bits);
  std::sort(res.roots.begin(), res.roots.end(), [](const MpReal& a, const MpReal& b) { return a < b; });

  for (const auto& s : res.roots) {
    res.interior.push_back(s * res.tail.step);
    bool vanishing_index = false;
    for (int j : S.vanishing) vanishing_index = vanishing_index || s == static_cast<long>(j);
    res.residuals.push_back(vanishing_index ? MpReal(bits) : abs(S.value(s)));
  }
  return res;
}

// ---------------------------------------------------------------- xi_hat

namespace {

// sin(w)/w for small complex w
MpComplex sinc_small(const MpComplex& w) {
  const long bits = w.precision();
  const MpComplex w2 = w * w;
  MpComplex term(MpReal(1L, bits), MpReal(bits));
  MpComplex sum = term;
  const MpReal eps = pow2(-bits - 8, bits);
  for (long k = 1; k < 64; ++k) {
    term = -(term * w2) / MpReal((2 * k) * (2 * k + 1), bits);
    sum += term;
    if (abs(term) <= eps) break;
  }
  return sum;
}

// 2 L^(-1/2) sin(zL/2) sum_j xi_j / (z - 2 pi j / L), plus the same sum with
// every term replaced by its modulus.
MpComplex xi_hat_scaled(const PerturbedOperator& op, const MpComplex& z_in, MpReal* scale) {
  const WeilParams& params = op.params;
  const long bits = params.ctx.bits;
  const MpComplex z(z_in.re.rounded_to(bits), z_in.im.rounded_to(bits));
  const MpReal& L = params.L;
  const MpReal step = const_pi(bits) * 2L / L;
  const MpReal near = pow2(-bits / 4, bits);
  const MpReal half_L = L / 2L;
  const MpComplex sine = sin(z * half_L);
  const MpReal sine_abs = abs(sine);

  MpComplex sum(bits);
  MpReal mass(bits);
  for (int j = -params.N; j <= params.N; ++j) {
    const MpReal& x = op.xi_at(j);
    if (x.is_zero()) continue;
    const MpComplex d = z - step * static_cast<long>(j);
    if (abs(d) < near) {
      // sin(zL/2) / d = (-1)^j (L/2) sinc(d L/2)
      MpComplex t = sinc_small(d * half_L) * half_L * x;
      if (j % 2 != 0) t = -t;
      sum += t;
      mass += abs(t);
    } else {
      const MpComplex t = sine * x / d;
      sum += t;
      mass += abs(x) * sine_abs / abs(d);
    }
  }
  const MpReal c = 2L / sqrt(L);
  if (scale) *scale = mass * c;
  return sum * c;
}

}  // namespace

MpComplex xi_hat(const PerturbedOperator& op, const MpComplex& z) { return xi_hat_scaled(op, z, nullptr); }

MpComplex det_reg(const PerturbedOperator& op, const MpComplex& z) {
  const long bits = op.params.ctx.bits;
  const MpComplex zz(z.re.rounded_to(bits), z.im.rounded_to(bits));
  // -i z log(lambda) = (z.im - i z.re) log(lambda)
  const MpComplex phase = exp(MpComplex(zz.im * op.params.log_lambda, -(zz.re * op.params.log_lambda)));
  const MpComplex r = phase * xi_hat(op, zz);
  return MpComplex(r.im, -r.re);  // times -i
}

MpComplex det_reg_free(const MpComplex& z, const MpReal& L) {
  const long bits = std::max(z.precision(), L.precision());
  const MpComplex e = exp(MpComplex(z.im * L, -(z.re * L)));
  return MpComplex(MpReal(1L, bits), MpReal(bits)) - e;
}

MpComplex det_reg_secular(const PerturbedOperator& op, const MpComplex& z) {
  const WeilParams& params = op.params;
  const long bits = params.ctx.bits;
  const MpComplex zz(z.re.rounded_to(bits), z.im.rounded_to(bits));
  const MpReal step = const_pi(bits) * 2L / params.L;
  MpComplex sum(bits);
  for (int j = -params.N; j <= params.N; ++j) {
    const MpComplex d = MpComplex(step * static_cast<long>(j), MpReal(bits)) - zz;
    sum += inverse(d) * op.xi_at(j);
  }
  return det_reg_free(zz, params.L) * sum / sqrt(params.L);
}

// ---------------------------------------------------------------- spectrum

SpectrumResult spectrum(const PerturbedOperator& op, const SecularOptions& opt) { return secular_roots(op, opt); }

DetSpectrumReport verify_det_spectrum(const PerturbedOperator& op, const SpectrumResult& spec) {
  const long bits = op.params.ctx.bits;
  DetSpectrumReport rep;
  rep.threshold = pow2(-bits / 4, bits);
  rep.max_relative_residual = MpReal(bits);

  for (const auto& x : spec.interior) {
    MpReal scale(bits);
    const MpComplex v = xi_hat_scaled(op, MpComplex(x), &scale);
    const MpReal rel = scale.is_zero() ? abs(v) : abs(v) / scale;
    rep.max_relative_residual = max(rep.max_relative_residual, rel);
  }

  std::vector<MpReal> points = spec.interior;
  if (!points.empty()) {
    const MpReal first = points.front();
    const MpReal last = points.back();
    const long jmax = floor(abs(last) / spec.tail.step).to_long() + 1;
    const long jmin = floor(abs(first) / spec.tail.step).to_long() + 1;
    for (long j = spec.tail.N + 1; j <= std::max(jmax, jmin); ++j) {
      for (long sj : {j, -j}) {
        MpReal t = spec.tail.value(sj);
        if (t > first && t < last) points.push_back(std::move(t));
      }
    }
    std::sort(points.begin(), points.end(), [](const MpReal& a, const MpReal& b) { return a < b; });
  }
  rep.points = points.size();

  int prev_sign = 0;
  const MpReal dup = pow2(-bits / 2, bits);
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const MpReal width = points[k + 1] - points[k];
    if (width <= dup * max(MpReal(1L, bits), abs(points[k]))) continue;  // double root
    int sign = 0;
    for (long q : {1L, 2L, 3L}) {
      const MpReal x = points[k] + width * q / 4L;
      const int s = xi_hat(op, MpComplex(x)).re.sign();
      if (sign == 0) sign = s;
      else if (s != sign) rep.alternating = false;
    }
    if (prev_sign != 0 && sign == prev_sign) rep.alternating = false;
    prev_sign = sign;
  }

  if (!(rep.max_relative_residual <= rep.threshold))
    throw IdentityViolation("xi_hat does not vanish on the secular spectrum: relative residual " +
                            rep.max_relative_residual.to_string(5));
  if (!rep.alternating) throw IdentityViolation("xi_hat has an extra sign change between spectrum points");
  return rep;
}

// ---------------------------------------------------------------- export

namespace {

std::vector<long> signed_ranks(const std::vector<MpReal>& values) {
  std::vector<long> idx(values.size(), 0);
  long pos = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k].sign() > 0) idx[k] = ++pos;
  long neg = 0;
  for (std::size_t k = values.size(); k-- > 0;)
    if (values[k].sign() < 0) idx[k] = -(++neg);
  return idx;
}

}  // namespace

void write_spectrum(std::ostream& out, const SpectrumResult& spec, const WeilParams& params, OutputFormat format) {
  const auto idx = signed_ranks(spec.interior);
  if (format == OutputFormat::csv) {
    out << "index,eigenvalue,residual\n";
    for (std::size_t k = 0; k < spec.interior.size(); ++k)
      out << idx[k] << ',' << spec.interior[k].to_string() << ',' << spec.residuals[k].to_string(6) << '\n';
    return;
  }
  nlohmann::ordered_json j;
  j["lambda"] = params.lambda_spec.text();
  j["N"] = params.N;
  j["bits"] = params.ctx.bits;
  j["tail"] = {{"step", spec.tail.step.to_string()}, {"rule", "step * j for |j| > N"}};
  auto& rows = j["spectrum"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < spec.interior.size(); ++k)
    rows.push_back({{"index", idx[k]},
                    {"eigenvalue", spec.interior[k].to_string()},
                    {"residual", spec.residuals[k].to_string(6)}});
  out << j.dump(1) << '\n';
}

}  // namespace weil
