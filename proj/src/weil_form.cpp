#include "weil/weil_form.hpp"

#include <cctype>
#include <istream>
#include <ostream>

#include "weil/errors.hpp"
#include "weil/parallel.hpp"
#include "weil/specfun.hpp"
#include "weil/textio.hpp"

namespace weil {

// ---------------------------------------------------------------- params

LambdaSpec LambdaSpec::parse(const std::string& text) {
  LambdaSpec s;
  s.text_ = text;
  if (text.rfind("sqrt:", 0) == 0) {
    const std::string k = text.substr(5);
    if (k.empty() || k.find_first_not_of("0123456789") != std::string::npos)
      throw DomainError("lambda: expected sqrt:<positive integer>, got '" + text + "'");
    s.radicand_ = std::stol(k);
    if (s.radicand_ <= 1) throw DomainError("lambda must exceed 1");
    return s;
  }
  MpReal probe(64);
  if (text.empty() || mpfr_set_str(probe.raw(), text.c_str(), 10, MPFR_RNDN) != 0)
    throw DomainError("lambda: not a decimal number: '" + text + "'");
  if (!(probe > 1L)) throw DomainError("lambda must exceed 1");
  return s;
}

MpReal LambdaSpec::value(long bits) const {
  if (text_.empty()) throw DomainError("lambda not set");
  if (radicand_ > 0) return sqrt(MpReal(radicand_, bits));
  return MpReal(std::string_view(text_), bits);
}

std::string LambdaSpec::slug() const {
  std::string out;
  for (char c : text_) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += c;
    else if (c == '.') out += 'p';
    else if (c == '-') out += 'm';
  }
  return out;
}

WeilParams WeilParams::make(const LambdaSpec& spec, int N, const PrecisionContext& ctx) {
  if (N < 1) throw DomainError("N must be positive");
  WeilParams p;
  p.lambda_spec = spec;
  p.lambda = spec.value(ctx.bits);
  if (!(p.lambda > 1L)) throw DomainError("lambda must exceed 1");
  p.log_lambda = log(p.lambda);
  p.L = p.log_lambda * 2L;
  p.N = N;
  p.ctx = ctx;
  return p;
}

// ---------------------------------------------------------------- arch

MpReal ArchCoefficients::alpha_at(int n) const {
  const MpReal& v = alpha.at(static_cast<std::size_t>(n < 0 ? -n : n));
  return n < 0 ? -v : v;
}

MpReal arch_correction(const MpReal& L) {
  const long p = L.precision();
  const MpReal e = exp(L / 2L);
  MpReal r = log((e - 1L) / (e + 1L)) / 2L;
  r += atan(e);
  r -= const_pi(p) / 4L;
  r += const_euler(p) / 2L;
  r += log(const_pi(p) * 8L) / 2L;
  return r;
}

namespace {

struct ArchContext {
  const WeilParams& params;
  SpecialFunctions sf;
  MpReal z;          // e^(-2L)
  MpReal damp;       // e^(-L/2)
  MpReal psi_quarter;
  MpReal f_quarter;  // 2F1(1/4, 1; 5/4; z)
  MpReal correction;

  explicit ArchContext(const WeilParams& p)
      : params(p),
        sf(p.ctx),
        z(exp(-(p.L * 2L))),
        damp(exp(-(p.L / 2L))),
        psi_quarter(sf.digamma(MpComplex(MpReal(0.25, p.ctx.bits))).re),
        f_quarter(sf.hyp2f1(MpReal(0.25, p.ctx.bits), MpComplex(MpReal(1L, p.ctx.bits)),
                            MpComplex(MpReal(1.25, p.ctx.bits)), z)
                      .re),
        correction(arch_correction(p.L)) {}

  void fill(int n, MpReal& alpha, MpReal& beta, MpReal& gamma) const {
    const long bits = params.ctx.bits;
    const MpReal& L = params.L;
    const MpReal pi = const_pi(bits);
    const MpReal four_pi_n = pi * 4L * static_cast<long>(n);
    const MpComplex a(MpReal(0.25, bits), pi * static_cast<long>(n) / L);
    const MpComplex a1 = a + 1L;
    const MpComplex F = sf.hyp2f1(MpReal(1L, bits), a, a1, z);
    const MpComplex psi = sf.digamma(a);
    const MpComplex psi1 = sf.trigamma(a);
    const MpComplex phi = sf.lerch_phi2(z, a);

    // 2L / (L + 4 pi i n) F
    const MpComplex g = MpComplex(L * 2L, MpReal(bits)) / MpComplex(L, four_pi_n) * F;
    // 2L / (4 pi n - i L) F
    const MpComplex h = MpComplex(L * 2L, MpReal(bits)) / MpComplex(four_pi_n, -L) * F;

    if (n == 0) {
      alpha = MpReal(bits);
    } else {
      alpha = (damp * g.im + psi.im / 2L) / pi;
    }
    beta = (-(L * damp * h.im) - damp * phi.re / 4L + psi1.re / 4L) / L;
    gamma = -(damp * g.re) + damp * f_quarter * 2L - (psi.re - psi_quarter) / 2L + correction;
  }
};

ArchCoefficients arch_impl(const WeilParams& params, bool parallel) {
  const long bits = params.ctx.bits;
  ArchContext ctx(params);
  ArchCoefficients c;
  c.L = params.L;
  const int n_count = params.N + 1;
  c.alpha.assign(static_cast<std::size_t>(n_count), MpReal(bits));
  c.beta.assign(static_cast<std::size_t>(n_count), MpReal(bits));
  c.gamma.assign(static_cast<std::size_t>(n_count), MpReal(bits));
  for_each_index(n_count, parallel, [&](long n) { ctx.fill(static_cast<int>(n), c.alpha[n], c.beta[n], c.gamma[n]); });

  const MpReal& L = params.L;
  const MpReal eh = exp(L / 2L);
  const MpReal eL = exp(L);
  const long p = bits;
  c.cL = atan(eh) - const_pi(p) / 4L + log((eL + 1L) * 2L / ((eh + 1L) * (eh + 1L))) / 2L;
  c.wL = (const_euler(p) + log(const_pi(p) * 4L)) / 2L - log((eL + 1L) / (eL - 1L)) / 2L;
  return c;
}

}  // namespace

ArchCoefficients arch_coefficients(const WeilParams& params) { return arch_impl(params, true); }
ArchCoefficients arch_coefficients_serial(const WeilParams& params) { return arch_impl(params, false); }

// ---------------------------------------------------------------- entries

MpReal q_form(int n, int m, const MpReal& y, const MpReal& L) {
  const long p = std::max(y.precision(), L.precision());
  const MpReal w = const_pi(p) * 2L * y / L;
  if (n == m) return (1L - y / L) * cos(w * static_cast<long>(n)) * 2L;
  return (sin(w * static_cast<long>(m)) - sin(w * static_cast<long>(n))) /
         (const_pi(p) * static_cast<long>(n - m));
}

MpReal w02_entry(int n, int m, const WeilParams& params) {
  const long p = params.ctx.bits;
  const MpReal& L = params.L;
  const MpReal L2 = L * L;
  const MpReal c = const_pi(p) * const_pi(p) * 16L;
  const MpReal s = sinh(L / 4L);
  const MpReal num = L * s * s * 32L * (L2 - c * (static_cast<long>(m) * n));
  const MpReal den = (L2 + c * (static_cast<long>(m) * m)) * (L2 + c * (static_cast<long>(n) * n));
  return num / den;
}

std::vector<long> prime_powers_upto(long kmax) {
  std::vector<long> out;
  for (long k = 2; k <= kmax; ++k) {
    long r = k, p = 2;
    while (p * p <= r && r % p != 0) ++p;
    if (r % p != 0) p = r;  // k itself is prime
    while (r % p == 0) r /= p;
    if (r == 1) out.push_back(k);
  }
  return out;
}

MpReal von_mangoldt(long k, long bits) {
  if (k < 1) throw DomainError("von_mangoldt: k must be positive");
  if (k == 1) return MpReal(bits);
  long r = k, p = 2;
  while (p * p <= r && r % p != 0) ++p;
  if (r % p != 0) p = r;
  while (r % p == 0) r /= p;
  if (r != 1) return MpReal(bits);
  return log(MpReal(p, bits));
}

namespace {

// lambda^2 rounded down, computed exactly for sqrt:<k> and checked at
// precision otherwise.
long lambda_squared_floor(const WeilParams& params) {
  const MpReal l2 = params.lambda * params.lambda;
  long f = floor(l2).to_long();
  // sqrt(k)^2 may round just below k
  const MpReal next(f + 1, params.ctx.bits);
  if (abs(l2 - next) < pow2(-params.ctx.bits / 2, params.ctx.bits)) ++f;
  return f;
}

}  // namespace

MpReal prime_entry(int n, int m, const WeilParams& params) {
  const long p = params.ctx.bits;
  MpReal sum(p);
  for (long k : prime_powers_upto(lambda_squared_floor(params))) {
    const MpReal y = log(MpReal(k, p));
    const MpReal weight = von_mangoldt(k, p) / sqrt(MpReal(k, p));
    sum += weight * q_form(n, m, y, params.L);
  }
  return sum;
}

MpReal arch_entry(int n, int m, const ArchCoefficients& coeffs) {
  if (n == m) return (coeffs.gamma_at(n) - coeffs.beta_at(n)) * 2L;
  return (coeffs.alpha_at(m) - coeffs.alpha_at(n)) / static_cast<long>(n - m);
}

// ---------------------------------------------------------------- assembly

namespace {

struct PrimeTable {
  std::vector<MpReal> weight;  // Lambda(k) k^(-1/2)
  std::vector<MpReal> y;       // log k
  std::vector<std::vector<MpReal>> sin_n, cos_n;  // [k][n + N], n = -N..N
};

PrimeTable prime_table(const WeilParams& params, bool parallel) {
  const long p = params.ctx.bits;
  PrimeTable t;
  const auto ks = prime_powers_upto(lambda_squared_floor(params));
  const int dim = params.dim();
  for (long k : ks) {
    t.y.push_back(log(MpReal(k, p)));
    t.weight.push_back(von_mangoldt(k, p) / sqrt(MpReal(k, p)));
  }
  t.sin_n.assign(ks.size(), std::vector<MpReal>(static_cast<std::size_t>(dim), MpReal(p)));
  t.cos_n = t.sin_n;
  const MpReal two_pi = const_pi(p) * 2L;
  const int count = static_cast<int>(ks.size()) * dim;
  auto one = [&](int idx) {
    const std::size_t k = static_cast<std::size_t>(idx / dim);
    const int j = idx % dim;
    const MpReal arg = two_pi * t.y[k] * static_cast<long>(j - params.N) / params.L;
    sin_cos(arg, t.sin_n[k][j], t.cos_n[k][j]);
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int idx = 0; idx < count; ++idx) one(idx);
  } else {
    for (int idx = 0; idx < count; ++idx) one(idx);
  }
  return t;
}

struct EntryKernel {
  const WeilParams& params;
  const ArchCoefficients& arch;
  const PrimeTable& primes;
  std::vector<MpReal> w02_den;  // L^2 + 16 pi^2 n^2, index n + N
  MpReal w02_num;               // 32 L sinh^2(L/4)
  MpReal L2, c16, pi;

  EntryKernel(const WeilParams& p, const ArchCoefficients& a, const PrimeTable& t)
      : params(p), arch(a), primes(t) {
    const long bits = p.ctx.bits;
    pi = const_pi(bits);
    L2 = p.L * p.L;
    c16 = pi * pi * 16L;
    const MpReal s = sinh(p.L / 4L);
    w02_num = p.L * s * s * 32L;
    for (int n = -p.N; n <= p.N; ++n) w02_den.push_back(L2 + c16 * (static_cast<long>(n) * n));
  }

  MpReal operator()(int n, int m) const {
    const long bits = params.ctx.bits;
    const std::size_t in = params.index(n), im = params.index(m);
    MpReal w02 = w02_num * (L2 - c16 * (static_cast<long>(m) * n)) / (w02_den[in] * w02_den[im]);

    MpReal prime(bits);
    for (std::size_t k = 0; k < primes.y.size(); ++k) {
      MpReal q(bits);
      if (n == m) {
        q = (1L - primes.y[k] / params.L) * primes.cos_n[k][in] * 2L;
      } else {
        q = (primes.sin_n[k][im] - primes.sin_n[k][in]) / (pi * static_cast<long>(n - m));
      }
      prime += primes.weight[k] * q;
    }
    return w02 - arch_entry(n, m, arch) - prime;
  }
};

WeilMatrix assemble_impl(const WeilParams& params, bool parallel) {
  const ArchCoefficients arch = parallel ? arch_coefficients(params) : arch_coefficients_serial(params);
  const PrimeTable primes = prime_table(params, parallel);
  const EntryKernel kernel(params, arch, primes);
  const int dim = params.dim();
  const int N = params.N;

  WeilMatrix m{params, Matrix(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim), params.ctx.bits), {}, {}};
  auto row = [&](int i) {
    for (int j = i; j < dim; ++j) {
      MpReal v = kernel(i - N, j - N);
      m.tau(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
      m.tau(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = std::move(v);
    }
  };
  for_each_index(dim, parallel, [&](long i) { row(static_cast<int>(i)); });
  finish_structure(m);
  return m;
}

}  // namespace

WeilMatrix assemble(const WeilParams& params) { return assemble_impl(params, true); }
WeilMatrix assemble_serial(const WeilParams& params) { return assemble_impl(params, false); }

StructureReport check_structure(const WeilMatrix& m) {
  const long bits = m.params.ctx.bits;
  const int N = m.params.N;
  StructureReport r{MpReal(bits), MpReal(bits), MpReal(bits), MpReal(bits)};
  MpReal scale(1L, bits);
  for (int i = -N; i <= N; ++i)
    for (int j = -N; j <= N; ++j) {
      const MpReal& t = m.at(i, j);
      r.symmetry = max(r.symmetry, abs(t - m.at(j, i)));
      r.parity = max(r.parity, abs(t - m.at(-i, -j)));
      if (i != j) {
        const MpReal lhs = t * static_cast<long>(i - j);
        scale = max(scale, abs(lhs));
        if (!m.b.empty()) r.telescoping = max(r.telescoping, abs(lhs - (m.b_at(i) - m.b_at(j))));
      }
    }
  r.tolerance = pow2(-bits / 2, bits) * scale;
  return r;
}

StructureReport finish_structure(WeilMatrix& m) {
  const long bits = m.params.ctx.bits;
  const int N = m.params.N;
  const long dim = m.params.dim();
  m.a.clear();
  m.b.clear();
  for (int i = -N; i <= N; ++i) {
    m.a.push_back(m.at(i, i));
    // sum_j (i-j) tau_ij = sum_j (b_i - b_j) = dim * b_i since sum_j b_j = 0
    MpReal s(bits);
    for (int j = -N; j <= N; ++j)
      if (j != i) s += m.at(i, j) * static_cast<long>(i - j);
    m.b.push_back(s / dim);
  }
  // parity makes b odd; impose it exactly so that b_0 = 0
  for (int i = 0; i <= N; ++i) {
    const MpReal odd = (m.b[m.params.index(i)] - m.b[m.params.index(-i)]) / 2L;
    m.b[m.params.index(-i)] = -odd;
    m.b[m.params.index(i)] = odd;
  }
  StructureReport r = check_structure(m);
  if (!r.ok())
    throw StructureError("tau structure violated: symmetry " + r.symmetry.to_string(5) + ", parity " +
                         r.parity.to_string(5) + ", telescoping " + r.telescoping.to_string(5) +
                         ", tolerance " + r.tolerance.to_string(5));
  return r;
}

// ---------------------------------------------------------------- file IO

void write_matrix(std::ostream& out, const WeilMatrix& m) {
  textio::write_magic(out, "weilmatrix", 1);
  out << "lambda=" << m.params.lambda_spec.text() << '\n';
  out << "L=" << m.params.L.to_string() << '\n';
  out << "N=" << m.params.N << '\n';
  out << "bits=" << m.params.ctx.bits << '\n';
  const int N = m.params.N;
  for (int i = -N; i <= N; ++i)
    for (int j = i; j <= N; ++j) out << i << ' ' << j << ' ' << m.at(i, j).to_string() << '\n';
}

WeilMatrix read_matrix(std::istream& in, int guard) {
  const auto h = textio::read_header(in, "weilmatrix", 1, {"lambda", "L", "N", "bits"});
  const int N = static_cast<int>(h.integer("N"));
  const int bits = static_cast<int>(h.integer("bits"));
  const WeilParams params = WeilParams::make(LambdaSpec::parse(h.at("lambda")), N, PrecisionContext(bits, guard));
  const int dim = params.dim();
  WeilMatrix m{params, Matrix(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim), bits), {}, {}};
  std::vector<std::string> tok;
  long seen = 0;
  while (textio::next_record(in, tok)) {
    if (tok.size() != 3) throw FormatError("weilmatrix: malformed entry line");
    const int i = std::stoi(tok[0]), j = std::stoi(tok[1]);
    if (i > j || i < -N || j > N) throw FormatError("weilmatrix: entry index out of range");
    MpReal v(std::string_view(tok[2]), bits);
    m.tau(params.index(j), params.index(i)) = v;
    m.tau(params.index(i), params.index(j)) = std::move(v);
    ++seen;
  }
  if (seen != static_cast<long>(dim) * (dim + 1) / 2) throw FormatError("weilmatrix: wrong number of entries");
  finish_structure(m);
  return m;
}

}  // namespace weil
