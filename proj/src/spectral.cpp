#include "weil/spectral.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "weil/errors.hpp"
#include "weil/textio.hpp"

namespace weil {

namespace {

MpReal off_norm(const Matrix& A) {
  MpReal s(A.precision());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j)
      if (i != j) s += A(i, j) * A(i, j);
  return sqrt(s);
}

// Scratch space for one rotation: new values of columns p and q.
struct RotationScratch {
  std::vector<MpReal> ap, aq, vp, vq;
  explicit RotationScratch(std::size_t n, long bits)
      : ap(n, MpReal(bits)), aq(n, MpReal(bits)), vp(n, MpReal(bits)), vq(n, MpReal(bits)) {}
};

// new_p = c x_p - s x_q, new_q = s x_p + c x_q
inline void rotate_pair(MpReal& out_p, MpReal& out_q, const MpReal& xp, const MpReal& xq, const MpReal& c,
                        const MpReal& s) {
  mpfr_fmms(out_p.raw(), c.raw(), xp.raw(), s.raw(), xq.raw(), MPFR_RNDN);
  mpfr_fmma(out_q.raw(), s.raw(), xp.raw(), c.raw(), xq.raw(), MPFR_RNDN);
}

void apply_rotation(Matrix& A, Matrix& V, std::size_t p, std::size_t q, const MpReal& c, const MpReal& s,
                    const MpReal& t, RotationScratch& w, bool parallel) {
  const long n = static_cast<long>(A.rows());
  auto body = [&](long kk) {
    const std::size_t k = static_cast<std::size_t>(kk);
    if (k != p && k != q) rotate_pair(w.ap[k], w.aq[k], A(k, p), A(k, q), c, s);
    rotate_pair(w.vp[k], w.vq[k], V(k, p), V(k, q), c, s);
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) body(k);
  } else {
    for (long k = 0; k < n; ++k) body(k);
  }

  const MpReal apq = A(p, q);
  A(p, p) -= t * apq;
  A(q, q) += t * apq;
  mpfr_set_zero(A(p, q).raw(), 1);
  mpfr_set_zero(A(q, p).raw(), 1);
  for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
    mpfr_swap(V(k, p).raw(), w.vp[k].raw());
    mpfr_swap(V(k, q).raw(), w.vq[k].raw());
    if (k == p || k == q) continue;
    mpfr_set(A(p, k).raw(), w.ap[k].raw(), MPFR_RNDN);
    mpfr_set(A(q, k).raw(), w.aq[k].raw(), MPFR_RNDN);
    mpfr_swap(A(k, p).raw(), w.ap[k].raw());
    mpfr_swap(A(k, q).raw(), w.aq[k].raw());
  }
}

// eps_N, xi_raw, gap and parity defect from sorted values and vectors.
void summarize(EigenDecomposition& dec) {
  const std::size_t n = dec.values.size();
  const long bits = dec.vectors.precision();
  dec.eps_N = dec.values.front();
  dec.xi_raw = dec.vectors.column(0);
  dec.gap = n > 1 ? dec.values[1] - dec.values[0] : MpReal(bits);
  MpReal d(bits);
  for (std::size_t i = 0; i < n; ++i) {
    const MpReal e = dec.xi_raw[n - 1 - i] - dec.xi_raw[i];
    d += e * e;
  }
  dec.parity_defect = sqrt(d);
}

}  // namespace

EigenDecomposition jacobi_eig(const Matrix& M, const PrecisionContext& ctx, const JacobiOptions& opt) {
  if (M.rows() != M.cols() || M.rows() == 0) throw DomainError("jacobi_eig: matrix must be square and non-empty");
  const long bits = ctx.bits;
  const std::size_t n = M.rows();

  Matrix A(n, n, bits);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A(i, j) = M(i, j).rounded_to(bits);
  const MpReal norm = A.frobenius();
  if (A.asymmetry() > pow2(-bits / 2, bits) * max(norm, MpReal(1L, bits)))
    throw DomainError("jacobi_eig: matrix is not symmetric");
  // exact symmetrisation from the upper triangle
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) A(j, i) = A(i, j);

  Matrix V = Matrix::identity(n, bits);
  RotationScratch w(n, bits);
  const MpReal target = pow2(ctx.eps_exponent(), bits) * norm;
  const MpReal negligible = pow2(-bits, bits) * norm;

  EigenDecomposition dec;
  int sweep = 0;
  while (off_norm(A) > target) {
    if (sweep >= opt.max_sweeps)
      throw NonConvergence("jacobi_eig: no convergence after " + std::to_string(opt.max_sweeps) + " sweeps");
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const MpReal& apq = A(p, q);
        if (abs(apq) <= negligible) {
          mpfr_set_zero(A(p, q).raw(), 1);
          mpfr_set_zero(A(q, p).raw(), 1);
          continue;
        }
        const MpReal theta = (A(q, q) - A(p, p)) / (apq * 2L);
        MpReal t = 1L / (abs(theta) + sqrt(theta * theta + 1L));
        if (theta.sign() < 0) t = -t;
        const MpReal c = 1L / sqrt(t * t + 1L);
        const MpReal s = t * c;
        apply_rotation(A, V, p, q, c, s, t, w, opt.parallel);
      }
  }
  dec.sweeps = sweep;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return A(a, a) < A(b, b); });
  dec.vectors = Matrix(n, n, bits);
  for (std::size_t k = 0; k < n; ++k) {
    dec.values.push_back(A(order[k], order[k]));
    for (std::size_t i = 0; i < n; ++i) dec.vectors(i, k) = V(i, order[k]);
  }
  summarize(dec);
  return dec;
}

EigenResiduals check_decomposition(const Matrix& M, const EigenDecomposition& dec) {
  const long bits = dec.vectors.precision();
  const std::size_t n = M.rows();
  EigenResiduals r{MpReal(bits), MpReal(bits), MpReal(bits), M.frobenius()};
  const Matrix MV = M * dec.vectors;
  const Matrix Vt = dec.vectors.transposed();
  const Matrix VtV = Vt * dec.vectors;
  const Matrix VtMV = Vt * MV;
  MpReal orth(bits), rec(bits);
  for (std::size_t k = 0; k < n; ++k) {
    MpReal res(bits);
    for (std::size_t i = 0; i < n; ++i) {
      const MpReal e = MV(i, k) - dec.values[k] * dec.vectors(i, k);
      res += e * e;
    }
    r.max_residual = max(r.max_residual, sqrt(res));
    for (std::size_t i = 0; i < n; ++i) {
      const MpReal o = VtV(i, k) - (i == k ? 1L : 0L);
      orth += o * o;
      const MpReal e = i == k ? VtMV(i, k) - dec.values[k] : VtMV(i, k);
      rec += e * e;
    }
  }
  r.orthogonality = sqrt(orth);
  r.reconstruction = sqrt(rec);
  return r;
}

std::string EvenSimpleReport::describe() const {
  std::ostringstream os;
  os << "simple=" << (simple ? "yes" : "no") << " gap=" << gap.to_string(6) << " (threshold "
     << gap_threshold.to_string(3) << "), even=" << (even ? "yes" : "no")
     << " parity_defect=" << parity_defect.to_string(6) << " (threshold " << parity_threshold.to_string(3) << ")";
  return os.str();
}

EvenSimpleReport even_simple_report(const EigenDecomposition& dec, const PrecisionContext& ctx) {
  const long bits = ctx.bits;
  EvenSimpleReport r;
  r.gap = dec.gap;
  r.parity_defect = dec.parity_defect;
  r.parity_threshold = pow2(-bits / 4, bits);
  // The gap only has to be resolved by the eigensolver, whose eigenvalues
  // are good to far better than 2^(-bits/2) |M|. Tying it to |eps_N| would
  // reject the tiny but well separated minima of the large-lambda runs.
  MpReal scale(1L, bits);
  for (const MpReal& v : dec.values) scale = max(scale, abs(v));
  r.gap_threshold = pow2(-bits / 2, bits) * scale;
  r.simple = dec.values.size() > 1 && r.gap > r.gap_threshold;
  r.even = r.parity_defect < r.parity_threshold;
  return r;
}

EvenSimpleReport even_simple_check(const EigenDecomposition& dec, const WeilParams& params) {
  EvenSimpleReport r = even_simple_report(dec, params.ctx);
  if (!r.ok()) throw EvenSimpleViolation("minimal eigenvalue is not even-simple: " + r.describe());
  return r;
}

std::vector<MpReal> minimal_vector(const EigenDecomposition& dec, const WeilParams& params) {
  const long bits = params.ctx.bits;
  MpReal sum(bits);
  for (const auto& x : dec.xi_raw) sum += x;
  if (abs(sum) < pow2(-bits / 2, bits))
    throw DegenerateNormalization("minimal eigenvector has vanishing coefficient sum " + sum.to_string(5));
  const MpReal scale = sqrt(params.L) / sum;  // carries the sign flip
  std::vector<MpReal> xi;
  xi.reserve(dec.xi_raw.size());
  for (const auto& x : dec.xi_raw) xi.push_back(x * scale);
  return xi;
}

void write_eigen(std::ostream& out, const EigenDecomposition& dec, const WeilParams& params) {
  textio::write_magic(out, "weileig", 1);
  out << "lambda=" << params.lambda_spec.text() << '\n';
  out << "N=" << params.N << '\n';
  out << "bits=" << dec.vectors.precision() << '\n';
  out << "sweeps=" << dec.sweeps << '\n';
  const std::size_t n = dec.values.size();
  for (std::size_t k = 0; k < n; ++k) out << "value " << k << ' ' << dec.values[k].to_string() << '\n';
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) out << "vector " << i << ' ' << k << ' ' << dec.vectors(i, k).to_string() << '\n';
}

EigenFile read_eigen(std::istream& in) {
  const auto h = textio::read_header(in, "weileig", 1, {"lambda", "N", "bits", "sweeps"});
  EigenFile f;
  f.lambda = h.at("lambda");
  f.N = static_cast<int>(h.integer("N"));
  f.bits = static_cast<int>(h.integer("bits"));
  const std::size_t n = static_cast<std::size_t>(2 * f.N + 1);
  EigenDecomposition& dec = f.dec;
  dec.sweeps = static_cast<int>(h.integer("sweeps"));
  dec.values.assign(n, MpReal(f.bits));
  dec.vectors = Matrix(n, n, f.bits);
  std::vector<std::string> tok;
  std::size_t nv = 0, nx = 0;
  while (textio::next_record(in, tok)) {
    if (tok[0] == "value" && tok.size() == 3) {
      const std::size_t k = std::stoul(tok[1]);
      if (k >= n) throw FormatError("weileig: value index out of range");
      dec.values[k] = MpReal(std::string_view(tok[2]), f.bits);
      ++nv;
    } else if (tok[0] == "vector" && tok.size() == 4) {
      const std::size_t i = std::stoul(tok[1]), k = std::stoul(tok[2]);
      if (i >= n || k >= n) throw FormatError("weileig: vector index out of range");
      dec.vectors(i, k) = MpReal(std::string_view(tok[3]), f.bits);
      ++nx;
    } else {
      throw FormatError("weileig: malformed line");
    }
  }
  if (nv != n || nx != n * n) throw FormatError("weileig: wrong number of entries");
  summarize(dec);
  return f;
}

}  // namespace weil
