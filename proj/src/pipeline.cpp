#include "weil/pipeline.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "weil/errors.hpp"

namespace fs = std::filesystem;

namespace weil {

void RunConfig::validate() const {
  if (digits < 40) throw DomainError("--digits must be at least 40");
  if (N < 1) throw DomainError("--n-max must be positive");
  if (zeros < 1) throw DomainError("--zeros must be positive");
}

std::string format_difference(const MpReal& d) {
  if (d.is_zero()) return "0";
  std::string s = d.to_string(3);
  // to_string yields d.dde<exp>; normalise the exponent sign
  const auto e = s.find('e');
  if (e != std::string::npos && s[e + 1] != '-' && s[e + 1] != '+') s.insert(e + 1, "+");
  return s;
}

// ---------------------------------------------------------------- lock

CacheLock::CacheLock(const fs::path& dir, int timeout_seconds) : path_(dir / ".lock") {
  fs::create_directories(dir);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeout_seconds);
  for (;;) {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd >= 0) {
      const std::string pid = std::to_string(::getpid()) + "\n";
      [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
      ::close(fd);
      return;
    }
    // a lock whose writer has died is taken over
    std::ifstream held(path_);
    long owner = 0;
    if (held >> owner && owner > 0 && ::kill(static_cast<pid_t>(owner), 0) != 0 && errno == ESRCH) {
      std::error_code ec;
      fs::remove(path_, ec);
      continue;
    }
    if (std::chrono::steady_clock::now() > deadline)
      throw CacheMismatch("cache is locked by another writer: " + path_.string());
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }
}

CacheLock::~CacheLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

// ---------------------------------------------------------------- files

void write_if_changed(const fs::path& path, const std::string& content) {
  {
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::ostringstream old;
      old << in.rdbuf();
      if (old.str() == content) return;
    }
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

namespace {

std::string stem(const RunConfig& c) { return c.lambda.slug() + "_N" + std::to_string(c.N); }

template <class F>
auto timed(std::ostream* log, const std::string& what, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto r = f();
  if (log) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    *log << what << ": " << std::fixed;
    log->precision(1);
    *log << s << " s\n";
    log->unsetf(std::ios::floatfield);
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------- pipeline

Pipeline::Pipeline(RunConfig cfg, std::ostream* log) : cfg_(std::move(cfg)), log_(log) { cfg_.validate(); }

void Pipeline::note(const std::string& msg) {
  if (log_) *log_ << msg << '\n';
}

fs::path Pipeline::matrix_cache_path() const {
  return cfg_.cache / ("weilmatrix_" + stem(cfg_) + "_d" + std::to_string(cfg_.digits) + "_v1.txt");
}
fs::path Pipeline::eigen_cache_path() const {
  return cfg_.cache / ("weileig_" + stem(cfg_) + "_d" + std::to_string(cfg_.digits) + "_v1.txt");
}
fs::path Pipeline::zeros_cache_path() const {
  return cfg_.cache / ("zetazeros_n" + std::to_string(cfg_.zeros) + "_d" + std::to_string(cfg_.digits) + "_v1.txt");
}

const WeilParams& Pipeline::params() {
  if (!params_) params_ = WeilParams::make(cfg_.lambda, cfg_.N, cfg_.ctx());
  return *params_;
}

const WeilMatrix& Pipeline::matrix() {
  if (matrix_) return *matrix_;
  const WeilParams& p = params();
  if (!cfg_.cache.empty() && fs::exists(matrix_cache_path())) {
    std::ifstream in(matrix_cache_path());
    WeilMatrix m = read_matrix(in, p.ctx.guard);
    if (!(m.params.lambda_spec == p.lambda_spec) || m.params.N != p.N || m.params.ctx.bits != p.ctx.bits)
      throw CacheMismatch("cached matrix header disagrees with the configuration: " + matrix_cache_path().string());
    note("matrix: cache hit " + matrix_cache_path().string());
    matrix_ = std::move(m);
    return *matrix_;
  }
  matrix_ = timed(log_, "assemble", [&] { return assemble(p); });
  if (!cfg_.cache.empty()) {
    std::ostringstream os;
    write_matrix(os, *matrix_);
    write_if_changed(matrix_cache_path(), os.str());
  }
  return *matrix_;
}

const EigenDecomposition& Pipeline::eigen() {
  if (eigen_) return *eigen_;
  const WeilParams& p = params();
  if (!cfg_.cache.empty() && fs::exists(eigen_cache_path())) {
    std::ifstream in(eigen_cache_path());
    EigenFile f = read_eigen(in);
    if (f.lambda != p.lambda_spec.text() || f.N != p.N || f.bits != p.ctx.bits)
      throw CacheMismatch("cached eigendata header disagrees with the configuration: " + eigen_cache_path().string());
    note("eigen: cache hit " + eigen_cache_path().string());
    eigen_ = std::move(f.dec);
    return *eigen_;
  }
  const Matrix& tau = matrix().tau;
  eigen_ = timed(log_, "jacobi", [&] { return jacobi_eig(tau, p.ctx); });
  note("jacobi: " + std::to_string(eigen_->sweeps) + " sweeps, eps_N = " + eigen_->eps_N.to_string(6));
  if (!cfg_.cache.empty()) {
    std::ostringstream os;
    write_eigen(os, *eigen_, p);
    write_if_changed(eigen_cache_path(), os.str());
  }
  return *eigen_;
}

const PerturbedOperator& Pipeline::op() {
  if (op_) return *op_;
  const WeilParams& p = params();
  const EigenDecomposition& dec = eigen();
  const EvenSimpleReport r = even_simple_check(dec, p);
  note("even-simple: " + r.describe());
  op_ = PerturbedOperator::make(p, minimal_vector(dec, p), dec.eps_N);
  return *op_;
}

const SpectrumResult& Pipeline::spectrum() {
  if (spectrum_) return *spectrum_;
  const PerturbedOperator& o = op();
  spectrum_ = timed(log_, "secular roots", [&] { return weil::spectrum(o); });
  return *spectrum_;
}

const ZeroTable& Pipeline::zeros() {
  if (zeros_) return *zeros_;
  const PrecisionContext ctx = cfg_.ctx();
  if (!cfg_.cache.empty() && fs::exists(zeros_cache_path())) {
    std::ifstream in(zeros_cache_path());
    ZeroTable t = read_zero_table(in);
    if (t.bits != ctx.bits || static_cast<int>(t.zeros.size()) != cfg_.zeros)
      throw CacheMismatch("cached zero table header disagrees with the configuration: " + zeros_cache_path().string());
    note("zeros: cache hit " + zeros_cache_path().string());
    zeros_ = std::move(t);
    return *zeros_;
  }
  const ThetaSeries ts = ThetaSeries::make(ctx);
  zeros_ = timed(log_, "zeta zeros", [&] { return zeta_zeros(cfg_.zeros, ts); });
  if (!cfg_.cache.empty()) {
    std::ostringstream os;
    write_zero_table(os, *zeros_);
    write_if_changed(zeros_cache_path(), os.str());
  }
  return *zeros_;
}

std::vector<ComparisonRow> Pipeline::compare() {
  const auto pos = spectrum().positive();
  const auto neg = spectrum().negative();
  const ZeroTable& z = zeros();
  std::vector<ComparisonRow> rows;
  const long bits = params().ctx.bits;
  for (std::size_t k = 0; k < z.zeros.size() && k < pos.size(); ++k) {
    ComparisonRow r;
    r.k = static_cast<int>(k + 1);
    r.zero = z.zeros[k].value.rounded_to(bits);
    r.eigenvalue = pos[k];
    r.difference = abs(pos[k] - r.zero);
    r.mirror_difference = k < neg.size() ? abs(-neg[k] - r.zero) : MpReal(bits);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------- verify

namespace {

CheckResult check(std::string name, bool ok, std::string detail) { return {std::move(name), ok, std::move(detail)}; }

std::string sci(const MpReal& x) { return x.to_string(3); }

}  // namespace

std::vector<CheckResult> Pipeline::verify() {
  std::vector<CheckResult> out;
  const WeilParams& p = params();
  const long bits = p.ctx.bits;
  const MpReal half = pow2(-bits / 2, bits);
  const MpReal quarter = pow2(-bits / 4, bits);
  const int N = p.N;

  // matrix
  const WeilMatrix& m = matrix();
  const StructureReport sr = check_structure(m);
  out.push_back(check("matrix symmetry", sr.symmetry <= sr.tolerance, sci(sr.symmetry)));
  out.push_back(check("matrix parity", sr.parity <= sr.tolerance, sci(sr.parity)));
  out.push_back(check("matrix b-structure", sr.telescoping <= sr.tolerance, sci(sr.telescoping)));
  {
    std::mt19937_64 rng(20240613);
    std::uniform_int_distribution<int> pick(-N, N);
    MpReal worst(bits);
    const int dim = p.dim();
    const long triples = static_cast<long>(dim) * dim * dim <= 200000 ? -1 : 20000;
    auto one = [&](int i, int j, int k) {
      if (i == j || j == k || k == i) return;
      const MpReal t = m.at(i, j) * static_cast<long>(i - j) + m.at(j, k) * static_cast<long>(j - k) +
                       m.at(k, i) * static_cast<long>(k - i);
      worst = max(worst, abs(t));
    };
    if (triples < 0) {
      for (int i = -N; i <= N; ++i)
        for (int j = -N; j <= N; ++j)
          for (int k = -N; k <= N; ++k) one(i, j, k);
    } else {
      for (long t = 0; t < triples; ++t) one(pick(rng), pick(rng), pick(rng));
    }
    out.push_back(check("telescoping identity", worst <= sr.tolerance, sci(worst)));
  }

  // eigen
  const EigenDecomposition& dec = eigen();
  const EigenResiduals er = check_decomposition(m.tau, dec);
  out.push_back(check("eigen residual", er.max_residual <= half * er.norm, sci(er.max_residual)));
  out.push_back(check("eigen orthogonality", er.orthogonality <= half, sci(er.orthogonality)));
  out.push_back(check("eigen reconstruction", er.reconstruction <= half * er.norm, sci(er.reconstruction)));
  {
    MpReal c(bits);
    for (int i = -N; i <= N; ++i)
      for (int j = -N; j <= N; ++j) {
        // (tau P - P tau)_ij = tau_{i,-j} - tau_{-i,j}
        const MpReal d = m.at(i, -j) - m.at(-i, j);
        c += d * d;
      }
    out.push_back(check("parity commutation", sqrt(c) <= half * er.norm, sci(sqrt(c))));
  }
  const EvenSimpleReport es = even_simple_report(dec, p.ctx);
  out.push_back(check("even-simple", es.ok(), es.describe()));
  if (!es.ok()) return out;

  // spectrum
  const PerturbedOperator& o = op();
  const SpectrumResult& sp = spectrum();
  out.push_back(check("secular root count", static_cast<int>(sp.interior.size()) == 2 * N,
                      std::to_string(sp.interior.size()) + " roots, grid " + std::to_string(sp.grid)));
  {
    bool ok = true;
    std::string where;
    for (int j = -N; j < N; ++j) {
      const MpReal &a = o.xi_at(j), &b = o.xi_at(j + 1);
      if (a.is_zero() || b.is_zero() || a.sign() != b.sign()) continue;
      int inside = 0;
      for (const auto& r : sp.roots) inside += (r > static_cast<long>(j) && r < static_cast<long>(j + 1)) ? 1 : 0;
      if (inside != 1) {
        ok = false;
        where = "interval (" + std::to_string(j) + "," + std::to_string(j + 1) + ") holds " + std::to_string(inside);
      }
    }
    out.push_back(check("interlacing", ok, where));
  }
  {
    MpReal mass(bits), worst(bits);
    for (const auto& x : o.xi) mass += abs(x);
    for (const auto& r : sp.residuals) worst = max(worst, r);
    out.push_back(check("secular residual", worst <= quarter * mass, sci(worst)));
  }
  {
    std::mt19937_64 rng(7);
    const double reach = 2 * M_PI * (N + 3) / p.L.to_double();
    std::uniform_real_distribution<double> re(-reach, reach), im(-2.0, 2.0);
    MpReal worst(bits);
    for (int t = 0; t < 50; ++t) {
      const MpComplex z(re(rng), t < 10 ? 0.0 : im(rng), bits);
      const MpComplex a = det_reg(o, z), b = det_reg_secular(o, z);
      const MpReal scale = max(MpReal(1L, bits), max(abs(a), abs(b)));
      worst = max(worst, abs(a - b) / scale);
    }
    out.push_back(check("det_reg identity (50 z)", worst <= half, sci(worst)));
  }
  try {
    const DetSpectrumReport dr = verify_det_spectrum(o, sp);
    out.push_back(check("xi_hat zeros = spectrum", true,
                        sci(dr.max_relative_residual) + " over " + std::to_string(dr.points) + " points"));
  } catch (const IdentityViolation& e) {
    out.push_back(check("xi_hat zeros = spectrum", false, e.what()));
  }
  {
    MpReal worst(bits);
    const std::size_t n = sp.interior.size();
    for (std::size_t k = 0; k < n; ++k)
      worst = max(worst, abs(sp.interior[k] + sp.interior[n - 1 - k]) / max(MpReal(1L, bits), abs(sp.interior[k])));
    out.push_back(check("spectrum symmetry", worst <= quarter, sci(worst)));
  }

  // oracle
  const ThetaSeries ts = ThetaSeries::make(p.ctx);
  {
    MpReal worst(bits);
    for (int i = 0; i <= 8; ++i) {
      const MpReal u = exp(MpReal(i * std::log(10.0) / 8, ts.work_bits));
      const MpReal a = k_series(u, ts), b = k_series(1L / u, ts);
      worst = max(worst, abs(a - b));
    }
    out.push_back(check("k(u) = k(1/u)", worst <= pow2(p.ctx.eps_exponent(), bits), sci(worst)));
  }
  {
    const MpReal tol = pow(MpReal(10L, bits), static_cast<long>(-(cfg_.digits - 10)));
    const MpReal i1 = hermite_moment(1, p.ctx);
    const MpReal norm = sqrt(hermite_moment(2, p.ctx));
    const MpReal expect = sqrt(MpReal(33L, bits)) / pow(MpReal(2L, bits), MpReal(4.25, bits));
    out.push_back(check("integral of h", abs(i1) <= tol, sci(i1)));
    out.push_back(check("norm of h", abs(norm - expect) <= tol, sci(norm - expect)));
  }
  {
    ThetaSeries wide = ts;
    wide.n_max *= 2;
    wide.u_max *= 2L;
    const XiEvaluator a(ts), b(wide);
    MpReal worst(bits);
    for (long s : {0L, 10L, 50L, 100L}) {
      const MpReal va = a.value(MpReal(s, bits)), vb = b.value(MpReal(s, bits));
      // local scale of Xi near s
      const MpReal scale = exp(MpReal(-M_PI * s / 4, bits)) * (s + 1L);
      worst = max(worst, abs(va - vb) / scale);
    }
    out.push_back(check("Xi truncation stability", worst <= pow2(p.ctx.eps_exponent(), bits), sci(worst)));
  }
  return out;
}

// ---------------------------------------------------------------- output

void write_comparison(std::ostream& out, const std::vector<ComparisonRow>& rows, const RunConfig& cfg) {
  if (cfg.format == OutputFormat::csv) {
    out << "k,zero,eigenvalue,difference,mirror_difference\n";
    for (const auto& r : rows)
      out << r.k << ',' << r.zero.to_string(40) << ',' << r.eigenvalue.to_string(40) << ','
          << format_difference(r.difference) << ',' << format_difference(r.mirror_difference) << '\n';
    return;
  }
  nlohmann::ordered_json j;
  j["lambda"] = cfg.lambda.text();
  j["N"] = cfg.N;
  j["digits"] = cfg.digits;
  j["bits"] = cfg.ctx().bits;
  j["version"] = kFormatVersion;
  auto& arr = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    arr.push_back({{"k", r.k},
                   {"zero", r.zero.to_string()},
                   {"eigenvalue", r.eigenvalue.to_string()},
                   {"difference", r.difference.to_string()},
                   {"difference_3", format_difference(r.difference)},
                   {"mirror_difference", format_difference(r.mirror_difference)}});
  out << j.dump(1) << '\n';
}

void write_figure(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "# k,log10_difference\n";
  for (const auto& r : rows) {
    out << r.k << ',';
    if (r.difference.is_zero()) out << "-inf\n";
    else out << log(r.difference).to_double() / std::log(10.0) << '\n';
  }
}

// ---------------------------------------------------------------- commands

namespace {

std::string render_spectrum(const SpectrumResult& s, const WeilParams& p, OutputFormat f) {
  std::ostringstream os;
  write_spectrum(os, s, p, f);
  return os.str();
}

const char* ext(OutputFormat f) { return f == OutputFormat::csv ? ".csv" : ".json"; }

int run_verify(Pipeline& pl, std::ostream& log) {
  int failures = 0;
  for (const auto& c : pl.verify()) {
    log << (c.ok ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
    failures += c.ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 2;
}

int dispatch(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  std::unique_ptr<CacheLock> lock;
  if (!cfg.cache.empty()) lock = std::make_unique<CacheLock>(cfg.cache);
  Pipeline pl(cfg, &log);
  const std::string st = stem(cfg);

  if (command == "assemble") {
    std::ostringstream os;
    write_matrix(os, pl.matrix());
    write_if_changed(cfg.out / ("weilmatrix_" + st + ".txt"), os.str());
  } else if (command == "spectrum") {
    write_if_changed(cfg.out / ("spectrum_" + st + ext(cfg.format)),
                     render_spectrum(pl.spectrum(), pl.params(), cfg.format));
  } else if (command == "oracle") {
    std::ostringstream os;
    write_zero_table(os, pl.zeros());
    write_if_changed(cfg.out / ("zetazeros_n" + std::to_string(cfg.zeros) + ".txt"), os.str());
  } else if (command == "compare") {
    const auto rows = pl.compare();
    std::ostringstream table, fig;
    write_comparison(table, rows, cfg);
    write_figure(fig, rows);
    write_if_changed(cfg.out / ("comparison_" + st + ext(cfg.format)), table.str());
    write_if_changed(cfg.out / ("figure_" + st + ".csv"), fig.str());
    for (const auto& r : rows) log << r.k << "  " << format_difference(r.difference) << '\n';
  } else {
    log << "unknown command '" << command << "'\n";
    return 1;
  }
  return cfg.verify ? run_verify(pl, log) : 0;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const EvenSimpleViolation*>(&e)) return 3;
  if (dynamic_cast<const NonConvergence*>(&e)) return 4;
  if (dynamic_cast<const StructureError*>(&e) || dynamic_cast<const IdentityViolation*>(&e) ||
      dynamic_cast<const RootCountMismatch*>(&e) || dynamic_cast<const MissedZeroSuspected*>(&e) ||
      dynamic_cast<const DegenerateNormalization*>(&e))
    return 2;
  return 1;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  try {
    return dispatch(command, cfg, log);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace weil
