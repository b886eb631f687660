#pragma once

// Orchestration behind the command line: assembly, diagonalization,
// spectrum, zero table and the comparison table, with an on-disk cache.

#include <filesystem>
#include <exception>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "weil/dirac_pert.hpp"
#include "weil/spectral.hpp"
#include "weil/weil_form.hpp"
#include "weil/xi_oracle.hpp"

namespace weil {

inline constexpr int kFormatVersion = 1;

struct RunConfig {
  LambdaSpec lambda = LambdaSpec::parse("2");
  int N = 16;
  int digits = 60;
  int zeros = 10;
  std::filesystem::path out = ".";
  std::filesystem::path cache;  // empty: no cache
  OutputFormat format = OutputFormat::csv;
  bool verify = false;

  /// bits = ceil(digits log2 10) + 32
  PrecisionContext ctx() const { return PrecisionContext::from_digits(digits); }
  /// Throws DomainError for digits < 40, N < 1 or zeros < 1.
  void validate() const;
};

struct ComparisonRow {
  int k = 0;
  MpReal zero;
  MpReal eigenvalue;
  MpReal difference;         // |eigenvalue - zero|
  MpReal mirror_difference;  // |(-k-th negative eigenvalue) - zero|
};

/// Three significant digits, scientific: "2.44e-55".
std::string format_difference(const MpReal& d);

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// Single-writer lock on a cache directory: <dir>/.lock created exclusively.
class CacheLock {
 public:
  explicit CacheLock(const std::filesystem::path& dir, int timeout_seconds = 3600);
  ~CacheLock();
  CacheLock(const CacheLock&) = delete;
  CacheLock& operator=(const CacheLock&) = delete;

 private:
  std::filesystem::path path_;
};

class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg, std::ostream* log = nullptr);

  const RunConfig& config() const { return cfg_; }
  const WeilParams& params();
  const WeilMatrix& matrix();
  const EigenDecomposition& eigen();
  /// Runs the even-simple check before normalizing xi.
  const PerturbedOperator& op();
  const SpectrumResult& spectrum();
  const ZeroTable& zeros();
  std::vector<ComparisonRow> compare();

  /// All invariant suites at the configured scale.
  std::vector<CheckResult> verify();

  std::filesystem::path matrix_cache_path() const;
  std::filesystem::path eigen_cache_path() const;
  std::filesystem::path zeros_cache_path() const;

 private:
  void note(const std::string& msg);

  RunConfig cfg_;
  std::ostream* log_;
  std::optional<WeilParams> params_;
  std::optional<WeilMatrix> matrix_;
  std::optional<EigenDecomposition> eigen_;
  std::optional<PerturbedOperator> op_;
  std::optional<SpectrumResult> spectrum_;
  std::optional<ZeroTable> zeros_;
};

void write_comparison(std::ostream& out, const std::vector<ComparisonRow>& rows, const RunConfig& cfg);
/// "# k,log10_difference" then one row per zero.
void write_figure(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// Writes `content` unless the file already holds exactly these bytes.
void write_if_changed(const std::filesystem::path& path, const std::string& content);

/// 2 invariant violation, 3 even-simple violation, 4 convergence failure,
/// 1 anything else.
int exit_code_for(const std::exception& e);

/// Runs "assemble", "spectrum", "oracle" or "compare" and maps failures to
/// exit codes with exit_code_for.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

}  // namespace weil
