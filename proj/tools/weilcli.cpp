// weil: assemble the truncated Weil form, compute the perturbed spectrum and
// compare it with the zeros of zeta.

#include <CLI11.hpp>

#include <iostream>

#include "weil/errors.hpp"
#include "weil/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weil quadratic form spectra versus zeta zeros"};
  app.require_subcommand(1);

  std::string lambda = "sqrt:13";
  std::string format = "csv";
  weil::RunConfig cfg;
  cfg.N = 120;
  cfg.digits = 200;
  cfg.zeros = 50;
  std::string out = ".", cache;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--lambda", lambda, "lambda as a decimal or sqrt:<k>")->capture_default_str();
    sub->add_option("--n-max", cfg.N, "truncation N, matrix size 2N+1")->capture_default_str();
    sub->add_option("--digits", cfg.digits, "decimal digits of working precision (>= 40)")->capture_default_str();
    sub->add_option("--zeros", cfg.zeros, "number of zeta zeros")->capture_default_str();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--cache", cache, "cache directory (disabled when empty)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_flag("--verify", cfg.verify, "run all invariant suites after the command");
  };
  for (const char* name : {"assemble", "spectrum", "oracle", "compare"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
  }
  app.get_subcommand("assemble")->description("write the matrix tau");
  app.get_subcommand("spectrum")->description("write the spectrum of the perturbed operator");
  app.get_subcommand("oracle")->description("write the table of zeta zeros from the Xi oracle");
  app.get_subcommand("compare")->description("pair eigenvalues with zeros; table and figure data");

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.lambda = weil::LambdaSpec::parse(lambda);
  } catch (const weil::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  cfg.format = format == "json" ? weil::OutputFormat::json : weil::OutputFormat::csv;
  cfg.out = out;
  cfg.cache = cache;
  const std::string command = app.get_subcommands().front()->get_name();
  return weil::run_command(command, cfg, std::cerr);
}
