// ovi: batch front-end for the obstacle, membrane and QVI solvers.
#include <CLI11.hpp>
#include <iostream>

#include "app/run.hpp"

using namespace ovi::app;

int main(int argc, char** argv) {
  CLI::App cli{"Obstacle-type variational inequalities with Orlicz growth"};
  cli.require_subcommand(1);

  std::string scheme;
  double tol = 0.0;
  std::string out_dir;
  std::string target;
  double epsilon = 0.0;

  const auto common = [&](CLI::App* sub, const char* what) {
    sub->add_option(what, target, std::string(what) == "dir" ? "Fixture directory" : "JSON run config")->required();
    sub->add_option("--scheme", scheme, "Discretization (edge|p1)")->check(CLI::IsMember({"edge", "p1"}));
    sub->add_option("--tol", tol, "Solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "Output directory");
  };
  auto* check = cli.add_subcommand("check-operator", "Sample the structural condition of the configured operator");
  common(check, "config");
  auto* run = cli.add_subcommand("run", "Solve whatever problem the config describes");
  common(run, "config");
  auto* solve = cli.add_subcommand("solve", "Two-obstacle problem");
  common(solve, "config");
  auto* membranes = cli.add_subcommand("membranes", "N-membranes problem");
  common(membranes, "config");
  membranes->add_option("--penalized", epsilon, "Use the bounded penalization with this epsilon")
      ->check(CLI::PositiveNumber);
  auto* qvi = cli.add_subcommand("qvi", "Implicit-obstacle quasi-variational system");
  common(qvi, "config");
  auto* verify = cli.add_subcommand("verify", "Run the full invariant suite on every fixture in a directory");
  common(verify, "dir");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  Overrides ov;
  if (!scheme.empty()) ov.scheme = ovi::parse_scheme(scheme);
  if (tol > 0.0) ov.tol = tol;
  if (!out_dir.empty()) ov.out = out_dir;
  if (epsilon > 0.0) ov.epsilon = epsilon;

  if (*check) return run_check_operator(target, ov, std::cout, std::cerr);
  if (*run) return run_problem(target, ProblemKind::none, ov, std::cout, std::cerr);
  if (*solve) return run_problem(target, ProblemKind::obstacle, ov, std::cout, std::cerr);
  if (*membranes) return run_problem(target, ProblemKind::membranes, ov, std::cout, std::cerr);
  if (*qvi) return run_problem(target, ProblemKind::qvi, ov, std::cout, std::cerr);
  return run_verify_dir(target, ov, std::cout, std::cerr);
}
