#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace ovi::app {

enum ExitCode : int { kOk = 0, kConfigError = 1, kVerificationFailed = 2, kNotConverged = 3 };

// Verifier names per problem kind; an empty config list selects all of them.
std::vector<std::string> available_verifiers(ProblemKind kind);

// Structural check only; needs the operator (and grid) blocks.
int run_check_operator(const std::filesystem::path& config, const Overrides& ov, std::ostream& out,
                       std::ostream& err);

// Solves the problem in `config`. When `expected` is not none the problem
// block must match it.
int run_problem(const std::filesystem::path& config, ProblemKind expected, const Overrides& ov, std::ostream& out,
                std::ostream& err);

// Runs every *.json (and */config.json) under `dir` with the full verifier set.
int run_verify_dir(const std::filesystem::path& dir, const Overrides& ov, std::ostream& out, std::ostream& err);

}  // namespace ovi::app
