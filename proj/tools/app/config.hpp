#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovi/assembly.hpp"
#include "ovi/membranes.hpp"
#include "ovi/obstacle.hpp"
#include "ovi/qvi.hpp"

namespace ovi::app {

// Any problem with the configuration file. what() already carries the path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { none, obstacle, membranes, qvi };
std::string to_string(ProblemKind k);

// Command-line values that take precedence over the file.
struct Overrides {
  std::optional<Scheme> scheme;
  std::optional<double> tol;
  std::optional<std::filesystem::path> out;
  std::optional<double> epsilon;  // membranes: switch to the penalized solver
};

struct QviConstants {
  // Either absolute N x N matrices or multiples of lambda0, resolved at run time.
  std::vector<std::vector<double>> phi, psi;
  bool phi_relative = false, psi_relative = false;
};

struct RunConfig {
  std::filesystem::path path;
  GridPtr grid;
  StructuralPtr function;
  Scheme scheme = Scheme::edge;
  ProblemKind kind = ProblemKind::none;

  ObstacleProblem obstacle{};
  MembraneSystem membranes{};
  std::optional<double> epsilon;
  std::vector<Field> qvi_fs;
  QviConstants qvi_constants;
  QviOptions qvi_options{};

  SolverOptions solver{};
  std::filesystem::path out_dir;
  bool emit_energy_trace = false;
  std::vector<std::string> verify;
  std::optional<double> verify_tol;

  DiscreteOperator make_operator() const;
  // Default verification tolerance: 1e3 * tol on the edge scheme, 1e-2 on p1.
  double ls_tolerance() const;
};

// Field sources: a number, "const:c", "zero", "inf", "-inf", "parabola[:amp]",
// "sine[:amp]", "linear:a:b" (a + (b - a) x), or a CSV path relative to `base`.
Field parse_field(const nlohmann::json& spec, const GridPtr& grid, const std::filesystem::path& base);

StructuralPtr parse_function(const nlohmann::json& spec, const GridPtr& grid, const std::filesystem::path& base);
GridPtr parse_grid(const nlohmann::json& spec);

// Throws ConfigError with "<path>: <reason>".
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace ovi::app
