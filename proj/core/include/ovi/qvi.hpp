#pragma once

#include <vector>

#include "ovi/assembly.hpp"
#include "ovi/solver.hpp"

namespace ovi {

// Implicit two-obstacle system: u_i between
//   Psi_i(u) = max_{j != i} (u_j - psi_ij)  and  Phi_i(u) = min_{j != i} (u_j + phi_ij).
struct QviProblem {
  std::vector<Field> fs;
  std::vector<std::vector<double>> phi;  // N x N, diagonal ignored, off-diagonal > 0
  std::vector<std::vector<double>> psi;

  std::size_t size() const noexcept { return fs.size(); }
  void validate(const GridPtr& grid) const;
  // Same constant for every off-diagonal pair.
  static QviProblem uniform(std::vector<Field> fs, double phi, double psi);
};

struct ExtremalSeeds {
  Field lower;  // A u = min_i f_i
  Field upper;  // A u = max_i f_i
  double lambda0 = 0.0;  // max(upper) - min(lower)
  SolveReport lower_report;
  SolveReport upper_report;
};

ExtremalSeeds extremal_seeds(const DiscreteOperator& op, const std::vector<Field>& fs, const SolverOptions& opts = {});

// phi_ij + psi_ik >= lambda0 for all i and j, k != i.
bool check_compatibility(const QviProblem& prob, double lambda0);

struct ImplicitObstacles {
  std::vector<Field> lower;  // Psi_i
  std::vector<Field> upper;  // Phi_i
};

ImplicitObstacles obstacles_from(const std::vector<Field>& v, const QviProblem& prob);

struct SigmaResult {
  std::vector<Field> w;
  bool converged = true;
  int inner_iterations = 0;
};

// N independent two-obstacle solves with obstacles frozen at v. Throws
// InfeasibleError naming the node if some K_i(v) is empty.
SigmaResult sigma_map(const DiscreteOperator& op, const QviProblem& prob, const std::vector<Field>& v,
                      const SolverOptions& inner);

struct QviOptions {
  double tol = 1e-6;     // outer sup-norm stopping tolerance
  int max_outer = 200;
  Method method = Method::newton;
  int max_inner_iter = 200000;
  // Inner obstacle solves run at tol / inner_ratio.
  double inner_ratio = 100.0;
};

struct QviReport {
  double lambda0 = 0.0;
  bool compatible = false;
  int iterates = 0;  // max of descending/ascending outer counts
  int descending_iterations = 0;
  int ascending_iterations = 0;
  std::vector<Field> max_solution;
  std::vector<Field> min_solution;
  std::vector<double> descending_deltas;  // sup-norm change per outer step
  std::vector<double> ascending_deltas;
  double fixedpoint_residual = 0.0;  // max over both limits of ||sigma(u) - u||
  double max_monotonicity_violation = 0.0;  // worst increase/decrease against the expected direction
  double band_violation = 0.0;  // worst excursion outside [lower seed, upper seed]
  bool monotone = false;
  bool ordering_ok = false;  // min_solution <= max_solution + tol
  bool converged = false;
  ExtremalSeeds seeds;
};

// Throws InvalidArgument when the constants are incompatible with lambda0.
QviReport solve_qvi(const DiscreteOperator& op, const QviProblem& prob, const QviOptions& opts = {});

// Runs sigma from an arbitrary start for `iterations` steps (or until the
// change drops below tol) and returns the last iterate.
std::vector<Field> iterate_sigma(const DiscreteOperator& op, const QviProblem& prob, std::vector<Field> start,
                                 const QviOptions& opts, int iterations);

}  // namespace ovi
