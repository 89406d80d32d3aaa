#pragma once

#include <optional>
#include <string>

#include "ovi/assembly.hpp"
#include "ovi/mesh.hpp"
#include "ovi/solver.hpp"

namespace ovi {

// Find u in K = { psi <= u <= phi, u = 0 on the boundary } minimizing F_h.
// Absent obstacles are encoded as -inf (psi) / +inf (phi) node values.
struct ObstacleProblem {
  Field f;
  Field psi;
  Field phi;

  // Lower obstacle only (phi = +inf) or upper obstacle only (psi = -inf).
  static ObstacleProblem lower(Field f, Field psi);
  static ObstacleProblem upper(Field f, Field phi);
  static ObstacleProblem unconstrained(Field f);

  // Throws InfeasibleError naming the first node with psi > phi (interior)
  // or psi > 0 / phi < 0 (boundary), and GridError on grid mismatch.
  void validate() const;
};

enum class Side { lower, upper };

// Nodewise median(psi, u, phi) on interior nodes, zero on the boundary.
Field project_box(const Field& u, const ObstacleProblem& prob);

SolveResult solve_two_obstacle(const DiscreteOperator& op, const ObstacleProblem& prob,
                               const SolverOptions& opts = {}, const std::optional<Field>& start = std::nullopt);

SolveResult solve_one_obstacle(const DiscreteOperator& op, const Field& f, const Field& obstacle, Side side,
                               const SolverOptions& opts = {});

// Densities of A_h on an obstacle. Nodes whose obstacle value is infinite
// get NaN ("absent"); nodes with an infinite neighbour get the signed
// infinite limit.
std::vector<double> obstacle_density(const DiscreteOperator& op, const Field& obstacle);

struct LSReport {
  double lower_violation = 0.0;  // max (f ^ A phi - A u)^+
  double upper_violation = 0.0;  // max (A u - f v A psi)^+
  int worst_node = -1;
  bool pass = false;
};

// Checks f ^ A_h phi <= A_h u <= f v A_h psi on interior nodes; with an
// absent obstacle the corresponding bound reduces to f.
LSReport verify_lewy_stampacchia(const DiscreteOperator& op, const Field& u, const ObstacleProblem& prob,
                                 double tol);

struct ComparisonReport {
  double min_gap = 0.0;  // min_i (u_i - u_hat_i)
  bool data_ordered = false;
  bool converged = false;
  bool pass = false;
};

// Solves for (f, psi, phi) >= (f_hat, psi_hat, phi_hat) and checks u >= u_hat - tol.
ComparisonReport verify_comparison(const DiscreteOperator& op, const ObstacleProblem& data,
                                   const ObstacleProblem& data_hat, const SolverOptions& opts, double tol);

struct LinfReport {
  double solution_gap = 0.0;  // ||u - u_hat||_inf
  double data_gap = 0.0;      // ||phi - phi_hat|| v ||psi - psi_hat||
  bool converged = false;
  bool pass = false;
};

LinfReport verify_linf_dependence(const DiscreteOperator& op, const ObstacleProblem& prob,
                                  const ObstacleProblem& prob_hat, const SolverOptions& opts, double tol);

// Obstacle difference in sup norm treating equal infinities as zero gap.
double obstacle_distance(const Field& a, const Field& b);

}  // namespace ovi
