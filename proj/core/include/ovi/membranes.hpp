#pragma once

#include <span>
#include <vector>

#include "ovi/assembly.hpp"
#include "ovi/solver.hpp"

namespace ovi {

// Euclidean projection of one node's values onto { v_1 >= ... >= v_N }:
// decreasing isotonic regression by pool-adjacent-violators, left to right,
// pooled blocks take their exact mean.
void project_ordered(std::span<double> values);

struct MembraneSystem {
  std::vector<Field> fs;  // N >= 2 forcing terms on one grid (N <= 16)

  std::size_t size() const noexcept { return fs.size(); }
  void validate(const GridPtr& grid) const;
};

struct MembraneResult {
  std::vector<Field> us;
  SolveReport report;
};

// Minimizes sum_i F_h(u_i; f_i) over u_1 >= ... >= u_N by projected gradient.
MembraneResult solve_membranes_vi(const DiscreteOperator& op, const MembraneSystem& sys,
                                  const SolverOptions& opts = {});

// xi_0 = max_i (f_1 + ... + f_i) / i, xi_i = i xi_0 - (f_1 + ... + f_i).
struct PenaltyCoefficients {
  Field xi0;
  std::vector<Field> xis;  // xi_1 .. xi_N
};

PenaltyCoefficients xi_coefficients(const std::vector<Field>& fs);

// Bounded penalization: 0 for s >= 0, s / eps on (-eps, 0), -1 below.
double theta_eps(double s, double eps);
// Convex antiderivative with Theta(0) = 0.
double Theta_eps(double s, double eps);

// Solves A u_i + xi_i theta(u_i - u_{i+1}) - xi_{i-1} theta(u_{i-1} - u_i) = f_i
// (u_0 = +inf, u_{N+1} = -inf) as the minimizer of the convex penalized energy.
MembraneResult solve_membranes_penalized(const DiscreteOperator& op, const MembraneSystem& sys, double eps,
                                         const SolverOptions& opts = {});

// Sup-norm density residual of the penalized system.
double penalized_residual(const DiscreteOperator& op, const MembraneSystem& sys, std::span<const Field> us,
                          double eps);

struct MembraneLSReport {
  std::vector<double> lower_violation;  // per membrane: max (min_{j<=i} f_j - A u_i)^+
  std::vector<double> upper_violation;  // per membrane: max (A u_i - max_{j>=i} f_j)^+
  double max_violation = 0.0;
  bool pass = false;
};

MembraneLSReport verify_ls_membranes(const DiscreteOperator& op, std::span<const Field> us,
                                     std::span<const Field> fs, double tol);

// max over nodes and i >= 2 of u_i - u_{i-1} (<= 0 when ordered).
double max_order_excess(std::span<const Field> us);

}  // namespace ovi
