#pragma once
// Independent reference computations. Nothing here calls into the solver
// code paths it is used to check.

#include <functional>
#include <random>
#include <vector>

namespace oracle {

// Composite Simpson rule with `panels` (even) subintervals.
double simpson(const std::function<double(double)>& fn, double a, double b, long panels);

// Solves a tridiagonal system (Thomas algorithm). sub[0] and sup[n-1] unused.
std::vector<double> tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                                std::vector<double> rhs);

// p = 2, 1D, h uniform, interior unknowns only: -(u_{i-1} - 2u_i + u_{i+1}) / h^2 = f_i.
std::vector<double> laplace_1d(double h, const std::vector<double>& f);

// Exhaustive KKT enumeration for the p = 2 1D two-obstacle problem. Each
// interior node is free, on psi or on phi (infinite bounds are skipped).
// Returns interior values.
std::vector<double> two_obstacle_enumeration(double h, const std::vector<double>& f, const std::vector<double>& psi,
                                             const std::vector<double>& phi);

// Contact-pattern enumeration for two p = 2 membranes u1 >= u2 in 1D.
struct MembranePair {
  std::vector<double> u1, u2;
};
MembranePair membrane_pair_enumeration(double h, const std::vector<double>& f1, const std::vector<double>& f2);

// Damped Newton on the 1D nodal equations of the edge scheme with
// a = t^{p-2}: (g(D_-u) - g(D_+u)) / h = f, g(s) = |s|^{p-2} s. Dense.
std::vector<double> power_newton_1d(double p, double h, const std::vector<double>& f, double tol = 1e-13);

// Euclidean projection onto {v_1 >= ... >= v_N} by scanning every partition
// into consecutive blocks.
std::vector<double> ordered_projection_bruteforce(const std::vector<double>& v);

// Random helpers with a fixed engine type.
using Rng = std::mt19937_64;
double uniform(Rng& rng, double lo, double hi);

}  // namespace oracle
