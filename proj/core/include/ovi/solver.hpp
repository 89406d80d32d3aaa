#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ovi/mesh.hpp"

namespace ovi {

enum class Method {
  newton,    // projected Newton with Armijo search along the projection arc
  gradient,  // projected gradient, Barzilai-Borwein steps, Armijo backtracking
};

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct SolverOptions {
  double tol = 1e-8;  // sup-norm of the projected residual density
  int max_iter = 200000;
  Method method = Method::newton;
  bool record_energy = false;
};

struct SolveReport {
  std::string scheme;
  std::string method;
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> energy_trace;
  bool converged = false;
};

struct SolveResult {
  Field u;
  SolveReport report;
};

// Smooth convex objective on R^n. `metric` holds positive weights m_i so that
// g_i / m_i is a density; residuals and steps are measured in that metric.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t size() const = 0;
  virtual std::span<const double> metric() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  // Magnitude of the terms summed in value(); sets the round-off floor of
  // the sufficient-decrease test.
  virtual double value_scale(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> g) const = 0;
  // Symmetric positive semidefinite curvature model for the Newton step: the
  // Hessian or a majorant of it.
  virtual Eigen::SparseMatrix<double> hessian(std::span<const double> x) const = 0;
};

// Per-variable bounds; +-infinity when absent.
struct BoxBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

// Euclidean projection applied in place (used by the projected gradient).
using Projection = std::function<void(std::span<double>)>;

struct MinimizeResult {
  std::vector<double> x;
  SolveReport report;
};

// Minimizes over the box. Newton: Bertsekas-style projected Newton; the
// Hessian is only used on the free variables.
MinimizeResult minimize_box(const Objective& obj, const BoxBounds& box, std::vector<double> x0,
                            const SolverOptions& opts);

// Projected gradient for an arbitrary convex set given by its projection.
MinimizeResult minimize_projected_gradient(const Objective& obj, const Projection& project,
                                           std::vector<double> x0, const SolverOptions& opts);

}  // namespace ovi
