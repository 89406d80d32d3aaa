#pragma once

#include <Eigen/Sparse>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ovi/mesh.hpp"
#include "ovi/solver.hpp"
#include "ovi/young.hpp"

namespace ovi {

enum class Scheme { edge, p1 };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

// Nodal densities on interior nodes: r_i = <A u, e_i> / m_i.
struct DualField {
  GridPtr grid;
  std::vector<double> values;  // indexed by interior index

  double sup_norm() const noexcept;
  // Scatter into a full nodal field (zero on the boundary).
  Field to_field() const;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

// Discrete counterpart of A u = -div(a(x, |grad u|) grad u) on a structured
// grid. The `edge` scheme sums w_e G(x_e, |u_i - u_j| / h) over grid edges and
// is T-monotone for every structural function; the `p1` scheme is the
// one-point P1 quadrature of int G(x, |grad u|).
class DiscreteOperator {
 public:
  DiscreteOperator(GridPtr grid, YoungFunction yf, Scheme scheme);

  const GridPtr& grid() const noexcept { return grid_; }
  const YoungFunction& young() const noexcept { return yf_; }
  Scheme scheme() const noexcept { return scheme_; }
  // Lumped masses of the interior nodes, by interior index.
  std::span<const double> interior_masses() const noexcept { return masses_; }

  // J_h(u). Throws EvaluationError naming the offending edge/element.
  double internal_energy(const Field& u) const;
  // F_h(u) = J_h(u) - sum_i m_i f_i u_i over interior nodes.
  double energy(const Field& u, const Field& f) const;
  // dJ_h / du_i for interior i (not divided by masses).
  void internal_gradient(const Field& u, std::span<double> out) const;
  // Hessian of J_h restricted to interior nodes (a at least kGradientFloor).
  // With secant_floor the curvature along each gradient direction is
  // max(g'(t), a(t)): the Newton model used by the solver. For p < 2 near
  // t = 0 the exact Newton step overshoots to the mirror point.
  SparseMatrix internal_hessian(const Field& u, bool secant_floor = false) const;

  DualField apply(const Field& u) const;
  DualField residual(const Field& u, const Field& f) const;

  // Scatter interior values into a field that is zero on the boundary.
  Field from_interior(std::span<const double> x) const;
  std::vector<double> to_interior(const Field& u) const;

 private:
  GridPtr grid_;
  YoungFunction yf_;
  Scheme scheme_;
  std::vector<double> masses_;
};

// F_h(u; f) as an Objective over the interior values.
class FieldEnergy final : public Objective {
 public:
  FieldEnergy(const DiscreteOperator& op, Field f);
  std::size_t size() const override { return op_.interior_masses().size(); }
  std::span<const double> metric() const override { return op_.interior_masses(); }
  double value(std::span<const double> x) const override;
  double value_scale(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> g) const override;
  SparseMatrix hessian(std::span<const double> x) const override;

 private:
  const DiscreteOperator& op_;
  Field f_;
};

// Unconstrained minimization of F_h, i.e. A_h u = f on interior nodes.
SolveResult solve_equation(const DiscreteOperator& op, const Field& f, const SolverOptions& opts = {});

}  // namespace ovi
