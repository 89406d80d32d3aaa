#include "ovi/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ovi/errors.hpp"

namespace ovi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string node_label(const StructuredGrid& g, int node) {
  const Point p = g.position(node);
  std::ostringstream os;
  os << "node " << node << " (x=" << p.x;
  if (g.dim() == 2) os << ", y=" << p.y;
  os << ")";
  return os.str();
}

}  // namespace

ObstacleProblem ObstacleProblem::lower(Field f, Field psi) {
  Field phi(f.grid(), kInf);
  return {std::move(f), std::move(psi), std::move(phi)};
}

ObstacleProblem ObstacleProblem::upper(Field f, Field phi) {
  Field psi(f.grid(), -kInf);
  return {std::move(f), std::move(psi), std::move(phi)};
}

ObstacleProblem ObstacleProblem::unconstrained(Field f) {
  Field psi(f.grid(), -kInf);
  Field phi(f.grid(), kInf);
  return {std::move(f), std::move(psi), std::move(phi)};
}

void ObstacleProblem::validate() const {
  require_same_grid(f, psi);
  require_same_grid(f, phi);
  if (!f.all_finite()) throw InvalidArgument("forcing term must be finite");
  const StructuredGrid& g = *f.grid();
  for (int k = 0; k < g.node_count(); ++k) {
    if (std::isnan(psi[k]) || std::isnan(phi[k]))
      throw InfeasibleError("obstacle is NaN at " + node_label(g, k), k);
    if (psi[k] == kInf || phi[k] == -kInf)
      throw InfeasibleError("obstacle excludes every value at " + node_label(g, k), k);
    if (g.on_boundary(k)) {
      if (psi[k] > 0.0 || phi[k] < 0.0) {
        std::ostringstream os;
        os << "obstacles inadmissible on the boundary at " << node_label(g, k) << ": psi=" << psi[k]
           << ", phi=" << phi[k] << " (need psi <= 0 <= phi)";
        throw InfeasibleError(os.str(), k);
      }
    } else if (psi[k] > phi[k]) {
      std::ostringstream os;
      os << "lower obstacle above upper obstacle at " << node_label(g, k) << ": psi=" << psi[k]
         << " > phi=" << phi[k];
      throw InfeasibleError(os.str(), k);
    }
  }
}

Field project_box(const Field& u, const ObstacleProblem& prob) {
  require_same_grid(u, prob.psi);
  require_same_grid(u, prob.phi);
  const StructuredGrid& g = *u.grid();
  Field out(u.grid());
  for (int k = 0; k < g.node_count(); ++k) {
    if (g.on_boundary(k)) continue;
    if (prob.psi[k] > prob.phi[k])
      throw InfeasibleError("lower obstacle above upper obstacle at " + node_label(g, k), k);
    out[k] = std::clamp(u[k], prob.psi[k], prob.phi[k]);
  }
  return out;
}

SolveResult solve_two_obstacle(const DiscreteOperator& op, const ObstacleProblem& prob, const SolverOptions& opts,
                               const std::optional<Field>& start) {
  prob.validate();
  require_same_grid(prob.f, Field(op.grid()));
  FieldEnergy energy(op, prob.f);
  BoxBounds box{op.to_interior(prob.psi), op.to_interior(prob.phi)};
  const Field u0 = project_box(start ? *start : Field(op.grid()), prob);
  MinimizeResult r = minimize_box(energy, box, op.to_interior(u0), opts);
  r.report.scheme = to_string(op.scheme());
  return {op.from_interior(r.x), std::move(r.report)};
}

SolveResult solve_one_obstacle(const DiscreteOperator& op, const Field& f, const Field& obstacle, Side side,
                               const SolverOptions& opts) {
  const ObstacleProblem prob = side == Side::lower ? ObstacleProblem::lower(f, obstacle)
                                                   : ObstacleProblem::upper(f, obstacle);
  return solve_two_obstacle(op, prob, opts);
}

std::vector<double> obstacle_density(const DiscreteOperator& op, const Field& obstacle) {
  const StructuredGrid& g = *op.grid();
  if (obstacle.all_finite()) return op.apply(obstacle).values;

  Field finite = obstacle;
  for (double& v : finite.values())
    if (!std::isfinite(v)) v = 0.0;
  std::vector<double> out = op.apply(finite).values;

  // Sign of the limit at i: A_h at i grows with u_i - u_j, so a -inf
  // neighbour drives it to +inf and a +inf neighbour to -inf.
  std::vector<int> pushed(g.node_count(), 0);
  const auto couple = [&](std::span<const int> nodes) {
    for (int a : nodes) {
      if (!std::isfinite(obstacle[a])) continue;
      for (int b : nodes) {
        if (std::isfinite(obstacle[b])) continue;
        pushed[a] |= obstacle[b] < 0.0 ? 1 : 2;
      }
    }
  };
  if (op.scheme() == Scheme::edge) {
    for (const Edge& e : g.edges()) {
      const int nodes[2] = {e.a, e.b};
      couple(nodes);
    }
  } else {
    for (const Element& e : g.elements()) couple(std::span<const int>(e.nodes.data(), e.vertex_count));
  }
  const auto interior = g.interior_nodes();
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const int k = interior[i];
    if (!std::isfinite(obstacle[k])) {
      out[i] = kNaN;
    } else if (pushed[k] == 1) {
      out[i] = kInf;
    } else if (pushed[k] == 2) {
      out[i] = -kInf;
    } else if (pushed[k] == 3) {
      out[i] = kNaN;
    }
  }
  return out;
}

LSReport verify_lewy_stampacchia(const DiscreteOperator& op, const Field& u, const ObstacleProblem& prob, double tol) {
  const DualField Au = op.apply(u);
  const std::vector<double> Aphi = obstacle_density(op, prob.phi);
  const std::vector<double> Apsi = obstacle_density(op, prob.psi);
  const auto interior = op.grid()->interior_nodes();
  LSReport rep;
  double worst = -1.0;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const double f = prob.f[interior[i]];
    // NaN comparisons fall back to f through std::min/max argument order.
    const double lower = std::isnan(Aphi[i]) ? f : std::min(f, Aphi[i]);
    const double upper = std::isnan(Apsi[i]) ? f : std::max(f, Apsi[i]);
    const double lv = std::max(lower - Au.values[i], 0.0);
    const double uv = std::max(Au.values[i] - upper, 0.0);
    rep.lower_violation = std::max(rep.lower_violation, lv);
    rep.upper_violation = std::max(rep.upper_violation, uv);
    if (std::max(lv, uv) > worst) {
      worst = std::max(lv, uv);
      rep.worst_node = interior[i];
    }
  }
  rep.pass = rep.lower_violation <= tol && rep.upper_violation <= tol;
  return rep;
}

ComparisonReport verify_comparison(const DiscreteOperator& op, const ObstacleProblem& data,
                                   const ObstacleProblem& data_hat, const SolverOptions& opts, double tol) {
  ComparisonReport rep;
  rep.data_ordered = true;
  const auto interior = op.grid()->interior_nodes();
  for (int k : interior) {
    if (data.f[k] < data_hat.f[k] || data.psi[k] < data_hat.psi[k] || data.phi[k] < data_hat.phi[k])
      rep.data_ordered = false;
  }
  const SolveResult a = solve_two_obstacle(op, data, opts);
  const SolveResult b = solve_two_obstacle(op, data_hat, opts);
  rep.converged = a.report.converged && b.report.converged;
  rep.min_gap = kInf;
  for (int k : interior) rep.min_gap = std::min(rep.min_gap, a.u[k] - b.u[k]);
  rep.pass = rep.data_ordered && rep.converged && rep.min_gap >= -tol;
  return rep;
}

double obstacle_distance(const Field& a, const Field& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (int k : a.grid()->interior_nodes()) {
    if (a[k] == b[k]) continue;
    m = std::max(m, std::abs(a[k] - b[k]));
  }
  return m;
}

LinfReport verify_linf_dependence(const DiscreteOperator& op, const ObstacleProblem& prob,
                                  const ObstacleProblem& prob_hat, const SolverOptions& opts, double tol) {
  if (sup_distance(prob.f, prob_hat.f) != 0.0)
    throw InvalidArgument("L-infinity dependence check needs the same forcing term");
  LinfReport rep;
  rep.data_gap = std::max(obstacle_distance(prob.phi, prob_hat.phi), obstacle_distance(prob.psi, prob_hat.psi));
  const SolveResult a = solve_two_obstacle(op, prob, opts);
  const SolveResult b = solve_two_obstacle(op, prob_hat, opts);
  rep.converged = a.report.converged && b.report.converged;
  rep.solution_gap = sup_distance(a.u, b.u);
  rep.pass = rep.converged && rep.solution_gap <= rep.data_gap + tol;
  return rep;
}

}  // namespace ovi
