#include "ovi/qvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ovi/errors.hpp"
#include "ovi/obstacle.hpp"

namespace ovi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double vector_distance(const std::vector<Field>& a, const std::vector<Field>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, sup_distance(a[i], b[i]));
  return d;
}

SolverOptions inner_options(const QviOptions& opts) {
  SolverOptions s;
  s.tol = opts.tol / opts.inner_ratio;
  s.max_iter = opts.max_inner_iter;
  s.method = opts.method;
  return s;
}

}  // namespace

void QviProblem::validate(const GridPtr& grid) const {
  const std::size_t N = fs.size();
  if (N < 2) throw InvalidArgument("qvi needs N >= 2");
  if (phi.size() != N || psi.size() != N) throw InvalidArgument("qvi constant matrices must be N x N");
  const Field ref(grid);
  for (std::size_t i = 0; i < N; ++i) {
    require_same_grid(fs[i], ref);
    if (!fs[i].all_finite()) throw InvalidArgument("qvi forcing must be finite");
    if (phi[i].size() != N || psi[i].size() != N) throw InvalidArgument("qvi constant matrices must be N x N");
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      if (!(phi[i][j] > 0.0) || !(psi[i][j] > 0.0)) {
        std::ostringstream os;
        os << "qvi constants must be positive (phi[" << i << "][" << j << "]=" << phi[i][j] << ", psi[" << i << "]["
           << j << "]=" << psi[i][j] << ")";
        throw InvalidArgument(os.str());
      }
    }
  }
}

QviProblem QviProblem::uniform(std::vector<Field> fs, double phi, double psi) {
  const std::size_t N = fs.size();
  QviProblem p;
  p.fs = std::move(fs);
  p.phi.assign(N, std::vector<double>(N, phi));
  p.psi.assign(N, std::vector<double>(N, psi));
  return p;
}

ExtremalSeeds extremal_seeds(const DiscreteOperator& op, const std::vector<Field>& fs, const SolverOptions& opts) {
  if (fs.empty()) throw InvalidArgument("extremal_seeds: no forcing terms");
  Field mu = fs.front(), nu = fs.front();
  for (const Field& f : fs) {
    mu = lattice_min(mu, f);
    nu = lattice_max(nu, f);
  }
  SolveResult lo = solve_equation(op, mu, opts);
  SolveResult hi = solve_equation(op, nu, opts);
  if (!lo.report.converged || !hi.report.converged) throw Error("extremal_seeds: equation solve did not converge");
  ExtremalSeeds s{std::move(lo.u), std::move(hi.u), 0.0, std::move(lo.report), std::move(hi.report)};
  s.lambda0 = max_value(s.upper) - min_value(s.lower);
  return s;
}

bool check_compatibility(const QviProblem& prob, double lambda0) {
  const std::size_t N = prob.size();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k) {
        if (j == i || k == i) continue;
        if (prob.phi[i][j] + prob.psi[i][k] < lambda0) return false;
      }
  return true;
}

ImplicitObstacles obstacles_from(const std::vector<Field>& v, const QviProblem& prob) {
  const std::size_t N = prob.size();
  if (v.size() != N || N < 2) throw InvalidArgument("obstacles_from: need N >= 2 fields");
  ImplicitObstacles out;
  for (std::size_t i = 0; i < N; ++i) {
    Field lower(v[i].grid(), -kInf), upper(v[i].grid(), kInf);
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i) continue;
      lower = lattice_max(lower, v[j] - prob.psi[i][j]);
      upper = lattice_min(upper, v[j] + prob.phi[i][j]);
    }
    out.lower.push_back(std::move(lower));
    out.upper.push_back(std::move(upper));
  }
  return out;
}

SigmaResult sigma_map(const DiscreteOperator& op, const QviProblem& prob, const std::vector<Field>& v,
                      const SolverOptions& inner) {
  const ImplicitObstacles obs = obstacles_from(v, prob);
  SigmaResult out;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const ObstacleProblem sub{prob.fs[i], obs.lower[i], obs.upper[i]};
    try {
      sub.validate();
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("sigma map: K_" + std::to_string(i + 1) + "(v) is empty: " + e.what(), e.node());
    }
    // Warm start from the frozen iterate.
    SolveResult r = solve_two_obstacle(op, sub, inner, v[i]);
    out.converged = out.converged && r.report.converged;
    out.inner_iterations += r.report.iterations;
    out.w.push_back(std::move(r.u));
  }
  return out;
}

std::vector<Field> iterate_sigma(const DiscreteOperator& op, const QviProblem& prob, std::vector<Field> start,
                                 const QviOptions& opts, int iterations) {
  const SolverOptions inner = inner_options(opts);
  for (int m = 0; m < iterations; ++m) {
    SigmaResult next = sigma_map(op, prob, start, inner);
    const double delta = vector_distance(next.w, start);
    start = std::move(next.w);
    if (delta <= opts.tol) break;
  }
  return start;
}

QviReport solve_qvi(const DiscreteOperator& op, const QviProblem& prob, const QviOptions& opts) {
  prob.validate(op.grid());
  const SolverOptions inner = inner_options(opts);
  QviReport rep;
  rep.seeds = extremal_seeds(op, prob.fs, inner);
  rep.lambda0 = rep.seeds.lambda0;
  rep.compatible = check_compatibility(prob, rep.lambda0);
  if (!rep.compatible) {
    std::ostringstream os;
    os << "qvi constants incompatible: need phi_ij + psi_ik >= lambda0 = " << rep.lambda0;
    throw InvalidArgument(os.str());
  }

  const std::size_t N = prob.size();
  const Field& lo_seed = rep.seeds.lower;
  const Field& hi_seed = rep.seeds.upper;
  bool inner_ok = true;

  // direction = -1: descending from the upper seed, +1: ascending. The step
  // whose change is <= tol certifies the current iterate: its change is the
  // fixed-point residual and it is not counted as an iteration.
  const auto run = [&](const Field& seed, int direction, std::vector<double>& deltas, int& count) {
    std::vector<Field> cur(N, seed);
    count = 0;
    for (int step = 0; step <= opts.max_outer; ++step) {
      SigmaResult next = sigma_map(op, prob, cur, inner);
      inner_ok = inner_ok && next.converged;
      double delta = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t k = 0; k < cur[i].size(); ++k) {
          const double change = next.w[i][k] - cur[i][k];
          delta = std::max(delta, std::abs(change));
          rep.max_monotonicity_violation = std::max(rep.max_monotonicity_violation, direction * -change);
          rep.band_violation = std::max({rep.band_violation, lo_seed[k] - next.w[i][k], next.w[i][k] - hi_seed[k]});
        }
      }
      deltas.push_back(delta);
      if (delta <= opts.tol) {
        rep.fixedpoint_residual = std::max(rep.fixedpoint_residual, delta);
        return std::pair{std::move(cur), true};
      }
      if (step == opts.max_outer) break;
      cur = std::move(next.w);
      ++count;
    }
    rep.fixedpoint_residual = std::max(rep.fixedpoint_residual, deltas.back());
    return std::pair{std::move(cur), false};
  };

  auto [upper, down_done] = run(hi_seed, -1, rep.descending_deltas, rep.descending_iterations);
  auto [lower, up_done] = run(lo_seed, +1, rep.ascending_deltas, rep.ascending_iterations);
  rep.max_solution = std::move(upper);
  rep.min_solution = std::move(lower);
  rep.iterates = std::max(rep.descending_iterations, rep.ascending_iterations);
  rep.monotone = rep.max_monotonicity_violation <= opts.tol;

  double worst = -kInf;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < rep.min_solution[i].size(); ++k)
      worst = std::max(worst, rep.min_solution[i][k] - rep.max_solution[i][k]);
  rep.ordering_ok = worst <= opts.tol;
  rep.converged = down_done && up_done && inner_ok;
  return rep;
}

}  // namespace ovi
