#include "ovi/solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ovi/errors.hpp"

namespace ovi {

std::string to_string(Method m) { return m == Method::newton ? "newton" : "gradient"; }

Method parse_method(const std::string& name) {
  if (name == "newton") return Method::newton;
  if (name == "gradient") return Method::gradient;
  throw InvalidArgument("unknown solver method '" + name + "' (expected newton|gradient)");
}

namespace {

constexpr double kArmijo = 1e-4;
// Degenerate Hessians (p > 2 near a flat iterate) give huge Newton steps.
constexpr int kMaxBacktracks = 200;
constexpr double kRoundoff = 32.0 * std::numeric_limits<double>::epsilon();

double projected_residual(std::span<const double> x, std::span<const double> g, std::span<const double> m,
                          const Projection& project) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - g[i] / m[i];
  project(y);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(x[i] - y[i]));
  return r;
}

// Shared iteration state.
struct State {
  std::vector<double> x;
  std::vector<double> g;
  double value = 0.0;
  double residual = 0.0;
};

class Driver {
 public:
  Driver(const Objective& obj, Projection project, const SolverOptions& opts)
      : obj_(obj), project_(std::move(project)), opts_(opts), m_(obj.metric()) {}

  State init(std::vector<double> x0) {
    if (x0.size() != obj_.size()) throw InvalidArgument("initial point has wrong size");
    State s;
    s.x = std::move(x0);
    project_(s.x);
    refresh(s);
    return s;
  }

  void refresh(State& s) const {
    s.value = obj_.value(s.x);
    s.g.assign(s.x.size(), 0.0);
    obj_.gradient(s.x, s.g);
    s.residual = projected_residual(s.x, s.g, m_, project_);
  }

  // Searches along alpha -> P(x + alpha d). Returns true and updates `s` on
  // sufficient decrease. Within round-off of the objective the step is
  // accepted only if it also lowers the projected residual.
  bool search(State& s, std::span<const double> d, double alpha0 = 1.0) const {
    const double slack = kRoundoff * obj_.value_scale(s.x);
    State trial;
    double alpha = alpha0;
    for (int k = 0; k < kMaxBacktracks; ++k, alpha *= 0.5) {
      trial.x.resize(s.x.size());
      for (std::size_t i = 0; i < s.x.size(); ++i) trial.x[i] = s.x[i] + alpha * d[i];
      project_(trial.x);
      double dec = 0.0;
      bool moved = false;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double step = trial.x[i] - s.x[i];
        dec += s.g[i] * step;
        moved = moved || step != 0.0;
      }
      if (!moved) return false;
      if (dec >= 0.0) continue;
      const double fv = obj_.value(trial.x);
      if (fv <= s.value + kArmijo * dec) {
        refresh(trial);
        s = std::move(trial);
        return true;
      }
      if (fv <= s.value + kArmijo * dec + slack) {
        refresh(trial);
        if (trial.residual < s.residual) {
          s = std::move(trial);
          return true;
        }
      }
    }
    return false;
  }

  const Objective& obj_;
  Projection project_;
  const SolverOptions& opts_;
  std::span<const double> m_;
};

MinimizeResult run_gradient(const Objective& obj, Projection project, std::vector<double> x0,
                            const SolverOptions& opts) {
  Driver drv(obj, std::move(project), opts);
  const auto m = obj.metric();
  State s = drv.init(std::move(x0));
  MinimizeResult out;
  out.report.method = to_string(Method::gradient);
  if (opts.record_energy) out.report.energy_trace.push_back(s.value);

  double step = 1.0;
  std::vector<double> d(s.x.size());
  int iter = 0;
  for (; iter < opts.max_iter && s.residual > opts.tol; ++iter) {
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = -s.g[i] / m[i];
    State prev = s;
    if (!drv.search(s, d, step)) break;
    double sms = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double dx = s.x[i] - prev.x[i];
      sms += m[i] * dx * dx;
      sy += dx * (s.g[i] - prev.g[i]);
    }
    step = sy > 0.0 ? sms / sy : 2.0 * step;
    step = std::clamp(step, 1e-14, 1e14);
    if (opts.record_energy) out.report.energy_trace.push_back(s.value);
  }
  out.report.iterations = iter;
  out.report.final_residual = s.residual;
  out.report.converged = s.residual <= opts.tol;
  out.x = std::move(s.x);
  return out;
}

}  // namespace

MinimizeResult minimize_projected_gradient(const Objective& obj, const Projection& project, std::vector<double> x0,
                                           const SolverOptions& opts) {
  return run_gradient(obj, project, std::move(x0), opts);
}

MinimizeResult minimize_box(const Objective& obj, const BoxBounds& box, std::vector<double> x0,
                            const SolverOptions& opts) {
  const std::size_t n = obj.size();
  if (box.lower.size() != n || box.upper.size() != n) throw InvalidArgument("box bounds have wrong size");
  for (std::size_t i = 0; i < n; ++i)
    if (box.lower[i] > box.upper[i]) throw InfeasibleError("empty box at variable " + std::to_string(i), static_cast<int>(i));

  Projection clamp = [&box](std::span<double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], box.lower[i], box.upper[i]);
  };
  if (opts.method == Method::gradient) return run_gradient(obj, clamp, std::move(x0), opts);

  Driver drv(obj, clamp, opts);
  const auto m = obj.metric();
  State s = drv.init(std::move(x0));
  MinimizeResult out;
  out.report.method = to_string(Method::newton);
  if (opts.record_energy) out.report.energy_trace.push_back(s.value);

  std::vector<int> free_index(n);
  std::vector<double> d(n);
  int iter = 0;
  for (; iter < opts.max_iter && s.residual > opts.tol; ++iter) {
    const Eigen::SparseMatrix<double> H = obj.hessian(s.x);
    // Diagonal scaling for the active part of the step; the active-set
    // threshold is measured in the same metric.
    std::vector<double> diag(n);
    double scaled_residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag[i] = std::max(H.coeff(i, i), 1e-12 * m[i]);
      const double y = std::clamp(s.x[i] - s.g[i] / diag[i], box.lower[i], box.upper[i]);
      scaled_residual = std::max(scaled_residual, std::abs(y - s.x[i]));
    }
    const double eps = std::min(scaled_residual, 1e-2);
    int nfree = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = box.lower[i], hi = box.upper[i];
      const bool active = lo == hi || (s.x[i] <= lo + eps && s.g[i] > 0.0) || (s.x[i] >= hi - eps && s.g[i] < 0.0);
      free_index[i] = active ? -1 : nfree++;
      d[i] = active ? -s.g[i] / diag[i] : 0.0;
    }

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (free_index[i] >= 0) scale = std::max(scale, H.coeff(i, i) / m[i]);

    bool have_newton = false;
    if (nfree > 0) {
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(H.nonZeros());
      for (int k = 0; k < H.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(H, k); it; ++it) {
          const int r = free_index[it.row()], c = free_index[it.col()];
          if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
      }
      Eigen::VectorXd rhs(nfree);
      for (std::size_t i = 0; i < n; ++i)
        if (free_index[i] >= 0) rhs[free_index[i]] = -s.g[i];
      double lambda = 1e-10 * std::max(scale, 1e-300);
      for (int attempt = 0; attempt < 12 && !have_newton; ++attempt, lambda *= 100.0) {
        Eigen::SparseMatrix<double> Hf(nfree, nfree);
        Hf.setFromTriplets(trip.begin(), trip.end());
        for (std::size_t i = 0; i < n; ++i)
          if (free_index[i] >= 0) Hf.coeffRef(free_index[i], free_index[i]) += lambda * m[i];
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hf);
        if (ldlt.info() != Eigen::Success) continue;
        if ((ldlt.vectorD().array() <= 0.0).any()) continue;
        const Eigen::VectorXd sol = ldlt.solve(rhs);
        if (ldlt.info() != Eigen::Success || !sol.allFinite()) continue;
        for (std::size_t i = 0; i < n; ++i)
          if (free_index[i] >= 0) d[i] = sol[free_index[i]];
        have_newton = true;
      }
    }

    bool ok = have_newton || nfree == 0 ? drv.search(s, d) : false;
    if (!ok) {
      // Scaled gradient fallback; 1/scale estimates the largest stable step.
      for (std::size_t i = 0; i < n; ++i) d[i] = -s.g[i] / m[i];
      ok = drv.search(s, d, scale > 1e-8 ? 1.0 / scale : 1.0);
    }
    if (!ok) break;
    if (opts.record_energy) out.report.energy_trace.push_back(s.value);
  }
  out.report.iterations = iter;
  out.report.final_residual = s.residual;
  out.report.converged = s.residual <= opts.tol;
  out.x = std::move(s.x);
  return out;
}

}  // namespace ovi
