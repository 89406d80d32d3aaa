#include "ovi/membranes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ovi/errors.hpp"

namespace ovi {

void project_ordered(std::span<double> values) {
  const std::size_t n = values.size();
  if (n < 2) return;
  std::vector<double> sum;
  std::vector<std::size_t> count;
  sum.reserve(n);
  count.reserve(n);
  for (double v : values) {
    sum.push_back(v);
    count.push_back(1);
    // Decreasing target: merge while the previous block mean is below the last.
    while (sum.size() > 1) {
      const std::size_t b = sum.size() - 1;
      if (sum[b - 1] / count[b - 1] >= sum[b] / count[b]) break;
      sum[b - 1] += sum[b];
      count[b - 1] += count[b];
      sum.pop_back();
      count.pop_back();
    }
  }
  std::size_t k = 0;
  for (std::size_t b = 0; b < sum.size(); ++b) {
    const double mean = sum[b] / count[b];
    for (std::size_t c = 0; c < count[b]; ++c) values[k++] = mean;
  }
}

void MembraneSystem::validate(const GridPtr& grid) const {
  if (fs.size() < 2) throw InvalidArgument("membrane system needs N >= 2");
  if (fs.size() > 16) throw InvalidArgument("membrane system supports N <= 16");
  const Field ref(grid);
  for (const Field& f : fs) {
    require_same_grid(f, ref);
    if (!f.all_finite()) throw InvalidArgument("membrane forcing must be finite");
  }
}

namespace {

// Stacked layout: variable i * n + k is membrane i at interior node k.
class MembraneEnergy final : public Objective {
 public:
  MembraneEnergy(const DiscreteOperator& op, const MembraneSystem& sys, double eps,
                 const PenaltyCoefficients* xi)
      : op_(op), eps_(eps), xi_(xi) {
    n_ = op.interior_masses().size();
    for (const Field& f : sys.fs) parts_.emplace_back(op, f);
    for (std::size_t i = 0; i < sys.size(); ++i)
      metric_.insert(metric_.end(), op.interior_masses().begin(), op.interior_masses().end());
    if (xi_) {
      for (std::size_t i = 0; i + 1 < sys.size(); ++i) xi_interior_.push_back(op.to_interior(xi_->xis[i]));
    }
  }

  std::size_t size() const override { return metric_.size(); }
  std::span<const double> metric() const override { return metric_; }

  double value(std::span<const double> x) const override {
    double v = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) v += parts_[i].value(block(x, i));
    return v + penalty(x, false);
  }

  double value_scale(std::span<const double> x) const override {
    double v = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) v += parts_[i].value_scale(block(x, i));
    return v + penalty(x, true);
  }

  void gradient(std::span<const double> x, std::span<double> g) const override {
    for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i].gradient(block(x, i), g.subspan(i * n_, n_));
    if (!xi_) return;
    const auto m = op_.interior_masses();
    for (std::size_t i = 0; i + 1 < parts_.size(); ++i) {
      for (std::size_t k = 0; k < n_; ++k) {
        const double t = m[k] * xi_interior_[i][k] * theta_eps(x[i * n_ + k] - x[(i + 1) * n_ + k], eps_);
        g[i * n_ + k] += t;
        g[(i + 1) * n_ + k] -= t;
      }
    }
  }

  SparseMatrix hessian(std::span<const double> x) const override {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      const SparseMatrix h = parts_[i].hessian(block(x, i));
      for (int c = 0; c < h.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(h, c); it; ++it)
          trip.emplace_back(static_cast<int>(i * n_) + it.row(), static_cast<int>(i * n_) + it.col(), it.value());
    }
    if (xi_) {
      const auto m = op_.interior_masses();
      for (std::size_t i = 0; i + 1 < parts_.size(); ++i) {
        for (std::size_t k = 0; k < n_; ++k) {
          const double s = x[i * n_ + k] - x[(i + 1) * n_ + k];
          if (!(s < 0.0 && s > -eps_)) continue;
          const double c = m[k] * xi_interior_[i][k] / eps_;
          const int a = static_cast<int>(i * n_ + k), b = static_cast<int>((i + 1) * n_ + k);
          trip.emplace_back(a, a, c);
          trip.emplace_back(b, b, c);
          trip.emplace_back(a, b, -c);
          trip.emplace_back(b, a, -c);
        }
      }
    }
    SparseMatrix H(size(), size());
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
  }

 private:
  std::span<const double> block(std::span<const double> x, std::size_t i) const { return x.subspan(i * n_, n_); }

  double penalty(std::span<const double> x, bool absolute) const {
    if (!xi_) return 0.0;
    const auto m = op_.interior_masses();
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < parts_.size(); ++i)
      for (std::size_t k = 0; k < n_; ++k) {
        const double t = m[k] * xi_interior_[i][k] * Theta_eps(x[i * n_ + k] - x[(i + 1) * n_ + k], eps_);
        v += absolute ? std::abs(t) : t;
      }
    return v;
  }

  const DiscreteOperator& op_;
  double eps_;
  const PenaltyCoefficients* xi_;
  std::size_t n_ = 0;
  std::vector<FieldEnergy> parts_;
  std::vector<double> metric_;
  std::vector<std::vector<double>> xi_interior_;
};

std::vector<Field> unstack(const DiscreteOperator& op, std::span<const double> x, std::size_t count) {
  const std::size_t n = op.interior_masses().size();
  std::vector<Field> us;
  for (std::size_t i = 0; i < count; ++i) us.push_back(op.from_interior(x.subspan(i * n, n)));
  return us;
}

}  // namespace

MembraneResult solve_membranes_vi(const DiscreteOperator& op, const MembraneSystem& sys, const SolverOptions& opts) {
  sys.validate(op.grid());
  MembraneEnergy energy(op, sys, 0.0, nullptr);
  const std::size_t n = op.interior_masses().size();
  const std::size_t N = sys.size();
  Projection ordered = [n, N](std::span<double> x) {
    std::vector<double> col(N);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < N; ++i) col[i] = x[i * n + k];
      project_ordered(col);
      for (std::size_t i = 0; i < N; ++i) x[i * n + k] = col[i];
    }
  };
  MinimizeResult r = minimize_projected_gradient(energy, ordered, std::vector<double>(n * N, 0.0), opts);
  r.report.scheme = to_string(op.scheme());
  return {unstack(op, r.x, N), std::move(r.report)};
}

PenaltyCoefficients xi_coefficients(const std::vector<Field>& fs) {
  if (fs.empty()) throw InvalidArgument("xi_coefficients: no forcing terms");
  const GridPtr& grid = fs.front().grid();
  for (const Field& f : fs) require_same_grid(f, fs.front());
  const std::size_t N = fs.size();
  PenaltyCoefficients out{Field(grid), std::vector<Field>(N, Field(grid))};
  for (int k = 0; k < grid->node_count(); ++k) {
    double partial = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
      partial += fs[i][k];
      best = std::max(best, partial / static_cast<double>(i + 1));
    }
    out.xi0[k] = best;
    partial = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      partial += fs[i][k];
      out.xis[i][k] = static_cast<double>(i + 1) * best - partial;
    }
  }
  return out;
}

double theta_eps(double s, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("penalization parameter must be positive");
  if (s >= 0.0) return 0.0;
  if (s <= -eps) return -1.0;
  return s / eps;
}

double Theta_eps(double s, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("penalization parameter must be positive");
  if (s >= 0.0) return 0.0;
  if (s <= -eps) return -s - 0.5 * eps;
  return 0.5 * s * s / eps;
}

MembraneResult solve_membranes_penalized(const DiscreteOperator& op, const MembraneSystem& sys, double eps,
                                         const SolverOptions& opts) {
  if (!(eps > 0.0)) throw InvalidArgument("penalization parameter must be positive");
  sys.validate(op.grid());
  const PenaltyCoefficients xi = xi_coefficients(sys.fs);
  MembraneEnergy energy(op, sys, eps, &xi);
  const std::size_t total = energy.size();
  const double inf = std::numeric_limits<double>::infinity();
  BoxBounds box{std::vector<double>(total, -inf), std::vector<double>(total, inf)};
  MinimizeResult r = minimize_box(energy, box, std::vector<double>(total, 0.0), opts);
  r.report.scheme = to_string(op.scheme());
  return {unstack(op, r.x, sys.size()), std::move(r.report)};
}

double penalized_residual(const DiscreteOperator& op, const MembraneSystem& sys, std::span<const Field> us,
                          double eps) {
  const PenaltyCoefficients xi = xi_coefficients(sys.fs);
  const auto interior = op.grid()->interior_nodes();
  const std::size_t N = us.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const DualField r = op.residual(us[i], sys.fs[i]);
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const int node = interior[k];
      double v = r.values[k];
      if (i + 1 < N) v += xi.xis[i][node] * theta_eps(us[i][node] - us[i + 1][node], eps);
      if (i > 0) v -= xi.xis[i - 1][node] * theta_eps(us[i - 1][node] - us[i][node], eps);
      worst = std::max(worst, std::abs(v));
    }
  }
  return worst;
}

MembraneLSReport verify_ls_membranes(const DiscreteOperator& op, std::span<const Field> us,
                                     std::span<const Field> fs, double tol) {
  if (us.size() != fs.size() || us.empty()) throw InvalidArgument("verify_ls_membranes: size mismatch");
  const std::size_t N = us.size();
  const auto interior = op.grid()->interior_nodes();
  MembraneLSReport rep;
  rep.lower_violation.assign(N, 0.0);
  rep.upper_violation.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const DualField Au = op.apply(us[i]);
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const int node = interior[k];
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t j = 0; j <= i; ++j) lo = std::min(lo, fs[j][node]);
      for (std::size_t j = i; j < N; ++j) hi = std::max(hi, fs[j][node]);
      rep.lower_violation[i] = std::max(rep.lower_violation[i], lo - Au.values[k]);
      rep.upper_violation[i] = std::max(rep.upper_violation[i], Au.values[k] - hi);
    }
    rep.max_violation = std::max({rep.max_violation, rep.lower_violation[i], rep.upper_violation[i]});
  }
  rep.pass = rep.max_violation <= tol;
  return rep;
}

double max_order_excess(std::span<const Field> us) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < us.size(); ++i)
    for (std::size_t k = 0; k < us[i].size(); ++k) worst = std::max(worst, us[i][k] - us[i - 1][k]);
  return worst;
}

}  // namespace ovi
