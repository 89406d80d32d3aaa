#include "ovi/young.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ovi/errors.hpp"

namespace ovi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe(Point x, double t) {
  std::ostringstream os;
  os << "at x=(" << x.x << ", " << x.y << "), t=" << t;
  return os.str();
}

double require_finite(double v, const char* who, Point x, double t) {
  if (!std::isfinite(v)) throw EvaluationError(std::string(who) + ": non-finite value " + describe(x, t));
  return v;
}

// Gauss-Legendre rule on [0, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.nodes[i] = 0.5 * (1.0 - z);
    r.weights[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

const Rule& fine_rule() {
  static const Rule r = gauss_legendre(10);
  return r;
}

const Rule& coarse_rule() {
  static const Rule r = gauss_legendre(7);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

Coefficient::Coefficient(std::shared_ptr<const Field> field) : field_(std::move(field)) {
  if (!field_ || !field_->grid()) throw InvalidArgument("coefficient field without grid");
  if (!field_->all_finite()) throw InvalidArgument("coefficient field has non-finite values");
}

double Coefficient::operator()(Point x) const {
  if (!field_) return constant_;
  const StructuredGrid& g = *field_->grid();
  const Box& b = g.extents();
  const auto locate = [&](double v, double lo, double h) {
    double s = (v - lo) / h;
    s = std::clamp(s, 0.0, static_cast<double>(g.n() - 1));
    int i = std::min(static_cast<int>(std::floor(s)), g.n() - 2);
    return std::pair<int, double>{i, s - i};
  };
  const auto [i, fx] = locate(x.x, b.x0, g.hx());
  const Field& f = *field_;
  if (g.dim() == 1) return (1.0 - fx) * f[i] + fx * f[i + 1];
  const auto [j, fy] = locate(x.y, b.y0, g.hy());
  const double v00 = f[g.node_at(i, j)], v10 = f[g.node_at(i + 1, j)];
  const double v01 = f[g.node_at(i, j + 1)], v11 = f[g.node_at(i + 1, j + 1)];
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

double Coefficient::min() const noexcept { return field_ ? min_value(*field_) : constant_; }
double Coefficient::max() const noexcept { return field_ ? max_value(*field_) : constant_; }

// ---------------------------------------------------------------------------

double StructuralFunction::dg(Point x, double t) const {
  const double h = 1e-6 * t;
  return (a(x, t + h) * (t + h) - a(x, t - h) * (t - h)) / (2.0 * h);
}

std::optional<double> StructuralFunction::closed_form_G(Point, double) const { return std::nullopt; }

void StructuralFunction::declare_bounds(GrowthBounds b) {
  if (!(b.lower > 0.0) || !(b.upper >= b.lower) || !std::isfinite(b.upper)) {
    std::ostringstream os;
    os << id() << ": declared bounds (" << b.lower << ", " << b.upper << ") must satisfy 0 < lower <= upper";
    throw InvalidArgument(os.str());
  }
  declared_ = b;
}

PowerLaw::PowerLaw(Coefficient p) : p_(std::move(p)) {
  if (!(p_.min() > 1.0)) throw InvalidArgument("power: exponent p must exceed 1");
  declare_bounds({p_.min() - 1.0, p_.max() - 1.0});
}

double PowerLaw::a(Point x, double t) const {
  return require_finite(std::pow(t, p_(x) - 2.0), "power", x, t);
}

double PowerLaw::dg(Point x, double t) const {
  const double p = p_(x);
  return require_finite((p - 1.0) * std::pow(t, p - 2.0), "power", x, t);
}

double PowerLaw::a_at_zero(Point x) const {
  const double p = p_(x);
  if (p < 2.0) return kInf;
  return p == 2.0 ? 1.0 : 0.0;
}

std::optional<double> PowerLaw::closed_form_G(Point x, double t) const {
  const double p = p_(x);
  return std::pow(t, p) / p;
}

LogPowerLaw::LogPowerLaw(Coefficient alpha, Coefficient p, Coefficient beta, Coefficient gamma)
    : alpha_(std::move(alpha)), p_(std::move(p)), beta_(std::move(beta)), gamma_(std::move(gamma)) {
  if (!(alpha_.min() > 0.0)) throw InvalidArgument("log_power: alpha must be positive");
  if (!(beta_.min() > 0.0)) throw InvalidArgument("log_power: beta must be positive");
  if (!(p_.min() > 1.0)) throw InvalidArgument("log_power: exponent p must exceed 1");
  // With gamma > 1 the ratio t a_t / a + 1 equals p - 1 + s' with
  // s' = beta t / ((beta t + gamma) log(beta t + gamma)) in (0, 1).
  if (gamma_.min() > 1.0) declare_bounds({p_.min() - 1.0, p_.max()});
}

double LogPowerLaw::a(Point x, double t) const {
  const double arg = beta_(x) * t + gamma_(x);
  if (!(arg > 0.0)) {
    std::ostringstream os;
    os << "log_power: beta*t + gamma = " << arg << " <= 0 (gamma=" << gamma_(x) << ", beta=" << beta_(x)
       << ") " << describe(x, t);
    throw EvaluationError(os.str());
  }
  return require_finite(alpha_(x) * std::pow(t, p_(x) - 2.0) * std::log(arg), "log_power", x, t);
}

double LogPowerLaw::dg(Point x, double t) const {
  const double p = p_(x), beta = beta_(x);
  const double arg = beta * t + gamma_(x);
  if (!(arg > 0.0)) return a(x, t);  // raises the parameter error
  const double v = alpha_(x) * ((p - 1.0) * std::pow(t, p - 2.0) * std::log(arg) + std::pow(t, p - 1.0) * beta / arg);
  return require_finite(v, "log_power", x, t);
}

double LogPowerLaw::a_at_zero(Point x) const {
  const double p = p_(x);
  const double l = std::log(gamma_(x));
  if (p > 2.0 || l == 0.0) return 0.0;
  if (p == 2.0) return alpha_(x) * l;
  return l > 0.0 ? kInf : -kInf;
}

Combination::Combination(std::vector<Term> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw InvalidArgument("combination: needs at least one term");
  std::optional<GrowthBounds> b = GrowthBounds{kInf, 0.0};
  for (const Term& t : terms_) {
    if (!(t.weight > 0.0) || !t.fn) throw InvalidArgument("combination: weights must be positive");
    const auto& d = t.fn->declared_bounds();
    if (!d) {
      b.reset();
    } else if (b) {
      b->lower = std::min(b->lower, d->lower);
      b->upper = std::max(b->upper, d->upper);
    }
  }
  if (b) declare_bounds(*b);
}

double Combination::a(Point x, double t) const {
  double s = 0.0;
  for (const Term& term : terms_) s += term.weight * term.fn->a(x, t);
  return s;
}

double Combination::dg(Point x, double t) const {
  double s = 0.0;
  for (const Term& term : terms_) s += term.weight * term.fn->dg(x, t);
  return s;
}

double Combination::a_at_zero(Point x) const {
  double s = 0.0;
  for (const Term& term : terms_) s += term.weight * term.fn->a_at_zero(x);
  return s;
}

std::optional<double> Combination::closed_form_G(Point x, double t) const {
  double s = 0.0;
  for (const Term& term : terms_) {
    const auto g = term.fn->closed_form_G(x, t);
    if (!g) return std::nullopt;
    s += term.weight * *g;
  }
  return s;
}

double eval_a(const StructuralFunction& sf, Point x, double t) {
  if (!(t >= 0.0)) throw InvalidArgument(sf.id() + ": negative or NaN argument " + describe(x, t));
  if (t == 0.0) return sf.a_at_zero(x);
  return sf.a(x, t);
}

// ---------------------------------------------------------------------------

YoungFunction::YoungFunction(StructuralPtr base, double quadrature_tol) : base_(std::move(base)), tol_(quadrature_tol) {
  if (!base_) throw InvalidArgument("young function without structural function");
  if (!(tol_ > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
}

double YoungFunction::G(Point x, double t) const {
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  if (auto closed = base_->closed_form_G(x, t)) return require_finite(*closed, "G", x, t);

  // Geometrically graded panels [t 2^{-k-1}, t 2^{-k}] resolve the algebraic
  // behaviour of s a(x, s) at the origin; nodes scale with t, so G is a
  // smooth function of t.
  const Rule& fine = fine_rule();
  const Rule& coarse = coarse_rule();
  const auto panel = [&](double lo, double hi, const Rule& r) {
    double s = 0.0;
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      const double sq = lo + (hi - lo) * r.nodes[q];
      s += r.weights[q] * sq * base_->a(x, sq);
    }
    return (hi - lo) * s;
  };
  double total = 0.0, estimate = 0.0;
  double hi = t;
  constexpr int kMaxPanels = 80;
  for (int k = 0; k < kMaxPanels; ++k) {
    const double lo = 0.5 * hi;
    const double f = panel(lo, hi, fine);
    total += f;
    estimate += std::abs(f - panel(lo, hi, coarse));
    hi = lo;
    const double tail = 0.5 * hi * hi * base_->a(x, hi);  // ~ int_0^hi s a(s) ds
    if (std::abs(tail) <= 1e-17 * std::abs(total)) break;
  }
  total += panel(0.0, hi, fine);
  require_finite(total, "G quadrature", x, t);
  if (estimate > tol_ * std::abs(total)) {
    std::ostringstream os;
    os << "G quadrature did not converge " << describe(x, t) << ": achieved relative error "
       << estimate / std::abs(total);
    throw QuadratureError(os.str(), estimate / std::abs(total));
  }
  return total;
}

double YoungFunction::g(Point x, double t) const {
  if (t == 0.0) return 0.0;
  return base_->a(x, std::max(std::abs(t), kGradientFloor)) * t;
}

double YoungFunction::dg(Point x, double t) const {
  return base_->dg(x, std::max(std::abs(t), kGradientFloor));
}

// ---------------------------------------------------------------------------

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw InvalidArgument("log_spaced: need 0 < lo < hi, count >= 2");
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

StructureReport check_structure(const StructuralFunction& sf, std::span<const double> t_grid,
                                std::span<const Point> x_sample) {
  constexpr double kRelStep = 1e-6;
  constexpr double kSlack = 1e-4;
  StructureReport rep;
  rep.lower_est = kInf;
  rep.upper_est = -kInf;
  rep.young_ratio_min = kInf;
  rep.young_ratio_max = -kInf;
  rep.positive = true;
  rep.vanishing_flux = true;
  rep.increasing_flux = true;
  bool finite = true;
  YoungFunction yf(std::shared_ptr<const StructuralFunction>(&sf, [](const StructuralFunction*) {}));

  for (const Point& x : x_sample) {
    double prev_flux = -kInf;
    for (double t : t_grid) {
      double ratio = std::numeric_limits<double>::quiet_NaN();
      double young = ratio;
      double a0 = ratio;
      try {
        a0 = sf.a(x, t);
        const double ap = sf.a(x, t * (1.0 + kRelStep));
        const double am = sf.a(x, t * (1.0 - kRelStep));
        ratio = (ap - am) / (2.0 * kRelStep * a0) + 1.0;
        young = t * t * a0 / yf.G(x, t);
      } catch (const Error&) {
        finite = false;
      }
      if (!std::isfinite(ratio) || !std::isfinite(young) || !(a0 > 0.0)) {
        if (!(a0 > 0.0)) rep.positive = false;
        finite = finite && std::isfinite(ratio) && std::isfinite(young);
        rep.failures.push_back({x, t, ratio});
        continue;
      }
      rep.lower_est = std::min(rep.lower_est, ratio);
      rep.upper_est = std::max(rep.upper_est, ratio);
      rep.young_ratio_min = std::min(rep.young_ratio_min, young);
      rep.young_ratio_max = std::max(rep.young_ratio_max, young);
      const double flux = t * a0;
      if (!(flux > prev_flux)) rep.increasing_flux = false;
      prev_flux = flux;
    }
    try {
      const double f8 = 1e-8 * sf.a(x, 1e-8);
      const double f10 = 1e-10 * sf.a(x, 1e-10);
      if (!(std::abs(f10) <= std::abs(f8)) || !(std::abs(f10) <= 0.1)) rep.vanishing_flux = false;
    } catch (const Error&) {
      rep.vanishing_flux = false;
    }
  }

  rep.young_ratio_ok = finite && rep.young_ratio_min >= 1.0 + rep.lower_est - kSlack &&
                       rep.young_ratio_max <= 1.0 + rep.upper_est + kSlack;
  if (const auto& d = sf.declared_bounds()) {
    rep.declared_ok = rep.lower_est >= d->lower - kSlack && rep.upper_est <= d->upper + kSlack;
  }
  rep.pass = finite && rep.failures.empty() && rep.positive && rep.lower_est > 0.0 && rep.young_ratio_ok &&
             rep.declared_ok && rep.vanishing_flux && rep.increasing_flux;
  return rep;
}

double modular(const YoungFunction& yf, const Field& u, std::span<const double> weights) {
  if (weights.size() != u.size()) throw InvalidArgument("modular: weight count does not match field");
  const StructuredGrid& grid = *u.grid();
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] == 0.0) continue;
    s += weights[k] * yf.G(grid.position(static_cast<int>(k)), std::abs(u[k]));
  }
  return s;
}

double luxemburg_norm(const YoungFunction& yf, const Field& u, std::span<const double> weights) {
  if (!u.all_finite()) throw InvalidArgument("luxemburg_norm: field must be finite");
  if (sup_norm(u) == 0.0) return 0.0;
  const auto rho = [&](double mu) { return modular(yf, (1.0 / mu) * u, weights); };

  constexpr int kMaxDoublings = 200;
  double hi = 1.0;
  int steps = 0;
  while (rho(hi) > 1.0) {
    hi *= 2.0;
    if (++steps > kMaxDoublings) throw Error("luxemburg_norm: no upper bracket after 200 doublings");
  }
  double lo = hi;
  steps = 0;
  while (rho(lo) <= 1.0) {
    lo *= 0.5;
    if (++steps > kMaxDoublings) throw Error("luxemburg_norm: no lower bracket after 200 halvings");
  }
  // Invariant: rho(lo) > 1 >= rho(hi). Bisect to full precision so that the
  // returned (feasible) endpoint has modular in [1 - 1e-8, 1].
  for (int it = 0; it < 200 && hi - lo > 1e-10 * 1e-6 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (rho(mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace ovi
