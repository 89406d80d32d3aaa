#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ovi/mesh.hpp"

namespace ovi {

// A spatial coefficient: either a constant or a nodal field evaluated by
// (bi)linear interpolation at off-node positions.
class Coefficient {
 public:
  Coefficient(double value = 0.0) : constant_(value) {}  // NOLINT: implicit by intent
  explicit Coefficient(std::shared_ptr<const Field> field);

  double operator()(Point x) const;
  bool is_constant() const noexcept { return !field_; }
  double min() const noexcept;
  double max() const noexcept;

 private:
  double constant_ = 0.0;
  std::shared_ptr<const Field> field_;
};

// Growth bounds 0 < lower <= t a_t / a + 1 <= upper.
struct GrowthBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// The coefficient a(x, t) of the operator -div(a(x, |grad u|) grad u).
class StructuralFunction {
 public:
  virtual ~StructuralFunction() = default;

  virtual std::string id() const = 0;
  // a(x, t) for t > 0. Throws EvaluationError when the result is not finite.
  virtual double a(Point x, double t) const = 0;
  // d/dt [a(x, t) t]. Defaults to a central difference.
  virtual double dg(Point x, double t) const;
  // lim_{t -> 0+} a(x, t); +infinity when singular.
  virtual double a_at_zero(Point x) const = 0;
  virtual std::optional<double> closed_form_G(Point x, double t) const;

  const std::optional<GrowthBounds>& declared_bounds() const noexcept { return declared_; }
  // Throws InvalidArgument unless 0 < lower <= upper.
  void declare_bounds(GrowthBounds b);

 protected:
  std::optional<GrowthBounds> declared_;
};

using StructuralPtr = std::shared_ptr<const StructuralFunction>;

// a = t^{p(x) - 2}, G = t^p / p.
class PowerLaw final : public StructuralFunction {
 public:
  explicit PowerLaw(Coefficient p);
  std::string id() const override { return "power"; }
  double a(Point x, double t) const override;
  double dg(Point x, double t) const override;
  double a_at_zero(Point x) const override;
  std::optional<double> closed_form_G(Point x, double t) const override;

 private:
  Coefficient p_;
};

// a = alpha(x) t^{p(x) - 2} log(beta(x) t + gamma(x)); G has no closed form.
class LogPowerLaw final : public StructuralFunction {
 public:
  LogPowerLaw(Coefficient alpha, Coefficient p, Coefficient beta, Coefficient gamma);
  std::string id() const override { return "log_power"; }
  double a(Point x, double t) const override;
  double dg(Point x, double t) const override;
  double a_at_zero(Point x) const override;

 private:
  Coefficient alpha_, p_, beta_, gamma_;
};

// Positive linear combination sum_k c_k a_k.
class Combination final : public StructuralFunction {
 public:
  struct Term {
    double weight;
    StructuralPtr fn;
  };
  explicit Combination(std::vector<Term> terms);
  std::string id() const override { return "combination"; }
  double a(Point x, double t) const override;
  double dg(Point x, double t) const override;
  double a_at_zero(Point x) const override;
  std::optional<double> closed_form_G(Point x, double t) const override;

 private:
  std::vector<Term> terms_;
};

// Checked evaluation of a(x, t): t = 0 maps to the limit (possibly +inf),
// negative t is rejected.
double eval_a(const StructuralFunction& sf, Point x, double t);

// Smallest t at which solvers evaluate a(x, t).
inline constexpr double kGradientFloor = 1e-12;

// G(x, t) = int_0^t a(x, s) s ds, with g(x, t) = a(x, |t|) t.
class YoungFunction {
 public:
  explicit YoungFunction(StructuralPtr base, double quadrature_tol = 1e-10);

  const StructuralFunction& structural() const noexcept { return *base_; }
  const StructuralPtr& structural_ptr() const noexcept { return base_; }
  double quadrature_tol() const noexcept { return tol_; }

  // Throws QuadratureError when the integration error estimate exceeds the
  // tolerance (relative).
  double G(Point x, double t) const;
  // Odd extension; a evaluated at max(|t|, kGradientFloor).
  double g(Point x, double t) const;
  // g'(|t|) with the same floor.
  double dg(Point x, double t) const;

 private:
  StructuralPtr base_;
  double tol_;
};

struct StructureSample {
  Point x;
  double t = 0.0;
  double ratio = 0.0;
};

struct StructureReport {
  double lower_est = 0.0;  // min of t a_t / a + 1
  double upper_est = 0.0;  // max of t a_t / a + 1
  double young_ratio_min = 0.0;  // min of t g / G
  double young_ratio_max = 0.0;
  bool young_ratio_ok = false;  // t g / G within [1 + lower_est, 1 + upper_est]
  bool positive = false;        // a > 0 at all samples
  bool vanishing_flux = false;  // t a(x, t) -> 0 as t -> 0+
  bool increasing_flux = false; // t a(x, t) strictly increasing on the grid
  bool declared_ok = true;      // estimates within declared bounds (+-1e-4)
  bool pass = false;
  std::vector<StructureSample> failures;  // non-finite or non-positive samples
};

std::vector<double> log_spaced(double lo, double hi, int count);

StructureReport check_structure(const StructuralFunction& sf, std::span<const double> t_grid,
                                std::span<const Point> x_sample);

// sum_i w_i G(x_i, |u_i|).
double modular(const YoungFunction& yf, const Field& u, std::span<const double> weights);

// inf { mu > 0 : modular(u / mu) <= 1 }, by bracketing and bisection.
double luxemburg_norm(const YoungFunction& yf, const Field& u, std::span<const double> weights);

}  // namespace ovi
