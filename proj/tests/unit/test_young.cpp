#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ovi/errors.hpp"
#include "ovi/young.hpp"

using namespace ovi;

namespace {

StructuralPtr power(double p) { return std::make_shared<PowerLaw>(p); }
StructuralPtr log_power(double alpha, double p, double beta, double gamma) {
  return std::make_shared<LogPowerLaw>(alpha, p, beta, gamma);
}

std::vector<StructuralPtr> builtins(const GridPtr& grid) {
  auto px = std::make_shared<const Field>(Field::sample(grid, [](Point x) { return 1.6 + 1.2 * x.x; }));
  return {power(1.5),
          power(2.0),
          power(3.0),
          power(4.0),
          std::make_shared<PowerLaw>(Coefficient(px)),
          log_power(1.0, 2.0, 1.0, 2.0),
          log_power(0.5, 3.0, 2.0, 1.5),
          std::make_shared<Combination>(std::vector<Combination::Term>{{1.0, power(2.0)}, {0.5, power(3.5)}})};
}

}  // namespace

TEST_CASE("eval_a on the catalog") {
  CHECK(eval_a(*power(2.0), {0.3, 0.0}, 7.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_a(*power(3.0), {}, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval_a(*log_power(1.0, 2.0, 1.0, 1.0), {}, std::numbers::e - 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eval_a at zero uses the limit") {
  CHECK(eval_a(*power(2.0), {}, 0.0) == 1.0);
  CHECK(eval_a(*power(3.0), {}, 0.0) == 0.0);
  CHECK(std::isinf(eval_a(*power(1.5), {}, 0.0)));
  CHECK(eval_a(*log_power(2.0, 2.0, 1.0, 3.0), {}, 0.0) == doctest::Approx(2.0 * std::log(3.0)));
  CHECK_THROWS_AS(eval_a(*power(2.0), {}, -1.0), InvalidArgument);
}

TEST_CASE("log example outside its parameter domain names the parameters") {
  const auto bad = log_power(1.0, 2.0, 1.0, -1.0);
  try {
    eval_a(*bad, {}, 0.5);
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("gamma") != std::string::npos);
    CHECK(msg.find("beta") != std::string::npos);
  }
}

TEST_CASE("invalid construction") {
  CHECK_THROWS_AS(PowerLaw(1.0), InvalidArgument);
  CHECK_THROWS_AS(LogPowerLaw(-1.0, 2.0, 1.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(Combination({{-1.0, power(2.0)}}), InvalidArgument);
  PowerLaw p(2.0);
  CHECK_THROWS_AS(p.declare_bounds({0.5, 0.4}), InvalidArgument);
  CHECK_THROWS_AS(p.declare_bounds({0.0, 1.0}), InvalidArgument);
}

TEST_CASE("G closed forms and zero") {
  const YoungFunction quad(power(2.0));
  CHECK(quad.G({}, 3.0) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(quad.G({}, 0.0) == 0.0);
  const YoungFunction logf(log_power(1.0, 2.0, 1.0, 2.0));
  CHECK(logf.G({}, 0.0) == 0.0);
  CHECK(logf.G({}, 1e-9) > 0.0);
}

TEST_CASE("G by quadrature matches a Simpson oracle") {
  // a = t log(t + 2): the integrand s a(s) = s^2 log(s + 2).
  const auto sf = log_power(1.0, 3.0, 1.0, 2.0);
  const YoungFunction yf(sf);
  for (double t : {1.0, 0.01, 3.7, 250.0}) {
    const double ref = oracle::simpson([](double s) { return s * s * std::log(s + 2.0); }, 0.0, t, 1l << 20);
    CHECK(yf.G({}, t) == doctest::Approx(ref).epsilon(1e-9));
  }
  // p = 1.5: the integrand behaves like sqrt(s) at the origin.
  const YoungFunction yf2(log_power(0.7, 1.5, 2.0, 1.5));
  const double ref =
      oracle::simpson([](double s) { return 0.7 * std::sqrt(s) * std::log(2.0 * s + 1.5); }, 0.0, 2.0, 1l << 22);
  CHECK(yf2.G({}, 2.0) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("quadrature failure carries the achieved tolerance") {
  const YoungFunction strict(log_power(1.0, 2.0, 1.0, 2.0), 1e-300);
  try {
    strict.G({}, 5.0);
    FAIL("expected a quadrature error");
  } catch (const QuadratureError& e) {
    CHECK(e.achieved_tolerance() > 1e-300);
    CHECK(e.achieved_tolerance() < 1e-8);
  }
}

TEST_CASE("check_structure on power laws") {
  const auto ts = log_spaced(1e-4, 1e4, 81);
  const std::vector<Point> xs{{0.5, 0.0}};
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const StructureReport r = check_structure(*power(p), ts, xs);
    CHECK(r.pass);
    CHECK(r.lower_est == doctest::Approx(p - 1.0).epsilon(1e-6));
    CHECK(r.upper_est == doctest::Approx(p - 1.0).epsilon(1e-6));
    CHECK(r.young_ratio_min == doctest::Approx(p).epsilon(1e-6));
  }
}

TEST_CASE("check_structure on the log example against the analytic ratio") {
  const auto ts = log_spaced(1e-4, 1e4, 401);
  const std::vector<Point> xs{{0.5, 0.0}};
  const StructureReport r = check_structure(*log_power(1.0, 2.0, 1.0, 2.0), ts, xs);
  CHECK(r.pass);
  double lo = 1e300, hi = -1e300;
  for (double t : ts) {
    const double ratio = 1.0 + t / ((t + 2.0) * std::log(t + 2.0));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(r.lower_est == doctest::Approx(lo).epsilon(1e-6));
  CHECK(r.upper_est == doctest::Approx(hi).epsilon(1e-6));
  CHECK(r.lower_est >= 1.0);
  CHECK(r.upper_est <= 2.0);
}

TEST_CASE("check_structure flags inconsistent declarations and bad domains") {
  const auto ts = log_spaced(1e-3, 1e3, 41);
  const std::vector<Point> xs{{0.5, 0.0}};
  auto p3 = std::make_shared<PowerLaw>(3.0);
  p3->declare_bounds({0.5, 1.5});  // true ratio is 2
  const StructureReport r = check_structure(*p3, ts, xs);
  CHECK_FALSE(r.declared_ok);
  CHECK_FALSE(r.pass);
  const StructureReport bad = check_structure(*log_power(1.0, 2.0, 1.0, -1.0), ts, xs);
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.failures.empty());
}

TEST_CASE("every built-in passes the structural check within its declared bounds") {
  const auto grid = StructuredGrid::line(0.0, 1.0, 9);
  const auto ts = log_spaced(1e-4, 1e4, 81);
  std::vector<Point> xs;
  for (int k = 0; k < grid->node_count(); ++k) xs.push_back(grid->position(k));
  for (const auto& sf : builtins(grid)) {
    CAPTURE(sf->id());
    const StructureReport r = check_structure(*sf, ts, xs);
    CHECK(r.pass);
    REQUIRE(sf->declared_bounds().has_value());
    CHECK(r.lower_est >= sf->declared_bounds()->lower - 1e-4);
    CHECK(r.upper_est <= sf->declared_bounds()->upper + 1e-4);
  }
}

TEST_CASE("G is convex and g is its derivative") {
  const auto grid = StructuredGrid::line(0.0, 1.0, 9);
  oracle::Rng rng(11);
  for (const auto& sf : builtins(grid)) {
    CAPTURE(sf->id());
    const YoungFunction yf(sf);
    for (int k = 0; k < 50; ++k) {
      const Point x{oracle::uniform(rng, 0.0, 1.0), 0.0};
      const double t1 = std::exp(oracle::uniform(rng, -5.0, 3.0)), t2 = std::exp(oracle::uniform(rng, -5.0, 3.0));
      const double th = oracle::uniform(rng, 0.0, 1.0);
      const double lhs = yf.G(x, th * t1 + (1.0 - th) * t2);
      const double rhs = th * yf.G(x, t1) + (1.0 - th) * yf.G(x, t2);
      CHECK(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));

      const double t = t1, h = 1e-5 * t;
      const double fd = (yf.G(x, t + h) - yf.G(x, t - h)) / (2.0 * h);
      CHECK(std::abs(fd - yf.g(x, t)) <= 1e-5 * std::abs(yf.g(x, t)));
      CHECK(yf.g(x, -t) == -yf.g(x, t));
    }
  }
}

TEST_CASE("modular") {
  const auto grid = StructuredGrid::line(0.0, 1.0, 11);
  const YoungFunction quad(power(2.0));
  const auto& w = grid->lumped_masses();
  CHECK(modular(quad, Field(grid, 0.0), w) == 0.0);
  CHECK(modular(quad, Field(grid, 2.0), w) == doctest::Approx(2.0).epsilon(1e-15));

  // Extended-precision re-summation.
  const YoungFunction yf(log_power(1.0, 2.5, 1.0, 2.0));
  oracle::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Field u = Field::sample(grid, [&](Point) { return oracle::uniform(rng, -3.0, 3.0); });
    long double ref = 0.0L;
    for (int k = 0; k < grid->node_count(); ++k) ref += static_cast<long double>(w[k]) * yf.G(grid->position(k), std::abs(u[k]));
    CHECK(modular(yf, u, w) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
  }
}

TEST_CASE("Luxemburg norm") {
  const auto grid = StructuredGrid::line(0.0, 1.0, 11);
  const auto& w = grid->lumped_masses();
  const YoungFunction quad(power(2.0));
  CHECK(luxemburg_norm(quad, Field(grid, 0.0), w) == 0.0);
  CHECK(luxemburg_norm(quad, Field(grid, 3.0), w) == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(luxemburg_norm(quad, Field(grid, std::numeric_limits<double>::infinity()), w), InvalidArgument);
}

TEST_CASE("modular-norm inequalities on both sides of the unit sphere") {
  const auto grid = StructuredGrid::rect({0.0, 1.0, 0.0, 1.0}, 7);
  const auto& w = grid->lumped_masses();
  oracle::Rng rng(5);
  for (const auto& sf : builtins(StructuredGrid::line(0.0, 1.0, 9))) {
    const YoungFunction yf(sf);
    const GrowthBounds b = *sf->declared_bounds();
    for (int trial = 0; trial < 6; ++trial) {
      const double amp = std::exp(oracle::uniform(rng, -4.0, 4.0));
      const Field u = Field::sample(grid, [&](Point) { return amp * oracle::uniform(rng, -1.0, 1.0); });
      const double n = luxemburg_norm(yf, u, w);
      const double rho = modular(yf, u, w);
      CAPTURE(n);
      const double lo = n > 1.0 ? std::pow(n, 1.0 + b.lower) : std::pow(n, 1.0 + b.upper);
      const double hi = n > 1.0 ? std::pow(n, 1.0 + b.upper) : std::pow(n, 1.0 + b.lower);
      CHECK(rho >= lo * (1.0 - 1e-8));
      CHECK(rho <= hi * (1.0 + 1e-8));
    }
  }
}
