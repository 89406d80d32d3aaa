#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ovi/errors.hpp"
#include "ovi/membranes.hpp"

using namespace ovi;
using fixtures::power_op;

namespace {

double sup_gap(const std::vector<Field>& a, const std::vector<Field>& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, sup_distance(a[i], b[i]));
  return gap;
}

}  // namespace

TEST_CASE("project_ordered examples") {
  std::vector<double> a{3.0, 2.0, 1.0};
  project_ordered(a);
  CHECK(a == std::vector<double>{3.0, 2.0, 1.0});
  std::vector<double> b{1.0, 3.0, 2.0};
  project_ordered(b);
  CHECK(b == std::vector<double>{2.0, 2.0, 2.0});
  std::vector<double> c{-1.0, 4.0};
  project_ordered(c);
  CHECK(c == std::vector<double>{1.5, 1.5});
  std::vector<double> d{5.0};
  project_ordered(d);
  CHECK(d[0] == 5.0);
}

TEST_CASE("project_ordered matches brute force and is idempotent") {
  oracle::Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 6;
    std::vector<double> v(n);
    for (double& x : v) x = oracle::uniform(rng, -3.0, 3.0);
    std::vector<double> p = v;
    project_ordered(p);
    const auto ref = oracle::ordered_projection_bruteforce(v);
    for (std::size_t k = 0; k < n; ++k) CHECK(p[k] == doctest::Approx(ref[k]).epsilon(1e-12));
    for (std::size_t k = 1; k < n; ++k) CHECK(p[k] <= p[k - 1]);
    std::vector<double> q = p;
    project_ordered(q);
    CHECK(q == p);
  }
}

TEST_CASE("system validation") {
  const auto g = StructuredGrid::line(0.0, 1.0, 9);
  CHECK_THROWS_AS((MembraneSystem{{Field(g)}}.validate(g)), InvalidArgument);
  CHECK_THROWS_AS((MembraneSystem{std::vector<Field>(17, Field(g))}.validate(g)), InvalidArgument);
  const auto other = StructuredGrid::line(0.0, 1.0, 5);
  CHECK_THROWS((MembraneSystem{{Field(g), Field(other)}}.validate(g)));
  CHECK_NOTHROW((MembraneSystem{{Field(g), Field(g)}}.validate(g)));
}

TEST_CASE("equal forcing gives equal membranes") {
  const auto g = StructuredGrid::line(0.0, 1.0, 17);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto op = power_op(g, p);
    const Field f = Field::sample(g, [](Point x) { return 6.0 * std::sin(5.0 * x.x) + 1.0; });
    const SolveResult ref = solve_equation(op, f);
    const MembraneResult vi = solve_membranes_vi(op, {{f, f}});
    REQUIRE(vi.report.converged);
    CHECK(sup_distance(vi.us[0], ref.u) <= 1e-7);
    CHECK(sup_distance(vi.us[1], ref.u) <= 1e-7);
    const MembraneResult pen = solve_membranes_penalized(op, {{f, f, f}}, 0.01);
    REQUIRE(pen.report.converged);
    for (const Field& u : pen.us) CHECK(sup_distance(u, ref.u) <= 1e-7);
  }
}

TEST_CASE("N=2 p=2 VI matches the contact enumeration oracle") {
  const auto g = StructuredGrid::line(0.0, 1.0, 9);
  const auto op = power_op(g, 2.0);
  SolverOptions opts;
  opts.tol = 1e-11;
  const MembraneResult r = solve_membranes_vi(op, {{Field(g, -8.0), Field(g, 8.0)}}, opts);
  REQUIRE(r.report.converged);
  const auto ref = oracle::membrane_pair_enumeration(g->hx(), std::vector<double>(7, -8.0), std::vector<double>(7, 8.0));
  const auto u1 = fixtures::interior(r.us[0]), u2 = fixtures::interior(r.us[1]);
  for (std::size_t k = 0; k < 7; ++k) {
    CHECK(std::abs(u1[k] - ref.u1[k]) <= 1e-8);
    CHECK(std::abs(u2[k] - ref.u2[k]) <= 1e-8);
  }

  oracle::Rng rng(10);
  for (int trial = 0; trial < 6; ++trial) {
    const Field f1 = fixtures::random_smooth(g, rng, 12.0), f2 = fixtures::random_smooth(g, rng, 12.0);
    const MembraneResult rr = solve_membranes_vi(op, {{f1, f2}}, opts);
    REQUIRE(rr.report.converged);
    const auto e = oracle::membrane_pair_enumeration(g->hx(), fixtures::interior(f1), fixtures::interior(f2));
    const auto a = fixtures::interior(rr.us[0]), b = fixtures::interior(rr.us[1]);
    for (std::size_t k = 0; k < 7; ++k) {
      CHECK(std::abs(a[k] - e.u1[k]) <= 1e-8);
      CHECK(std::abs(b[k] - e.u2[k]) <= 1e-8);
    }
  }
}

TEST_CASE("VI solutions are ordered and satisfy the LS chain") {
  oracle::Rng rng(21);
  for (const auto& g : {StructuredGrid::line(0.0, 1.0, 33), StructuredGrid::rect({0.0, 1.0, 0.0, 1.0}, 9)}) {
    for (double p : {2.0, 3.0}) {
      const auto op = power_op(g, p);
      std::vector<Field> fs;
      for (int i = 0; i < 3; ++i) fs.push_back(fixtures::random_smooth(g, rng, 10.0));
      SolverOptions opts;
      opts.tol = 1e-8;
      const MembraneResult r = solve_membranes_vi(op, {fs}, opts);
      REQUIRE(r.report.converged);
      CHECK(max_order_excess(r.us) <= 1e-14);
      const MembraneLSReport ls = verify_ls_membranes(op, r.us, fs, 1e3 * opts.tol);
      CHECK(ls.pass);
      CHECK(ls.max_violation <= 1e3 * opts.tol);
    }
  }
}

TEST_CASE("LS chain degenerate cases") {
  const auto g = StructuredGrid::line(0.0, 1.0, 17);
  const auto op = power_op(g, 2.0);
  const Field f(g, 3.0);
  const SolveResult u = solve_equation(op, f);
  const std::vector<Field> one{u.u}, fone{f};
  CHECK(verify_ls_membranes(op, one, fone, 1e-6).pass);
  const MembraneResult pair = solve_membranes_vi(op, {{f, f}});
  const MembraneLSReport r = verify_ls_membranes(op, pair.us, std::vector<Field>{f, f}, 1e-6);
  CHECK(r.pass);
  CHECK(r.max_violation <= 1e-6);
  // A wrong solution is caught.
  const std::vector<Field> wrong{u.u + Field::sample(g, [](Point x) { return 0.1 * x.x * (1.0 - x.x); }), u.u};
  CHECK_FALSE(verify_ls_membranes(op, wrong, std::vector<Field>{f, f}, 1e-6).pass);
}

TEST_CASE("xi coefficients") {
  const auto g = StructuredGrid::line(0.0, 1.0, 5);
  const PenaltyCoefficients a = xi_coefficients({Field(g, 2.0), Field(g, 0.0)});
  REQUIRE(a.xis.size() == 2);
  for (int k = 0; k < 5; ++k) {
    CHECK(a.xi0[k] == 2.0);
    CHECK(a.xis[0][k] == 0.0);
    CHECK(a.xis[1][k] == 2.0);
  }
  const PenaltyCoefficients c = xi_coefficients(std::vector<Field>(4, Field(g, -1.5)));
  for (int k = 0; k < 5; ++k) {
    CHECK(c.xi0[k] == -1.5);
    for (const Field& x : c.xis) CHECK(x[k] == 0.0);
  }
  CHECK_THROWS_AS(xi_coefficients({}), InvalidArgument);
}

TEST_CASE("xi telescoping identity and sign on integer data") {
  // Multiples of lcm(1..8) keep every partial mean an integer, so all sums are exact.
  const auto g = StructuredGrid::line(0.0, 1.0, 9);
  oracle::Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    std::vector<Field> fs;
    for (int i = 0; i < n; ++i) {
      Field f(g);
      for (int k = 0; k < 9; ++k) f[k] = 840.0 * std::round(oracle::uniform(rng, -50.0, 50.0));
      fs.push_back(f);
    }
    const PenaltyCoefficients xi = xi_coefficients(fs);
    for (int k = 0; k < 9; ++k) {
      for (int i = 1; i <= n; ++i) CHECK(xi.xis[i - 1][k] >= 0.0);
      // xi_1 - xi_0 is -f_1 by definition, so the i = 2 identity holds with
      // the formula's i = 0 value (zero) in place of the maximum.
      CHECK((xi.xis[0][k] - 0.0) - (xi.xis[1][k] - xi.xis[0][k]) == fs[1][k] - fs[0][k]);
      for (int i = 3; i <= n; ++i) {
        const double lhs = (xi.xis[i - 2][k] - xi.xis[i - 3][k]) - (xi.xis[i - 1][k] - xi.xis[i - 2][k]);
        CHECK(lhs == fs[i - 1][k] - fs[i - 2][k]);
      }
    }
  }
}

TEST_CASE("theta_eps and its antiderivative") {
  CHECK(theta_eps(0.5, 0.1) == 0.0);
  CHECK(theta_eps(-0.05, 0.1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(theta_eps(-1.0, 0.1) == -1.0);
  CHECK(theta_eps(0.0, 0.1) == 0.0);
  CHECK(theta_eps(-0.1, 0.1) == -1.0);
  CHECK(Theta_eps(0.0, 0.1) == 0.0);
  CHECK(Theta_eps(1.0, 0.1) == 0.0);
  CHECK(Theta_eps(-0.1, 0.1) == doctest::Approx(0.05));
  CHECK(Theta_eps(-1.0, 0.1) == doctest::Approx(0.95));
  CHECK_THROWS_AS(theta_eps(1.0, 0.0), InvalidArgument);
  oracle::Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const double eps = oracle::uniform(rng, 1e-3, 1.0);
    const double s = oracle::uniform(rng, -2.0, 2.0), t = oracle::uniform(rng, -2.0, 2.0);
    const double th = oracle::uniform(rng, 0.0, 1.0);
    CHECK(theta_eps(std::min(s, t), eps) <= theta_eps(std::max(s, t), eps));
    CHECK(theta_eps(s, eps) >= -1.0);
    CHECK(theta_eps(s, eps) <= 0.0);
    CHECK(Theta_eps(th * s + (1 - th) * t, eps) <= th * Theta_eps(s, eps) + (1 - th) * Theta_eps(t, eps) + 1e-14);
    const double h = 1e-6;
    if (std::abs(s + eps) > 1e-4 && std::abs(s) > 1e-4)
      CHECK((Theta_eps(s + h, eps) - Theta_eps(s - h, eps)) / (2 * h) == doctest::Approx(theta_eps(s, eps)).epsilon(1e-6));
  }
}

TEST_CASE("penalized solutions: ordering bound and residual") {
  oracle::Rng rng(44);
  const auto g = StructuredGrid::line(0.0, 1.0, 33);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto op = power_op(g, p);
    std::vector<Field> fs;
    for (int i = 0; i < 3; ++i) fs.push_back(fixtures::random_smooth(g, rng, 15.0));
    SolverOptions opts;
    for (double eps : {0.1, 0.01, std::ldexp(1.0, -10)}) {
      const MembraneResult r = solve_membranes_penalized(op, {fs}, eps, opts);
      REQUIRE(r.report.converged);
      CHECK(max_order_excess(r.us) <= eps + 10.0 * opts.tol);
      CHECK(penalized_residual(op, {fs}, r.us, eps) <= opts.tol);
    }
  }
  CHECK_THROWS_AS(solve_membranes_penalized(power_op(g, 2.0), {{Field(g), Field(g)}}, 0.0), InvalidArgument);
}

TEST_CASE("epsilon sweep converges to the VI solution") {
  const auto g = StructuredGrid::line(0.0, 1.0, 17);
  const auto op = power_op(g, 2.0);
  const std::vector<Field> fs{Field::sample(g, [](Point x) { return -4.0 + 10.0 * x.x; }), Field(g, 2.0),
                              Field::sample(g, [](Point x) { return 6.0 * std::sin(6.283185307179586 * x.x); })};
  SolverOptions opts;
  opts.tol = 1e-9;
  const MembraneResult vi = solve_membranes_vi(op, {fs}, opts);
  REQUIRE(vi.report.converged);
  double prev = std::numeric_limits<double>::infinity();
  double eps = 0.1;
  double last = 0.0;
  while (eps >= std::ldexp(1.0, -10) * 0.99) {
    const MembraneResult r = solve_membranes_penalized(op, {fs}, eps, opts);
    REQUIRE(r.report.converged);
    const double gap = sup_gap(r.us, vi.us);
    CAPTURE(eps);
    CHECK(gap <= prev + opts.tol);
    prev = gap;
    last = gap;
    eps *= 0.5;
  }
  const MembraneResult final_run = solve_membranes_penalized(op, {fs}, std::ldexp(1.0, -10), opts);
  CHECK(sup_gap(final_run.us, vi.us) <= 1e-3);
  CHECK(last <= 2e-3);
}
