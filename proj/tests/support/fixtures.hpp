#pragma once
// Shared problem builders for the unit and acceptance tests.

#include <memory>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ovi/assembly.hpp"
#include "ovi/obstacle.hpp"

#include <cmath>
#include <limits>

namespace fixtures {

struct Named {
  std::string name;
  ovi::StructuralPtr fn;
};

// Every catalog entry: power laws, a variable exponent, log examples and a
// positive combination.
inline std::vector<Named> catalog(const ovi::GridPtr& grid) {
  using namespace ovi;
  auto px = std::make_shared<const Field>(Field::sample(grid, [](Point x) { return 1.7 + 1.0 * x.x + 0.3 * x.y; }));
  return {{"power 1.5", std::make_shared<PowerLaw>(1.5)},
          {"power 2", std::make_shared<PowerLaw>(2.0)},
          {"power 3", std::make_shared<PowerLaw>(3.0)},
          {"power 4", std::make_shared<PowerLaw>(4.0)},
          {"power p(x)", std::make_shared<PowerLaw>(Coefficient(px))},
          {"log example", std::make_shared<LogPowerLaw>(1.0, 2.0, 1.0, 2.0)},
          {"log p=2.5", std::make_shared<LogPowerLaw>(0.5, 2.5, 2.0, 1.5)},
          {"combination",
           std::make_shared<Combination>(std::vector<Combination::Term>{
               {1.0, std::make_shared<PowerLaw>(2.0)}, {0.5, std::make_shared<PowerLaw>(3.5)}})}};
}

inline ovi::DiscreteOperator make_op(const ovi::GridPtr& grid, ovi::StructuralPtr fn, ovi::Scheme scheme) {
  return ovi::DiscreteOperator(grid, ovi::YoungFunction(std::move(fn)), scheme);
}

inline ovi::DiscreteOperator power_op(const ovi::GridPtr& grid, double p, ovi::Scheme scheme = ovi::Scheme::edge) {
  return make_op(grid, std::make_shared<ovi::PowerLaw>(p), scheme);
}

// Random field in V_h (zero on the boundary).
inline ovi::Field random_field(const ovi::GridPtr& grid, oracle::Rng& rng, double amp = 1.0) {
  ovi::Field u(grid);
  for (int node : grid->interior_nodes()) u[node] = oracle::uniform(rng, -amp, amp);
  return u;
}

// Random smooth field: a few sine modes with random amplitudes.
inline ovi::Field random_smooth(const ovi::GridPtr& grid, oracle::Rng& rng, double amp = 1.0) {
  const double a1 = oracle::uniform(rng, -amp, amp), a2 = oracle::uniform(rng, -amp, amp);
  const double a3 = oracle::uniform(rng, -amp, amp), shift = oracle::uniform(rng, -0.5 * amp, 0.5 * amp);
  const ovi::Box b = grid->extents();
  return ovi::Field::sample(grid, [&](ovi::Point p) {
    const double sx = (p.x - b.x0) / (b.x1 - b.x0);
    const double sy = grid->dim() == 2 ? (p.y - b.y0) / (b.y1 - b.y0) : 0.5;
    return shift + a1 * std::sin(3.0 * sx + sy) + a2 * std::cos(5.0 * sx * sy) + a3 * sx * sy;
  });
}

// Profile vanishing on the box boundary, 1 at the centre.
inline double bubble(const ovi::StructuredGrid& g, ovi::Point p) {
  const ovi::Box& b = g.extents();
  const double sx = (p.x - b.x0) / (b.x1 - b.x0);
  double v = 4.0 * sx * (1.0 - sx);
  if (g.dim() == 2) {
    const double sy = (p.y - b.y0) / (b.y1 - b.y0);
    v *= 4.0 * sy * (1.0 - sy);
  }
  return v;
}

// Random admissible two-obstacle problem: psi <= phi, both vanish on the
// boundary, with occasional absent obstacles. Forcing amplitude `f_amp`,
// obstacle amplitude `obs_amp`.
inline ovi::ObstacleProblem random_problem(const ovi::GridPtr& grid, oracle::Rng& rng, double f_amp,
                                           double obs_amp, bool allow_absent = true) {
  using namespace ovi;
  const double inf = std::numeric_limits<double>::infinity();
  const Field s1 = random_smooth(grid, rng, obs_amp), s2 = random_smooth(grid, rng, obs_amp);
  const Field f = random_smooth(grid, rng, f_amp);
  const double margin = 0.05 * obs_amp;
  Field psi(grid), phi(grid);
  for (int k = 0; k < grid->node_count(); ++k) {
    const double b = bubble(*grid, grid->position(k));
    psi[k] = b * (s1[k] - obs_amp);
    phi[k] = b * (s1[k] - obs_amp + std::abs(s2[k]) + margin + obs_amp);
  }
  const double coin = oracle::uniform(rng, 0.0, 1.0);
  if (allow_absent && coin < 0.15) psi = Field(grid, -inf);
  if (allow_absent && coin > 0.85) phi = Field(grid, inf);
  return {f, psi, phi};
}

// Interior values as a plain vector (for the enumeration oracles).
inline std::vector<double> interior(const ovi::Field& u) {
  std::vector<double> out;
  for (int node : u.grid()->interior_nodes()) out.push_back(u[node]);
  return out;
}

}  // namespace fixtures
