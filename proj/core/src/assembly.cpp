#include "ovi/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ovi/errors.hpp"

namespace ovi {

std::string to_string(Scheme s) { return s == Scheme::edge ? "edge" : "p1"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "edge") return Scheme::edge;
  if (name == "p1") return Scheme::p1;
  throw InvalidArgument("unknown scheme '" + name + "' (expected edge|p1)");
}

double DualField::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

Field DualField::to_field() const {
  Field out(grid);
  const auto nodes = grid->interior_nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) out[nodes[k]] = values[k];
  return out;
}

DiscreteOperator::DiscreteOperator(GridPtr grid, YoungFunction yf, Scheme scheme)
    : grid_(std::move(grid)), yf_(std::move(yf)), scheme_(scheme) {
  if (!grid_) throw InvalidArgument("operator without grid");
  const auto& mass = grid_->lumped_masses();
  for (int node : grid_->interior_nodes()) masses_.push_back(mass[node]);
}

namespace {

struct ElementGradient {
  double q[2] = {0.0, 0.0};
  double norm = 0.0;
};

ElementGradient element_gradient(const Element& e, const Field& u, int dim) {
  ElementGradient eg;
  for (int d = 0; d < dim; ++d) {
    double s = 0.0;
    for (int k = 0; k < e.vertex_count; ++k) s += e.grad[d][k] * u[e.nodes[k]];
    eg.q[d] = s;
  }
  eg.norm = std::hypot(eg.q[0], eg.q[1]);
  return eg;
}

[[noreturn]] void rethrow_with_context(const Error& err, const char* kind, int index, int a, int b) {
  std::ostringstream os;
  os << kind << " " << index << " (nodes " << a << ", " << b << "): " << err.what();
  throw EvaluationError(os.str());
}

}  // namespace

double DiscreteOperator::internal_energy(const Field& u) const {
  require_same_grid(u, Field(grid_));
  double total = 0.0;
  if (scheme_ == Scheme::edge) {
    const auto& edges = grid_->edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      const double t = std::abs(u[e.b] - u[e.a]) / e.length;
      try {
        total += e.weight * yf_.G(e.midpoint, t);
      } catch (const Error& err) {
        rethrow_with_context(err, "edge", static_cast<int>(k), e.a, e.b);
      }
    }
  } else {
    const auto& elems = grid_->elements();
    for (std::size_t k = 0; k < elems.size(); ++k) {
      const Element& e = elems[k];
      const ElementGradient eg = element_gradient(e, u, grid_->dim());
      try {
        total += e.measure * yf_.G(e.barycenter, eg.norm);
      } catch (const Error& err) {
        rethrow_with_context(err, "element", static_cast<int>(k), e.nodes[0], e.nodes[1]);
      }
    }
  }
  if (!std::isfinite(total)) throw EvaluationError("internal energy is not finite");
  return total;
}

double DiscreteOperator::energy(const Field& u, const Field& f) const {
  require_same_grid(u, f);
  double load = 0.0;
  const auto nodes = grid_->interior_nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) load += masses_[k] * f[nodes[k]] * u[nodes[k]];
  return internal_energy(u) - load;
}

void DiscreteOperator::internal_gradient(const Field& u, std::span<double> out) const {
  if (out.size() != masses_.size()) throw InvalidArgument("gradient buffer has wrong size");
  std::fill(out.begin(), out.end(), 0.0);
  const StructuredGrid& g = *grid_;
  const auto add = [&](int node, double v) {
    const int i = g.interior_index(node);
    if (i >= 0) out[i] += v;
  };
  if (scheme_ == Scheme::edge) {
    for (const Edge& e : g.edges()) {
      if (g.on_boundary(e.a) && g.on_boundary(e.b)) continue;
      const double flux = e.weight * yf_.g(e.midpoint, (u[e.b] - u[e.a]) / e.length) / e.length;
      add(e.b, flux);
      add(e.a, -flux);
    }
    return;
  }
  for (const Element& e : g.elements()) {
    const ElementGradient eg = element_gradient(e, u, g.dim());
    if (eg.norm == 0.0) continue;
    const double coef = e.measure * yf_.g(e.barycenter, eg.norm) / eg.norm;
    for (int k = 0; k < e.vertex_count; ++k)
      add(e.nodes[k], coef * (eg.q[0] * e.grad[0][k] + eg.q[1] * e.grad[1][k]));
  }
}

SparseMatrix DiscreteOperator::internal_hessian(const Field& u, bool secant_floor) const {
  const StructuredGrid& g = *grid_;
  std::vector<Eigen::Triplet<double>> trip;
  const auto put = [&](int na, int nb, double v) {
    const int i = g.interior_index(na), j = g.interior_index(nb);
    if (i >= 0 && j >= 0) trip.emplace_back(i, j, v);
  };
  if (scheme_ == Scheme::edge) {
    for (const Edge& e : g.edges()) {
      if (g.on_boundary(e.a) && g.on_boundary(e.b)) continue;
      const double t = (u[e.b] - u[e.a]) / e.length;
      double curv = yf_.dg(e.midpoint, t);
      if (secant_floor) curv = std::max(curv, yf_.structural().a(e.midpoint, std::max(std::abs(t), kGradientFloor)));
      const double c = e.weight * curv / (e.length * e.length);
      put(e.a, e.a, c);
      put(e.b, e.b, c);
      put(e.a, e.b, -c);
      put(e.b, e.a, -c);
    }
  } else {
    const int dim = g.dim();
    for (const Element& e : g.elements()) {
      const ElementGradient eg = element_gradient(e, u, dim);
      // d/dq [a(|q|) q] = a I + (g' - a) n n^T with n = q / |q|.
      const double t = std::max(eg.norm, kGradientFloor);
      double slope = yf_.dg(e.barycenter, t);
      if (secant_floor) slope = std::max(slope, yf_.structural().a(e.barycenter, t));
      double M[2][2];
      if (eg.norm < kGradientFloor) {
        M[0][0] = M[1][1] = slope;
        M[0][1] = M[1][0] = 0.0;
      } else {
        const double a = yf_.structural().a(e.barycenter, t);
        const double n0 = eg.q[0] / eg.norm, n1 = eg.q[1] / eg.norm;
        M[0][0] = a + (slope - a) * n0 * n0;
        M[1][1] = a + (slope - a) * n1 * n1;
        M[0][1] = M[1][0] = (slope - a) * n0 * n1;
      }
      for (int k = 0; k < e.vertex_count; ++k) {
        for (int l = 0; l < e.vertex_count; ++l) {
          double v = 0.0;
          for (int d1 = 0; d1 < dim; ++d1)
            for (int d2 = 0; d2 < dim; ++d2) v += e.grad[d1][k] * M[d1][d2] * e.grad[d2][l];
          put(e.nodes[k], e.nodes[l], e.measure * v);
        }
      }
    }
  }
  const int n = g.interior_count();
  SparseMatrix H(n, n);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

DualField DiscreteOperator::apply(const Field& u) const {
  require_same_grid(u, Field(grid_));
  DualField out{grid_, std::vector<double>(masses_.size())};
  internal_gradient(u, out.values);
  for (std::size_t i = 0; i < masses_.size(); ++i) out.values[i] /= masses_[i];
  return out;
}

DualField DiscreteOperator::residual(const Field& u, const Field& f) const {
  require_same_grid(u, f);
  DualField out = apply(u);
  const auto nodes = grid_->interior_nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) out.values[i] -= f[nodes[i]];
  return out;
}

Field DiscreteOperator::from_interior(std::span<const double> x) const {
  Field out(grid_);
  const auto nodes = grid_->interior_nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) out[nodes[i]] = x[i];
  return out;
}

std::vector<double> DiscreteOperator::to_interior(const Field& u) const {
  const auto nodes = grid_->interior_nodes();
  std::vector<double> x(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) x[i] = u[nodes[i]];
  return x;
}

// ---------------------------------------------------------------------------

FieldEnergy::FieldEnergy(const DiscreteOperator& op, Field f) : op_(op), f_(std::move(f)) {
  require_same_grid(f_, Field(op.grid()));
  if (!f_.all_finite()) throw InvalidArgument("forcing term must be finite");
}

double FieldEnergy::value(std::span<const double> x) const { return op_.energy(op_.from_interior(x), f_); }

double FieldEnergy::value_scale(std::span<const double> x) const {
  const Field u = op_.from_interior(x);
  double load = 0.0;
  const auto nodes = op_.grid()->interior_nodes();
  const auto m = op_.interior_masses();
  for (std::size_t i = 0; i < nodes.size(); ++i) load += std::abs(m[i] * f_[nodes[i]] * x[i]);
  return op_.internal_energy(u) + load;
}

void FieldEnergy::gradient(std::span<const double> x, std::span<double> g) const {
  op_.internal_gradient(op_.from_interior(x), g);
  const auto nodes = op_.grid()->interior_nodes();
  const auto m = op_.interior_masses();
  for (std::size_t i = 0; i < nodes.size(); ++i) g[i] -= m[i] * f_[nodes[i]];
}

SparseMatrix FieldEnergy::hessian(std::span<const double> x) const {
  return op_.internal_hessian(op_.from_interior(x), true);
}

SolveResult solve_equation(const DiscreteOperator& op, const Field& f, const SolverOptions& opts) {
  FieldEnergy energy(op, f);
  const std::size_t n = energy.size();
  const double inf = std::numeric_limits<double>::infinity();
  BoxBounds box{std::vector<double>(n, -inf), std::vector<double>(n, inf)};
  MinimizeResult r = minimize_box(energy, box, std::vector<double>(n, 0.0), opts);
  r.report.scheme = to_string(op.scheme());
  return {op.from_interior(r.x), std::move(r.report)};
}

}  // namespace ovi
