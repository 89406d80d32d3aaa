#include "ovi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ovi/errors.hpp"

namespace ovi {

StructuredGrid::StructuredGrid(int dim, Box extents, int n) : dim_(dim), n_(n), box_(extents) {
  if (dim != 1 && dim != 2) throw GridError("grid dimension must be 1 or 2");
  if (n < 3) throw GridError("grid needs at least 3 nodes per axis, got " + std::to_string(n));
  const auto bad = [](double a, double b) { return !std::isfinite(a) || !std::isfinite(b) || !(b > a); };
  if (bad(box_.x0, box_.x1)) throw GridError("degenerate x extent");
  if (dim == 2 && bad(box_.y0, box_.y1)) throw GridError("degenerate y extent");
  if (dim == 1) {
    box_.y0 = 0.0;
    box_.y1 = 0.0;
  }

  hx_ = (box_.x1 - box_.x0) / (n - 1);
  hy_ = dim == 2 ? (box_.y1 - box_.y0) / (n - 1) : 1.0;

  const int rows = dim == 2 ? n : 1;
  const int count = n * rows;
  boundary_.assign(count, 0);
  interior_index_.assign(count, -1);
  masses_.assign(count, 0.0);
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < n; ++i) {
      const int node = node_at(i, j);
      const bool xb = i == 0 || i == n - 1;
      const bool yb = dim == 2 && (j == 0 || j == n - 1);
      boundary_[node] = (xb || yb) ? 1 : 0;
      const double mx = xb ? 0.5 * hx_ : hx_;
      const double my = dim == 2 ? (yb ? 0.5 * hy_ : hy_) : 1.0;
      masses_[node] = mx * my;
      if (!boundary_[node]) {
        interior_index_[node] = static_cast<int>(interior_.size());
        interior_.push_back(node);
      }
    }
  }
  build_edges();
  build_elements();
}

std::shared_ptr<const StructuredGrid> StructuredGrid::line(double x0, double x1, int n) {
  return std::make_shared<const StructuredGrid>(1, Box{x0, x1, 0.0, 0.0}, n);
}

std::shared_ptr<const StructuredGrid> StructuredGrid::rect(Box extents, int n) {
  return std::make_shared<const StructuredGrid>(2, extents, n);
}

double StructuredGrid::measure() const noexcept {
  const double lx = box_.x1 - box_.x0;
  return dim_ == 2 ? lx * (box_.y1 - box_.y0) : lx;
}

Point StructuredGrid::position(int node) const noexcept {
  const int i = node % n_;
  const int j = node / n_;
  // Last node pinned to the extent so boundary coordinates are exact.
  const double x = i == n_ - 1 ? box_.x1 : box_.x0 + i * hx_;
  if (dim_ == 1) return {x, 0.0};
  const double y = j == n_ - 1 ? box_.y1 : box_.y0 + j * hy_;
  return {x, y};
}

void StructuredGrid::build_edges() {
  const auto mid = [this](int a, int b) {
    const Point pa = position(a);
    const Point pb = position(b);
    return Point{0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
  };
  if (dim_ == 1) {
    for (int i = 0; i + 1 < n_; ++i) edges_.push_back({i, i + 1, mid(i, i + 1), hx_, hx_});
    return;
  }
  // Edges on the box boundary belong to a single cell and carry half weight,
  // which makes the p = 2 edge energy coincide with the P1 energy.
  const double cell = hx_ * hy_;
  for (int j = 0; j < n_; ++j) {
    const double w = (j == 0 || j == n_ - 1) ? 0.5 * cell : cell;
    for (int i = 0; i + 1 < n_; ++i) {
      const int a = node_at(i, j), b = node_at(i + 1, j);
      edges_.push_back({a, b, mid(a, b), hx_, w});
    }
  }
  for (int j = 0; j + 1 < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      const double w = (i == 0 || i == n_ - 1) ? 0.5 * cell : cell;
      const int a = node_at(i, j), b = node_at(i, j + 1);
      edges_.push_back({a, b, mid(a, b), hy_, w});
    }
  }
}

void StructuredGrid::build_elements() {
  const auto centroid = [this](const Element& e) {
    Point c;
    for (int k = 0; k < e.vertex_count; ++k) {
      const Point p = position(e.nodes[k]);
      c.x += p.x;
      c.y += p.y;
    }
    c.x /= e.vertex_count;
    c.y /= e.vertex_count;
    return c;
  };
  if (dim_ == 1) {
    for (int i = 0; i + 1 < n_; ++i) {
      Element e;
      e.vertex_count = 2;
      e.nodes = {i, i + 1, 0};
      e.grad[0] = {-1.0 / hx_, 1.0 / hx_, 0.0};
      e.measure = hx_;
      e.barycenter = centroid(e);
      elements_.push_back(e);
    }
    return;
  }
  const double area = 0.5 * hx_ * hy_;
  for (int j = 0; j + 1 < n_; ++j) {
    for (int i = 0; i + 1 < n_; ++i) {
      const int ll = node_at(i, j), lr = node_at(i + 1, j);
      const int ul = node_at(i, j + 1), ur = node_at(i + 1, j + 1);
      Element lower;
      lower.vertex_count = 3;
      lower.nodes = {ll, lr, ul};
      lower.grad[0] = {-1.0 / hx_, 1.0 / hx_, 0.0};
      lower.grad[1] = {-1.0 / hy_, 0.0, 1.0 / hy_};
      lower.measure = area;
      lower.barycenter = centroid(lower);
      elements_.push_back(lower);

      Element upper;
      upper.vertex_count = 3;
      upper.nodes = {ur, ul, lr};
      upper.grad[0] = {1.0 / hx_, -1.0 / hx_, 0.0};
      upper.grad[1] = {1.0 / hy_, 0.0, -1.0 / hy_};
      upper.measure = area;
      upper.barycenter = centroid(upper);
      elements_.push_back(upper);
    }
  }
}

bool StructuredGrid::operator==(const StructuredGrid& other) const noexcept {
  return dim_ == other.dim_ && n_ == other.n_ && box_.x0 == other.box_.x0 && box_.x1 == other.box_.x1 &&
         box_.y0 == other.box_.y0 && box_.y1 == other.box_.y1;
}

// ---------------------------------------------------------------------------

Field::Field(GridPtr grid, double fill) : grid_(std::move(grid)) {
  if (!grid_) throw GridError("field requires a grid");
  values_.assign(grid_->node_count(), fill);
}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw GridError("field requires a grid");
  if (static_cast<int>(values_.size()) != grid_->node_count()) {
    std::ostringstream msg;
    msg << "field has " << values_.size() << " values, grid has " << grid_->node_count() << " nodes";
    throw GridError(msg.str());
  }
}

Field Field::sample(GridPtr grid, const std::function<double(Point)>& fn) {
  Field out(grid);
  for (int k = 0; k < grid->node_count(); ++k) out.values_[k] = fn(grid->position(k));
  return out;
}

bool Field::vanishes_on_boundary() const noexcept {
  for (int k = 0; k < grid_->node_count(); ++k)
    if (grid_->on_boundary(k) && values_[k] != 0.0) return false;
  return true;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field operator+(Field a, double c) {
  for (double& v : a.values()) v += c;
  return a;
}

Field operator-(Field a, double c) { return std::move(a) + (-c); }

void require_same_grid(const Field& u, const Field& v) {
  if (!u.grid() || !v.grid()) throw GridError("field without grid");
  if (u.grid() != v.grid() && !(*u.grid() == *v.grid())) throw GridError("fields live on different grids");
}

namespace {

template <class Op>
Field zip(const Field& u, const Field& v, Op op) {
  require_same_grid(u, v);
  Field out(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = op(u[k], v[k]);
  return out;
}

}  // namespace

Field lattice_max(const Field& u, const Field& v) {
  return zip(u, v, [](double a, double b) { return std::max(a, b); });
}

Field lattice_min(const Field& u, const Field& v) {
  return zip(u, v, [](double a, double b) { return std::min(a, b); });
}

Field positive_part(const Field& u) {
  Field out(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::max(u[k], 0.0);
  return out;
}

Field negative_part(const Field& u) {
  Field out(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::max(-u[k], 0.0);
  return out;
}

double sup_norm(const Field& u) noexcept {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(const Field& u, const Field& v) {
  require_same_grid(u, v);
  double m = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) m = std::max(m, std::abs(u[k] - v[k]));
  return m;
}

double max_value(const Field& u) noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : u.values()) m = std::max(m, v);
  return m;
}

double min_value(const Field& u) noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (double v : u.values()) m = std::min(m, v);
  return m;
}

}  // namespace ovi
