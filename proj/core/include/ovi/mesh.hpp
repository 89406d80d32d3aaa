#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace ovi {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Axis-aligned domain box. In 1D only [x0, x1] is used.
struct Box {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
};

// Grid edge between two axis-neighbours. `length` is the spacing along the
// edge direction, `weight` its quadrature weight in the edge energy.
struct Edge {
  int a = 0;
  int b = 0;
  Point midpoint;
  double length = 0.0;
  double weight = 0.0;
};

// Linear simplex: an interval in 1D, a right triangle in 2D. `grad[d][k]` is
// the coefficient of vertex k in the d-th component of the (constant) gradient.
struct Element {
  static constexpr int kMaxVertices = 3;
  int vertex_count = 0;
  std::array<int, kMaxVertices> nodes{};
  std::array<std::array<double, kMaxVertices>, 2> grad{};
  Point barycenter;
  double measure = 0.0;
};

// Uniform structured grid on an interval or rectangle with the box boundary
// treated as homogeneous Dirichlet. Nodes are numbered row-major (x fastest).
class StructuredGrid {
 public:
  StructuredGrid(int dim, Box extents, int n);

  static std::shared_ptr<const StructuredGrid> line(double x0, double x1, int n);
  static std::shared_ptr<const StructuredGrid> rect(Box extents, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  const Box& extents() const noexcept { return box_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  int node_count() const noexcept { return static_cast<int>(boundary_.size()); }
  int interior_count() const noexcept { return static_cast<int>(interior_.size()); }
  double measure() const noexcept;

  Point position(int node) const noexcept;
  bool on_boundary(int node) const noexcept { return boundary_[node] != 0; }
  // Interior numbering: -1 for Dirichlet nodes.
  int interior_index(int node) const noexcept { return interior_index_[node]; }
  std::span<const int> interior_nodes() const noexcept { return interior_; }
  int node_at(int i, int j = 0) const noexcept { return j * n_ + i; }

  // Lumped (tensor trapezoidal) nodal weights; they sum to |Omega|.
  const std::vector<double>& lumped_masses() const noexcept { return masses_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  // Intervals in 1D; in 2D each cell is cut along the same diagonal into
  // two right triangles.
  const std::vector<Element>& elements() const noexcept { return elements_; }

  bool operator==(const StructuredGrid& other) const noexcept;

 private:
  void build_edges();
  void build_elements();

  int dim_;
  int n_;
  Box box_;
  double hx_;
  double hy_;
  std::vector<char> boundary_;
  std::vector<int> interior_;
  std::vector<int> interior_index_;
  std::vector<double> masses_;
  std::vector<Edge> edges_;
  std::vector<Element> elements_;
};

using GridPtr = std::shared_ptr<const StructuredGrid>;

// Nodal values on a grid. Values may be +/-infinity (absent obstacles).
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, double fill = 0.0);
  Field(GridPtr grid, std::vector<double> values);

  static Field sample(GridPtr grid, const std::function<double(Point)>& fn);

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  // True when every Dirichlet node carries zero (the discrete W_0 space).
  bool vanishes_on_boundary() const noexcept;
  bool all_finite() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
Field operator+(Field a, double c);
Field operator-(Field a, double c);

// Throws GridError unless both fields live on equal grids.
void require_same_grid(const Field& u, const Field& v);

Field lattice_max(const Field& u, const Field& v);
Field lattice_min(const Field& u, const Field& v);
Field positive_part(const Field& u);
Field negative_part(const Field& u);  // u^- = -(u ^ 0), so u = u^+ - u^-

double sup_norm(const Field& u) noexcept;
double sup_distance(const Field& u, const Field& v);
double max_value(const Field& u) noexcept;
double min_value(const Field& u) noexcept;

}  // namespace ovi
