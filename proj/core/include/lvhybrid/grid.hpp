#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "lvhybrid/expr.hpp"

namespace lvh {

class GridMismatch : public std::runtime_error {
 public:
  GridMismatch() : std::runtime_error("fields live on different grids") {}
};

/// Uniform node-centered grid with both endpoints included.
/// 2-d grids are tensor products; node i = iy * nodes_x + ix (x fastest).
class Grid {
 public:
  static std::shared_ptr<const Grid> interval(double extent, int nodes);
  static std::shared_ptr<const Grid> rectangle(double extent_x, double extent_y,
                                               int nodes_x, int nodes_y);

  int dimension() const { return dim_; }
  int nodes_x() const { return nx_; }
  int nodes_y() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  double extent_x() const { return ex_; }
  double extent_y() const { return ey_; }
  double spacing_x() const { return hx_; }
  double spacing_y() const { return hy_; }
  /// Measure of the domain, equal to the sum of quadrature weights.
  double measure() const;

  Point node(std::size_t i) const;
  /// Trapezoid quadrature weight of node i (tensor product in 2-d).
  double weight(std::size_t i) const { return weight_x(static_cast<int>(i) % nx_) * weight_y(static_cast<int>(i) / nx_); }
  double weight_x(int ix) const { return (ix == 0 || ix == nx_ - 1) ? 0.5 * hx_ : hx_; }
  double weight_y(int iy) const {
    if (dim_ == 1) return 1.0;
    return (iy == 0 || iy == ny_ - 1) ? 0.5 * hy_ : hy_;
  }
  bool same_layout(const Grid& other) const;

 private:
  Grid(int dim, double ex, double ey, int nx, int ny);
  int dim_;
  double ex_, ey_;
  int nx_, ny_;
  double hx_, hy_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Nodal values on a grid; value semantics, shared immutable grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  std::span<const double> values() const { return v_; }
  std::span<double> values() { return v_; }

 private:
  GridPtr grid_;
  std::vector<double> v_;
};

void require_same_grid(const ScalarField& a, const ScalarField& b);

/// Evaluate a profile at every node; DomainError propagates with the node location.
ScalarField sample(const Profile& p, const GridPtr& grid);

/// Trapezoid quadrature of the field over the domain.
double integrate(const ScalarField& f);

ScalarField positive_part(const ScalarField& f);
double sup_norm(const ScalarField& f);
double min_value(const ScalarField& f);
double sup_diff(const ScalarField& a, const ScalarField& b);

/// Rows `x[,y],value` at full precision, preceded by a header row.
void write_field_csv(const ScalarField& f, std::ostream& out);

/// A growth profile sampled on a grid, with the derived quantities the
/// theory depends on cached at construction.
struct Environment {
  Profile a;
  ScalarField field;
  double a_min = 0.0;
  double a_sup = 0.0;
  bool sink_set_nonempty = false;
};

Environment make_environment(const Profile& a, const GridPtr& grid);

}  // namespace lvh
