#include "lvhybrid/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace lvh {

Grid::Grid(int dim, double ex, double ey, int nx, int ny)
    : dim_(dim), ex_(ex), ey_(ey), nx_(nx), ny_(ny),
      hx_(ex / (nx - 1)), hy_(dim == 2 ? ey / (ny - 1) : 0.0) {}

GridPtr Grid::interval(double extent, int nodes) {
  if (!(extent > 0.0)) throw std::invalid_argument("grid extent must be positive");
  if (nodes < 3) throw std::invalid_argument("grids need at least 3 nodes per axis");
  return GridPtr(new Grid(1, extent, 0.0, nodes, 1));
}

GridPtr Grid::rectangle(double extent_x, double extent_y, int nodes_x, int nodes_y) {
  if (!(extent_x > 0.0) || !(extent_y > 0.0))
    throw std::invalid_argument("grid extents must be positive");
  if (nodes_x < 3 || nodes_y < 3)
    throw std::invalid_argument("grids need at least 3 nodes per axis");
  return GridPtr(new Grid(2, extent_x, extent_y, nodes_x, nodes_y));
}

double Grid::measure() const { return dim_ == 1 ? ex_ : ex_ * ey_; }

Point Grid::node(std::size_t i) const {
  const int ix = static_cast<int>(i) % nx_;
  const int iy = static_cast<int>(i) / nx_;
  return Point{ix * hx_, iy * hy_};
}

bool Grid::same_layout(const Grid& other) const {
  return dim_ == other.dim_ && nx_ == other.nx_ && ny_ == other.ny_ &&
         ex_ == other.ex_ && ey_ == other.ey_;
}

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), v_(grid_->size(), fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
  if (v_.size() != grid_->size())
    throw std::invalid_argument("value count does not match grid size");
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid_ptr() == b.grid_ptr()) return;
  if (!a.grid_ptr() || !b.grid_ptr() || !a.grid().same_layout(b.grid()))
    throw GridMismatch();
}

ScalarField sample(const Profile& p, const GridPtr& grid) {
  ScalarField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = p.expr.eval(grid->node(i));
  return f;
}

double integrate(const ScalarField& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f.grid().weight(i) * f[i];
  return sum;
}

ScalarField positive_part(const ScalarField& f) {
  ScalarField out = f;
  for (double& v : out.values())
    if (v < 0.0) v = 0.0;
  return out;
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::fmax(m, std::fabs(v));
  return m;
}

double min_value(const ScalarField& f) {
  double m = f[0];
  for (double v : f.values()) m = std::fmin(m, v);
  return m;
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
  return m;
}

void write_field_csv(const ScalarField& f, std::ostream& out) {
  const bool two_d = f.grid().dimension() == 2;
  out << (two_d ? "x,y,value\n" : "x,value\n");
  char buf[96];
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point p = f.grid().node(i);
    if (two_d)
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.x, p.y, f[i]);
    else
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.x, f[i]);
    out << buf;
  }
}

Environment make_environment(const Profile& a, const GridPtr& grid) {
  Environment env{a, sample(a, grid)};
  env.a_min = min_value(env.field);
  env.a_sup = sup_norm(env.field);
  env.sink_set_nonempty = env.a_min <= 0.0;
  return env;
}

}  // namespace lvh
