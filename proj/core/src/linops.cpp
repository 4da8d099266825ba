#include "lvhybrid/linops.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace lvh {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void laplacian_1d(const double* f, double* out, int n, double h, int stride) {
  const double ih2 = 1.0 / (h * h);
  out[0] = 2.0 * (f[stride] - f[0]) * ih2;
  for (int i = 1; i < n - 1; ++i)
    out[static_cast<std::ptrdiff_t>(i) * stride] =
        (f[static_cast<std::ptrdiff_t>(i - 1) * stride] - 2.0 * f[static_cast<std::ptrdiff_t>(i) * stride] +
         f[static_cast<std::ptrdiff_t>(i + 1) * stride]) * ih2;
  out[static_cast<std::ptrdiff_t>(n - 1) * stride] =
      2.0 * (f[static_cast<std::ptrdiff_t>(n - 2) * stride] - f[static_cast<std::ptrdiff_t>(n - 1) * stride]) * ih2;
}

/// Eigendecomposition of one axis: L = T diag(lambda) S with S = Q^T W^{1/2}
/// and T = W^{-1/2} Q, where W holds the trapezoid weights of the axis.
struct AxisBasis {
  Matrix S;
  Matrix T;
  Vector lambda;

  AxisBasis(int n, double h) {
    const double ih2 = 1.0 / (h * h);
    Matrix B = Matrix::Zero(n, n);
    B(0, 0) = B(n - 1, n - 1) = -2.0 * ih2;
    B(0, 1) = B(1, 0) = std::sqrt(2.0) * ih2;
    B(n - 1, n - 2) = B(n - 2, n - 1) = std::sqrt(2.0) * ih2;
    for (int i = 1; i < n - 1; ++i) {
      B(i, i) = -2.0 * ih2;
      if (i > 1) B(i, i - 1) = ih2;
      if (i < n - 2) B(i, i + 1) = ih2;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(B);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigendecomposition of the Laplacian failed");
    lambda = es.eigenvalues();
    Vector sqw(n);
    for (int i = 0; i < n; ++i) sqw(i) = std::sqrt((i == 0 || i == n - 1) ? 0.5 * h : h);
    S = es.eigenvectors().transpose() * sqw.asDiagonal();
    T = sqw.cwiseInverse().asDiagonal() * es.eigenvectors();
  }
};

}  // namespace

NonPositiveField::NonPositiveField(std::string field_name_, std::size_t node_, double value_)
    : std::runtime_error("field '" + field_name_ + "' is not strictly positive at node " +
                         std::to_string(node_) + " (value " + std::to_string(value_) + ")"),
      field_name(std::move(field_name_)), node(node_), value(value_) {}

NeumannLaplacian::NeumannLaplacian(GridPtr grid) : grid_(std::move(grid)) {}

ScalarField NeumannLaplacian::apply(const ScalarField& f) const {
  if (!f.grid().same_layout(*grid_)) throw GridMismatch();
  const Grid& g = f.grid();
  ScalarField out(f.grid_ptr());
  const int nx = g.nodes_x();
  if (g.dimension() == 1) {
    laplacian_1d(f.values().data(), out.values().data(), nx, g.spacing_x(), 1);
    return out;
  }
  const int ny = g.nodes_y();
  std::vector<double> tmp(out.size());
  for (int iy = 0; iy < ny; ++iy)
    laplacian_1d(f.values().data() + static_cast<std::ptrdiff_t>(iy) * nx,
                 out.values().data() + static_cast<std::ptrdiff_t>(iy) * nx, nx, g.spacing_x(), 1);
  for (int ix = 0; ix < nx; ++ix)
    laplacian_1d(f.values().data() + ix, tmp.data() + ix, ny, g.spacing_y(), nx);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
  return out;
}

ScalarField apply_laplacian(const ScalarField& f) {
  return NeumannLaplacian(f.grid_ptr()).apply(f);
}

struct LaplacianEigenbasis::Impl {
  GridPtr grid;
  AxisBasis x;
  std::unique_ptr<AxisBasis> y;
  std::vector<double> lambda_flat;

  explicit Impl(GridPtr g)
      : grid(std::move(g)), x(grid->nodes_x(), grid->spacing_x()) {
    if (grid->dimension() == 2) {
      y = std::make_unique<AxisBasis>(grid->nodes_y(), grid->spacing_y());
      lambda_flat.resize(grid->size());
      for (int iy = 0; iy < grid->nodes_y(); ++iy)
        for (int ix = 0; ix < grid->nodes_x(); ++ix)
          lambda_flat[static_cast<std::size_t>(iy) * grid->nodes_x() + ix] =
              x.lambda(ix) + y->lambda(iy);
    } else {
      lambda_flat.assign(x.lambda.data(), x.lambda.data() + grid->nodes_x());
    }
  }
};

LaplacianEigenbasis::LaplacianEigenbasis(GridPtr grid)
    : impl_(std::make_shared<Impl>(std::move(grid))) {}

std::vector<double> LaplacianEigenbasis::forward(const ScalarField& f) const {
  if (!f.grid().same_layout(*impl_->grid)) throw GridMismatch();
  const int nx = impl_->grid->nodes_x();
  std::vector<double> out(f.size());
  if (impl_->grid->dimension() == 1) {
    Eigen::Map<Vector>(out.data(), nx) =
        impl_->x.S * Eigen::Map<const Vector>(f.values().data(), nx);
  } else {
    const int ny = impl_->grid->nodes_y();
    ConstRowMap F(f.values().data(), ny, nx);
    RowMap C(out.data(), ny, nx);
    C = impl_->y->S * F * impl_->x.S.transpose();
  }
  return out;
}

ScalarField LaplacianEigenbasis::inverse(std::span<const double> coeffs) const {
  if (coeffs.size() != impl_->grid->size())
    throw std::invalid_argument("coefficient count does not match grid size");
  const int nx = impl_->grid->nodes_x();
  ScalarField out(impl_->grid);
  if (impl_->grid->dimension() == 1) {
    Eigen::Map<Vector>(out.values().data(), nx) =
        impl_->x.T * Eigen::Map<const Vector>(coeffs.data(), nx);
  } else {
    const int ny = impl_->grid->nodes_y();
    ConstRowMap C(coeffs.data(), ny, nx);
    RowMap F(out.values().data(), ny, nx);
    F = impl_->y->T * C * impl_->x.T.transpose();
  }
  return out;
}

std::span<const double> LaplacianEigenbasis::eigenvalues() const {
  return impl_->lambda_flat;
}

const GridPtr& LaplacianEigenbasis::grid_ptr() const { return impl_->grid; }

DiffusionSolver::DiffusionSolver(GridPtr grid, double c) : grid_(std::move(grid)), c_(c) {
  if (c < 0.0) throw std::invalid_argument("diffusion coefficient c must be >= 0");
  if (c == 0.0) return;
  if (grid_->dimension() == 2) {
    basis_ = std::make_shared<LaplacianEigenbasis>(grid_);
    return;
  }
  const int n = grid_->nodes_x();
  const double gamma = c / (grid_->spacing_x() * grid_->spacing_x());
  upper_.assign(n - 1, -gamma);
  upper_[0] = -2.0 * gamma;
  std::vector<double> lower_orig(n - 1, -gamma);
  lower_orig[n - 2] = -2.0 * gamma;
  lower_.assign(n, 0.0);
  pivot_.assign(n, 0.0);
  pivot_[0] = 1.0 + 2.0 * gamma;
  for (int i = 1; i < n; ++i) {
    lower_[i] = lower_orig[i - 1] / pivot_[i - 1];
    pivot_[i] = (1.0 + 2.0 * gamma) - lower_[i] * upper_[i - 1];
  }
}

ScalarField DiffusionSolver::solve(const ScalarField& b) const {
  if (!b.grid().same_layout(*grid_)) throw GridMismatch();
  if (c_ == 0.0) return b;
  ScalarField r = apply_laplacian(b);
  for (double& v : r.values()) v *= c_;

  if (basis_) {
    std::vector<double> coeffs = basis_->forward(r);
    std::span<const double> lam = basis_->eigenvalues();
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] /= (1.0 - c_ * lam[i]);
    ScalarField y = basis_->inverse(coeffs);
    ScalarField out = b;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
    return out;
  }

  const int n = grid_->nodes_x();
  std::span<double> y = r.values();
  for (int i = 1; i < n; ++i) y[i] -= lower_[i] * y[i - 1];
  y[n - 1] /= pivot_[n - 1];
  for (int i = n - 2; i >= 0; --i) y[i] = (y[i] - upper_[i] * y[i + 1]) / pivot_[i];
  ScalarField out = b;
  for (int i = 0; i < n; ++i) out[i] += y[i];
  return out;
}

ScalarField solve_diffusion(const ScalarField& b, double c) {
  return DiffusionSolver(b.grid_ptr(), c).solve(b);
}

DiffusionPropagator::DiffusionPropagator(GridPtr grid, double d)
    : d_(d), basis_(std::make_shared<LaplacianEigenbasis>(std::move(grid))) {
  if (d < 0.0) throw std::invalid_argument("diffusion rate d must be >= 0");
}

ScalarField DiffusionPropagator::apply(const ScalarField& f, double t) const {
  std::vector<double> coeffs = basis_->forward(f);
  std::span<const double> lam = basis_->eigenvalues();
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= std::exp(t * d_ * lam[i]);
  return basis_->inverse(coeffs);
}

double grad_log_energy(const ScalarField& u) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!(u[i] > 0.0)) throw NonPositiveField("u", i, u[i]);
  const Grid& g = u.grid();
  const int nx = g.nodes_x();
  const int ny = g.dimension() == 2 ? g.nodes_y() : 1;
  const double hx = g.spacing_x();
  double sum = 0.0;
  for (int iy = 0; iy < ny; ++iy) {
    const double wy = g.weight_y(iy);
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
      const double dl = std::log(u[i + 1]) - std::log(u[i]);
      sum += wy * dl * dl / hx;
    }
  }
  if (g.dimension() == 2) {
    const double hy = g.spacing_y();
    for (int ix = 0; ix < nx; ++ix) {
      const double wx = g.weight_x(ix);
      for (int iy = 0; iy + 1 < ny; ++iy) {
        const std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
        const double dl = std::log(u[i + nx]) - std::log(u[i]);
        sum += wx * dl * dl / hy;
      }
    }
  }
  return sum;
}

}  // namespace lvh
