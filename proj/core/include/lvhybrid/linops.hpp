#pragma once

#include "lvhybrid/grid.hpp"

namespace lvh {

class NonPositiveField : public std::runtime_error {
 public:
  NonPositiveField(std::string field_name, std::size_t node, double value);
  std::string field_name;
  std::size_t node;
  double value;
};

/// Discrete Neumann Laplacian; the boundary stencil reflects across the wall
/// (ghost value f(-h) := f(h)), which keeps the operator symmetric under the
/// trapezoid inner product and makes its quadrature sum vanish identically.
class NeumannLaplacian {
 public:
  explicit NeumannLaplacian(GridPtr grid);
  ScalarField apply(const ScalarField& f) const;
  const GridPtr& grid_ptr() const { return grid_; }

 private:
  GridPtr grid_;
};

ScalarField apply_laplacian(const ScalarField& f);

/// Orthonormal eigenbasis of the Neumann Laplacian with respect to the
/// trapezoid inner product; tensor product of the per-axis bases in 2-d.
class LaplacianEigenbasis {
 public:
  explicit LaplacianEigenbasis(GridPtr grid);
  std::vector<double> forward(const ScalarField& f) const;
  ScalarField inverse(std::span<const double> coeffs) const;
  /// One eigenvalue per coefficient, all <= 0 up to rounding.
  std::span<const double> eigenvalues() const;
  const GridPtr& grid_ptr() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Factorized direct solver for (I - c L), c >= 0: Thomas algorithm in 1-d,
/// spectral factorization in 2-d. Solves are done in deviation form
/// x = b + (I - cL)^{-1}(cLb) so constant inputs pass through bit-exactly.
class DiffusionSolver {
 public:
  DiffusionSolver(GridPtr grid, double c);
  ScalarField solve(const ScalarField& b) const;
  double coefficient() const { return c_; }

 private:
  GridPtr grid_;
  double c_;
  std::vector<double> lower_, pivot_, upper_;  // 1-d LU factors
  std::shared_ptr<const LaplacianEigenbasis> basis_;  // 2-d path
};

ScalarField solve_diffusion(const ScalarField& b, double c);

/// Exact discrete diffusion semigroup exp(t d L) through the eigenbasis.
class DiffusionPropagator {
 public:
  DiffusionPropagator(GridPtr grid, double d);
  ScalarField apply(const ScalarField& f, double t) const;
  double rate() const { return d_; }

 private:
  double d_;
  std::shared_ptr<const LaplacianEigenbasis> basis_;
};

/// Edge-midpoint discretization of the Dirichlet energy of ln u:
/// sum over edges of (difference of ln u)^2 / h^2 times the edge measure.
/// Requires u strictly positive.
double grad_log_energy(const ScalarField& u);

}  // namespace lvh
