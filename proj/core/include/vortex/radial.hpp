#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace vortex::profiles {

// Cell-centred radial grid: r_i = (i - 1/2) h, h = r_max / (n + 1/2), Dirichlet at r_max.
class RadialGrid {
 public:
  RadialGrid(std::size_t n, double r_max);

  std::size_t n() const { return r_.size(); }
  double r_max() const { return r_max_; }
  double h() const { return h_; }
  const Eigen::VectorXd& r() const { return r_; }
  // Midpoint weights for the measure r dr.
  const Eigen::VectorXd& weights() const { return w_; }

  double integrate(const Eigen::VectorXd& f) const { return w_.dot(f); }
  bool same_as(const RadialGrid& other) const {
    return n() == other.n() && r_max_ == other.r_max_;
  }

 private:
  double r_max_;
  double h_;
  Eigen::VectorXd r_;
  Eigen::VectorXd w_;
};

// Symmetric matrix with psi^T K psi ~ int |psi'|^2 r dr for angular index j.
// The parity of j decides the mirror rule for ghost values at r < 0.
Eigen::SparseMatrix<double> stiffness_matrix(const RadialGrid& grid, int j);

// Pointwise operator -psi'' - psi'/r + j^2 psi / r^2, i.e. M^{-1} K + j^2/r^2.
Eigen::SparseMatrix<double> radial_operator(const RadialGrid& grid, int j);

// Similarity transform M^{1/2} (radial_operator) M^{-1/2}; symmetric to round-off.
Eigen::MatrixXd symmetric_radial_operator(const RadialGrid& grid, int j);

}  // namespace vortex::profiles
