#include "vortex/radial.hpp"

#include <cmath>
#include <cstdlib>

#include "vortex/errors.hpp"

namespace vortex::profiles {

RadialGrid::RadialGrid(std::size_t n, double r_max) : r_max_(r_max) {
  if (n < 8 || !(r_max > 0.0)) {
    throw Error(ErrorCode::GridMismatch, "radial grid needs n >= 8 and r_max > 0");
  }
  h_ = r_max / (static_cast<double>(n) + 0.5);
  r_.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < r_.size(); ++i) r_[i] = (static_cast<double>(i) + 0.5) * h_;
  w_ = r_ * h_;
}

Eigen::SparseMatrix<double> stiffness_matrix(const RadialGrid& grid, int j) {
  const auto n = static_cast<long>(grid.n());
  const double h = grid.h();
  const double parity = (std::abs(j) % 2 == 0) ? 1.0 : -1.0;
  static constexpr double kStencil[4] = {1.0, -27.0, 27.0, -1.0};

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n) * 16);

  // Half node k+1/2 sits at r = k h. The flux derivative there uses nodes k-1..k+2
  // (1-based); nodes at or below 0 mirror to 1 - node with the parity sign.
  for (long k = 1; k <= n + 1; ++k) {
    long col[4];
    double coef[4];
    int used = 0;
    for (int s = 0; s < 4; ++s) {
      long node = k - 1 + s;
      double c = kStencil[s] / (24.0 * h);
      if (node > n) continue;
      if (node <= 0) {
        node = 1 - node;
        c *= parity;
      }
      bool merged = false;
      for (int t = 0; t < used; ++t) {
        if (col[t] == node - 1) {
          coef[t] += c;
          merged = true;
        }
      }
      if (!merged) {
        col[used] = node - 1;
        coef[used] = c;
        ++used;
      }
    }
    const double weight = static_cast<double>(k) * h * h;
    for (int a = 0; a < used; ++a)
      for (int b = 0; b < used; ++b)
        entries.emplace_back(col[a], col[b], weight * coef[a] * coef[b]);
  }

  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseMatrix<double> Kt = K.transpose();
  return (0.5 * (K + Kt)).pruned();
}

Eigen::SparseMatrix<double> radial_operator(const RadialGrid& grid, int j) {
  Eigen::SparseMatrix<double> A = stiffness_matrix(grid, j);
  const Eigen::VectorXd inv_w = grid.weights().cwiseInverse();
  A = inv_w.asDiagonal() * A;
  const double jj = static_cast<double>(j) * j;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double ri = grid.r()[i];
    A.coeffRef(i, i) += jj / (ri * ri);
  }
  A.makeCompressed();
  return A;
}

Eigen::MatrixXd symmetric_radial_operator(const RadialGrid& grid, int j) {
  const Eigen::MatrixXd K = Eigen::MatrixXd(stiffness_matrix(grid, j));
  const Eigen::VectorXd s = grid.weights().cwiseSqrt().cwiseInverse();
  const Eigen::Index n = K.rows();
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) A(r, c) = K(r, c) * (s[r] * s[c]);
  const double jj = static_cast<double>(j) * j;
  for (Eigen::Index i = 0; i < n; ++i) A(i, i) += jj / (grid.r()[i] * grid.r()[i]);
  return A;
}

}  // namespace vortex::profiles
