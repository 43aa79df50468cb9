#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "vortex/errors.hpp"
#include "vortex/spectra.hpp"

namespace vortex::spectra {

namespace {

using Eigen::VectorXd;

// State u = sum_j e^{i j theta} f_j(r) with real radial coefficients.
using Harmonics = std::map<int, VectorXd>;

// Kinetic energy difference (1/2) int |grad u|^2 - (1/2) int |grad base|^2, exact per harmonic.
double kinetic_difference(const profiles::RadialGrid& grid, const Harmonics& base,
                          const Harmonics& state) {
  double total = 0.0;
  for (const auto& [j, f] : state) {
    const Eigen::SparseMatrix<double> K = profiles::stiffness_matrix(grid, std::abs(j));
    const VectorXd b = base.count(j) ? base.at(j) : VectorXd::Zero(f.size());
    const VectorXd d = f - b;
    double diff = 2.0 * b.dot(K * d) + d.dot(K * d);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double r = grid.r()[i];
      diff += grid.weights()[i] * j * j * (2.0 * b[i] * d[i] + d[i] * d[i]) / (r * r);
    }
    total += M_PI * diff;
  }
  return total;
}

struct AngularSums {
  double mass = 0.0;          // (1/2) int |u|^2
  double local_change = 0.0;  // (1/2) int eps V (|u|^2 - |phi|^2) + B(|u|^2) - B(|phi|^2)
};

AngularSums angular_sums(const profiles::RadialGrid& grid, const profiles::NonlinearityModel& model,
                         double eps_v, const VectorXd& V, const VectorXd& psi, const Harmonics& state,
                         int n_theta) {
  AngularSums out;
  const double dtheta = 2.0 * M_PI / n_theta;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double s0 = psi[i] * psi[i];
    const double B0 = model.B(s0);
    double mass = 0.0;
    double local = 0.0;
    for (int t = 0; t < n_theta; ++t) {
      const double theta = t * dtheta;
      std::complex<double> u = 0.0;
      for (const auto& [j, f] : state) u += std::polar(f[i], j * theta);
      const double s = std::norm(u);
      mass += s;
      local += eps_v * V[i] * (s - s0) + (model.B(s) - B0);
    }
    out.mass += 0.5 * grid.weights()[i] * dtheta * mass;
    out.local_change += 0.5 * grid.weights()[i] * dtheta * local;
  }
  return out;
}

}  // namespace

TrappingResult trapping_test(const profiles::RadialProfile& profile,
                             const profiles::RadialPotential& potential,
                             const profiles::NonlinearityModel& model, const SpectrumReport& report,
                             std::size_t j, bool allow_positive, const std::vector<double>& eps) {
  if (j >= report.catalog.size()) {
    throw Error(ErrorCode::SignatureMismatch, "catalog index out of range");
  }
  const CatalogEntry& entry = report.catalog[j];
  if (entry.s != 1 && !allow_positive) {
    std::ostringstream os;
    os << "catalog entry lambda=" << entry.lambda << " (k=" << entry.k << ") has s=" << entry.s
       << ", the energy direction needs s=+1";
    throw Error(ErrorCode::SignatureMismatch, os.str());
  }
  if (entry.s == 0) {
    throw Error(ErrorCode::UndefinedSignature, "catalog entry has no signature");
  }
  const EigenPair& pair = report.pairs.at(entry.pair_index);
  const int k = entry.k;
  linop::BlockConfig bcfg;
  bcfg.k_max = std::max(bcfg.k_max, k);
  const linop::HarmonicBlockOperator block = linop::assemble_block(profile, potential, model, k, bcfg);

  TrappingResult out;
  out.lambda = entry.lambda;
  out.s = entry.s;
  out.expected = -2.0 * entry.s * entry.lambda;
  out.form_value = 2.0 * std::real(pair.vec.dot(block.S * pair.vec));
  out.not_trapped = out.form_value < 0.0;

  // Perturbation w = pi^{-1/2} e^{i m theta} (A e^{i k theta} + B e^{-i k theta}) in nodal values,
  // so that the plane Hessian form of w equals 2 <S v, v>.
  const auto& grid = profile.grid;
  const Eigen::Index n = block.n;
  const double c = 1.0 / std::sqrt(M_PI);
  VectorXd A(n), B(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = std::sqrt(grid.weights()[i]);
    A[i] = c * pair.vec[i].real() / sw;
    B[i] = c * pair.vec[n + i].real() / sw;
  }
  const int m = profile.m;
  const VectorXd& psi = profile.psi;
  const VectorXd& w = grid.weights();
  const double q = M_PI * w.dot(psi.cwiseProduct(psi));
  double p = 0.0;
  double qw = 0.0;
  if (k == 0) {
    const VectorXd AB = A + B;
    p = 2.0 * M_PI * w.dot(psi.cwiseProduct(AB));
    qw = M_PI * w.dot(AB.cwiseProduct(AB));
  } else {
    qw = M_PI * (w.dot(A.cwiseProduct(A)) + w.dot(B.cwiseProduct(B)));
  }

  const double eps_v = potential.active() ? potential.strength : 0.0;
  const VectorXd V = potential.sample(grid);
  const int n_theta = std::max(16, 8 * k + 8);
  Harmonics base;
  base[m] = psi;

  out.eps = eps;
  for (double e : eps) {
    // Smaller root of q a^2 - (2q + e p) a + (e p + e^2 qw) = 0, i.e. Q(u) = Q(phi).
    const double qa = q;
    const double qb = 2.0 * q + e * p;
    const double qc = e * p + e * e * qw;
    const double alpha = 2.0 * qc / (qb + std::sqrt(qb * qb - 4.0 * qa * qc));
    Harmonics state;
    if (k == 0) {
      state[m] = (1.0 - alpha) * psi + e * (A + B);
    } else {
      state[m] = (1.0 - alpha) * psi;
      state[m + k] = e * A;
      state[m - k] = e * B;
    }
    const AngularSums sums = angular_sums(grid, model, eps_v, V, psi, state, n_theta);
    const double dE = kinetic_difference(grid, base, state) + sums.local_change;
    out.alpha.push_back(alpha);
    out.delta_energy.push_back(dE);
    out.mass_error = std::max(out.mass_error, std::abs(sums.mass - q) / q);
  }

  // Least-squares slope of log alpha against log eps.
  if (eps.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double x = std::log(eps[i]);
      const double y = std::log(std::abs(out.alpha[i]));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    out.alpha_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }
  const std::size_t mid = eps.size() / 2;
  if (!eps.empty() && out.form_value != 0.0) {
    out.energy_ratio = (out.delta_energy[mid] / (eps[mid] * eps[mid])) / (0.5 * out.form_value);
  }
  return out;
}

}  // namespace vortex::spectra
