#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectra_internal.hpp"
#include "vortex/errors.hpp"

namespace vortex::spectra {

namespace {

using cd = std::complex<double>;

double localization(const linop::HarmonicBlockOperator& block, const Eigen::VectorXcd& v,
                    double radius_fraction) {
  const Eigen::Index n = block.n;
  const double cut = radius_fraction * block.r_max;
  double outer = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (block.r[i] > cut) outer += std::norm(v[i]) + std::norm(v[n + i]);
  }
  return outer / v.squaredNorm();
}

double residual(const linop::HarmonicBlockOperator& block, const Eigen::VectorXcd& v, cd mu) {
  return (block.K * v - mu * v).norm() / v.norm();
}

int numerical_rank(const Eigen::MatrixXcd& A, double threshold) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > threshold) ++r;
  return r;
}

// Scales v so |a|^2 - |b|^2 = -s and the largest component of a is real positive.
void normalise(EigenPair& pair, Eigen::Index n) {
  Eigen::VectorXcd& v = pair.vec;
  const double sigma3 = v.head(n).squaredNorm() - v.tail(n).squaredNorm();
  Eigen::Index imax = 0;
  v.head(n).cwiseAbs().maxCoeff(&imax);
  const cd phase = std::abs(v[imax]) > 0 ? std::conj(v[imax]) / std::abs(v[imax]) : cd(1.0);
  v *= phase / std::sqrt(std::abs(sigma3));
}

}  // namespace

int krein_signature(const linop::HarmonicBlockOperator& block, EigenPair& pair,
                    const FilterConfig& cfg) {
  if (pair.mu.imag() != 0.0 || pair.mu.real() == 0.0) {
    throw Error(ErrorCode::UndefinedSignature, "signature needs a real nonzero eigenvalue");
  }
  const double vv = pair.vec.squaredNorm();
  const double qS = std::real(pair.vec.dot(block.S * pair.vec));
  if (std::abs(qS) < cfg.signature_tol * vv) {
    std::ostringstream os;
    os << "quadratic form " << qS << " degenerate at mu=" << pair.mu.real() << " (k=" << block.k
       << ")";
    throw Error(ErrorCode::UndefinedSignature, os.str());
  }
  const int s = (qS * (pair.mu.real() > 0 ? 1.0 : -1.0) < 0.0) ? +1 : -1;
  normalise(pair, block.n);
  pair.s = s;
  pair.krein_form = std::real(pair.vec.dot(block.S * pair.vec));
  return s;
}

namespace detail {

BlockAnalysis analyze_block(const linop::HarmonicBlockOperator& block, const FilterConfig& cfg,
                            bool kernel_analysis) {
  std::vector<bool> have;
  EigenSystem es;
  if (cfg.vector_window > 0.0) {
    const double window = cfg.vector_window * block.omega;
    es = eig_general_selected(
        block.K, [window](cd mu) { return mu.imag() != 0.0 || std::abs(mu.real()) <= window; },
        &have);
  } else {
    es = eig_general(block.K, true);
    have.assign(static_cast<std::size_t>(es.values.size()), true);
  }
  const Eigen::Index N = es.values.size();
  BlockAnalysis out;
  out.kernel.k = block.k;

  std::vector<Eigen::Index> near_kernel;
  for (Eigen::Index i = 0; i < N; ++i) {
    const cd mu = es.values[i];
    const bool is_kernel = std::abs(mu) < cfg.kernel_tol;
    if (!have[static_cast<std::size_t>(i)]) continue;
    if (is_kernel) near_kernel.push_back(i);

    const Eigen::VectorXcd v = es.vectors.col(i);
    const double loc = localization(block, v, cfg.localization_radius);
    if (loc >= cfg.localization_threshold) continue;
    const double res = residual(block, v, mu);
    if (res >= cfg.residual_tol) continue;

    EigenPair pair;
    pair.mu = mu;
    pair.k = block.k;
    pair.vec = v;
    pair.residual = res;
    pair.localization = loc;
    pair.kernel = is_kernel;
    pair.embedded_candidate = !is_kernel && std::abs(mu.real()) >= block.omega;
    out.pairs.push_back(std::move(pair));
  }

  // Signatures, treating clusters of close real eigenvalues together.
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    EigenPair& p = out.pairs[i];
    if (p.kernel || p.mu.imag() != 0.0) continue;
    std::vector<std::size_t> cluster;
    for (std::size_t j = 0; j < out.pairs.size(); ++j) {
      const EigenPair& o = out.pairs[j];
      if (!o.kernel && o.mu.imag() == 0.0 && std::abs(o.mu.real() - p.mu.real()) < cfg.cluster_tol)
        cluster.push_back(j);
    }
    if (cluster.size() == 1) {
      try {
        krein_signature(block, p, cfg);
      } catch (const Error&) {
        p.s.reset();
      }
      continue;
    }
    Eigen::MatrixXcd V(block.K.rows(), static_cast<Eigen::Index>(cluster.size()));
    for (std::size_t c = 0; c < cluster.size(); ++c)
      V.col(static_cast<Eigen::Index>(c)) = out.pairs[cluster[c]].vec;
    const Eigen::MatrixXcd G = V.adjoint() * block.S * V;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_g(0.5 * (G + G.adjoint()));
    const auto& g = es_g.eigenvalues();
    const double scale = V.squaredNorm();
    const bool definite = g.minCoeff() > cfg.signature_tol * scale ||
                          g.maxCoeff() < -cfg.signature_tol * scale;
    if (!definite) {
      p.s.reset();
      continue;
    }
    try {
      krein_signature(block, p, cfg);
    } catch (const Error&) {
      p.s.reset();
    }
  }

  // Rank test on nonzero clusters: dependent eigenvectors signal a Jordan block.
  std::vector<bool> seen(out.pairs.size(), false);
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    if (seen[i] || out.pairs[i].kernel) continue;
    std::vector<std::size_t> cluster;
    for (std::size_t j = i; j < out.pairs.size(); ++j) {
      if (!out.pairs[j].kernel && std::abs(out.pairs[j].mu - out.pairs[i].mu) < cfg.cluster_tol) {
        cluster.push_back(j);
        seen[j] = true;
      }
    }
    if (cluster.size() < 2) continue;
    Eigen::MatrixXcd V(block.K.rows(), static_cast<Eigen::Index>(cluster.size()));
    for (std::size_t c = 0; c < cluster.size(); ++c)
      V.col(static_cast<Eigen::Index>(c)) = out.pairs[cluster[c]].vec.normalized();
    if (numerical_rank(V, 1e-6) < static_cast<int>(cluster.size())) ++out.jordan_clusters;
  }

  if (kernel_analysis && !near_kernel.empty()) {
    const auto d = static_cast<Eigen::Index>(near_kernel.size());
    Eigen::MatrixXcd V(N, d);
    for (Eigen::Index c = 0; c < d; ++c) V.col(c) = es.vectors.col(near_kernel[static_cast<std::size_t>(c)]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(V);
    qr.setThreshold(1e-12);
    const Eigen::Index r = qr.rank();
    const Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(N, r);
    const Eigen::MatrixXcd T = Q.adjoint() * (block.K.cast<cd>() * Q);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(T);
    const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    const double threshold = cfg.kernel_tol * std::max(1.0, smax);
    out.kernel.geo = static_cast<int>(r) - numerical_rank(T, threshold);
    out.kernel.alg = static_cast<int>(d);
  }
  return out;
}

}  // namespace detail

std::vector<EigenPair> point_spectrum(const linop::HarmonicBlockOperator& block,
                                      const FilterConfig& cfg) {
  return detail::analyze_block(block, cfg, false).pairs;
}

KernelDims kernel_dimensions(const linop::HarmonicBlockOperator& block, const FilterConfig& cfg) {
  return detail::analyze_block(block, cfg, true).kernel;
}

}  // namespace vortex::spectra
