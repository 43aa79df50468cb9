#include <algorithm>
#include <cmath>
#include <sstream>

#include "vortex/errors.hpp"
#include "vortex/spectra.hpp"

namespace vortex::spectra {

IndexResult negative_index(const profiles::RadialProfile& profile,
                           const profiles::RadialPotential& potential,
                           const profiles::NonlinearityModel& model, double q_prime,
                           const SpectrumReport& report, const SpectrumConfig& cfg) {
  const bool translation_invariant = !potential.active();
  linop::BlockConfig bcfg;
  bcfg.k_max = cfg.k_max;

  IndexResult out;
  for (int k = 0; k <= cfg.k_max; ++k) {
    const linop::HarmonicBlockOperator block =
        linop::assemble_block(profile, potential, model, k, bcfg);
    Eigen::VectorXd sigma = eig_symmetric(block.S);

    // Known kernel directions: the gauge mode at k = 0 and one translation per k = +-1 block.
    const int deflate = (k == 0 || (k == 1 && translation_invariant)) ? 1 : 0;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(sigma.size()));
    for (Eigen::Index i = 0; i < sigma.size(); ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::abs(sigma[a]) < std::abs(sigma[b]);
    });
    int negatives = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const double v = sigma[order[i]];
      if (static_cast<int>(i) < deflate) continue;
      if (std::abs(v) < 1e-8) {
        std::ostringstream os;
        os << "Hessian block k=" << k << " has eigenvalue " << v
           << " near 0 outside the known kernel; refine the grid";
        throw Error(ErrorCode::Inconclusive, os.str());
      }
      if (v < 0.0) ++negatives;
    }
    out.per_harmonic.push_back(negatives);
    out.n_neg += (k == 0 ? 1 : 2) * negatives;
  }
  out.p_qprime = q_prime > 0.0 ? 1 : 0;
  out.n_negative_signature_pairs = report.counts.n_negative_signature;
  out.identity_residual = out.n_neg - out.p_qprime - 2 * out.n_negative_signature_pairs;
  out.applicable = report.spectrally_stable;
  return out;
}

namespace {

struct H12Search {
  const std::vector<double>& lambda;
  double threshold;
  double lambda_max;
  long long budget;
  H12Result& out;
  std::vector<int> mu;

  // Coefficients are assigned left to right; the first nonzero one is kept positive so
  // that mu and -mu are reported once.
  void visit(std::size_t i, int remaining, double partial, bool seen_nonzero) {
    if (out.truncated) return;
    if (++out.visited > budget) {
      out.truncated = true;
      return;
    }
    if (std::abs(partial) > remaining * lambda_max + threshold) return;
    if (i == lambda.size()) {
      if (seen_nonzero && std::abs(partial) < threshold) out.violations.push_back(mu);
      return;
    }
    const int lo = seen_nonzero ? -remaining : 0;
    for (int c = lo; c <= remaining; ++c) {
      mu[i] = c;
      visit(i + 1, remaining - std::abs(c), partial + c * lambda[i], seen_nonzero || c != 0);
    }
    mu[i] = 0;
  }
};

}  // namespace

H12Result check_h12(const std::vector<double>& lambdas, int bound, double resonance_tol,
                    long long node_budget) {
  H12Result out;
  if (lambdas.empty() || bound <= 0) return out;
  double norm = 0.0;
  double lmax = 0.0;
  for (double l : lambdas) {
    norm += l * l;
    lmax = std::max(lmax, std::abs(l));
  }
  H12Search search{lambdas, resonance_tol * std::sqrt(norm), lmax, node_budget, out,
                   std::vector<int>(lambdas.size(), 0)};
  search.visit(0, bound, 0.0, false);
  return out;
}

}  // namespace vortex::spectra
