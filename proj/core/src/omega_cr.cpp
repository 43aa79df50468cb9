#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "vortex/errors.hpp"
#include "vortex/spectra.hpp"

namespace vortex::spectra {

namespace {

using profiles::RadialProfile;

struct Probe {
  bool unstable = false;
  std::set<int> harmonics;  // blocks carrying an unstable pair
  SpectrumReport report;
};

class ProfileCache {
 public:
  ProfileCache(const profiles::NonlinearityModel& model, const profiles::RadialPotential& potential,
               int m, const OmegaCrConfig& cfg)
      : model_(model), potential_(potential), m_(m), cfg_(cfg) {}

  const RadialProfile& at(double omega) {
    auto it = cache_.find(omega);
    if (it != cache_.end()) return it->second;
    if (cache_.empty()) {
      return cache_.emplace(omega, profiles::solve_profile(model_, potential_, omega, m_, cfg_.grid,
                                                           cfg_.profile))
          .first->second;
    }
    auto nearest = cache_.begin();
    for (auto c = cache_.begin(); c != cache_.end(); ++c)
      if (std::abs(c->first - omega) < std::abs(nearest->first - omega)) nearest = c;
    RadialProfile p =
        profiles::continue_profile(model_, potential_, nearest->second, omega, cfg_.profile);
    return cache_.emplace(omega, std::move(p)).first->second;
  }

 private:
  const profiles::NonlinearityModel& model_;
  const profiles::RadialPotential& potential_;
  int m_;
  const OmegaCrConfig& cfg_;
  std::map<double, RadialProfile> cache_;
};

Probe probe(ProfileCache& cache, double omega, const std::vector<int>& harmonics,
            const profiles::RadialPotential& potential, const profiles::NonlinearityModel& model,
            const SpectrumConfig& scfg) {
  SpectrumConfig cfg = scfg;
  cfg.kernel_analysis = false;
  Probe out;
  out.report = harmonic_spectrum(cache.at(omega), potential, model, harmonics, cfg);
  const double tol = cfg.filter.instability_tol;
  for (const auto& p : out.report.pairs) {
    if (!p.kernel && p.mu.imag() > tol && (p.k != 0 || p.mu.real() >= 0.0))
      out.harmonics.insert(p.k);
  }
  out.unstable = !out.harmonics.empty();
  return out;
}

}  // namespace

OmegaCrResult detect_omega_cr(const profiles::NonlinearityModel& model,
                              const profiles::RadialPotential& potential, int m, double lo,
                              double hi, double tol_omega, const OmegaCrConfig& cfg) {
  if (!(lo < hi) || tol_omega <= 0.0) {
    throw Error(ErrorCode::NoTransition, "bracket must satisfy lo < hi and tol_omega > 0");
  }
  std::vector<int> all = cfg.harmonics;
  if (all.empty())
    for (int k = 0; k <= cfg.spectrum.k_max; ++k) all.push_back(k);

  ProfileCache cache(model, potential, m, cfg);
  OmegaCrResult out;

  // Pre-scan on every harmonic, walking up from lo so continuation steps stay short.
  const int points = std::max(cfg.prescan_points, 2);
  std::vector<double> grid_omega;
  std::vector<Probe> scan;
  std::set<int> active;
  for (int i = 0; i < points; ++i) {
    const double w = lo + (hi - lo) * i / (points - 1);
    grid_omega.push_back(w);
    scan.push_back(probe(cache, w, all, potential, model, cfg.spectrum));
    active.insert(scan.back().harmonics.begin(), scan.back().harmonics.end());
    out.trace.emplace_back(w, scan.back().unstable);
    ++out.probes;
  }
  int flips = 0;
  std::size_t flip_at = 0;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    if (scan[i].unstable != scan[i - 1].unstable) {
      ++flips;
      flip_at = i;
    }
  }
  if (flips == 0) {
    std::ostringstream os;
    os << "spectral stability is " << (scan.front().unstable ? "violated" : "satisfied")
       << " at every pre-scan point of [" << lo << ", " << hi << "]";
    throw Error(ErrorCode::NoTransition, os.str());
  }
  if (flips > 1) {
    std::ostringstream os;
    os << "stability predicate changes " << flips << " times on the pre-scan of [" << lo << ", "
       << hi << "]";
    throw Error(ErrorCode::MultipleTransitions, os.str());
  }
  out.active_harmonics.assign(active.begin(), active.end());

  double a = grid_omega[flip_at - 1];
  double b = grid_omega[flip_at];
  const bool unstable_low = scan[flip_at - 1].unstable;
  Probe probe_a = scan[flip_at - 1];
  Probe probe_b = scan[flip_at];

  while (b - a >= tol_omega) {
    const double mid = 0.5 * (a + b);
    Probe p = probe(cache, mid, out.active_harmonics, potential, model, cfg.spectrum);
    out.trace.emplace_back(mid, p.unstable);
    ++out.probes;
    if (p.unstable == unstable_low) {
      a = mid;
      probe_a = std::move(p);
    } else {
      b = mid;
      probe_b = std::move(p);
    }
  }
  out.omega_cr = 0.5 * (a + b);
  out.stable_end = unstable_low ? b : a;
  out.unstable_end = unstable_low ? a : b;
  const Probe& unstable_probe = unstable_low ? probe_a : probe_b;

  // The stable end must hold on every harmonic, not only the active ones.
  Probe stable_probe = probe(cache, out.stable_end, all, potential, model, cfg.spectrum);
  ++out.probes;
  if (stable_probe.unstable) {
    std::ostringstream os;
    os << "harmonics outside the pre-scan set are unstable at omega=" << out.stable_end;
    throw Error(ErrorCode::MultipleTransitions, os.str());
  }

  // Collision point: the unstable pair with the largest growth rate.
  const EigenPair* worst = nullptr;
  for (const auto& p : unstable_probe.report.pairs) {
    if (p.kernel || p.mu.imag() <= cfg.spectrum.filter.instability_tol) continue;
    if (p.k == 0 && p.mu.real() < 0.0) continue;
    if (!worst || p.mu.imag() > worst->mu.imag()) worst = &p;
  }
  out.harmonic = worst->k;
  const double target = worst->mu.real();

  // The two real eigenvalues of the same block nearest the collision point.
  std::vector<const EigenPair*> near;
  for (const auto& p : stable_probe.report.pairs) {
    if (p.k != out.harmonic || p.kernel || p.mu.imag() != 0.0) continue;
    if ((p.mu.real() > 0.0) != (target > 0.0)) continue;
    near.push_back(&p);
  }
  if (near.size() < 2) {
    throw Error(ErrorCode::SignatureMismatch,
                "fewer than two real eigenvalues near the collision at the stable end");
  }
  std::partial_sort(near.begin(), near.begin() + 2, near.end(),
                    [target](const EigenPair* x, const EigenPair* y) {
                      return std::abs(x->mu.real() - target) < std::abs(y->mu.real() - target);
                    });
  std::sort(near.begin(), near.begin() + 2, [](const EigenPair* x, const EigenPair* y) {
    return std::abs(x->mu.real()) < std::abs(y->mu.real());
  });
  out.lambda_cr = 0.5 * (std::abs(near[0]->mu.real()) + std::abs(near[1]->mu.real()));
  for (int i = 0; i < 2; ++i) {
    const EigenPair& p = *near[static_cast<std::size_t>(i)];
    // Reported in the mu > 0 convention of the catalog.
    out.signatures[i] = p.s ? (p.mu.real() > 0.0 ? *p.s : -*p.s) : 0;
  }
  return out;
}

}  // namespace vortex::spectra
