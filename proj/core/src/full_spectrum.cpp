#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "json.hpp"
#include "spectra_internal.hpp"
#include "vortex/errors.hpp"

namespace vortex::spectra {

int resonance_order(double lambda, double omega) {
  // N + 1 = inf{n : n lambda >= omega}.
  const double ratio = omega / lambda;
  double n = std::ceil(ratio);
  if (n * lambda < omega) n += 1.0;
  while (n > 1.0 && (n - 1.0) * lambda >= omega) n -= 1.0;
  return static_cast<int>(n) - 1;
}

SpectrumReport harmonic_spectrum(const profiles::RadialProfile& profile,
                                 const profiles::RadialPotential& potential,
                                 const profiles::NonlinearityModel& model,
                                 const std::vector<int>& harmonics, const SpectrumConfig& cfg) {
  linop::BlockConfig bcfg;
  bcfg.k_max = std::max(cfg.k_max, *std::max_element(harmonics.begin(), harmonics.end()));

  auto run = [&](int k) {
    const linop::HarmonicBlockOperator block =
        linop::assemble_block(profile, potential, model, k, bcfg);
    return detail::analyze_block(block, cfg.filter, cfg.kernel_analysis);
  };

  // Harmonics are split into contiguous groups; results are stored by position, so the
  // output does not depend on the worker count.
  std::vector<detail::BlockAnalysis> results(harmonics.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(cfg.workers, 1)), 1, harmonics.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < harmonics.size(); ++i) results[i] = run(harmonics[i]);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < harmonics.size(); i += workers) results[i] = run(harmonics[i]);
      }));
    }
    for (auto& j : jobs) j.get();
  }

  SpectrumReport rep;
  rep.omega = profile.omega;
  rep.m = profile.m;
  rep.epsilon = profile.epsilon;
  rep.k_max = cfg.k_max;
  const double tol = cfg.filter.instability_tol;

  for (std::size_t h = 0; h < harmonics.size(); ++h) {
    const int k = harmonics[h];
    auto& res = results[h];
    rep.kernel.push_back(res.kernel);
    rep.jordan_clusters += res.jordan_clusters;
    for (auto& pair : res.pairs) {
      const std::size_t idx = rep.pairs.size();
      const double re = pair.mu.real();
      const double im = pair.mu.imag();
      if (!pair.kernel && im > tol && (k != 0 || re >= 0.0)) ++rep.counts.n_unstable;
      if (pair.embedded_candidate) rep.embedded.push_back(idx);
      if (!pair.kernel && im == 0.0 && std::abs(re) < profile.omega && (k != 0 || re > 0.0)) {
        CatalogEntry e;
        e.lambda = std::abs(re);
        e.k = k;
        e.pair_index = idx;
        e.mirrored = re < 0.0;
        // s is attached to the mu > 0 representative: for mu < 0 the sign flips.
        e.s = pair.s ? (e.mirrored ? -*pair.s : *pair.s) : 0;
        e.N = resonance_order(e.lambda, profile.omega);
        rep.catalog.push_back(e);
      }
      rep.pairs.push_back(std::move(pair));
    }
  }
  std::stable_sort(rep.catalog.begin(), rep.catalog.end(),
                   [](const CatalogEntry& a, const CatalogEntry& b) { return a.lambda < b.lambda; });
  rep.counts.n_discrete_stable = static_cast<int>(rep.catalog.size());
  rep.counts.n_negative_signature = static_cast<int>(
      std::count_if(rep.catalog.begin(), rep.catalog.end(), [](const CatalogEntry& e) { return e.s == 1; }));
  rep.spectrally_stable = rep.counts.n_unstable == 0;
  return rep;
}

SpectrumReport full_spectrum(const profiles::RadialProfile& profile,
                             const profiles::RadialPotential& potential,
                             const profiles::NonlinearityModel& model, const SpectrumConfig& cfg) {
  std::vector<int> ks;
  for (int k = 0; k <= cfg.k_max; ++k) ks.push_back(k);
  return harmonic_spectrum(profile, potential, model, ks, cfg);
}

std::string report_json(const SpectrumReport& report) {
  nlohmann::ordered_json j;
  j["omega"] = report.omega;
  j["m"] = report.m;
  j["epsilon"] = report.epsilon;
  j["k_max"] = report.k_max;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : report.pairs) {
    nlohmann::ordered_json e;
    e["re"] = p.mu.real();
    e["im"] = p.mu.imag();
    e["k"] = p.k;
    if (p.s) e["s"] = *p.s;
    else e["s"] = nullptr;
    e["residual"] = p.residual;
    e["localization"] = p.localization;
    e["embedded_candidate"] = p.embedded_candidate;
    e["kernel"] = p.kernel;
    pairs.push_back(e);
  }
  j["pairs"] = pairs;
  auto kernel = nlohmann::ordered_json::array();
  for (const auto& kd : report.kernel) kernel.push_back({{"k", kd.k}, {"geo", kd.geo}, {"alg", kd.alg}});
  j["kernel"] = kernel;
  auto catalog = nlohmann::ordered_json::array();
  for (const auto& c : report.catalog) {
    catalog.push_back({{"lambda", c.lambda}, {"s", c.s}, {"k", c.k}, {"N", c.N}});
  }
  j["catalog"] = catalog;
  j["counts"] = {{"N_unstable", report.counts.n_unstable},
                 {"N_discrete_stable", report.counts.n_discrete_stable},
                 {"N_negative_signature", report.counts.n_negative_signature}};
  j["spectrally_stable"] = report.spectrally_stable;
  j["embedded_candidates"] = report.embedded;
  j["jordan_clusters"] = report.jordan_clusters;
  return j.dump(2);
}

}  // namespace vortex::spectra
