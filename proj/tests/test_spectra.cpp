#include <cmath>
#include <complex>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "json.hpp"
#include "vortex/errors.hpp"
#include "vortex/spectra.hpp"

using namespace vortex;
using namespace vortex::spectra;
using profiles::RadialPotential;

namespace {

const profiles::NonlinearityModel kCq = profiles::NonlinearityModel::cubic_quintic();
const profiles::RadialGrid kGrid(500, 50.0);

const profiles::RadialProfile& profile_at(double omega) {
  static std::map<double, profiles::RadialProfile> cache;
  auto it = cache.find(omega);
  if (it == cache.end()) it = cache.emplace(omega, profiles::solve_profile(kCq, RadialPotential::none(), omega, 1, kGrid)).first;
  return it->second;
}

const SpectrumReport& full_at_016() {
  static const SpectrumReport rep = full_spectrum(profile_at(0.16), RadialPotential::none(), kCq);
  return rep;
}

const SpectrumReport& harmonics_at(double omega, std::vector<int> ks) {
  static std::map<std::pair<double, std::vector<int>>, SpectrumReport> cache;
  const auto key = std::make_pair(omega, ks);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, harmonic_spectrum(profile_at(omega), RadialPotential::none(), kCq, ks, {})).first;
  return it->second;
}

linop::HarmonicBlockOperator block(double omega, int k) {
  return linop::assemble_block(profile_at(omega), RadialPotential::none(), kCq, k);
}

}  // namespace

TEST(Spectrum, StableAboveCriticalFrequency) {
  const auto& rep = full_at_016();
  EXPECT_TRUE(rep.spectrally_stable);
  EXPECT_EQ(rep.counts.n_unstable, 0);
  // The Jordan block at zero splits as the square root of round-off; it belongs to the kernel.
  for (const auto& p : rep.pairs) {
    if (!p.kernel) EXPECT_LT(std::abs(p.mu.imag()), 1e-6);
    else EXPECT_LT(std::abs(p.mu), rep.pairs.empty() ? 0.0 : 1e-3);
  }
  EXPECT_TRUE(std::any_of(rep.catalog.begin(), rep.catalog.end(), [](const CatalogEntry& e) { return e.s == 1; }));
}

TEST(Spectrum, KernelStructure) {
  const auto& rep = full_at_016();
  std::map<int, KernelDims> by_k;
  for (const auto& kd : rep.kernel) by_k[kd.k] = kd;
  EXPECT_EQ(by_k[0].geo, 1);
  EXPECT_EQ(by_k[0].alg, 2);
  // Translation modes live in the k = 1 block when there is no potential.
  EXPECT_GE(by_k[1].geo, 1);
}

TEST(Spectrum, UnstableQuadrupleBelowCriticalFrequency) {
  const auto& rep = harmonics_at(0.14, {2});
  EXPECT_FALSE(rep.spectrally_stable);
  const EigenPair* hit = nullptr;
  for (const auto& p : rep.pairs) {
    if (std::abs(p.mu.imag()) > 1e-3 && std::abs(p.mu.real()) > 0.0) hit = &p;
  }
  ASSERT_NE(hit, nullptr);
  const auto mu = hit->mu;
  auto present = [](const std::vector<EigenPair>& pairs, std::complex<double> z) {
    return std::any_of(pairs.begin(), pairs.end(), [z](const EigenPair& p) { return std::abs(p.mu - z) < 1e-8; });
  };
  EXPECT_TRUE(present(rep.pairs, std::conj(mu)));
  const auto mirror = point_spectrum(block(0.14, -2));
  EXPECT_TRUE(present(mirror, -mu));
  EXPECT_TRUE(present(mirror, -std::conj(mu)));
}

TEST(Spectrum, AcceptedPairsSatisfyResidualBound) {
  const auto& rep = full_at_016();
  std::map<int, linop::HarmonicBlockOperator> blocks;
  for (const auto& p : rep.pairs) {
    if (!blocks.count(p.k)) blocks.emplace(p.k, block(0.16, p.k));
    const auto& b = blocks.at(p.k);
    const Eigen::VectorXcd r = b.K.cast<std::complex<double>>() * p.vec - p.mu * p.vec;
    EXPECT_LE(r.norm(), 1e-8 * p.vec.norm()) << "k=" << p.k << " mu=" << p.mu;
    if (!p.embedded_candidate && !p.kernel) EXPECT_LT(p.localization, 0.05);
  }
}

TEST(Signature, InvariantUnderComplexScaling) {
  const auto& rep = full_at_016();
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  ASSERT_FALSE(rep.catalog.empty());
  for (const auto& e : rep.catalog) {
    const auto b = block(0.16, e.k);
    for (int trial = 0; trial < 10; ++trial) {
      EigenPair p = rep.pairs[e.pair_index];
      std::complex<double> c(nd(rng), nd(rng));
      p.vec *= c;
      const int s = krein_signature(b, p);
      EXPECT_EQ(s, *rep.pairs[e.pair_index].s);
    }
  }
}

// Branches away from mu = 0 keep their signature as omega moves with no collision.
TEST(Signature, ConstantAlongStableBranches) {
  const std::vector<double> omegas = {0.155, 0.16, 0.165};
  int tracked = 0;
  for (std::size_t i = 0; i + 1 < omegas.size(); ++i) {
    const auto& a = harmonics_at(omegas[i], {1, 2, 3});
    const auto& b = harmonics_at(omegas[i + 1], {1, 2, 3});
    ASSERT_TRUE(a.spectrally_stable && b.spectrally_stable);
    for (const auto& e : a.catalog) {
      if (e.N > 10) continue;
      const CatalogEntry* best = nullptr;
      for (const auto& f : b.catalog) {
        if (f.k != e.k || f.mirrored != e.mirrored) continue;
        if (!best || std::abs(f.lambda - e.lambda) < std::abs(best->lambda - e.lambda)) best = &f;
      }
      ASSERT_NE(best, nullptr);
      EXPECT_LT(std::abs(best->lambda - e.lambda), 0.03);
      EXPECT_EQ(best->s, e.s) << "k=" << e.k << " lambda=" << e.lambda;
      ++tracked;
    }
  }
  EXPECT_GE(tracked, 8);
}

TEST(Trapping, NegativeSignatureDirectionLowersEnergy) {
  const auto& rep = full_at_016();
  std::optional<std::size_t> j;
  for (std::size_t i = 0; i < rep.catalog.size(); ++i) {
    if (rep.catalog[i].s == 1 && rep.catalog[i].k >= 1) j = i;
  }
  ASSERT_TRUE(j);
  const auto t = trapping_test(profile_at(0.16), RadialPotential::none(), kCq, rep, *j);
  EXPECT_NEAR(t.form_value / (-2.0 * t.lambda), 1.0, 1e-6);
  EXPECT_NEAR(t.alpha_exponent, 2.0, 0.1);
  EXPECT_NEAR(t.energy_ratio, 1.0, 0.1);
  for (double dE : t.delta_energy) EXPECT_LT(dE, 0.0);
  EXPECT_LT(t.mass_error, 1e-10);
}

TEST(Trapping, PositiveSignatureDirectionIsTrapped) {
  const auto& rep = full_at_016();
  std::optional<std::size_t> j;
  for (std::size_t i = 0; i < rep.catalog.size(); ++i) {
    if (rep.catalog[i].s == -1 && rep.catalog[i].k >= 1 && rep.catalog[i].N <= 3) j = i;
  }
  ASSERT_TRUE(j);
  EXPECT_THROW(trapping_test(profile_at(0.16), RadialPotential::none(), kCq, rep, *j), Error);
  const auto t = trapping_test(profile_at(0.16), RadialPotential::none(), kCq, rep, *j, true);
  EXPECT_NEAR(t.form_value / (2.0 * t.lambda), 1.0, 1e-6);
  EXPECT_GT(t.form_value, 0.0);
}

TEST(Index, IdentityHoldsWhenStable) {
  const auto& rep = full_at_016();
  const auto plus = negative_index(profile_at(0.16), RadialPotential::none(), kCq, 1.0, rep);
  const auto minus = negative_index(profile_at(0.16), RadialPotential::none(), kCq, -1.0, rep);
  EXPECT_TRUE(plus.applicable);
  EXPECT_EQ(plus.p_qprime, 1);
  EXPECT_EQ(minus.p_qprime, 0);
  // q increases along this branch, so the physical choice is q' > 0.
  EXPECT_EQ(plus.identity_residual, 0);
  EXPECT_EQ(plus.n_neg, plus.p_qprime + 2 * plus.n_negative_signature_pairs);
}

TEST(H12, ResonanceSearch) {
  EXPECT_TRUE(check_h12({0.05, 0.11}, 7).violations.empty());
  const auto hit = check_h12({0.05, 0.10}, 3);
  ASSERT_FALSE(hit.violations.empty());
  bool found = false;
  for (const auto& v : hit.violations) found |= (v == std::vector<int>{2, -1} || v == std::vector<int>{-2, 1});
  EXPECT_TRUE(found);
  for (int bound : {1, 5, 12}) EXPECT_TRUE(check_h12({0.0476}, bound).violations.empty());
}

TEST(H12, BruteForceAgreement) {
  // Independent enumeration over the full box |mu|_1 <= bound.
  const std::vector<double> lam = {0.013, 0.024, 0.0305, 0.0633};
  const int bound = 6;
  int brute = 0;
  for (int a = -bound; a <= bound; ++a)
    for (int b = -bound; b <= bound; ++b)
      for (int c = -bound; c <= bound; ++c)
        for (int d = -bound; d <= bound; ++d) {
          if (std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d) > bound) continue;
          if (a == 0 && b == 0 && c == 0 && d == 0) continue;
          if (std::abs(a * lam[0] + b * lam[1] + c * lam[2] + d * lam[3]) < 1e-9) ++brute;
        }
  const auto r = check_h12(lam, bound);
  EXPECT_FALSE(r.truncated);
  // The search reports one of each +-mu pair.
  EXPECT_EQ(2 * static_cast<int>(r.violations.size()), brute);
}

TEST(Perturbed, TranslationPairLeavesKernel) {
  const auto shape = RadialPotential::gaussian_well(1.0);
  const auto chain = profiles::continue_in_epsilon(kCq, shape, 0.16, 1, {0.0, 0.01}, kGrid);
  const auto pot = shape.with_strength(0.01);
  const auto rep = harmonic_spectrum(chain.back(), pot, kCq, {0, 1}, {});
  std::map<int, KernelDims> by_k;
  for (const auto& kd : rep.kernel) by_k[kd.k] = kd;
  EXPECT_EQ(by_k[0].geo, 1);
  EXPECT_EQ(by_k[0].alg, 2);
  EXPECT_EQ(by_k[1].geo, 0);
  std::vector<std::complex<double>> small;
  for (const auto& p : rep.pairs) {
    if (p.k == 1 && std::abs(p.mu) < 0.01) small.push_back(p.mu);
  }
  ASSERT_EQ(small.size(), 2u);
  EXPECT_GT(std::abs(small[0]), 1e-3);
  EXPECT_NEAR(std::abs(small[0]), std::abs(small[1]), 1e-6);
  // The k = -1 block carries the same magnitude: multiplicity two for the full operator.
  const auto mirror = point_spectrum(linop::assemble_block(chain.back(), pot, kCq, -1));
  int matches = 0;
  for (const auto& p : mirror) matches += std::abs(std::abs(p.mu) - std::abs(small[0])) < 1e-6;
  EXPECT_EQ(matches, 2);
}

TEST(Report, JsonCarriesCatalog) {
  const auto j = nlohmann::json::parse(report_json(full_at_016()));
  EXPECT_EQ(j["m"], 1);
  EXPECT_EQ(j["catalog"].size(), full_at_016().catalog.size());
  EXPECT_EQ(j["pairs"].size(), full_at_016().pairs.size());
}

TEST(Resonance, OrderCountsMultiplesBelowEdge) {
  EXPECT_EQ(resonance_order(0.0476, 0.1487), 3);
  EXPECT_EQ(resonance_order(0.2, 0.15), 0);
  EXPECT_EQ(resonance_order(0.05, 0.15), 2);
}
