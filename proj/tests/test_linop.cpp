#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "vortex/errors.hpp"
#include "vortex/linop.hpp"
#include "vortex/spectra.hpp"

using namespace vortex;
using namespace vortex::profiles;

namespace {

const NonlinearityModel kCq = NonlinearityModel::cubic_quintic();

const RadialProfile& profile_at(double omega) {
  static std::map<double, RadialProfile> cache;
  auto it = cache.find(omega);
  if (it == cache.end()) {
    it = cache.emplace(omega, solve_profile(kCq, RadialPotential::none(), omega, 1, RadialGrid(200, 40.0))).first;
  }
  return it->second;
}

std::vector<std::complex<double>> sorted_spectrum(const Eigen::MatrixXd& A) {
  const auto es = spectra::eig_general(A, false);
  std::vector<std::complex<double>> v(es.values.data(), es.values.data() + es.values.size());
  std::sort(v.begin(), v.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return v;
}

// Largest distance from each value to the nearest member of the other set.
double set_distance(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b) {
  double worst = 0.0;
  for (const auto& x : a) {
    double best = INFINITY;
    for (const auto& y : b) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST(Block, SymmetricAndSigmaThreeStructure) {
  for (int k : {0, 1, 3}) {
    const auto b = linop::assemble_block(profile_at(0.15), RadialPotential::none(), kCq, k);
    EXPECT_LT((b.S - b.S.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::MatrixXd sigma_s = b.S;
    sigma_s.bottomRows(b.n) *= -1.0;
    EXPECT_EQ((b.K - sigma_s).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Block, RadialAnchorAtEveryFrequency) {
  for (double omega : {0.14, 0.15, 0.16, 0.17}) {
    const auto& p = profile_at(omega);
    const auto pieces = linop::assemble_pieces(p, RadialPotential::none(), kCq, 0);
    Eigen::MatrixXd lhs = pieces.H_plus;
    lhs.diagonal() += pieces.W;
    // Independent assembly: similarity transform of the pointwise operator.
    const Eigen::VectorXd sq = p.grid.weights().cwiseSqrt();
    const Eigen::MatrixXd pointwise = Eigen::MatrixXd(radial_operator(p.grid, 1));
    Eigen::MatrixXd rhs = sq.asDiagonal() * pointwise * sq.cwiseInverse().asDiagonal();
    const Eigen::VectorXd s = p.psi.cwiseAbs2();
    rhs.diagonal().array() += omega - 3.0 * s.array() + 5.0 * s.array().square();
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12) << omega;
  }
}

TEST(Radial, OperatorIsSecondOrderConsistent) {
  // f = r exp(-r^2): -f'' - f'/r + f/r^2 = (8 r - 4 r^3) exp(-r^2).
  std::vector<double> err;
  for (int n : {100, 200, 400}) {
    const RadialGrid g(n, 10.0);
    Eigen::VectorXd f(g.n()), exact(g.n());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double r = g.r()[i];
      f[i] = r * std::exp(-r * r);
      exact[i] = (8 * r - 4 * r * r * r) * std::exp(-r * r);
    }
    Eigen::VectorXd diff = Eigen::MatrixXd(radial_operator(g, 1)) * f - exact;
    // The cell next to the origin has an O(1) local error that does not pollute the solution.
    for (Eigen::Index i = 0; i < diff.size(); ++i) {
      if (g.r()[i] < 1.0) diff[i] = 0.0;
    }
    err.push_back(diff.cwiseAbs().maxCoeff());
  }
  EXPECT_GT(err[0] / err[1], 3.5);
  EXPECT_GT(err[1] / err[2], 3.5);
}

TEST(Block, FlatOperatorHasSpectralGap) {
  RadialProfile zero(RadialGrid(200, 40.0));
  zero.omega = 0.15;
  zero.m = 1;
  zero.psi = Eigen::VectorXd::Zero(200);
  for (int k : {0, 1, 2}) {
    const auto b = linop::assemble_block(zero, RadialPotential::none(), kCq, k);
    for (const auto& mu : sorted_spectrum(b.K)) {
      EXPECT_LT(std::abs(mu.imag()), 1e-10);
      EXPECT_GE(std::abs(mu.real()), 0.15 - 1e-6);
      EXPECT_TRUE(linop::essential_band(0.15).contains(mu.real() + std::copysign(1e-6, mu.real())));
    }
  }
}

TEST(Block, NegatedHarmonicMirrorsSpectrum) {
  for (int k : {1, 2}) {
    const auto plus = sorted_spectrum(linop::assemble_block(profile_at(0.15), RadialPotential::none(), kCq, k).K);
    auto minus = sorted_spectrum(linop::assemble_block(profile_at(0.15), RadialPotential::none(), kCq, -k).K);
    for (auto& mu : minus) mu = -mu;
    EXPECT_LT(set_distance(plus, minus), 1e-8);
    EXPECT_LT(set_distance(minus, plus), 1e-8);
  }
}

TEST(Block, QuadrupleSymmetry) {
  const auto& p = profile_at(0.14);
  for (int k : {1, 2}) {
    auto both = sorted_spectrum(linop::assemble_block(p, RadialPotential::none(), kCq, k).K);
    const auto other = sorted_spectrum(linop::assemble_block(p, RadialPotential::none(), kCq, -k).K);
    both.insert(both.end(), other.begin(), other.end());
    std::vector<std::complex<double>> neg, conj;
    for (const auto& mu : both) {
      neg.push_back(-mu);
      conj.push_back(std::conj(mu));
    }
    EXPECT_LT(set_distance(both, neg), 1e-8);
    EXPECT_LT(set_distance(both, conj), 1e-8);
  }
}

TEST(Block, HessianEigenvaluesAreReal) {
  const auto b = linop::assemble_block(profile_at(0.15), RadialPotential::none(), kCq, 2);
  const auto es = spectra::eig_general(b.S, false);
  EXPECT_LT(es.values.imag().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Block, CentrifugalDominanceAtLargeHarmonics) {
  linop::BlockConfig cfg;
  cfg.k_max = 14;
  double prev = -INFINITY;
  for (int k : {10, 12, 14}) {
    const auto b = linop::assemble_block(profile_at(0.15), RadialPotential::none(), kCq, k, cfg);
    const double lo = spectra::eig_symmetric(b.S).cwiseAbs().minCoeff();
    EXPECT_GT(lo, prev) << k;
    prev = lo;
  }
}

TEST(Block, HarmonicBeyondLimitIsRejected) {
  EXPECT_THROW(linop::assemble_block(profile_at(0.15), RadialPotential::none(), kCq, 9), Error);
}

TEST(Band, EdgesAtFrequency) {
  for (double omega : {0.15, 1.0}) {
    const auto band = linop::essential_band(omega);
    EXPECT_EQ(band.lower, -omega);
    EXPECT_EQ(band.upper, omega);
    EXPECT_TRUE(band.contains(omega));
    EXPECT_FALSE(band.contains(0.5 * omega));
  }
  EXPECT_THROW(linop::essential_band(0.0), Error);
}

TEST(Block, DumpRoundTrip) {
  const auto b = linop::assemble_block(profile_at(0.15), RadialPotential::none(), kCq, 1);
  const auto path = std::filesystem::temp_directory_path() / "vortex_block_dump.bin";
  linop::write_block_dump(b, path.string());
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::getline(in, line);
  const auto header = nlohmann::json::parse(line);
  EXPECT_EQ(header["k"], 1);
  EXPECT_EQ(header["rows"], b.K.rows());
  std::vector<double> data(static_cast<std::size_t>(2 * b.K.size()));
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  ASSERT_TRUE(in);
  EXPECT_EQ(data[1], b.K(0, 1));
  EXPECT_EQ(data[static_cast<std::size_t>(b.K.size()) + 5], b.S(0, 5));
  std::filesystem::remove(path);
}
