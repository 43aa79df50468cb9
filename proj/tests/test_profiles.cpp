#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "vortex/errors.hpp"
#include "vortex/profiles.hpp"

using namespace vortex;
using namespace vortex::profiles;

namespace {

struct State {
  double p;
  double d;
};

// Independent radial integrator for psi'' = -psi'/r + m^2 psi/r^2 + omega psi - psi^3 + psi^5.
State rhs(double r, State s, double omega, int m) {
  return {s.d, -s.d / r + m * m * s.p / (r * r) + omega * s.p - std::pow(s.p, 3) + std::pow(s.p, 5)};
}

// +1 when the orbit crosses zero or escapes upward, -1 when it turns back up after its peak.
int shoot(double a, double omega, int m, double* psi_at_one) {
  const double h = 1e-4;
  State s{a * std::pow(h, m), m * a * std::pow(h, m - 1)};
  bool peaked = false;
  for (long i = 1; i * h < 30.0; ++i) {
    const double r = i * h;
    const auto k1 = rhs(r, s, omega, m);
    const auto k2 = rhs(r + h / 2, {s.p + h / 2 * k1.p, s.d + h / 2 * k1.d}, omega, m);
    const auto k3 = rhs(r + h / 2, {s.p + h / 2 * k2.p, s.d + h / 2 * k2.d}, omega, m);
    const auto k4 = rhs(r + h, {s.p + h * k3.p, s.d + h * k3.d}, omega, m);
    s.p += h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
    s.d += h / 6 * (k1.d + 2 * k2.d + 2 * k3.d + k4.d);
    if (i + 1 == 10000 && psi_at_one) *psi_at_one = s.p;
    if (s.p < 0 || s.p > 5) return 1;
    if (s.d < 0) peaked = true;
    if (peaked && s.d > 0) return -1;
  }
  return 0;
}

double cubic_at(const RadialGrid& g, const Eigen::VectorXd& f, double x) {
  const auto& r = g.r();
  Eigen::Index j = 1;
  while (r[j + 1] < x) ++j;
  double v = 0.0;
  for (Eigen::Index a = j - 1; a <= j + 2; ++a) {
    double w = 1.0;
    for (Eigen::Index b = j - 1; b <= j + 2; ++b) {
      if (b != a) w *= (x - r[b]) / (r[a] - r[b]);
    }
    v += w * f[a];
  }
  return v;
}

const NonlinearityModel kCq = NonlinearityModel::cubic_quintic();

}  // namespace

TEST(Nonlinearity, CubicQuinticFormulas) {
  for (double s : {0.0, 0.1, 0.5, 1.3}) {
    EXPECT_DOUBLE_EQ(kCq.beta(s), -s + s * s);
    EXPECT_NEAR(kCq.B(s), -s * s / 2 + s * s * s / 3, 1e-15);
  }
  EXPECT_EQ(kCq.beta(0.0), 0.0);
}

TEST(Nonlinearity, DerivativeMatchesCentredDifference) {
  const auto poly = NonlinearityModel::polynomial({-1.0, 0.5, 0.25});
  for (const auto* model : {&kCq, &poly}) {
    for (double s : {0.2, 0.7, 1.1}) {
      for (double h : {1e-2, 5e-3}) {
        const double fd = (model->beta(s + h) - model->beta(s - h)) / (2 * h);
        // Third derivative of either model is at most 1.5, so the error is below h^2 / 4.
        EXPECT_LE(std::abs(fd - model->beta_prime(s)), 0.25 * h * h + 1e-12);
      }
    }
  }
}

TEST(ExistenceWindow, CubicQuinticIsThreeSixteenths) {
  EXPECT_EQ(existence_window(kCq), 0.1875);
  EXPECT_NEAR(existence_window_numeric(kCq), 0.1875, 1e-6);
}

TEST(ExistenceWindow, DefocusingIsEmpty) {
  const auto defocusing = NonlinearityModel::polynomial({1.0});
  try {
    existence_window(defocusing);
    FAIL() << "expected EmptyWindow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyWindow);
  }
}

TEST(ExistenceWindow, PureCubicIsUnbounded) {
  const auto cubic = NonlinearityModel::polynomial({-1.0});
  EXPECT_TRUE(std::isinf(existence_window(cubic)));
  EXPECT_GT(existence_window_numeric(cubic, 40.0), 1000.0);
}

TEST(Profile, CollocationMatchesShooting) {
  const double omega = 0.15;
  double lo = 0.01, hi = 3.0, at_one = 0.0;
  ASSERT_EQ(shoot(lo, omega, 1, nullptr), -1);
  ASSERT_EQ(shoot(hi, omega, 1, nullptr), 1);
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (shoot(mid, omega, 1, nullptr) < 0 ? lo : hi) = mid;
  }
  shoot(lo, omega, 1, &at_one);

  const RadialGrid grid(4000, 40.0);
  const auto p = solve_profile(kCq, RadialPotential::none(), omega, 1, grid);
  EXPECT_NEAR(cubic_at(grid, p.psi, 1.0), at_one, 1e-6);
}

TEST(Profile, DefaultCaseIsPositiveAndConverged) {
  const RadialGrid grid(500, 50.0);
  const auto p = solve_profile(kCq, RadialPotential::none(), 0.15, 1, grid);
  EXPECT_LT(p.residual_norm, 1e-8);
  EXPECT_LE(p.residual_norm, p.tolerance);
  EXPECT_GT(p.psi.minCoeff(), -1e-12);
  EXPECT_LT(std::abs(p.psi[p.psi.size() - 1]), 1e-8);
  // psi / r stays bounded near the origin.
  for (int i = 0; i < 5; ++i) EXPECT_LT(p.psi[i] / grid.r()[i], 1.0);
  EXPECT_NEAR(p.psi[1] / grid.r()[1], p.psi[0] / grid.r()[0], 1e-2);
}

TEST(Profile, OutsideWindowFails) {
  const RadialGrid grid(300, 40.0);
  try {
    solve_profile(kCq, RadialPotential::none(), 0.20, 1, grid);
    FAIL() << "expected a failure";
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::TrivialSolution || e.code() == ErrorCode::NoConvergence);
  }
}

TEST(Profile, RadialGroundStateHasNeumannCentre) {
  const RadialGrid grid(500, 50.0);
  const auto p = solve_profile(kCq, RadialPotential::none(), 0.15, 0, grid);
  EXPECT_GT(p.psi[0], 0.0);
  const double slope = (p.psi[1] - p.psi[0]) / grid.h();
  EXPECT_LT(std::abs(slope), 5.0 * grid.h());
}

TEST(Profile, MassConvergesAtSecondOrder) {
  std::vector<double> q;
  for (int n : {250, 500, 1000}) q.push_back(solve_profile(kCq, RadialPotential::none(), 0.15, 1, RadialGrid(n, 40.0)).q);
  const double p = std::log2(std::abs(q[1] - q[0]) / std::abs(q[2] - q[1]));
  EXPECT_GE(p, 1.9);
}

// Interpolated residual on a 2x finer grid is a truncation-error probe; it must fall at the scheme order.
TEST(Profile, ResidualOnFinerGridScalesWithTruncation) {
  std::vector<double> res;
  for (int n : {250, 500, 1000}) {
    const RadialGrid coarse(n, 40.0);
    const auto p = solve_profile(kCq, RadialPotential::none(), 0.15, 1, coarse);
    // Odd extension through the origin supplies the ghost nodes for m = 1.
    const Eigen::Index nc = static_cast<Eigen::Index>(coarse.n());
    Eigen::VectorXd xs(nc + 2), ys(nc + 2);
    xs << -coarse.r()[1], -coarse.r()[0], coarse.r();
    ys << -p.psi[1], -p.psi[0], p.psi;
    const RadialGrid fine(2 * n, 40.0);
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(fine.n());
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      const double r = fine.r()[i];
      Eigen::Index j = 1;
      while (j + 2 < xs.size() - 1 && xs[j + 1] < r) ++j;
      if (j + 2 >= xs.size()) continue;
      for (Eigen::Index a = j - 1; a <= j + 2; ++a) {
        double w = 1.0;
        for (Eigen::Index b = j - 1; b <= j + 2; ++b) {
          if (b != a) w *= (r - xs[b]) / (xs[a] - xs[b]);
        }
        psi[i] += w * ys[a];
      }
    }
    Eigen::VectorXd F = profile_residual(kCq, RadialPotential::none(), 0.15, 1, fine, psi);
    // The first few nodes carry an O(1/h) interpolation layer at the origin; measure on r >= 1.
    for (Eigen::Index i = 0; i < F.size(); ++i) {
      if (fine.r()[i] < 1.0) F[i] = 0.0;
    }
    res.push_back(std::sqrt(fine.weights().dot(F.cwiseAbs2())));
  }
  EXPECT_GT(res[0] / res[1], 3.0);
  EXPECT_GT(res[1] / res[2], 3.0);
  // The coarse solve is converged far below the truncation level it hides.
  EXPECT_GT(res[2], 100.0 * 1e-8);
}

TEST(Family, ChargeDerivativeKeepsSign) {
  std::vector<double> omegas;
  for (int i = 0; i <= 10; ++i) omegas.push_back(0.13 + 0.005 * i);
  const auto fam = continue_family(kCq, RadialPotential::none(), omegas, 1, RadialGrid(720, 72.0));
  ASSERT_EQ(fam.q_prime.size(), omegas.size());
  EXPECT_FALSE(fam.q_prime_sign_change);
  for (double qp : fam.q_prime) EXPECT_EQ(qp > 0, fam.q_prime[0] > 0);
}

// d' = q and E' = -omega q' hold up to the centred-difference error, which must fall as step^2.
TEST(Family, ThermodynamicIdentitiesAtSecondOrder) {
  for (double centre : {0.14, 0.16}) {
    double dq[2], eq[2];
    for (int pass = 0; pass < 2; ++pass) {
      const double step = pass == 0 ? 0.005 : 0.0025;
      std::vector<double> omegas;
      for (int i = -2; i <= 2; ++i) omegas.push_back(centre + i * step);
      const auto f = continue_family(kCq, RadialPotential::none(), omegas, 1, RadialGrid(720, 72.0));
      dq[pass] = std::abs(f.d_prime[2] - f.q[2]) / f.q[2];
      eq[pass] = std::abs(f.E_prime[2] + centre * f.q_prime[2]) / std::abs(centre * f.q_prime[2]);
    }
    EXPECT_LT(dq[1], 1e-2);
    EXPECT_NEAR(dq[0] / dq[1], 4.0, 0.5) << centre;
    EXPECT_NEAR(eq[0] / eq[1], 4.0, 0.5) << centre;
  }
}

TEST(Epsilon, ZeroMatchesDirectSolve) {
  const RadialGrid grid(400, 40.0);
  const auto shape = RadialPotential::gaussian_well(1.0);
  const auto chain = continue_in_epsilon(kCq, shape, 0.15, 1, {0.0, 0.01, 0.02}, grid);
  const auto direct = solve_profile(kCq, RadialPotential::none(), 0.15, 1, grid);
  ASSERT_EQ(chain.size(), 3u);
  EXPECT_LT((chain[0].psi - direct.psi).cwiseAbs().maxCoeff(), 1e-10);
  const double s1 = (chain[1].psi - chain[0].psi).cwiseAbs().maxCoeff() / 0.01;
  const double s2 = (chain[2].psi - chain[0].psi).cwiseAbs().maxCoeff() / 0.02;
  EXPECT_NEAR(s2 / s1, 1.0, 0.2);
}

// The wide vortex barely feels a unit-width well, so the branch continues well past eps = 0.5.
TEST(Epsilon, LargeStrengthStaysOnBranch) {
  const RadialGrid grid(300, 40.0);
  const auto shape = RadialPotential::gaussian_well(1.0);
  const auto chain = continue_in_epsilon(kCq, shape, 0.15, 1, {0.0, 0.5}, grid);
  EXPECT_LT(chain.back().residual_norm, chain.back().tolerance);
  const auto r = profile_residual(kCq, shape.with_strength(0.5), 0.15, 1, grid, chain.back().psi);
  EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Epsilon, StarvedNewtonReportsNoConvergence) {
  const RadialGrid grid(300, 40.0);
  ProfileConfig cfg;
  cfg.step_iterations = 1;
  cfg.min_omega_step = 1e-2;
  try {
    continue_in_epsilon(kCq, RadialPotential::gaussian_well(1.0), 0.15, 1, {0.0, 0.5}, grid, cfg);
    FAIL() << "expected NoConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}
