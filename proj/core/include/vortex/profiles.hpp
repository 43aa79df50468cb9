#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vortex/radial.hpp"

namespace vortex::profiles {

// Local nonlinearity beta(s) in i u_t = -Lap u + eps V u + beta(|u|^2) u, with B' = beta, B(0) = 0.
class NonlinearityModel {
 public:
  enum class Kind { CubicQuintic, Custom };
  using Fn = std::function<double(double)>;

  static NonlinearityModel cubic_quintic();
  // beta(s) = sum_i c_i s^(i+1).
  static NonlinearityModel polynomial(std::vector<double> coefficients);
  static NonlinearityModel custom(Fn beta, Fn beta_prime, Fn antiderivative);

  Kind kind() const { return kind_; }
  double beta(double s) const { return beta_(s); }
  double beta_prime(double s) const { return beta_prime_(s); }
  double B(double s) const { return B_(s); }

 private:
  Kind kind_ = Kind::Custom;
  Fn beta_;
  Fn beta_prime_;
  Fn B_;
};

struct RadialPotential {
  std::function<double(double)> shape;
  double strength = 0.0;
  std::optional<double> hessian;
  std::string name = "none";

  static RadialPotential none();
  // V(r) = -exp(-r^2 / 2).
  static RadialPotential gaussian_well(double strength);

  bool active() const { return static_cast<bool>(shape) && strength != 0.0; }
  double value(double r) const { return shape ? shape(r) : 0.0; }
  RadialPotential with_strength(double eps) const;
  // Curvature of V at the origin: supplied, or a centred difference of the even extension.
  double hessian_eigenvalue() const;
  // Largest |V| on [0.9 r_max, r_max]; callers check it against 1e-12.
  double tail(double r_max) const;
  Eigen::VectorXd sample(const RadialGrid& grid) const;
};

struct ProfileConfig {
  double tol = 1e-8;
  int max_iterations = 60;
  // Newton iterations allowed for one continuation step before the step is halved.
  int step_iterations = 14;
  double max_omega_step = 0.0025;
  double min_omega_step = 1e-7;
  double trivial_amplitude = 1e-6;
};

struct RadialProfile {
  explicit RadialProfile(RadialGrid g) : grid(std::move(g)) {}

  RadialGrid grid;
  double omega = 0.0;
  int m = 0;
  double epsilon = 0.0;
  Eigen::VectorXd psi;
  double residual_norm = 0.0;
  double tolerance = 0.0;
  double q = 0.0;
  double E = 0.0;
  double d = 0.0;
  int iterations = 0;
};

// Sup over s > 0 of -B(s^2)/s^2; +infinity when the running sup is still growing at s_max.
double existence_window(const NonlinearityModel& model, double s_max = 20.0);
// Value reached by the numeric maximisation, regardless of kind.
double existence_window_numeric(const NonlinearityModel& model, double s_max = 20.0);

RadialProfile solve_profile(const NonlinearityModel& model, const RadialPotential& potential,
                            double omega, int m, const RadialGrid& grid,
                            const ProfileConfig& cfg = {},
                            const std::optional<Eigen::VectorXd>& initial_guess = std::nullopt);

// Moves an existing profile to a new omega (or new potential strength) by predictor-corrector steps.
RadialProfile continue_profile(const NonlinearityModel& model, const RadialPotential& potential,
                               const RadialProfile& start, double target_omega,
                               const ProfileConfig& cfg = {});

struct FamilyTable {
  std::vector<RadialProfile> profiles;
  std::vector<double> omega;
  std::vector<double> q;
  std::vector<double> q_prime;
  std::vector<double> E;
  std::vector<double> E_prime;
  std::vector<double> d;
  std::vector<double> d_prime;
  bool q_prime_sign_change = false;
};

FamilyTable continue_family(const NonlinearityModel& model, const RadialPotential& potential,
                            const std::vector<double>& omegas, int m, const RadialGrid& grid,
                            const ProfileConfig& cfg = {});

// Centred differences on a possibly non-uniform abscissa, second-order one-sided at the ends.
std::vector<double> finite_difference(const std::vector<double>& x, const std::vector<double>& y);

std::vector<RadialProfile> continue_in_epsilon(const NonlinearityModel& model,
                                               const RadialPotential& shape, double omega, int m,
                                               const std::vector<double>& eps_list,
                                               const RadialGrid& grid,
                                               const ProfileConfig& cfg = {});

// Pointwise residual of the discrete profile equation.
Eigen::VectorXd profile_residual(const NonlinearityModel& model, const RadialPotential& potential,
                                 double omega, int m, const RadialGrid& grid,
                                 const Eigen::VectorXd& psi);

// q = Q(phi) = (1/2) int |phi|^2 dx and E = (1/2) int |grad phi|^2 + eps V |phi|^2 + B(|phi|^2) dx.
double profile_mass(const RadialGrid& grid, const Eigen::VectorXd& psi);
double profile_energy(const NonlinearityModel& model, const RadialPotential& potential, int m,
                      const RadialGrid& grid, const Eigen::VectorXd& psi);

void write_profile_csv(const RadialProfile& profile, const std::string& path);
void write_profile_sidecar(const RadialProfile& profile, const std::string& path);
RadialProfile read_profile(const std::string& csv_path, const std::string& sidecar_path);

}  // namespace vortex::profiles
