#include <cmath>
#include <limits>
#include <utility>

#include "vortex/errors.hpp"
#include "vortex/profiles.hpp"

namespace vortex::profiles {

NonlinearityModel NonlinearityModel::polynomial(std::vector<double> c) {
  NonlinearityModel model;
  model.kind_ = Kind::Custom;
  model.beta_ = [c](double s) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * s + c[i];
    return acc * s;
  };
  model.beta_prime_ = [c](double s) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * s + c[i] * static_cast<double>(i + 1);
    return acc;
  };
  model.B_ = [c](double s) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * s + c[i] / static_cast<double>(i + 2);
    return acc * s * s;
  };
  return model;
}

NonlinearityModel NonlinearityModel::cubic_quintic() {
  NonlinearityModel model = polynomial({-1.0, 1.0});
  model.kind_ = Kind::CubicQuintic;
  return model;
}

NonlinearityModel NonlinearityModel::custom(Fn beta, Fn beta_prime, Fn antiderivative) {
  NonlinearityModel model;
  model.kind_ = Kind::Custom;
  model.beta_ = std::move(beta);
  model.beta_prime_ = std::move(beta_prime);
  model.B_ = std::move(antiderivative);
  return model;
}

namespace {

double window_objective(const NonlinearityModel& model, double s) {
  const double s2 = s * s;
  return -model.B(s2) / s2;
}

}  // namespace

double existence_window_numeric(const NonlinearityModel& model, double s_max) {
  constexpr int kSamples = 20000;
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 1;
  for (int i = 1; i <= kSamples; ++i) {
    const double s = s_max * i / kSamples;
    const double f = window_objective(model, s);
    if (f > best) {
      best = f;
      best_i = i;
    }
  }
  if (best_i == kSamples) return std::numeric_limits<double>::infinity();

  // Golden-section refinement on the bracketing cells.
  double a = s_max * (best_i - 1) / kSamples;
  double b = s_max * (best_i + 1) / kSamples;
  if (a <= 0.0) a = s_max * 1e-9;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = window_objective(model, x1);
  double f2 = window_objective(model, x2);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * b; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = window_objective(model, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = window_objective(model, x2);
    }
  }
  return std::max(best, std::max(f1, f2));
}

double existence_window(const NonlinearityModel& model, double s_max) {
  // -B(s^2)/s^2 = s^2/2 - s^4/3, maximal at s^2 = 3/4.
  const double value = model.kind() == NonlinearityModel::Kind::CubicQuintic
                           ? 3.0 / 16.0
                           : existence_window_numeric(model, s_max);
  if (!(value > 0.0)) {
    throw Error(ErrorCode::EmptyWindow, "sup of -B(s^2)/s^2 is not positive; no bound states");
  }
  return value;
}

RadialPotential RadialPotential::none() { return RadialPotential{}; }

RadialPotential RadialPotential::gaussian_well(double strength) {
  RadialPotential p;
  p.shape = [](double r) { return -std::exp(-0.5 * r * r); };
  p.strength = strength;
  p.hessian = 1.0;
  p.name = "gaussian_well";
  return p;
}

RadialPotential RadialPotential::with_strength(double eps) const {
  RadialPotential p = *this;
  p.strength = eps;
  return p;
}

double RadialPotential::hessian_eigenvalue() const {
  if (hessian) return *hessian;
  if (!shape) return 0.0;
  const double h = 1e-4;
  return 2.0 * (shape(h) - shape(0.0)) / (h * h);
}

double RadialPotential::tail(double r_max) const {
  if (!shape) return 0.0;
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) worst = std::max(worst, std::abs(shape(r_max * (0.9 + 0.001 * i))));
  return worst;
}

Eigen::VectorXd RadialPotential::sample(const RadialGrid& grid) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.n()));
  if (!shape) return v;
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = shape(grid.r()[i]);
  return v;
}

}  // namespace vortex::profiles
