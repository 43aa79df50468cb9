#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "fgr_internal.hpp"
#include "vortex/errors.hpp"

namespace vortex::fgr {

namespace {

double circle_constant(const std::vector<cd>& values, double rho) {
  double s = 0.0;
  for (const cd& v : values) s += std::norm(v);
  return 0.5 * rho * 2.0 * M_PI * s / static_cast<double>(values.size());
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Value at 0 of the interpolating polynomial through (eps_i, c_i).
double extrapolate(const std::vector<double>& eps, const std::vector<double>& c) {
  std::vector<double> p = c;
  const std::size_t m = eps.size();
  for (std::size_t k = 1; k < m; ++k) {
    for (std::size_t i = 0; i + k < m; ++i) {
      p[i] = (eps[i + k] * p[i] - eps[i] * p[i + 1]) / (eps[i + k] - eps[i]);
    }
  }
  return p[0];
}

}  // namespace

FgrConstant fgr_constant(const Coupling& G, const QuadratureConfig& cfg) {
  if (cfg.circle_points < 8) throw Error(ErrorCode::ConfigError, "circle_points must be at least 8");
  if (G.is_zero()) return {};
  const detail::CircleValues cv =
      detail::circle_transform(G, cfg.grid, cfg.radius, cfg.circle_points, cfg.closed_form);
  FgrConstant out;
  out.value = circle_constant(cv.fine, cfg.radius);
  if (cv.coarse.empty()) return out;

  // Keys interpolation is third order, so the half-resolution error is eight times larger.
  out.error_estimate = std::abs(out.value - circle_constant(cv.coarse, cfg.radius)) / 7.0;
  const std::vector<cd> spec = detail::grid_transform(cfg.grid, G.sample(cfg.grid));
  double peak = 0.0;
  for (const cd& v : spec) peak = std::max(peak, std::norm(v));
  const double floor = 1e-6 * M_PI * cfg.radius * peak;
  if (out.error_estimate > cfg.rel_tol * out.value + floor) {
    std::ostringstream os;
    os << "interpolation error estimate " << out.error_estimate << " exceeds " << cfg.rel_tol
       << " of c = " << out.value << "; enlarge the box";
    throw Error(ErrorCode::GridTooCoarse, os.str());
  }
  return out;
}

double fgr_constant_oracle(const Coupling& G, const std::vector<double>& eps, const OracleConfig& cfg) {
  if (eps.size() < 2) throw Error(ErrorCode::ConfigError, "need at least two broadening widths");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || (i > 0 && eps[i] >= eps[i - 1])) {
      throw Error(ErrorCode::ConfigError, "broadening widths must be positive and decreasing");
    }
  }
  if (G.is_zero()) return 0.0;

  const Grid2D& grid = cfg.grid;
  const int n = grid.n;
  const std::vector<cd> samples = G.sample(grid);
  Eigen::MatrixXcd Gm(n, n);
  double mass = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Gm(i, j) = samples[static_cast<std::size_t>(i) * n + j];
      mass += std::norm(Gm(i, j));
    }
  }
  mass *= grid.dx() * grid.dx();
  const double scale = grid.dx() * grid.dx() / (2.0 * M_PI);
  Eigen::VectorXd xs(n);
  for (int i = 0; i < n; ++i) xs[i] = grid.x(i);

  // F(s) = (1/2) int |G^(sqrt(s), theta)|^2 d theta by the trapezoid rule.
  const int na = cfg.angular_points;
  std::vector<double> cth(static_cast<std::size_t>(na));
  std::vector<double> sth(static_cast<std::size_t>(na));
  for (int a = 0; a < na; ++a) {
    cth[static_cast<std::size_t>(a)] = std::cos(2.0 * M_PI * a / na);
    sth[static_cast<std::size_t>(a)] = std::sin(2.0 * M_PI * a / na);
  }
  auto F = [&](double s) {
    const double r = std::sqrt(std::max(s, 0.0));
    double acc = 0.0;
    Eigen::VectorXcd ex(n);
    Eigen::VectorXcd ey(n);
    for (int a = 0; a < na; ++a) {
      const double kx = r * cth[static_cast<std::size_t>(a)];
      const double ky = r * sth[static_cast<std::size_t>(a)];
      for (int i = 0; i < n; ++i) {
        ex[i] = std::polar(1.0, -kx * xs[i]);
        ey[i] = std::polar(1.0, -ky * xs[i]);
      }
      const cd v = scale * ex.transpose() * Gm * ey;
      acc += std::norm(v);
    }
    return 0.5 * acc * 2.0 * M_PI / na;
  };

  // Lorentzian in s = |xi|^2: s - 1 = eps tan(phi) maps the peak to a smooth integrand.
  const double k_nyq = 0.5 * n * grid.dk();
  const double s_max = std::pow(0.8 * k_nyq, 2);
  std::vector<double> gx;
  std::vector<double> gw;
  gauss_legendre(cfg.gauss_points, gx, gw);
  std::vector<double> values;
  for (double e : eps) {
    const double lo = std::atan(-1.0 / e);
    const double hi = std::atan((s_max - 1.0) / e);
    double acc = 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double phi = 0.5 * (hi - lo) * gx[q] + 0.5 * (hi + lo);
      acc += gw[q] * F(1.0 + e * std::tan(phi));
    }
    values.push_back(acc * 0.5 * (hi - lo) / M_PI);
  }

  const double full = extrapolate(eps, values);
  const std::vector<double> tail_eps(eps.begin() + 1, eps.end());
  const std::vector<double> tail_val(values.begin() + 1, values.end());
  const double reduced = extrapolate(tail_eps, tail_val);
  const double residual = std::abs(full - reduced);
  if (residual > cfg.rel_tol * std::abs(full) + 1e-6 * mass) {
    std::ostringstream os;
    os << "Richardson residual " << residual << " exceeds " << cfg.rel_tol << " of " << full;
    throw Error(ErrorCode::NonConvergent, os.str());
  }
  return full;
}

double predicted_decay(double c, cd z0, double t) {
  const double a = std::norm(z0);
  return a / std::sqrt(1.0 + 4.0 * M_PI * c * a * a * t);
}

}  // namespace vortex::fgr
