#include <algorithm>
#include <cmath>

#include "fgr_internal.hpp"
#include "vortex/errors.hpp"

namespace vortex::fgr {

Coupling Coupling::gaussian(cd amplitude, double width, double cx, double cy) {
  GaussianTerm t;
  t.amplitude = amplitude;
  t.width = width;
  t.cx = cx;
  t.cy = cy;
  return from_terms({t});
}

Coupling Coupling::gaussian_with_node(cd amplitude, double width, double radius) {
  const double w2 = width * width;
  const double d = 2.0 * w2 - w2 * w2 * radius * radius;
  if (std::abs(d) < 1e-12) throw Error(ErrorCode::ConfigError, "node radius incompatible with width");
  GaussianTerm t;
  t.amplitude = amplitude;
  t.width = width;
  t.gamma = -1.0 / d;
  return from_terms({t});
}

Coupling Coupling::from_terms(std::vector<GaussianTerm> terms) {
  for (const auto& t : terms) {
    if (!(t.width > 0.0)) throw Error(ErrorCode::ConfigError, "Gaussian width must be positive");
  }
  Coupling c;
  c.terms_ = std::move(terms);
  return c;
}

Coupling Coupling::from_samples(Grid2D grid, std::vector<cd> values) {
  if (values.size() != static_cast<std::size_t>(grid.n) * grid.n) {
    throw Error(ErrorCode::GridMismatch, "sample count does not match the grid");
  }
  Coupling c;
  c.sample_grid_ = grid;
  c.samples_ = std::make_shared<const std::vector<cd>>(std::move(values));
  return c;
}

bool Coupling::is_zero() const {
  if (samples_) {
    return std::all_of(samples_->begin(), samples_->end(), [](cd v) { return v == 0.0; });
  }
  return std::all_of(terms_.begin(), terms_.end(), [](const GaussianTerm& t) { return t.amplitude == 0.0; });
}

cd Coupling::value(double x, double y) const {
  if (samples_) {
    const Grid2D& g = *sample_grid_;
    const double fi = x / g.dx() + g.n / 2;
    const double fj = y / g.dx() + g.n / 2;
    const long i = std::lround(fi);
    const long j = std::lround(fj);
    if (std::abs(fi - i) > 1e-9 || std::abs(fj - j) > 1e-9 || i < 0 || j < 0 || i >= g.n || j >= g.n) {
      throw Error(ErrorCode::GridMismatch, "sampled coupling evaluated off its grid");
    }
    return (*samples_)[static_cast<std::size_t>(i) * g.n + j];
  }
  cd v = 0.0;
  for (const auto& t : terms_) {
    const double rx = x - t.cx;
    const double ry = y - t.cy;
    const double r2 = rx * rx + ry * ry;
    v += t.amplitude * (1.0 + t.gamma * r2) * std::exp(-r2 / (2.0 * t.width * t.width)) *
         std::polar(1.0, t.qx * x + t.qy * y);
  }
  return v;
}

cd Coupling::transform(double kx, double ky) const {
  if (samples_) throw Error(ErrorCode::GridMismatch, "closed-form transform requested for sampled coupling");
  cd v = 0.0;
  for (const auto& t : terms_) {
    const double px = kx - t.qx;
    const double py = ky - t.qy;
    const double w2 = t.width * t.width;
    const double rho2 = px * px + py * py;
    const double radial = w2 * std::exp(-0.5 * w2 * rho2) * (1.0 + t.gamma * (2.0 * w2 - w2 * w2 * rho2));
    v += t.amplitude * radial * std::polar(1.0, -(px * t.cx + py * t.cy));
  }
  return v;
}

std::vector<cd> Coupling::sample(const Grid2D& grid) const {
  if (samples_) {
    const Grid2D& g = *sample_grid_;
    if (g.n != grid.n || std::abs(g.box - grid.box) > 1e-12 * grid.box) {
      throw Error(ErrorCode::GridMismatch, "sampled coupling used on a different grid");
    }
    return *samples_;
  }
  std::vector<cd> out(static_cast<std::size_t>(grid.n) * grid.n);
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) out[static_cast<std::size_t>(i) * grid.n + j] = value(grid.x(i), grid.x(j));
  }
  return out;
}

double Coupling::boundary_max(const Grid2D& grid) const {
  const std::vector<cd> s = sample(grid);
  const int n = grid.n;
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    m = std::max({m, std::abs(s[static_cast<std::size_t>(i)]), std::abs(s[static_cast<std::size_t>(n - 1) * n + i]),
                  std::abs(s[static_cast<std::size_t>(i) * n]), std::abs(s[static_cast<std::size_t>(i) * n + n - 1])});
  }
  return m;
}

namespace detail {

CircleValues circle_transform(const Coupling& G, const Grid2D& grid, double rho, int count,
                              bool closed_form) {
  CircleValues out;
  out.fine.resize(static_cast<std::size_t>(count));
  if (closed_form && G.closed_form()) {
    for (int t = 0; t < count; ++t) {
      const double th = 2.0 * M_PI * t / count;
      out.fine[static_cast<std::size_t>(t)] = G.transform(rho * std::cos(th), rho * std::sin(th));
    }
    return out;
  }
  // The coarse pass needs four stride-2 bins beyond rho.
  if (rho + 4.0 * grid.dk() >= 0.5 * grid.n * grid.dk()) {
    throw Error(ErrorCode::GridTooCoarse, "resonant circle beyond the grid's Nyquist range");
  }
  const std::vector<cd> spec = grid_transform(grid, G.sample(grid));
  out.coarse.resize(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    const double th = 2.0 * M_PI * t / count;
    const double kx = rho * std::cos(th);
    const double ky = rho * std::sin(th);
    out.fine[static_cast<std::size_t>(t)] = interpolate_spectrum(grid, spec, kx, ky, 1);
    out.coarse[static_cast<std::size_t>(t)] = interpolate_spectrum(grid, spec, kx, ky, 2);
  }
  return out;
}

}  // namespace detail

}  // namespace vortex::fgr
