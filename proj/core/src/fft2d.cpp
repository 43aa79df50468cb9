#include <fftw3.h>

#include <cmath>
#include <algorithm>
#include <mutex>

#include "fgr_internal.hpp"

namespace vortex::fgr::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2d::Fft2d(int n) : n_(n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  data_ = reinterpret_cast<cd*>(fftw_malloc(sizeof(fftw_complex) * n * n));
  auto* buf = reinterpret_cast<fftw_complex*>(data_);
  fwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft2d::~Fft2d() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(data_);
}

void Fft2d::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void Fft2d::backward() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

std::vector<cd> grid_transform(const Grid2D& grid, const std::vector<cd>& samples) {
  const int n = grid.n;
  Fft2d fft(n);
  std::copy(samples.begin(), samples.end(), fft.data());
  fft.forward();
  // x_j = (j - n/2) dx turns the DFT phase into (-1)^p per axis.
  const double scale = grid.dx() * grid.dx() / (2.0 * M_PI);
  std::vector<cd> out(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const double sign = (p + q) % 2 == 0 ? 1.0 : -1.0;
      out[static_cast<std::size_t>(p) * n + q] = sign * scale * fft.data()[p * n + q];
    }
  }
  return out;
}

namespace {
double keys(double t) {
  const double a = -0.5;
  t = std::abs(t);
  if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}
}  // namespace

cd interpolate_spectrum(const Grid2D& grid, const std::vector<cd>& spec, double kx, double ky,
                        int stride) {
  const int n = grid.n;
  const double h = grid.dk() * stride;
  const double u = kx / h;
  const double v = ky / h;
  const int iu = static_cast<int>(std::floor(u));
  const int iv = static_cast<int>(std::floor(v));
  auto wrap = [n](int b) { return ((b % n) + n) % n; };
  cd acc = 0.0;
  for (int a = -1; a <= 2; ++a) {
    const double wa = keys(u - (iu + a));
    for (int b = -1; b <= 2; ++b) {
      const double wb = keys(v - (iv + b));
      const int p = wrap((iu + a) * stride);
      const int q = wrap((iv + b) * stride);
      acc += wa * wb * spec[static_cast<std::size_t>(p) * n + q];
    }
  }
  return acc;
}

FieldPropagator::FieldPropagator(const Grid2D& grid, double shift)
    : grid_(grid), shift_(shift), k2_(static_cast<std::size_t>(grid.n) * grid.n), fft_(grid.n) {
  for (int p = 0; p < grid.n; ++p) {
    for (int q = 0; q < grid.n; ++q) {
      k2_[static_cast<std::size_t>(p) * grid.n + q] = grid.k(p) * grid.k(p) + grid.k(q) * grid.k(q);
    }
  }
}

void FieldPropagator::advance(std::vector<cd>& f, double tau) {
  std::copy(f.begin(), f.end(), fft_.data());
  fft_.forward();
  const double norm = 1.0 / (static_cast<double>(grid_.n) * grid_.n);
  for (std::size_t i = 0; i < k2_.size(); ++i) fft_.data()[i] *= std::polar(norm, -(k2_[i] + shift_) * tau);
  fft_.backward();
  std::copy(fft_.data(), fft_.data() + f.size(), f.begin());
}

double FieldPropagator::gradient_energy(const std::vector<cd>& f) {
  std::copy(f.begin(), f.end(), fft_.data());
  fft_.forward();
  double s = 0.0;
  for (std::size_t i = 0; i < k2_.size(); ++i) s += k2_[i] * std::norm(fft_.data()[i]);
  const double nn = static_cast<double>(grid_.n) * grid_.n;
  return s * grid_.dx() * grid_.dx() / nn;
}

double field_l2(const std::vector<cd>& f, double dx) {
  double s = 0.0;
  for (const cd& v : f) s += std::norm(v);
  return s * dx * dx;
}

double boundary_mass(const std::vector<cd>& f, const Grid2D& grid, double band) {
  const int n = grid.n;
  const int strip = std::max(1, static_cast<int>(std::ceil(band * n)));
  double edge = 0.0;
  for (int i = 0; i < n; ++i) {
    const bool ei = i < strip || i >= n - strip;
    for (int j = 0; j < n; ++j) {
      const double v = std::norm(f[static_cast<std::size_t>(i) * n + j]);
      if (ei || j < strip || j >= n - strip) edge += v;
    }
  }
  return edge * grid.dx() * grid.dx();
}

}  // namespace vortex::fgr::detail
