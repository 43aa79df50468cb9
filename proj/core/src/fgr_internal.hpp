#pragma once

#include <complex>
#include <vector>

#include "vortex/fgr.hpp"

namespace vortex::fgr::detail {

// In-place 2-D complex FFT on an owned buffer. Plans are created under a global lock.
class Fft2d {
 public:
  explicit Fft2d(int n);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int n() const { return n_; }
  cd* data() { return data_; }
  void forward();
  void backward();  // unnormalized

 private:
  int n_;
  cd* data_;
  void* fwd_;
  void* bwd_;
};

// Unitary-convention transform of samples: out[p] = G^(k_p) on the FFT bin lattice.
std::vector<cd> grid_transform(const Grid2D& grid, const std::vector<cd>& samples);

// Keys cubic convolution of a periodic-in-bins spectrum at (kx, ky); stride picks every
// stride-th bin, which gives the half-resolution estimate.
cd interpolate_spectrum(const Grid2D& grid, const std::vector<cd>& spec, double kx, double ky,
                        int stride = 1);

// Transform values on the circle |xi| = rho at points theta_t = 2 pi t / count.
struct CircleValues {
  std::vector<cd> fine;
  std::vector<cd> coarse;  // half resolution, empty in closed form
};
CircleValues circle_transform(const Coupling& G, const Grid2D& grid, double rho, int count,
                              bool closed_form);

// Exact flow of i f' = (-Lap + shift) f on the periodic grid.
class FieldPropagator {
 public:
  FieldPropagator(const Grid2D& grid, double shift);
  void advance(std::vector<cd>& f, double tau);
  // int |grad f|^2 dx.
  double gradient_energy(const std::vector<cd>& f);

 private:
  Grid2D grid_;
  double shift_;
  std::vector<double> k2_;
  Fft2d fft_;
};

double field_l2(const std::vector<cd>& f, double dx);

// int |f|^2 over the boundary strip of relative width band.
double boundary_mass(const std::vector<cd>& f, const Grid2D& grid, double band);

}  // namespace vortex::fgr::detail
