#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vortex::fgr {

using cd = std::complex<double>;

// Periodic square [-box/2, box/2)^2 with n points per side, x_i = (i - n/2) box / n.
struct Grid2D {
  double box = 40.0;
  int n = 128;

  double dx() const { return box / n; }
  double x(int i) const { return (i - n / 2) * dx(); }
  double dk() const { return 2.0 * M_PI / box; }
  // Angular wavenumber of FFT bin p, p in [0, n).
  double k(int p) const { return (p < n / 2 ? p : p - n) * dk(); }
};

// A (1 + gamma |x - c|^2) exp(-|x - c|^2 / (2 w^2)) exp(i q.x).
struct GaussianTerm {
  cd amplitude{1.0, 0.0};
  double width = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  double gamma = 0.0;
  double qx = 0.0;
  double qy = 0.0;
};

// Coupling profile on the plane: a finite sum of Gaussian-type terms (closed-form transform)
// or samples on a grid. Transforms use G^(xi) = (2 pi)^{-1} int G(x) e^{-i xi.x} dx.
class Coupling {
 public:
  Coupling() = default;
  static Coupling zero() { return Coupling(); }
  static Coupling gaussian(cd amplitude, double width, double cx = 0.0, double cy = 0.0);
  // Radial profile whose transform vanishes on |xi| = radius.
  static Coupling gaussian_with_node(cd amplitude, double width, double radius = 1.0);
  static Coupling from_terms(std::vector<GaussianTerm> terms);
  // Row-major samples, first index along x.
  static Coupling from_samples(Grid2D grid, std::vector<cd> values);

  bool closed_form() const { return !samples_; }
  bool is_zero() const;
  const std::vector<GaussianTerm>& terms() const { return terms_; }

  cd value(double x, double y) const;
  cd transform(double kx, double ky) const;  // closed form only
  std::vector<cd> sample(const Grid2D& grid) const;
  // Largest |G| on the outermost ring of grid points.
  double boundary_max(const Grid2D& grid) const;

 private:
  std::vector<GaussianTerm> terms_;
  std::optional<Grid2D> sample_grid_;
  std::shared_ptr<const std::vector<cd>> samples_;
};

struct QuadratureConfig {
  Grid2D grid{40.0, 128};
  int circle_points = 256;
  double radius = 1.0;
  double rel_tol = 0.01;
  bool closed_form = false;  // evaluate the transform exactly instead of FFT + bicubic
};

struct FgrConstant {
  double value = 0.0;
  double error_estimate = 0.0;
};

// c = (1/2) int_{|xi| = radius} |G^(xi)|^2 dsigma.
FgrConstant fgr_constant(const Coupling& G, const QuadratureConfig& cfg = {});

struct OracleConfig {
  Grid2D grid{40.0, 128};
  int angular_points = 64;
  int gauss_points = 160;
  double rel_tol = 0.01;
};

// Lorentzian-broadened <G, delta(-Delta - 1) G> from a direct Fourier sum, extrapolated to eps -> 0.
double fgr_constant_oracle(const Coupling& G, const std::vector<double>& eps = {0.1, 0.05, 0.025},
                           const OracleConfig& cfg = {});

// |z0|^2 / (1 + 4 pi c |z0|^4 t)^{1/2}.
double predicted_decay(double c, cd z0, double t);

struct TimeSeries {
  std::vector<double> t;
  std::vector<std::vector<double>> z_abs2;  // [mode][sample]
  // model1: |z|^2 and 2 pi c int |z|^6; model2: sum_j s_j lambda_j |z_j|^2 and int Gamma(z).
  // In both cases signed_energy + leak_integral is conserved.
  std::vector<double> signed_energy;
  std::vector<double> leak_integral;
  std::vector<double> field_l2;
  std::vector<double> predicted;            // model1 only
  std::vector<double> hamiltonian;
  double hamiltonian_drift = 0.0;  // max relative deviation from the initial value
  double c = 0.0;                  // model1 FGR constant used for the prediction
};

struct Model1Config {
  Coupling G = Coupling::gaussian(1.0, 1.0);
  Grid2D grid{240.0, 256};
  double dt = 0.05;
  double t_final = 10.0;
  cd z0{0.3, 0.0};
  std::vector<cd> h0;  // empty means zero
  int sample_every = 10;
  double wrap_band = 0.05;  // boundary strip width as a fraction of the box
  double wrap_threshold = 1e-4;
  double drift_limit = 5e-3;
};

// i z' = z + 2|z|^2 <h, G> + z^2 conj<h, G>,  i h' = -Lap h + |z|^2 z conj(G),
// with <h, G> = int h G dx.
TimeSeries simulate_model1(const Model1Config& cfg);

struct Mode {
  double lambda = 0.0;
  int s = -1;
};

// Terms z^alpha a + conj(z^alpha) (...) in the field equation; a drives the first component
// and b the second one, the conjugate family being fixed by the reality condition.
struct ModeCoupling {
  std::vector<int> alpha;
  Coupling a;
  Coupling b;
};

struct Model2Config {
  std::vector<Mode> modes;
  double omega = 0.5;
  std::vector<ModeCoupling> couplings;
  Grid2D grid{220.0, 256};
  double dt = 0.1;
  double t_final = 50.0;
  std::vector<cd> z0;
  int sample_every = 10;
  double wrap_band = 0.05;
  double wrap_threshold = 1e-4;
  double drift_limit = 5e-3;
  int circle_points = 256;
};

// Validates modes, couplings and the constraint lambda.alpha > omega.
void validate(const Model2Config& cfg);

// Flat-field multimode system with field f (h = (f, conj f)):
//   i f' = (-Lap + omega) f + sum_alpha (z^alpha a_alpha - conj(z^alpha) conj(b_alpha)),
//   i s_j z_j' = -s_j lambda_j z_j + sum_alpha alpha_j conj(z^{alpha - e_j}) int(conj(a) f - conj(b f)).
TimeSeries simulate_model2(const Model2Config& cfg);

// Resonant multi-indices: lambda.alpha > omega and lambda.alpha - lambda_k < omega for alpha_k > 0.
std::vector<std::vector<int>> resonant_set(const std::vector<Mode>& modes, double omega, int max_order = 8);

struct GammaResult {
  std::vector<double> gamma;  // Gamma(zeta) per sample, <= 0
  double h13_margin = 0.0;    // min over samples of -Gamma / sum_{alpha in M} |zeta^alpha|^2
  std::vector<double> levels;
};

// Gamma(zeta) = -2 pi sum_L L <delta(-Lap - (L - omega)) B_L, B_L>, B_L = sum_{lambda.alpha = L} zeta^alpha b_alpha.
// d/dt sum s_j lambda_j |z_j|^2 = -Gamma(z) at leading order.
GammaResult gamma_model2(const Model2Config& cfg, const std::vector<std::vector<cd>>& zeta);

// Leak rate -Gamma(z) using every configured coupling (not only the resonant set).
double leak_rate(const Model2Config& cfg, const std::vector<cd>& z);

// Deterministic samples on the unit sphere of C^n.
std::vector<std::vector<cd>> sphere_samples(int modes, int count, unsigned seed = 7);

void write_time_series_csv(const TimeSeries& ts, const std::string& path);

}  // namespace vortex::fgr
