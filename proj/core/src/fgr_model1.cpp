#include <cmath>
#include <sstream>

#include "fgr_internal.hpp"
#include "vortex/errors.hpp"

namespace vortex::fgr {

namespace {

struct Coupled {
  cd z;
  cd kappa;
};

}  // namespace

TimeSeries simulate_model1(const Model1Config& cfg) {
  const Grid2D& grid = cfg.grid;
  if (grid.n < 8 || grid.n % 2 != 0 || !(grid.box > 0.0)) {
    throw Error(ErrorCode::ConfigError, "grid needs an even n >= 8 and a positive box");
  }
  if (!(cfg.dt > 0.0) || !(cfg.t_final > 0.0) || cfg.sample_every < 1) {
    throw Error(ErrorCode::ConfigError, "dt, t_final and sample_every must be positive");
  }
  const std::size_t npts = static_cast<std::size_t>(grid.n) * grid.n;
  if (!cfg.h0.empty() && cfg.h0.size() != npts) throw Error(ErrorCode::GridMismatch, "h0 does not match the grid");

  const std::vector<cd> G = cfg.G.sample(grid);
  double gmax = 0.0;
  for (const cd& v : G) gmax = std::max(gmax, std::abs(v));
  if (cfg.G.boundary_max(grid) > 1e-10 * std::max(gmax, 1.0)) {
    throw Error(ErrorCode::ConfigError, "coupling tail exceeds 1e-10 at the box boundary");
  }
  // Linear frequency of z is 1; the field flow is exact.
  if (cfg.dt * 1.0 >= 1.0) throw Error(ErrorCode::Unstable, "dt exceeds the RK4 accuracy bound for the mode frequency");
  // Radiation leaves the resonant circle |xi| = 1 with group velocity 2.
  if (2.0 * cfg.t_final >= 0.5 * grid.box) {
    std::ostringstream os;
    os << "radiation front 2 t_final = " << 2.0 * cfg.t_final << " reaches half the box " << 0.5 * grid.box;
    throw Error(ErrorCode::BoxWrap, os.str());
  }

  const double dx2 = grid.dx() * grid.dx();
  double g_norm = 0.0;
  for (const cd& v : G) g_norm += std::norm(v);
  g_norm *= dx2;

  QuadratureConfig qc;
  qc.grid = grid;
  const double c = fgr_constant(cfg.G, qc).value;

  std::vector<cd> h = cfg.h0.empty() ? std::vector<cd>(npts, 0.0) : cfg.h0;
  cd z = cfg.z0;
  detail::FieldPropagator prop(grid, 0.0);

  auto overlap = [&](const std::vector<cd>& f) {
    cd s = 0.0;
    for (std::size_t i = 0; i < npts; ++i) s += f[i] * G[i];
    return s * dx2;
  };
  auto hamiltonian = [&](const std::vector<cd>& f, cd zz) {
    const double a = std::norm(zz);
    return a + prop.gradient_energy(f) + 2.0 * std::real(a * std::conj(zz) * overlap(f));
  };

  const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_final / cfg.dt - 1e-9)));
  const double dt = cfg.t_final / static_cast<double>(steps);

  TimeSeries ts;
  ts.c = c;
  ts.z_abs2.resize(1);
  double leak = 0.0;
  const double h_start = hamiltonian(h, z);
  const double h_scale = std::max(std::abs(h_start), std::norm(cfg.z0));
  auto record = [&](double t) {
    ts.t.push_back(t);
    ts.z_abs2[0].push_back(std::norm(z));
    ts.signed_energy.push_back(std::norm(z));
    ts.leak_integral.push_back(leak);
    ts.field_l2.push_back(detail::field_l2(h, grid.dx()));
    ts.predicted.push_back(predicted_decay(c, cfg.z0, t));
    const double H = hamiltonian(h, z);
    ts.hamiltonian.push_back(H);
    if (h_scale > 0.0) ts.hamiltonian_drift = std::max(ts.hamiltonian_drift, std::abs(H - h_start) / h_scale);
    if (!std::isfinite(H)) throw Error(ErrorCode::Unstable, "nonfinite state");
    // Measured against the conserved charge |z|^2 + ||h||^2.
    const double edge = detail::boundary_mass(h, grid, cfg.wrap_band) / (std::norm(z) + ts.field_l2.back());
    if (edge > cfg.wrap_threshold) {
      std::ostringstream os;
      os << "boundary strip holds " << edge << " of the total mass at t = " << t;
      throw Error(ErrorCode::BoxWrap, os.str());
    }
  };

  // Within the coupling substep h moves along conj(G) only: h = h_start + kappa conj(G).
  auto rhs = [&](const Coupled& y, cd I0) {
    const double a = std::norm(y.z);
    const cd I = I0 + y.kappa * g_norm;
    Coupled d;
    d.z = cd(0.0, -1.0) * (y.z + 2.0 * a * I + y.z * y.z * std::conj(I));
    d.kappa = cd(0.0, -1.0) * a * y.z;
    return d;
  };
  auto axpy = [](const Coupled& y, const Coupled& d, double s) { return Coupled{y.z + s * d.z, y.kappa + s * d.kappa}; };

  record(0.0);
  for (long step = 1; step <= steps; ++step) {
    const double z6_before = std::pow(std::norm(z), 3);
    prop.advance(h, 0.5 * dt);
    const cd I0 = overlap(h);
    const Coupled y0{z, 0.0};
    const Coupled k1 = rhs(y0, I0);
    const Coupled k2 = rhs(axpy(y0, k1, 0.5 * dt), I0);
    const Coupled k3 = rhs(axpy(y0, k2, 0.5 * dt), I0);
    const Coupled k4 = rhs(axpy(y0, k3, dt), I0);
    z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    const cd kappa = dt / 6.0 * (k1.kappa + 2.0 * k2.kappa + 2.0 * k3.kappa + k4.kappa);
    for (std::size_t i = 0; i < npts; ++i) h[i] += kappa * std::conj(G[i]);
    prop.advance(h, 0.5 * dt);
    leak += 0.5 * dt * 2.0 * M_PI * c * (z6_before + std::pow(std::norm(z), 3));
    if (!std::isfinite(std::abs(z))) throw Error(ErrorCode::Unstable, "nonfinite mode amplitude");
    if (step % cfg.sample_every == 0 || step == steps) record(step * dt);
  }
  if (ts.hamiltonian_drift > cfg.drift_limit) {
    std::ostringstream os;
    os << "Hamiltonian drift " << ts.hamiltonian_drift << " exceeds " << cfg.drift_limit << "; reduce dt";
    throw Error(ErrorCode::Unstable, os.str());
  }
  return ts;
}

}  // namespace vortex::fgr
