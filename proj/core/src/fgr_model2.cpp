#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fgr_internal.hpp"
#include "vortex/errors.hpp"

namespace vortex::fgr {

namespace {

double level(const std::vector<Mode>& modes, const std::vector<int>& alpha) {
  double L = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) L += modes[j].lambda * alpha[j];
  return L;
}

cd monomial(const std::vector<cd>& z, const std::vector<int>& alpha) {
  cd v = 1.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    for (int p = 0; p < alpha[j]; ++p) v *= z[j];
  }
  return v;
}

// conj(z)^(alpha - e_j), with alpha_j >= 1.
cd reduced_monomial_conj(const std::vector<cd>& z, const std::vector<int>& alpha, std::size_t j) {
  cd v = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const int p = alpha[i] - (i == j ? 1 : 0);
    for (int q = 0; q < p; ++q) v *= std::conj(z[i]);
  }
  return v;
}

// Couplings grouped by resonant level; gram[a][b] = (1/2) int d theta b^_a conj(b^_b) on |xi| = rho.
struct LevelGram {
  double L = 0.0;
  std::vector<std::size_t> members;
  std::vector<std::vector<cd>> gram;
};

std::vector<LevelGram> level_grams(const Model2Config& cfg, const std::vector<std::size_t>& which) {
  std::vector<LevelGram> levels;
  for (std::size_t idx : which) {
    const double L = level(cfg.modes, cfg.couplings[idx].alpha);
    auto it = std::find_if(levels.begin(), levels.end(), [L](const LevelGram& g) { return std::abs(g.L - L) < 1e-9; });
    if (it == levels.end()) {
      levels.push_back({L, {idx}, {}});
    } else {
      it->members.push_back(idx);
    }
  }
  std::sort(levels.begin(), levels.end(), [](const LevelGram& a, const LevelGram& b) { return a.L < b.L; });
  for (auto& lv : levels) {
    const double rho = std::sqrt(lv.L - cfg.omega);
    const int count = cfg.circle_points;
    std::vector<detail::CircleValues> vals;
    bool closed = true;
    for (std::size_t idx : lv.members) closed = closed && cfg.couplings[idx].b.closed_form();
    for (std::size_t idx : lv.members) {
      vals.push_back(detail::circle_transform(cfg.couplings[idx].b, cfg.grid, rho, count, closed));
    }
    const std::size_t m = lv.members.size();
    lv.gram.assign(m, std::vector<cd>(m, 0.0));
    double err = 0.0;
    double diag = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        cd s = 0.0;
        cd sc = 0.0;
        for (int t = 0; t < count; ++t) {
          s += vals[a].fine[static_cast<std::size_t>(t)] * std::conj(vals[b].fine[static_cast<std::size_t>(t)]);
          if (!closed) {
            sc += vals[a].coarse[static_cast<std::size_t>(t)] * std::conj(vals[b].coarse[static_cast<std::size_t>(t)]);
          }
        }
        const double w = 0.5 * 2.0 * M_PI / count;
        lv.gram[a][b] = w * s;
        if (!closed) err = std::max(err, std::abs(w * (s - sc)) / 7.0);
        if (a == b) diag = std::max(diag, std::abs(w * s));
      }
    }
    if (!closed && err > 0.01 * diag + 1e-12) {
      std::ostringstream os;
      os << "circle integral error estimate " << err << " at level " << lv.L << " exceeds 1%";
      throw Error(ErrorCode::GridTooCoarse, os.str());
    }
  }
  return levels;
}

double gamma_value(const Model2Config& cfg, const std::vector<LevelGram>& levels, const std::vector<cd>& z) {
  double total = 0.0;
  for (const auto& lv : levels) {
    cd q = 0.0;
    for (std::size_t a = 0; a < lv.members.size(); ++a) {
      const cd za = monomial(z, cfg.couplings[lv.members[a]].alpha);
      for (std::size_t b = 0; b < lv.members.size(); ++b) {
        q += za * std::conj(monomial(z, cfg.couplings[lv.members[b]].alpha)) * lv.gram[a][b];
      }
    }
    total += lv.L * std::max(0.0, q.real());
  }
  return -2.0 * M_PI * total;
}

std::vector<std::size_t> all_indices(const Model2Config& cfg) {
  std::vector<std::size_t> idx(cfg.couplings.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

}  // namespace

void validate(const Model2Config& cfg) {
  if (cfg.modes.empty()) throw Error(ErrorCode::ConfigError, "model2 needs at least one mode");
  for (const auto& m : cfg.modes) {
    if (!(m.lambda > 0.0)) throw Error(ErrorCode::ConfigError, "mode frequencies must be positive");
    if (m.s != 1 && m.s != -1) throw Error(ErrorCode::ConfigError, "mode signatures must be +1 or -1");
  }
  if (!(cfg.omega > 0.0)) throw Error(ErrorCode::ConfigError, "omega must be positive");
  if (cfg.grid.n < 8 || cfg.grid.n % 2 != 0 || !(cfg.grid.box > 0.0)) {
    throw Error(ErrorCode::ConfigError, "grid needs an even n >= 8 and a positive box");
  }
  if (!(cfg.dt > 0.0) || !(cfg.t_final > 0.0) || cfg.sample_every < 1) {
    throw Error(ErrorCode::ConfigError, "dt, t_final and sample_every must be positive");
  }
  if (!cfg.z0.empty() && cfg.z0.size() != cfg.modes.size()) {
    throw Error(ErrorCode::ConfigError, "z0 length differs from the number of modes");
  }
  for (const auto& c : cfg.couplings) {
    if (c.alpha.size() != cfg.modes.size()) throw Error(ErrorCode::ConfigError, "multi-index length differs from modes");
    int order = 0;
    for (int a : c.alpha) {
      if (a < 0) throw Error(ErrorCode::ConfigError, "multi-index entries must be nonnegative");
      order += a;
    }
    if (order == 0) throw Error(ErrorCode::ConfigError, "multi-index must be nonzero");
    const double L = level(cfg.modes, c.alpha);
    if (std::abs(L) <= cfg.omega) {
      std::ostringstream os;
      os << "coupling with lambda.alpha = " << L << " does not exceed omega = " << cfg.omega;
      throw Error(ErrorCode::CouplingConstraint, os.str());
    }
  }
}

std::vector<std::vector<int>> resonant_set(const std::vector<Mode>& modes, double omega, int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> alpha(modes.size(), 0);
  auto rec = [&](auto&& self, std::size_t j, int remaining) -> void {
    if (j == modes.size()) {
      const double L = level(modes, alpha);
      if (!(L > omega)) return;
      for (std::size_t k = 0; k < modes.size(); ++k) {
        if (alpha[k] > 0 && !(L - modes[k].lambda < omega)) return;
      }
      out.push_back(alpha);
      return;
    }
    for (int a = 0; a <= remaining; ++a) {
      alpha[j] = a;
      self(self, j + 1, remaining - a);
    }
    alpha[j] = 0;
  };
  rec(rec, 0, max_order);
  return out;
}

double leak_rate(const Model2Config& cfg, const std::vector<cd>& z) {
  validate(cfg);
  return -gamma_value(cfg, level_grams(cfg, all_indices(cfg)), z);
}

GammaResult gamma_model2(const Model2Config& cfg, const std::vector<std::vector<cd>>& zeta) {
  validate(cfg);
  int max_order = 1;
  for (const auto& c : cfg.couplings) {
    int o = 0;
    for (int a : c.alpha) o += a;
    max_order = std::max(max_order, o);
  }
  const auto M = resonant_set(cfg.modes, cfg.omega, max_order);
  std::vector<std::size_t> which;
  for (std::size_t i = 0; i < cfg.couplings.size(); ++i) {
    if (std::find(M.begin(), M.end(), cfg.couplings[i].alpha) != M.end()) which.push_back(i);
  }
  const auto levels = level_grams(cfg, which);

  GammaResult out;
  for (const auto& lv : levels) out.levels.push_back(lv.L);
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& z : zeta) {
    if (z.size() != cfg.modes.size()) throw Error(ErrorCode::ConfigError, "sample dimension differs from modes");
    const double g = gamma_value(cfg, levels, z);
    out.gamma.push_back(g);
    double weight = 0.0;
    for (const auto& alpha : M) weight += std::norm(monomial(z, alpha));
    if (weight > 0.0) margin = std::min(margin, -g / weight);
  }
  out.h13_margin = std::isfinite(margin) ? margin : 0.0;
  return out;
}

std::vector<std::vector<cd>> sphere_samples(int modes, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<cd>> out;
  for (int i = 0; i < count; ++i) {
    std::vector<cd> z(static_cast<std::size_t>(modes));
    double norm = 0.0;
    for (auto& v : z) {
      v = cd(gauss(rng), gauss(rng));
      norm += std::norm(v);
    }
    for (auto& v : z) v /= std::sqrt(norm);
    out.push_back(std::move(z));
  }
  return out;
}

TimeSeries simulate_model2(const Model2Config& cfg) {
  validate(cfg);
  const Grid2D& grid = cfg.grid;
  const std::size_t nm = cfg.modes.size();
  const std::size_t nc = cfg.couplings.size();
  const std::size_t npts = static_cast<std::size_t>(grid.n) * grid.n;
  const double dx2 = grid.dx() * grid.dx();

  double lmax = 0.0;
  for (const auto& m : cfg.modes) lmax = std::max(lmax, m.lambda);
  if (cfg.dt * lmax >= 1.0) throw Error(ErrorCode::Unstable, "dt exceeds the RK4 accuracy bound for the mode frequencies");
  for (const auto& c : cfg.couplings) {
    const double rho = std::sqrt(level(cfg.modes, c.alpha) - cfg.omega);
    if (2.0 * rho * cfg.t_final >= 0.5 * grid.box) {
      std::ostringstream os;
      os << "radiation front 2 rho t_final = " << 2.0 * rho * cfg.t_final << " reaches half the box";
      throw Error(ErrorCode::BoxWrap, os.str());
    }
  }

  std::vector<std::vector<cd>> a(nc);
  std::vector<std::vector<cd>> bbar(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    a[i] = cfg.couplings[i].a.sample(grid);
    bbar[i] = cfg.couplings[i].b.sample(grid);
    for (auto& v : bbar[i]) v = std::conj(v);
    double peak = 0.0;
    for (std::size_t p = 0; p < npts; ++p) peak = std::max({peak, std::abs(a[i][p]), std::abs(bbar[i][p])});
    const double tail = std::max(cfg.couplings[i].a.boundary_max(grid), cfg.couplings[i].b.boundary_max(grid));
    if (tail > 1e-10 * std::max(peak, 1.0)) throw Error(ErrorCode::ConfigError, "coupling tail exceeds 1e-10 at the box boundary");
  }
  auto inner = [&](const std::vector<cd>& u, const std::vector<cd>& v, bool conj_u) {
    cd s = 0.0;
    for (std::size_t p = 0; p < npts; ++p) s += (conj_u ? std::conj(u[p]) : u[p]) * v[p];
    return s * dx2;
  };
  // A_i = int conj(a_i) f and B_i = int b_i f along the directions a_k and conj(b_k).
  std::vector<std::vector<cd>> Paa(nc, std::vector<cd>(nc));
  std::vector<std::vector<cd>> Pab(nc, std::vector<cd>(nc));
  std::vector<std::vector<cd>> Pba(nc, std::vector<cd>(nc));
  std::vector<std::vector<cd>> Pbb(nc, std::vector<cd>(nc));
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t k = 0; k < nc; ++k) {
      Paa[i][k] = inner(a[i], a[k], true);
      Pab[i][k] = inner(a[i], bbar[k], true);
      Pba[i][k] = inner(bbar[i], a[k], true);
      Pbb[i][k] = inner(bbar[i], bbar[k], true);
    }
  }
  auto overlaps = [&](const std::vector<cd>& f, std::vector<cd>& A, std::vector<cd>& B) {
    A.assign(nc, 0.0);
    B.assign(nc, 0.0);
    for (std::size_t i = 0; i < nc; ++i) {
      A[i] = inner(a[i], f, true);
      B[i] = inner(bbar[i], f, true);
    }
  };

  const auto levels = level_grams(cfg, all_indices(cfg));
  detail::FieldPropagator prop(grid, cfg.omega);
  std::vector<cd> f(npts, 0.0);
  std::vector<cd> z = cfg.z0.empty() ? std::vector<cd>(nm, 0.0) : cfg.z0;

  auto hamiltonian = [&](const std::vector<cd>& ff, const std::vector<cd>& zz) {
    double H = 0.0;
    for (std::size_t j = 0; j < nm; ++j) H -= cfg.modes[j].s * cfg.modes[j].lambda * std::norm(zz[j]);
    H += prop.gradient_energy(ff) + cfg.omega * detail::field_l2(ff, grid.dx());
    std::vector<cd> A;
    std::vector<cd> B;
    overlaps(ff, A, B);
    for (std::size_t i = 0; i < nc; ++i) H += 2.0 * std::real(monomial(zz, cfg.couplings[i].alpha) * (std::conj(A[i]) - B[i]));
    return H;
  };
  auto signed_energy = [&](const std::vector<cd>& zz) {
    double s = 0.0;
    for (std::size_t j = 0; j < nm; ++j) s += cfg.modes[j].s * cfg.modes[j].lambda * std::norm(zz[j]);
    return s;
  };

  // State of the coupling substep: modes plus coefficients of f along a_k and conj(b_k).
  struct Coupled {
    std::vector<cd> z;
    std::vector<cd> kappa;
    std::vector<cd> eta;
  };
  auto rhs = [&](const Coupled& y, const std::vector<cd>& A0, const std::vector<cd>& B0) {
    Coupled d{std::vector<cd>(nm, 0.0), std::vector<cd>(nc), std::vector<cd>(nc)};
    std::vector<cd> A = A0;
    std::vector<cd> B = B0;
    for (std::size_t i = 0; i < nc; ++i) {
      for (std::size_t k = 0; k < nc; ++k) {
        A[i] += y.kappa[k] * Paa[i][k] + y.eta[k] * Pab[i][k];
        B[i] += y.kappa[k] * Pba[i][k] + y.eta[k] * Pbb[i][k];
      }
    }
    // B above holds int conj(conj b) f = int b f.
    for (std::size_t j = 0; j < nm; ++j) {
      cd force = -cfg.modes[j].s * cfg.modes[j].lambda * y.z[j];
      for (std::size_t i = 0; i < nc; ++i) {
        const auto& alpha = cfg.couplings[i].alpha;
        if (alpha[j] == 0) continue;
        force += static_cast<double>(alpha[j]) * reduced_monomial_conj(y.z, alpha, j) * (A[i] - std::conj(B[i]));
      }
      d.z[j] = cd(0.0, -1.0) * force / static_cast<double>(cfg.modes[j].s);
    }
    for (std::size_t i = 0; i < nc; ++i) {
      const cd za = monomial(y.z, cfg.couplings[i].alpha);
      d.kappa[i] = cd(0.0, -1.0) * za;
      d.eta[i] = cd(0.0, 1.0) * std::conj(za);
    }
    return d;
  };
  auto axpy = [](const Coupled& y, const Coupled& d, double s) {
    Coupled r = y;
    for (std::size_t j = 0; j < r.z.size(); ++j) r.z[j] += s * d.z[j];
    for (std::size_t i = 0; i < r.kappa.size(); ++i) {
      r.kappa[i] += s * d.kappa[i];
      r.eta[i] += s * d.eta[i];
    }
    return r;
  };

  const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_final / cfg.dt - 1e-9)));
  const double dt = cfg.t_final / static_cast<double>(steps);

  TimeSeries ts;
  ts.z_abs2.resize(nm);
  double leak = 0.0;
  const double h_start = hamiltonian(f, z);
  // Mixed signatures can make H(0) small, so drift is measured against the unsigned mode energy too.
  double mode_energy = 0.0;
  for (std::size_t j = 0; j < nm; ++j) mode_energy += cfg.modes[j].lambda * std::norm(z[j]);
  const double h_scale = std::max(std::abs(h_start), mode_energy);

  auto record = [&](double t) {
    ts.t.push_back(t);
    double zmass = 0.0;
    for (std::size_t j = 0; j < nm; ++j) {
      ts.z_abs2[j].push_back(std::norm(z[j]));
      zmass += std::norm(z[j]);
    }
    ts.signed_energy.push_back(signed_energy(z));
    ts.leak_integral.push_back(leak);
    ts.field_l2.push_back(detail::field_l2(f, grid.dx()));
    const double H = hamiltonian(f, z);
    ts.hamiltonian.push_back(H);
    if (!std::isfinite(H)) throw Error(ErrorCode::Unstable, "nonfinite state");
    if (h_scale > 0.0) ts.hamiltonian_drift = std::max(ts.hamiltonian_drift, std::abs(H - h_start) / h_scale);
    const double total = zmass + ts.field_l2.back();
    const double edge = total > 0.0 ? detail::boundary_mass(f, grid, cfg.wrap_band) / total : 0.0;
    if (edge > cfg.wrap_threshold) {
      std::ostringstream os;
      os << "boundary strip holds " << edge << " of the total mass at t = " << t;
      throw Error(ErrorCode::BoxWrap, os.str());
    }
  };

  record(0.0);
  std::vector<cd> A0;
  std::vector<cd> B0;
  for (long step = 1; step <= steps; ++step) {
    const double g_before = gamma_value(cfg, levels, z);
    prop.advance(f, 0.5 * dt);
    overlaps(f, A0, B0);
    const Coupled y0{z, std::vector<cd>(nc, 0.0), std::vector<cd>(nc, 0.0)};
    const Coupled k1 = rhs(y0, A0, B0);
    const Coupled k2 = rhs(axpy(y0, k1, 0.5 * dt), A0, B0);
    const Coupled k3 = rhs(axpy(y0, k2, 0.5 * dt), A0, B0);
    const Coupled k4 = rhs(axpy(y0, k3, dt), A0, B0);
    for (std::size_t j = 0; j < nm; ++j) z[j] += dt / 6.0 * (k1.z[j] + 2.0 * k2.z[j] + 2.0 * k3.z[j] + k4.z[j]);
    for (std::size_t i = 0; i < nc; ++i) {
      const cd kap = dt / 6.0 * (k1.kappa[i] + 2.0 * k2.kappa[i] + 2.0 * k3.kappa[i] + k4.kappa[i]);
      const cd eta = dt / 6.0 * (k1.eta[i] + 2.0 * k2.eta[i] + 2.0 * k3.eta[i] + k4.eta[i]);
      for (std::size_t p = 0; p < npts; ++p) f[p] += kap * a[i][p] + eta * bbar[i][p];
    }
    prop.advance(f, 0.5 * dt);
    leak += 0.5 * dt * (g_before + gamma_value(cfg, levels, z));
    for (const cd& v : z) {
      if (!std::isfinite(std::abs(v))) throw Error(ErrorCode::Unstable, "nonfinite mode amplitude");
    }
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
