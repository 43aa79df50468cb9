#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/SparseLU>

#include "vortex/errors.hpp"
#include "vortex/profiles.hpp"

namespace vortex::profiles {

namespace {

struct Problem {
  const NonlinearityModel& model;
  const RadialGrid& grid;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd V;
  double omega;
  double eps;

  Eigen::VectorXd residual(const Eigen::VectorXd& psi) const {
    Eigen::VectorXd F = A * psi;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      const double s = psi[i] * psi[i];
      F[i] += (omega + eps * V[i] + model.beta(s)) * psi[i];
    }
    return F;
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& psi) const {
    Eigen::SparseMatrix<double> J = A;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      const double s = psi[i] * psi[i];
      J.coeffRef(i, i) += omega + eps * V[i] + model.beta(s) + 2.0 * s * model.beta_prime(s);
    }
    return J;
  }
};

Problem make_problem(const NonlinearityModel& model, const RadialPotential& potential, double omega,
                     int m, const RadialGrid& grid) {
  return Problem{model, grid, radial_operator(grid, m), potential.sample(grid), omega,
                 potential.active() ? potential.strength : 0.0};
}

struct NewtonResult {
  Eigen::VectorXd psi;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

NewtonResult newton(const Problem& p, Eigen::VectorXd psi, double tol, int max_iterations) {
  NewtonResult out;
  Eigen::VectorXd F = p.residual(psi);
  double res = F.lpNorm<Eigen::Infinity>();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  int it = 0;
  for (; it < max_iterations && res >= tol; ++it) {
    Eigen::SparseMatrix<double> J = p.jacobian(psi);
    lu.compute(J);
    if (lu.info() != Eigen::Success) break;
    const Eigen::VectorXd step = lu.solve(-F);
    if (!step.allFinite()) break;

    const double merit = F.norm();
    double t = 1.0;
    Eigen::VectorXd trial;
    Eigen::VectorXd Ft;
    for (int ls = 0; ls < 12; ++ls) {
      trial = psi + t * step;
      Ft = p.residual(trial);
      if (Ft.allFinite() && Ft.norm() < (1.0 - 1e-4 * t) * merit) break;
      t *= 0.5;
    }
    if (!Ft.allFinite()) break;
    psi = std::move(trial);
    F = std::move(Ft);
    res = F.lpNorm<Eigen::Infinity>();
  }
  out.psi = std::move(psi);
  out.residual = res;
  out.iterations = it;
  out.converged = res < tol && out.psi.allFinite();
  return out;
}

enum class Verdict { Ok, Trivial, Excited, Unlocalized };

Verdict classify(const RadialGrid& grid, const Eigen::VectorXd& psi, double trivial_amplitude) {
  const double peak = psi.cwiseAbs().maxCoeff();
  if (peak < trivial_amplitude) return Verdict::Trivial;
  if (psi.minCoeff() < -1e-9 * peak) return Verdict::Excited;
  double outer = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    if (grid.r()[i] > 0.9 * grid.r_max()) outer = std::max(outer, std::abs(psi[i]));
  if (outer > 1e-2 * peak) return Verdict::Unlocalized;
  return Verdict::Ok;
}

RadialProfile finish(const NonlinearityModel& model, const RadialPotential& potential, double omega,
                     int m, const RadialGrid& grid, const NewtonResult& nr, double tol) {
  RadialProfile out(grid);
  out.omega = omega;
  out.m = m;
  out.epsilon = potential.active() ? potential.strength : 0.0;
  out.psi = nr.psi;
  out.residual_norm = nr.residual;
  out.tolerance = tol;
  out.iterations = nr.iterations;
  out.q = profile_mass(grid, out.psi);
  out.E = profile_energy(model, potential, m, grid, out.psi);
  out.d = out.E + omega * out.q;
  return out;
}

Eigen::VectorXd bump(const RadialGrid& grid, int m, double amplitude, double sigma) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(grid.n()));
  double peak = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double r = grid.r()[i];
    g[i] = std::pow(r, m) * std::exp(-(r * r) / (sigma * sigma));
    peak = std::max(peak, g[i]);
  }
  return g * (amplitude / peak);
}

std::string describe(const char* what, double omega, int m, double eps) {
  std::ostringstream os;
  os << what << " (omega=" << omega << ", m=" << m << ", epsilon=" << eps << ")";
  return os.str();
}

// Scan amplitude and width of a super-Gaussian guess; run Newton from the best candidates.
std::optional<RadialProfile> scan_solve(const NonlinearityModel& model,
                                        const RadialPotential& potential, double omega, int m,
                                        const RadialGrid& grid, const ProfileConfig& cfg,
                                        Verdict* last_verdict, double* last_residual) {
  const Problem p = make_problem(model, potential, omega, m, grid);
  struct Candidate {
    double score;
    Eigen::VectorXd guess;
  };
  std::vector<Candidate> candidates;
  const double amplitudes[] = {0.2, 0.4, 0.6, 0.8, 0.9};
  const double widths[] = {1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 11.0, 15.0, 20.0};
  const Eigen::VectorXd& w = grid.weights();
  for (double a : amplitudes) {
    for (double sigma : widths) {
      if (sigma > 0.5 * grid.r_max()) continue;
      Eigen::VectorXd g = bump(grid, m, a, sigma);
      const Eigen::VectorXd F = p.residual(g);
      const double num = std::sqrt(w.dot(F.cwiseAbs2()));
      const double den = std::sqrt(w.dot(g.cwiseAbs2()));
      candidates.push_back({num / den, std::move(g)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) { return x.score < y.score; });
  const std::size_t tries = std::min<std::size_t>(4, candidates.size());
  for (std::size_t c = 0; c < tries; ++c) {
    NewtonResult nr = newton(p, candidates[c].guess, cfg.tol, cfg.max_iterations);
    *last_residual = nr.residual;
    if (!nr.converged) continue;
    *last_verdict = classify(grid, nr.psi, cfg.trivial_amplitude);
    if (*last_verdict == Verdict::Ok) return finish(model, potential, omega, m, grid, nr, cfg.tol);
  }
  return std::nullopt;
}

// Predictor-corrector march along the straight segment (omega0, eps0) -> (omega1, eps1).
RadialProfile march(const NonlinearityModel& model, const RadialPotential& shape,
                    const RadialProfile& start, double omega1, double eps1,
                    const ProfileConfig& cfg) {
  const double omega0 = start.omega;
  const double eps0 = start.epsilon;
  const RadialGrid& grid = start.grid;
  const int m = start.m;
  const double domega = omega1 - omega0;
  const double deps = eps1 - eps0;
  if (domega == 0.0 && deps == 0.0) return start;

  double dt = 1.0;
  if (std::abs(domega) > 0.0) dt = std::min(1.0, cfg.max_omega_step / std::abs(domega));
  if (std::abs(deps) > 0.0) dt = std::min(dt, 0.01 / std::abs(deps));
  const double dt_max = dt;
  const double dt_min = cfg.min_omega_step / std::max(std::abs(domega), std::abs(deps));

  double t = 0.0;
  Eigen::VectorXd psi = start.psi;
  Eigen::VectorXd prev_psi;
  double prev_t = 0.0;
  bool have_prev = false;
  NewtonResult last;
  last.psi = psi;
  last.residual = start.residual_norm;
  last.iterations = start.iterations;

  while (t < 1.0) {
    const double t_next = std::min(1.0, t + dt);
    Eigen::VectorXd guess = psi;
    if (have_prev) guess = psi + (psi - prev_psi) * ((t_next - t) / (t - prev_t));
    const double om = omega0 + t_next * domega;
    const double ep = eps0 + t_next * deps;
    const Problem p = make_problem(model, shape.with_strength(ep), om, m, grid);
    NewtonResult nr = newton(p, guess, cfg.tol, cfg.step_iterations);
    const bool ok = nr.converged && classify(grid, nr.psi, cfg.trivial_amplitude) == Verdict::Ok;
    if (!ok) {
      dt *= 0.5;
      if (dt < dt_min) {
        std::ostringstream os;
        os << "continuation stalled at omega=" << om << ", epsilon=" << ep
           << " (last residual " << nr.residual << ")";
        throw Error(ErrorCode::NoConvergence, os.str());
      }
      continue;
    }
    prev_psi = std::move(psi);
    prev_t = t;
    have_prev = true;
    psi = nr.psi;
    t = t_next;
    last = std::move(nr);
    if (last.iterations <= 4) dt = std::min(dt_max, dt * 1.5);
  }
  return finish(model, shape.with_strength(eps1), omega1, m, grid, last, cfg.tol);
}

}  // namespace

Eigen::VectorXd profile_residual(const NonlinearityModel& model, const RadialPotential& potential,
                                 double omega, int m, const RadialGrid& grid,
                                 const Eigen::VectorXd& psi) {
  return make_problem(model, potential, omega, m, grid).residual(psi);
}

double profile_mass(const RadialGrid& grid, const Eigen::VectorXd& psi) {
  return M_PI * grid.weights().dot(psi.cwiseAbs2());
}

double profile_energy(const NonlinearityModel& model, const RadialPotential& potential, int m,
                      const RadialGrid& grid, const Eigen::VectorXd& psi) {
  const Eigen::SparseMatrix<double> K = stiffness_matrix(grid, m);
  const double kinetic = psi.dot(K * psi);
  const double eps = potential.active() ? potential.strength : 0.0;
  const Eigen::VectorXd V = potential.sample(grid);
  double local = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double r = grid.r()[i];
    const double s = psi[i] * psi[i];
    local += grid.weights()[i] * (m * m * s / (r * r) + eps * V[i] * s + model.B(s));
  }
  return M_PI * (kinetic + local);
}

RadialProfile solve_profile(const NonlinearityModel& model, const RadialPotential& potential,
                            double omega, int m, const RadialGrid& grid, const ProfileConfig& cfg,
                            const std::optional<Eigen::VectorXd>& initial_guess) {
  const double eps = potential.active() ? potential.strength : 0.0;
  if (!(omega > 0.0)) {
    throw Error(ErrorCode::TrivialSolution, describe("omega must be positive", omega, m, eps));
  }
  if (eps == 0.0) {
    double window = 0.0;
    window = existence_window(model);
    if (omega >= window) {
      std::ostringstream os;
      os << "omega=" << omega << " lies outside the existence window (0, " << window
         << "); only the trivial solution exists";
      throw Error(ErrorCode::TrivialSolution, os.str());
    }
  }

  if (initial_guess) {
    if (initial_guess->size() != static_cast<Eigen::Index>(grid.n())) {
      throw Error(ErrorCode::GridMismatch, "initial guess length differs from grid size");
    }
    const Problem p = make_problem(model, potential, omega, m, grid);
    NewtonResult nr = newton(p, *initial_guess, cfg.tol, cfg.max_iterations);
    if (!nr.converged) {
      std::ostringstream os;
      os << describe("Newton did not converge", omega, m, eps) << "; last residual "
         << nr.residual;
      throw Error(ErrorCode::NoConvergence, os.str());
    }
    const Verdict v = classify(grid, nr.psi, cfg.trivial_amplitude);
    if (v == Verdict::Trivial) {
      throw Error(ErrorCode::TrivialSolution, describe("converged to psi = 0", omega, m, eps));
    }
    if (v != Verdict::Ok) {
      throw Error(ErrorCode::NoConvergence,
                  describe("converged to a non-principal profile", omega, m, eps));
    }
    return finish(model, potential, omega, m, grid, nr, cfg.tol);
  }

  Verdict verdict = Verdict::Ok;
  double residual = 0.0;
  if (auto direct = scan_solve(model, potential, omega, m, grid, cfg, &verdict, &residual)) {
    return *direct;
  }

  if (eps != 0.0) {
    const RadialProfile base =
        solve_profile(model, potential.with_strength(0.0), omega, m, grid, cfg);
    return march(model, potential, base, omega, eps, cfg);
  }

  // Homotopy in omega from a frequency where the scan finds the principal profile.
  for (int k = 1; k <= 12; ++k) {
    const double lower = omega * (1.0 - 0.05 * k);
    Verdict v2 = Verdict::Ok;
    double r2 = 0.0;
    if (auto seed = scan_solve(model, potential, lower, m, grid, cfg, &v2, &r2)) {
      return march(model, potential, *seed, omega, 0.0, cfg);
    }
  }

  if (verdict == Verdict::Trivial) {
    throw Error(ErrorCode::TrivialSolution, describe("every guess collapsed to psi = 0", omega, m, eps));
  }
  std::ostringstream os;
  os << describe("no guess converged", omega, m, eps) << "; last residual " << residual;
  throw Error(ErrorCode::NoConvergence, os.str());
}

RadialProfile continue_profile(const NonlinearityModel& model, const RadialPotential& potential,
                               const RadialProfile& start, double target_omega,
                               const ProfileConfig& cfg) {
  const double eps = potential.active() ? potential.strength : 0.0;
  return march(model, potential, start, target_omega, eps, cfg);
}

std::vector<double> finite_difference(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return d;
  }
  // Three-point Lagrange derivative at the centre or an end of each stencil.
  auto lagrange = [&](std::size_t i0, std::size_t at) {
    const double x0 = x[i0], x1 = x[i0 + 1], x2 = x[i0 + 2], xt = x[at];
    const double l0 = ((xt - x1) + (xt - x2)) / ((x0 - x1) * (x0 - x2));
    const double l1 = ((xt - x0) + (xt - x2)) / ((x1 - x0) * (x1 - x2));
    const double l2 = ((xt - x0) + (xt - x1)) / ((x2 - x0) * (x2 - x1));
    return l0 * y[i0] + l1 * y[i0 + 1] + l2 * y[i0 + 2];
  };
  d[0] = lagrange(0, 0);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = lagrange(i - 1, i);
  d[n - 1] = lagrange(n - 3, n - 1);
  return d;
}

FamilyTable continue_family(const NonlinearityModel& model, const RadialPotential& potential,
                            const std::vector<double>& omegas, int m, const RadialGrid& grid,
                            const ProfileConfig& cfg) {
  if (!std::is_sorted(omegas.begin(), omegas.end())) {
    throw Error(ErrorCode::ConfigError, "omega list must be sorted");
  }
  FamilyTable table;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    try {
      if (i == 0) {
        table.profiles.push_back(solve_profile(model, potential, omegas[i], m, grid, cfg));
      } else {
        table.profiles.push_back(
            continue_profile(model, potential, table.profiles.back(), omegas[i], cfg));
      }
    } catch (const Error& e) {
      std::ostringstream os;
      os << "family member omega=" << omegas[i] << ": " << e.what();
      throw Error(e.code(), os.str());
    }
    const RadialProfile& p = table.profiles.back();
    table.omega.push_back(p.omega);
    table.q.push_back(p.q);
    table.E.push_back(p.E);
    table.d.push_back(p.d);
  }
  table.q_prime = finite_difference(table.omega, table.q);
  table.E_prime = finite_difference(table.omega, table.E);
  table.d_prime = finite_difference(table.omega, table.d);
  for (std::size_t i = 1; i < table.q_prime.size(); ++i) {
    if ((table.q_prime[i] > 0.0) != (table.q_prime[0] > 0.0) || table.q_prime[i] == 0.0) {
      table.q_prime_sign_change = true;
    }
  }
  return table;
}

std::vector<RadialProfile> continue_in_epsilon(const NonlinearityModel& model,
                                               const RadialPotential& shape, double omega, int m,
                                               const std::vector<double>& eps_list,
                                               const RadialGrid& grid, const ProfileConfig& cfg) {
  if (eps_list.empty() || eps_list.front() != 0.0) {
    throw Error(ErrorCode::ConfigError, "epsilon list must start at 0");
  }
  std::vector<RadialProfile> out;
  out.push_back(solve_profile(model, shape.with_strength(0.0), omega, m, grid, cfg));
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    try {
      out.push_back(march(model, shape, out.back(), omega, eps_list[i], cfg));
    } catch (const Error& e) {
      std::ostringstream os;
      os << "epsilon=" << eps_list[i] << ": " << e.what();
      throw Error(ErrorCode::NoConvergence, os.str());
    }
  }
  return out;
}

}  // namespace vortex::profiles
