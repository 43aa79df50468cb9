#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "io_util.hpp"
#include "vortex/errors.hpp"
#include "vortex/harness.hpp"

namespace vortex::harness {

namespace {

std::string error_name(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(err->name());
  return "InternalError";
}

// Runs job(i) for i in [0, count) on up to `workers` threads.
template <class Job>
void parallel_for(int count, int workers, Job job) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  const int n = static_cast<int>(cfg.omegas.size());
  if (n == 0) throw Error(ErrorCode::ConfigError, "sweep needs at least one omega");
  const int chains = std::max(1, std::min(cfg.chains, n));

  std::vector<std::optional<profiles::RadialProfile>> family(n);
  std::vector<std::string> profile_error(n);
  parallel_for(chains, cfg.workers, [&](int c) {
    const int begin = c * n / chains;
    const int end = (c + 1) * n / chains;
    const profiles::RadialProfile* prev = nullptr;
    for (int i = begin; i < end; ++i) {
      try {
        family[i] = prev ? profiles::continue_profile(cfg.model, cfg.potential, *prev, cfg.omegas[i], cfg.profile)
                         : profiles::solve_profile(cfg.model, cfg.potential, cfg.omegas[i], cfg.m, cfg.grid,
                                                   cfg.profile);
        prev = &*family[i];
      } catch (const std::exception& e) {
        profile_error[i] = error_name(e);
        prev = nullptr;
      }
    }
  });

  std::vector<double> x;
  std::vector<double> q;
  for (int i = 0; i < n; ++i) {
    if (!family[i]) continue;
    x.push_back(cfg.omegas[i]);
    q.push_back(family[i]->q);
  }
  std::vector<double> qp(n, 0.0);
  bool sign_change = false;
  if (x.size() >= 3) {
    const auto d = profiles::finite_difference(x, q);
    for (std::size_t j = 0, i = 0; i < static_cast<std::size_t>(n); ++i) {
      if (family[i]) qp[i] = d[j++];
    }
    for (std::size_t j = 1; j < d.size(); ++j) sign_change |= (d[j] > 0) != (d[0] > 0);
  }

  SweepResult out;
  out.omegas = cfg.omegas;
  out.rows.resize(n);
  out.report_json.resize(n);
  out.status.resize(n);
  spectra::LedgerConfig lc = cfg.ledger;
  lc.spectrum.workers = 1;
  parallel_for(n, cfg.workers, [&](int i) {
    auto& st = out.status[i];
    st.name = "omega=" + detail::fmt17(cfg.omegas[i]);
    if (!family[i]) {
      st.status = profile_error[i];
      st.message = "profile not available";
      out.rows[i].omega = cfg.omegas[i];
      out.rows[i].errors["profile"] = profile_error[i];
      return;
    }
    spectra::SpectrumReport report;
    const bool h5 = qp[i] != 0.0 && !sign_change;
    out.rows[i] = spectra::ledger_row(*family[i], qp[i], h5, cfg.potential, cfg.model, lc, &report);
    const auto& errs = out.rows[i].errors;
    if (!errs.count("spectrum")) out.report_json[i] = spectra::report_json(report);
    st.status = errs.empty() ? "ok" : errs.begin()->second;
    for (const auto& [field, name] : errs) st.message += (st.message.empty() ? "" : "; ") + field + ": " + name;
  });
  return out;
}

SweepConfig sweep_from_config(const Json& cfg) {
  const Json& s = cfg.at("sweep");
  SweepConfig out;
  out.model = model_from_config(cfg);
  out.potential = potential_from_config(cfg);
  out.m = cfg.at("profile").at("m").get<int>();
  const double lo = s.at("omega_min").get<double>();
  const double hi = s.at("omega_max").get<double>();
  const double step = s.at("omega_step").get<double>();
  if (!(step > 0.0) || hi < lo) throw Error(ErrorCode::ConfigError, "sweep range is empty at sweep");
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) out.omegas.push_back(lo + i * step);
  const int n = s.at("n").get<int>();
  const double r_max = s.at("r_max").get<double>();
  if (n < 16 || !(r_max > 0.0)) throw Error(ErrorCode::ConfigError, "sweep grid needs n >= 16 and r_max > 0 at sweep");
  out.grid = profiles::RadialGrid(static_cast<std::size_t>(n), r_max);
  out.profile.tol = cfg.at("profile").at("tol").get<double>();
  out.profile.max_iterations = cfg.at("profile").at("max_iterations").get<int>();
  out.ledger.spectrum = spectrum_from_config(cfg);
  out.ledger.h12_cap = cfg.at("ledger").at("h12_cap").get<int>();
  out.ledger.h12_budget = cfg.at("ledger").at("h12_budget").get<long long>();
  out.chains = s.at("chains").get<int>();
  if (out.chains < 1) throw Error(ErrorCode::ConfigError, "chains must be positive at sweep.chains");
  out.workers = out.ledger.spectrum.workers;
  return out;
}

std::string ledger_csv(const SweepResult& result) {
  std::ostringstream os;
  os << spectra::ledger_csv_header() << '\n';
  for (const auto& row : result.rows) {
    auto it = row.errors.find("profile");
    if (it != row.errors.end()) {
      os << detail::fmt17(row.omega);
      for (int i = 0; i < 14; ++i) os << ',' << it->second;
      os << '\n';
    } else {
      os << spectra::ledger_csv_row(row) << '\n';
    }
  }
  return os.str();
}

}  // namespace vortex::harness
