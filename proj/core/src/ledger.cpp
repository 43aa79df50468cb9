#include <algorithm>
#include <cmath>
#include <sstream>

#include "io_util.hpp"
#include "vortex/errors.hpp"
#include "vortex/spectra.hpp"

namespace vortex::spectra {

namespace {

std::string error_name(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(err->name());
  return "InternalError";
}

}  // namespace

StabilityLedger ledger_row(const profiles::RadialProfile& profile, double q_prime, bool h5_ok,
                           const profiles::RadialPotential& potential,
                           const profiles::NonlinearityModel& model, const LedgerConfig& cfg,
                           SpectrumReport* report_out) {
  StabilityLedger row;
  row.omega = profile.omega;
  row.q = profile.q;
  row.q_prime = q_prime;
  row.h5_ok = h5_ok;

  SpectrumReport report;
  try {
    report = full_spectrum(profile, potential, model, cfg.spectrum);
  } catch (const std::exception& e) {
    row.errors["spectrum"] = error_name(e);
    return row;
  }

  row.h6_ok = report.spectrally_stable;
  for (const auto& kd : report.kernel) {
    const int copies = kd.k == 0 ? 1 : 2;
    row.h7_geo += copies * kd.geo;
    row.h7_alg += copies * kd.alg;
  }
  row.h7_ok = row.h7_geo == 1 && row.h7_alg == 2;
  if (!potential.active()) row.h7_reason = "translation-invariant";
  row.h8_ok = report.jordan_clusters == 0;
  row.catalog = report.catalog;
  row.h14_ok = std::any_of(report.catalog.begin(), report.catalog.end(),
                           [](const CatalogEntry& e) { return e.s == 1; });

  if (!report.catalog.empty()) {
    row.min_lambda = report.catalog.front().lambda;
    row.max_lambda = report.catalog.back().lambda;
    std::vector<double> distinct;
    int N = 0;
    for (const auto& e : report.catalog) {
      if (distinct.empty() || e.lambda - distinct.back() > 1e-9) distinct.push_back(e.lambda);
      N = std::max(N, e.N);
    }
    row.h12_bound = std::min(2 * N + 3, cfg.h12_cap);
    row.h12 = check_h12(distinct, row.h12_bound, 1e-9, cfg.h12_budget);
  }

  // Energy direction from the largest negative-signature mode off the radial block.
  std::optional<std::size_t> trap;
  for (std::size_t j = 0; j < report.catalog.size(); ++j) {
    const auto& e = report.catalog[j];
    if (e.s == 1 && e.k >= 1) trap = j;
  }
  if (trap) {
    try {
      row.trapping = trapping_test(profile, potential, model, report, *trap, false, cfg.trap_eps);
    } catch (const std::exception& e) {
      row.errors["trapping"] = error_name(e);
    }
  }

  try {
    row.index = negative_index(profile, potential, model, q_prime, report, cfg.spectrum);
  } catch (const std::exception& e) {
    row.errors["index"] = error_name(e);
  }

  if (report_out) *report_out = std::move(report);
  return row;
}

std::vector<StabilityLedger> hypothesis_ledger(const profiles::FamilyTable& family,
                                               const profiles::RadialPotential& potential,
                                               const profiles::NonlinearityModel& model,
                                               const LedgerConfig& cfg) {
  std::vector<StabilityLedger> rows;
  for (std::size_t i = 0; i < family.profiles.size(); ++i) {
    const double qp = family.q_prime[i];
    const bool h5 = qp != 0.0 && !family.q_prime_sign_change;
    rows.push_back(ledger_row(family.profiles[i], qp, h5, potential, model, cfg));
  }
  return rows;
}

std::string ledger_csv_header() {
  return "omega,q,q_prime,h5,h6,h7_geo,h7_alg,h8,h14,n_neg,identity_residual,trap_form,"
         "trap_expected,min_lambda,max_lambda";
}

std::string ledger_csv_row(const StabilityLedger& row) {
  using detail::fmt17;
  auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
  auto marked = [&row](const char* field, const std::string& value) {
    auto it = row.errors.find(field);
    return it != row.errors.end() ? it->second : value;
  };
  std::ostringstream os;
  os << fmt17(row.omega) << ',' << fmt17(row.q) << ',' << fmt17(row.q_prime) << ','
     << flag(row.h5_ok) << ',';
  if (row.errors.count("spectrum")) {
    const std::string& e = row.errors.at("spectrum");
    for (int i = 0; i < 11; ++i) os << e << (i < 10 ? "," : "");
    return os.str();
  }
  os << flag(row.h6_ok) << ',' << row.h7_geo << ',' << row.h7_alg << ',' << flag(row.h8_ok) << ','
     << flag(row.h14_ok) << ',';
  std::string n_neg = "NA";
  std::string identity = "NA";
  if (row.index) {
    n_neg = std::to_string(row.index->n_neg);
    if (row.index->applicable) identity = std::to_string(row.index->identity_residual);
  }
  os << marked("index", n_neg) << ',' << marked("index", identity) << ',';
  std::string form = "NA";
  std::string expected = "NA";
  if (row.trapping) {
    form = fmt17(row.trapping->form_value);
    expected = fmt17(row.trapping->expected);
  }
  os << marked("trapping", form) << ',' << marked("trapping", expected) << ',';
  if (row.catalog.empty()) {
    os << "NA,NA";
  } else {
    os << fmt17(row.min_lambda) << ',' << fmt17(row.max_lambda);
  }
  return os.str();
}

}  // namespace vortex::spectra
