#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vortex/linop.hpp"
#include "vortex/profiles.hpp"

namespace vortex::spectra {

// LAPACK dgeev; eigenvectors are unit-norm columns when requested.
struct EigenSystem {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
};
EigenSystem eig_general(const Eigen::MatrixXd& A, bool want_vectors);
// All eigenvalues; eigenvectors (unit norm) only where select(mu) holds, by Hessenberg inverse
// iteration. Unselected columns are zero.
EigenSystem eig_general_selected(const Eigen::MatrixXd& A,
                                 const std::function<bool(std::complex<double>)>& select,
                                 std::vector<bool>* have_vector);
// LAPACK dsyevd, ascending eigenvalues.
Eigen::VectorXd eig_symmetric(const Eigen::MatrixXd& A);

struct FilterConfig {
  double residual_tol = 1e-8;
  double localization_threshold = 0.05;
  double localization_radius = 0.8;  // fraction of r_max
  double kernel_tol = 1e-3;          // |mu| below this is treated as the generalized kernel
  double signature_tol = 1e-10;
  double cluster_tol = 1e-7;
  double instability_tol = 1e-5;
  // Eigenvectors are computed for |Re mu| <= vector_window * omega and for all off-axis mu.
  // Values <= 0 compute every eigenvector.
  double vector_window = 3.0;
};

struct EigenPair {
  std::complex<double> mu;
  int k = 0;
  Eigen::VectorXcd vec;  // (a, conj b) in symmetrised variables
  double residual = 0.0;
  double localization = 0.0;
  std::optional<int> s;  // +1 negative energy, -1 positive energy
  double krein_form = 0.0;  // <S vec, vec> after normalisation
  bool embedded_candidate = false;
  bool kernel = false;
};

std::vector<EigenPair> point_spectrum(const linop::HarmonicBlockOperator& block,
                                      const FilterConfig& cfg = {});

// Sign datum of a real eigenvalue; normalises pair.vec so that |a|^2 - |b|^2 = -s.
int krein_signature(const linop::HarmonicBlockOperator& block, EigenPair& pair,
                    const FilterConfig& cfg = {});

struct KernelDims {
  int k = 0;
  int geo = 0;
  int alg = 0;
};

// Geometric and algebraic multiplicity of the eigenvalue cluster near 0 of one block.
KernelDims kernel_dimensions(const linop::HarmonicBlockOperator& block, const FilterConfig& cfg = {});

struct CatalogEntry {
  double lambda = 0.0;
  int s = 0;  // 0 when undefined
  int k = 0;
  std::size_t pair_index = 0;  // into SpectrumReport::pairs
  bool mirrored = false;       // taken from mu < 0 in K_k, i.e. mu > 0 in K_{-k}
  int N = 0;
};

struct SpectrumCounts {
  int n_unstable = 0;
  int n_discrete_stable = 0;
  int n_negative_signature = 0;
};

struct SpectrumReport {
  double omega = 0.0;
  int m = 0;
  double epsilon = 0.0;
  int k_max = 0;
  std::vector<EigenPair> pairs;
  std::vector<KernelDims> kernel;
  std::vector<CatalogEntry> catalog;
  SpectrumCounts counts;
  bool spectrally_stable = true;
  std::vector<std::size_t> embedded;
  // Nonzero eigenvalue clusters whose eigenvectors are rank deficient (Jordan blocks).
  int jordan_clusters = 0;
};

struct SpectrumConfig {
  int k_max = 8;
  FilterConfig filter;
  int workers = 1;
  bool kernel_analysis = true;
};

SpectrumReport full_spectrum(const profiles::RadialProfile& profile,
                             const profiles::RadialPotential& potential,
                             const profiles::NonlinearityModel& model,
                             const SpectrumConfig& cfg = {});

// Same aggregation over a chosen subset of harmonics.
SpectrumReport harmonic_spectrum(const profiles::RadialProfile& profile,
                                 const profiles::RadialPotential& potential,
                                 const profiles::NonlinearityModel& model,
                                 const std::vector<int>& harmonics, const SpectrumConfig& cfg);

int resonance_order(double lambda, double omega);

std::string report_json(const SpectrumReport& report);

struct OmegaCrConfig {
  profiles::RadialGrid grid{500, 50.0};
  profiles::ProfileConfig profile;
  SpectrumConfig spectrum;
  int prescan_points = 5;
  // Restricts probes to these harmonics; empty means 0..k_max.
  std::vector<int> harmonics;
};

struct OmegaCrResult {
  double omega_cr = 0.0;
  double lambda_cr = 0.0;
  int signatures[2] = {0, 0};
  double stable_end = 0.0;
  double unstable_end = 0.0;
  int harmonic = 0;
  int probes = 0;
  std::vector<int> active_harmonics;
  std::vector<std::pair<double, bool>> trace;  // (omega, unstable)
};

OmegaCrResult detect_omega_cr(const profiles::NonlinearityModel& model,
                              const profiles::RadialPotential& potential, int m, double lo,
                              double hi, double tol_omega, const OmegaCrConfig& cfg = {});

struct TrappingResult {
  double form_value = 0.0;
  double expected = 0.0;  // -2 s lambda
  double lambda = 0.0;
  int s = 0;
  std::vector<double> eps;
  std::vector<double> alpha;
  std::vector<double> delta_energy;
  double alpha_exponent = 0.0;
  double mass_error = 0.0;
  // Delta E / eps^2 divided by form_value / 2 at the middle epsilon.
  double energy_ratio = 0.0;
  bool not_trapped = false;
};

// Evaluates the energy direction of catalog entry j. Requires s_j = +1 unless allow_positive.
TrappingResult trapping_test(const profiles::RadialProfile& profile,
                             const profiles::RadialPotential& potential,
                             const profiles::NonlinearityModel& model, const SpectrumReport& report,
                             std::size_t j, bool allow_positive = false,
                             const std::vector<double>& eps = {1e-2, 1e-3, 1e-4});

struct IndexResult {
  int n_neg = 0;
  int p_qprime = 0;
  int n_negative_signature_pairs = 0;
  int identity_residual = 0;
  bool applicable = false;  // spectrally stable, so the reduced identity holds
  std::vector<int> per_harmonic;
};

IndexResult negative_index(const profiles::RadialProfile& profile,
                           const profiles::RadialPotential& potential,
                           const profiles::NonlinearityModel& model, double q_prime,
                           const SpectrumReport& report, const SpectrumConfig& cfg = {});

struct H12Result {
  std::vector<std::vector<int>> violations;
  bool truncated = false;
  long long visited = 0;
};

H12Result check_h12(const std::vector<double>& lambdas, int bound, double resonance_tol = 1e-9,
                    long long node_budget = 20'000'000);

struct StabilityLedger {
  double omega = 0.0;
  double q = 0.0;
  double q_prime = 0.0;
  bool h5_ok = false;
  bool h6_ok = false;
  int h7_geo = 0;
  int h7_alg = 0;
  bool h7_ok = false;
  std::string h7_reason;
  bool h8_ok = false;
  std::vector<CatalogEntry> catalog;
  H12Result h12;
  int h12_bound = 0;
  bool h14_ok = false;
  std::optional<TrappingResult> trapping;
  std::optional<IndexResult> index;
  double min_lambda = 0.0;
  double max_lambda = 0.0;
  // Field name -> error name for anything that could not be evaluated.
  std::map<std::string, std::string> errors;
};

struct LedgerConfig {
  SpectrumConfig spectrum;
  int h12_cap = 12;
  long long h12_budget = 2'000'000;
  std::vector<double> trap_eps = {1e-2, 1e-3, 1e-4};
};

// Per-omega ledger row from a single profile; q_prime and h5 come from the family.
StabilityLedger ledger_row(const profiles::RadialProfile& profile, double q_prime, bool h5_ok,
                           const profiles::RadialPotential& potential,
                           const profiles::NonlinearityModel& model, const LedgerConfig& cfg,
                           SpectrumReport* report_out = nullptr);

std::vector<StabilityLedger> hypothesis_ledger(const profiles::FamilyTable& family,
                                               const profiles::RadialPotential& potential,
                                               const profiles::NonlinearityModel& model,
                                               const LedgerConfig& cfg = {});

std::string ledger_csv_header();
std::string ledger_csv_row(const StabilityLedger& row);

}  // namespace vortex::spectra
