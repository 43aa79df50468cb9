#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vortex/fgr.hpp"
#include "vortex/profiles.hpp"
#include "vortex/spectra.hpp"

namespace vortex::harness {

using Json = nlohmann::ordered_json;

// Every accepted key with its default value; arrays of objects list one template element.
const Json& config_schema();

// Schema defaults overlaid with the given tree. Unknown keys and type mismatches raise
// ConfigError naming the offending path, e.g. "fgr.modes[1].lamda".
Json resolve_config(const Json& overrides);
void validate_config(const Json& cfg);
Json parse_config_text(const std::string& text);
Json load_config_file(const std::string& path);
// Two-space indented JSON with floats at 17 significant digits; non-finite values become null.
std::string dump_json(const Json& j);
// Canonical text: schema key order, dump_json formatting.
std::string serialize_config(const Json& cfg);
// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const Json& cfg);

// VORTEX_SPECTRA_WORKERS when set to a positive integer, else 1.
int default_workers();

profiles::NonlinearityModel model_from_config(const Json& cfg);
profiles::RadialPotential potential_from_config(const Json& cfg);
profiles::RadialGrid grid_from_config(const Json& cfg);
spectra::SpectrumConfig spectrum_from_config(const Json& cfg);
fgr::Coupling coupling_from_config(const Json& terms);
// t_final <= 0 picks the horizon with 4 pi c |z0|^4 T = 3.
fgr::Model1Config model1_from_config(const Json& cfg);
fgr::Model2Config model2_from_config(const Json& cfg);

struct TaskStatus {
  std::string name;
  std::string status;  // "ok" or an error name
  std::string message;
};

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string version;
  Json grid;
  double wall_seconds = 0.0;
  std::vector<TaskStatus> tasks;
};

std::string manifest_json(const RunManifest& manifest);
std::string toolkit_version();

struct SweepConfig {
  profiles::NonlinearityModel model = profiles::NonlinearityModel::cubic_quintic();
  profiles::RadialPotential potential = profiles::RadialPotential::none();
  int m = 1;
  std::vector<double> omegas;
  profiles::RadialGrid grid{720, 72.0};
  profiles::ProfileConfig profile;
  spectra::LedgerConfig ledger;
  // Contiguous continuation chains; fixed by the config so results do not depend on workers.
  int chains = 4;
  int workers = 1;
};

struct SweepResult {
  std::vector<double> omegas;
  std::vector<spectra::StabilityLedger> rows;
  std::vector<std::string> report_json;  // empty when the spectrum failed
  std::vector<TaskStatus> status;
};

SweepResult run_sweep(const SweepConfig& cfg);
SweepConfig sweep_from_config(const Json& cfg);
std::string ledger_csv(const SweepResult& result);

// Full command line entry point; returns the process exit code (0, 2 config error, 3 numerical failure).
int cli(int argc, const char* const* argv);

}  // namespace vortex::harness
