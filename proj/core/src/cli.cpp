#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "io_util.hpp"
#include "vortex/errors.hpp"
#include "vortex/harness.hpp"

#ifndef VORTEX_VERSION
#define VORTEX_VERSION "0.0.0"
#endif

namespace vortex::harness {

std::string toolkit_version() { return VORTEX_VERSION; }

std::string manifest_json(const RunManifest& manifest) {
  Json j;
  j["command"] = manifest.command;
  j["config_hash"] = manifest.config_hash;
  j["version"] = manifest.version;
  j["grid"] = manifest.grid;
  j["wall_seconds"] = manifest.wall_seconds;
  j["tasks"] = Json::array();
  for (const auto& t : manifest.tasks) {
    j["tasks"].push_back({{"name", t.name}, {"status", t.status}, {"message", t.message}});
  }
  return dump_json(j);
}

namespace {

namespace fs = std::filesystem;

void set_path(Json& tree, const std::string& path, Json value) {
  Json* node = &tree;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw Error(ErrorCode::ConfigError, "empty key in override path " + path);
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = Json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

Json parse_assignment(const std::string& text, std::string& path) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::ConfigError, "override '" + text + "' is not key=value");
  path = text.substr(0, eq);
  const std::string raw = text.substr(eq + 1);
  try {
    return Json::parse(raw);
  } catch (const Json::parse_error&) {
    return Json(raw);
  }
}

Json preset(const std::string& name) {
  Json p = Json::object();
  if (name.empty() || name == "gaussian" || name == "two_mode") return p;
  if (name == "single_cubic") {
    Json term = {{"amplitude", {0.5, 0.0}}, {"width", 1.0}, {"center", {0.0, 0.0}}, {"gamma", 0.0}, {"carrier", {0.0, 0.0}}};
    p["fgr"]["model2"] = {{"box", 260.0},
                          {"n_grid", 432},
                          {"t_final", 30.0},
                          {"omega", 1.0},
                          {"modes", Json::array({Json{{"lambda", 0.45}, {"s", -1}}})},
                          {"couplings", Json::array({Json{{"alpha", {3}}, {"a", Json::array()}, {"b", Json::array({term})}}})},
                          {"z0", Json::array({Json::array({0.3, 0.0})})}};
    return p;
  }
  throw Error(ErrorCode::ConfigError, "unknown preset '" + name + "' at --preset");
}

struct Context {
  std::string command;
  std::string config_file;
  std::vector<std::string> sets;
  std::string preset;
  Json flags = Json::object();
  std::string report_dir;
  Json cfg;
  fs::path out;
  RunManifest manifest;
};

Json radial_grid_json(const Json& cfg) { return cfg.at("grid"); }

Json box_grid_json(const Json& section) { return {{"box", section.at("box")}, {"n_grid", section.at("n_grid")}}; }

void write_text(const fs::path& path, const std::string& text) {
  auto out = detail::open_output(path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void cmd_profile(Context& ctx) {
  const Json& p = ctx.cfg.at("profile");
  profiles::ProfileConfig pc;
  pc.tol = p.at("tol").get<double>();
  pc.max_iterations = p.at("max_iterations").get<int>();
  const auto prof = profiles::solve_profile(model_from_config(ctx.cfg), potential_from_config(ctx.cfg),
                                            p.at("omega").get<double>(), p.at("m").get<int>(),
                                            grid_from_config(ctx.cfg), pc);
  profiles::write_profile_csv(prof, (ctx.out / "profile.csv").string());
  profiles::write_profile_sidecar(prof, (ctx.out / "profile.json").string());
  ctx.manifest.grid = radial_grid_json(ctx.cfg);
  ctx.manifest.tasks.push_back({"profile", "ok", ""});
}

void cmd_spectrum(Context& ctx) {
  const Json& p = ctx.cfg.at("profile");
  profiles::ProfileConfig pc;
  pc.tol = p.at("tol").get<double>();
  pc.max_iterations = p.at("max_iterations").get<int>();
  const auto model = model_from_config(ctx.cfg);
  const auto pot = potential_from_config(ctx.cfg);
  const auto prof = profiles::solve_profile(model, pot, p.at("omega").get<double>(), p.at("m").get<int>(),
                                            grid_from_config(ctx.cfg), pc);
  const auto report = spectra::full_spectrum(prof, pot, model, spectrum_from_config(ctx.cfg));
  write_text(ctx.out / "spectrum.json", spectra::report_json(report));
  ctx.manifest.grid = radial_grid_json(ctx.cfg);
  ctx.manifest.tasks.push_back({"spectrum", "ok", ""});
}

void cmd_sweep(Context& ctx) {
  const auto sc = sweep_from_config(ctx.cfg);
  const auto result = run_sweep(sc);
  write_text(ctx.out / "ledger.csv", ledger_csv(result));
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (result.report_json[i].empty()) continue;
    char name[32];
    std::snprintf(name, sizeof name, "spectrum_%03zu.json", i);
    write_text(ctx.out / name, result.report_json[i]);
  }
  ctx.manifest.grid = {{"n", ctx.cfg.at("sweep").at("n")}, {"r_max", ctx.cfg.at("sweep").at("r_max")}};
  ctx.manifest.tasks = result.status;
}

void cmd_omega_cr(Context& ctx) {
  const Json& o = ctx.cfg.at("omega_cr");
  spectra::OmegaCrConfig oc;
  oc.grid = grid_from_config(ctx.cfg);
  oc.profile.tol = ctx.cfg.at("profile").at("tol").get<double>();
  oc.profile.max_iterations = ctx.cfg.at("profile").at("max_iterations").get<int>();
  oc.spectrum = spectrum_from_config(ctx.cfg);
  oc.prescan_points = o.at("prescan_points").get<int>();
  oc.harmonics = o.at("harmonics").get<std::vector<int>>();
  const auto bracket = o.at("bracket").get<std::vector<double>>();
  if (bracket.size() != 2) throw Error(ErrorCode::ConfigError, "bracket needs two values at omega_cr.bracket");
  const auto r = spectra::detect_omega_cr(model_from_config(ctx.cfg), potential_from_config(ctx.cfg),
                                          ctx.cfg.at("profile").at("m").get<int>(), bracket[0], bracket[1],
                                          o.at("tol").get<double>(), oc);
  Json j;
  j["omega_cr"] = r.omega_cr;
  j["lambda_cr"] = r.lambda_cr;
  j["signatures"] = {r.signatures[0], r.signatures[1]};
  j["harmonic"] = r.harmonic;
  j["stable_end"] = r.stable_end;
  j["unstable_end"] = r.unstable_end;
  j["probes"] = r.probes;
  j["active_harmonics"] = r.active_harmonics;
  j["trace"] = Json::array();
  for (const auto& [w, unstable] : r.trace) j["trace"].push_back({{"omega", w}, {"unstable", unstable}});
  write_text(ctx.out / "omega_cr.json", dump_json(j));
  ctx.manifest.grid = radial_grid_json(ctx.cfg);
  ctx.manifest.tasks.push_back({"omega_cr", "ok", ""});
}

Json series_summary(const fgr::TimeSeries& ts) {
  Json j;
  j["t_final"] = ts.t.empty() ? 0.0 : ts.t.back();
  j["hamiltonian_drift"] = ts.hamiltonian_drift;
  const double e0 = ts.signed_energy.front() + ts.leak_integral.front();
  double drift = 0.0;
  for (std::size_t i = 0; i < ts.t.size(); ++i) {
    drift = std::max(drift, std::abs(ts.signed_energy[i] + ts.leak_integral[i] - e0));
  }
  j["ledger_drift"] = e0 != 0.0 ? drift / std::abs(e0) : drift;
  j["final_abs2"] = Json::array();
  for (const auto& z : ts.z_abs2) j["final_abs2"].push_back(z.back());
  return j;
}

void cmd_fgr_model1(Context& ctx) {
  const auto mc = model1_from_config(ctx.cfg);
  const auto ts = fgr::simulate_model1(mc);
  fgr::write_time_series_csv(ts, (ctx.out / "timeseries.csv").string());
  Json j = series_summary(ts);
  j["c"] = ts.c;
  write_text(ctx.out / "fgr_model1.json", dump_json(j));
  ctx.manifest.grid = box_grid_json(ctx.cfg.at("fgr").at("model1"));
  ctx.manifest.tasks.push_back({"fgr-model1", "ok", ""});
}

void cmd_fgr_model2(Context& ctx) {
  const auto mc = model2_from_config(ctx.cfg);
  const auto ts = fgr::simulate_model2(mc);
  fgr::write_time_series_csv(ts, (ctx.out / "timeseries.csv").string());
  write_text(ctx.out / "fgr_model2.json", dump_json(series_summary(ts)));
  ctx.manifest.grid = box_grid_json(ctx.cfg.at("fgr").at("model2"));
  ctx.manifest.tasks.push_back({"fgr-model2", "ok", ""});
}

void cmd_gamma(Context& ctx) {
  const auto mc = model2_from_config(ctx.cfg);
  const Json& f = ctx.cfg.at("fgr").at("model2");
  const auto zeta = fgr::sphere_samples(static_cast<int>(mc.modes.size()), f.at("zeta_samples").get<int>(),
                                        f.at("seed").get<unsigned>());
  const auto g = fgr::gamma_model2(mc, zeta);
  std::ostringstream csv;
  csv << "sample";
  for (std::size_t k = 0; k < mc.modes.size(); ++k) csv << ",zeta" << k << "_re,zeta" << k << "_im";
  csv << ",gamma\n";
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    csv << i;
    for (const auto& z : zeta[i]) csv << ',' << detail::fmt17(z.real()) << ',' << detail::fmt17(z.imag());
    csv << ',' << detail::fmt17(g.gamma[i]) << '\n';
  }
  write_text(ctx.out / "gamma.csv", csv.str());
  Json j;
  j["h13_margin"] = g.h13_margin;
  j["max_gamma"] = g.gamma.empty() ? 0.0 : *std::max_element(g.gamma.begin(), g.gamma.end());
  j["levels"] = g.levels;
  j["resonant_set"] = fgr::resonant_set(mc.modes, mc.omega);
  write_text(ctx.out / "gamma.json", dump_json(j));
  ctx.manifest.grid = box_grid_json(f);
  ctx.manifest.tasks.push_back({"gamma", "ok", ""});
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

void cmd_report(Context& ctx) {
  const fs::path dir = ctx.report_dir.empty() ? ctx.out : fs::path(ctx.report_dir);
  auto in = detail::open_input((dir / "ledger.csv").string());
  std::string line;
  std::getline(in, line);
  const auto header = split_csv(line);
  auto col = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::IoError, std::string("ledger.csv lacks column ") + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_omega = col("omega"), c_h6 = col("h6"), c_h14 = col("h14"), c_id = col("identity_residual");
  Json rows = Json::array();
  std::vector<double> flips;
  int failed = 0;
  int identity_checked = 0;
  int identity_violations = 0;
  std::string prev_h6;
  double prev_omega = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw Error(ErrorCode::IoError, "ragged row in ledger.csv");
    const double omega = std::stod(cells[c_omega]);
    const std::string& h6 = cells[c_h6];
    const bool ok = h6 == "0" || h6 == "1";
    if (!ok) ++failed;
    if (ok && (prev_h6 == "0" || prev_h6 == "1") && h6 != prev_h6) flips.push_back(0.5 * (omega + prev_omega));
    if (h6 == "1" && cells[c_id] != "NA") {
      ++identity_checked;
      if (cells[c_id] != "0") ++identity_violations;
    }
    rows.push_back({{"omega", omega}, {"h6", h6}, {"h14", cells[c_h14]}, {"identity_residual", cells[c_id]}});
    prev_h6 = h6;
    prev_omega = omega;
  }
  Json j;
  j["source"] = (dir / "ledger.csv").string();
  j["rows"] = rows.size();
  j["failed_rows"] = failed;
  j["h6_flips"] = flips;
  j["identity_rows_checked"] = identity_checked;
  j["identity_violations"] = identity_violations;
  j["ledger"] = rows;
  write_text(ctx.out / "summary.json", dump_json(j));
  ctx.manifest.grid = Json::object();
  ctx.manifest.tasks.push_back({"report", "ok", ""});
}

void run(Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  Json tree = preset(ctx.preset);
  if (!ctx.config_file.empty()) tree.merge_patch(load_config_file(ctx.config_file));
  for (const auto& s : ctx.sets) {
    std::string path;
    Json value = parse_assignment(s, path);
    Json patch = Json::object();
    set_path(patch, path, std::move(value));
    tree.merge_patch(patch);
  }
  tree.merge_patch(ctx.flags);
  ctx.cfg = resolve_config(tree);

  ctx.out = ctx.cfg.at("output").at("dir").get<std::string>();
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + ctx.out.string());
  write_text(ctx.out / (ctx.command + ".config.json"), serialize_config(ctx.cfg));

  ctx.manifest.command = ctx.command;
  ctx.manifest.config_hash = config_hash(ctx.cfg);
  ctx.manifest.version = toolkit_version();

  if (ctx.command == "profile") cmd_profile(ctx);
  else if (ctx.command == "spectrum") cmd_spectrum(ctx);
  else if (ctx.command == "sweep") cmd_sweep(ctx);
  else if (ctx.command == "omega-cr") cmd_omega_cr(ctx);
  else if (ctx.command == "fgr-model1") cmd_fgr_model1(ctx);
  else if (ctx.command == "fgr-model2") cmd_fgr_model2(ctx);
  else if (ctx.command == "gamma") cmd_gamma(ctx);
  else if (ctx.command == "report") cmd_report(ctx);

  ctx.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(ctx.out / (ctx.command + ".manifest.json"), manifest_json(ctx.manifest));
}

template <class T>
void flag(CLI::App* app, Context& ctx, const std::string& name, const std::string& path, const std::string& help) {
  app->add_option_function<T>(name, [&ctx, path](const T& v) { set_path(ctx.flags, path, Json(v)); }, help);
}

}  // namespace

int cli(int argc, const char* const* argv) {
  Context ctx;
  CLI::App app{"Vortex stability toolkit"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", toolkit_version());

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", ctx.config_file, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--set", ctx.sets, "Override a config key, e.g. --set grid.n=800");
    flag<std::string>(sub, ctx, "--out", "output.dir", "Output directory");
    flag<int>(sub, ctx, "--workers", "workers", "Worker threads (default VORTEX_SPECTRA_WORKERS or 1)");
  };
  auto radial = [&](CLI::App* sub) {
    flag<double>(sub, ctx, "--omega", "profile.omega", "Frequency");
    flag<int>(sub, ctx, "--m", "profile.m", "Vortex degree");
    flag<int>(sub, ctx, "--n", "grid.n", "Radial grid points");
    flag<double>(sub, ctx, "--r-max", "grid.r_max", "Radial box size");
    flag<double>(sub, ctx, "--epsilon", "potential.epsilon", "Potential strength");
  };

  auto* profile = app.add_subcommand("profile", "Solve one standing-wave profile");
  auto* spectrum = app.add_subcommand("spectrum", "Full point spectrum of one profile");
  auto* sweep = app.add_subcommand("sweep", "Hypothesis ledger over a frequency range");
  auto* omega_cr = app.add_subcommand("omega-cr", "Locate the critical frequency by bisection");
  auto* model1 = app.add_subcommand("fgr-model1", "Single-mode radiation damping simulation");
  auto* model2 = app.add_subcommand("fgr-model2", "Multimode radiation damping simulation");
  auto* gamma = app.add_subcommand("gamma", "Sample the leak functional on the unit sphere");
  auto* report = app.add_subcommand("report", "Summarise a sweep output directory");

  for (auto* sub : {profile, spectrum, sweep, omega_cr, model1, model2, gamma, report}) common(sub);
  radial(profile);
  radial(spectrum);
  flag<int>(spectrum, ctx, "--k-max", "spectrum.k_max", "Largest harmonic");
  flag<int>(sweep, ctx, "--m", "profile.m", "Vortex degree");
  flag<double>(sweep, ctx, "--omega-min", "sweep.omega_min", "First frequency");
  flag<double>(sweep, ctx, "--omega-max", "sweep.omega_max", "Last frequency");
  flag<double>(sweep, ctx, "--omega-step", "sweep.omega_step", "Frequency step");
  flag<int>(sweep, ctx, "--chains", "sweep.chains", "Continuation chains");
  flag<int>(sweep, ctx, "--n", "sweep.n", "Radial grid points");
  flag<double>(sweep, ctx, "--r-max", "sweep.r_max", "Radial box size");
  flag<double>(sweep, ctx, "--epsilon", "potential.epsilon", "Potential strength");
  for (auto* sub : {sweep, omega_cr}) flag<int>(sub, ctx, "--k-max", "spectrum.k_max", "Largest harmonic");
  radial(omega_cr);
  omega_cr->add_option_function<std::vector<double>>(
              "--bracket", [&ctx](const std::vector<double>& v) { set_path(ctx.flags, "omega_cr.bracket", Json(v)); },
              "Frequency bracket")
      ->expected(2);
  flag<double>(omega_cr, ctx, "--tol", "omega_cr.tol", "Bracket width");

  model1->add_option("--preset", ctx.preset, "Coupling preset")->check(CLI::IsMember({"gaussian"}));
  model1->add_option_function<double>(
      "--z0", [&ctx](double v) { set_path(ctx.flags, "fgr.model1.z0", Json::array({v, 0.0})); }, "Initial amplitude");
  flag<double>(model1, ctx, "--t-final", "fgr.model1.t_final", "Horizon (0 picks 4 pi c |z0|^4 T = 3)");
  flag<double>(model1, ctx, "--dt", "fgr.model1.dt", "Time step");
  flag<double>(model1, ctx, "--box", "fgr.model1.box", "Periodic box side");
  flag<int>(model1, ctx, "--n-grid", "fgr.model1.n_grid", "Grid points per side");
  for (auto* sub : {model2, gamma}) {
    sub->add_option("--preset", ctx.preset, "Mode preset")->check(CLI::IsMember({"two_mode", "single_cubic"}));
  }
  flag<double>(model2, ctx, "--t-final", "fgr.model2.t_final", "Horizon");
  flag<double>(model2, ctx, "--dt", "fgr.model2.dt", "Time step");
  flag<double>(model2, ctx, "--box", "fgr.model2.box", "Periodic box side");
  flag<int>(model2, ctx, "--n-grid", "fgr.model2.n_grid", "Grid points per side");
  flag<int>(gamma, ctx, "--samples", "fgr.model2.zeta_samples", "Sphere samples");
  flag<int>(gamma, ctx, "--seed", "fgr.model2.seed", "Sampling seed");
  report->add_option("--dir", ctx.report_dir, "Sweep output directory (default output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  ctx.command = app.get_subcommands().front()->get_name();

  try {
    run(ctx);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace vortex::harness
