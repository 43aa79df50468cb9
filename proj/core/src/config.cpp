#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vortex/errors.hpp"
#include "vortex/harness.hpp"

namespace vortex::harness {

namespace {

Json gaussian_term(double amplitude, double width, double cx = 0.0, double cy = 0.0) {
  return Json{{"amplitude", {amplitude, 0.0}}, {"width", width}, {"center", {cx, cy}},
              {"gamma", 0.0}, {"carrier", {0.0, 0.0}}};
}

Json build_schema() {
  Json s;
  s["model"] = {{"kind", "cubic_quintic"}, {"coefficients", Json::array()}};
  s["potential"] = {{"kind", "none"}, {"epsilon", 0.0}};
  s["grid"] = {{"n", 500}, {"r_max", 50.0}};
  s["profile"] = {{"omega", 0.15}, {"m", 1}, {"tol", 1e-8}, {"max_iterations", 60}};
  s["spectrum"] = {{"k_max", 8},           {"residual_tol", 1e-8},   {"localization_threshold", 0.05},
                   {"kernel_tol", 1e-3},   {"instability_tol", 1e-5}, {"vector_window", 3.0}};
  s["ledger"] = {{"h12_cap", 12}, {"h12_budget", 2000000}};
  s["sweep"] = {{"omega_min", 0.13}, {"omega_max", 0.18}, {"omega_step", 0.005},
                {"chains", 4},       {"n", 720},          {"r_max", 72.0}};
  s["omega_cr"] = {{"bracket", {0.13, 0.17}}, {"tol", 1e-3}, {"prescan_points", 5}, {"harmonics", Json::array()}};
  s["fgr"]["model1"] = {{"box", 240.0},
                        {"n_grid", 256},
                        {"dt", 0.05},
                        {"t_final", 0.0},
                        {"z0", {0.3, 0.0}},
                        {"coupling", Json::array({gaussian_term(1.0, 1.0)})},
                        {"sample_every", 10}};
  const double A = 0.23;
  s["fgr"]["model2"] = {
      {"box", 460.0},
      {"n_grid", 768},
      {"dt", 0.1},
      {"t_final", 50.0},
      {"omega", 1.0},
      {"modes", Json::array({Json{{"lambda", 0.8}, {"s", 1}}, Json{{"lambda", 0.95}, {"s", -1}}})},
      {"couplings",
       Json::array({Json{{"alpha", {2, 0}},
                         {"a", Json::array({gaussian_term(0.3 * A, 0.8, 0.2, 0.0)})},
                         {"b", Json::array({gaussian_term(0.8 * A, 0.8, 0.0, 0.3)})}},
                    Json{{"alpha", {1, 1}},
                         {"a", Json::array({gaussian_term(0.3 * A, 0.8)})},
                         {"b", Json::array({gaussian_term(0.7 * A, 0.75, -0.3, 0.2)})}},
                    Json{{"alpha", {0, 2}},
                         {"a", Json::array({gaussian_term(0.3 * A, 0.8, 0.0, -0.2)})},
                         {"b", Json::array({gaussian_term(A, 0.8, 0.2, 0.0)})}}})},
      {"z0", Json::array({Json::array({0.01, 0.0}), Json::array({0.0, 0.11})})},
      {"zeta_samples", 64},
      {"seed", 7},
      {"circle_points", 256},
      {"sample_every", 10}};
  s["output"] = {{"dir", "vortex_out"}};
  s["workers"] = 0;
  return s;
}

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, what + " at " + (path.empty() ? std::string("<root>") : path));
}

bool same_kind(const Json& schema, const Json& value) {
  if (schema.is_number()) return value.is_number();
  if (schema.is_string()) return value.is_string();
  if (schema.is_boolean()) return value.is_boolean();
  if (schema.is_array()) return value.is_array();
  if (schema.is_object()) return value.is_object();
  return false;
}

void check(const Json& schema, const Json& value, const std::string& path);

void check_array(const Json& schema, const Json& value, const std::string& path) {
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (schema.empty()) {
      if (!value[i].is_number()) fail(p, "expected a number");
    } else {
      check(schema[0], value[i], p);
    }
  }
}

void check(const Json& schema, const Json& value, const std::string& path) {
  if (!same_kind(schema, value)) fail(path, "type mismatch, expected " + std::string(schema.type_name()));
  if (schema.is_number_integer() && !value.is_number_integer()) fail(path, "expected an integer");
  if (schema.is_object()) {
    for (auto it = value.begin(); it != value.end(); ++it) {
      if (!schema.contains(it.key())) fail(child(path, it.key()), "unknown key");
      check(schema[it.key()], it.value(), child(path, it.key()));
    }
  } else if (schema.is_array()) {
    check_array(schema, value, path);
  }
}

// Schema order, defaults for missing object keys; array elements are completed from the template.
Json overlay(const Json& schema, const Json& value) {
  if (schema.is_object()) {
    Json out = Json::object();
    for (auto it = schema.begin(); it != schema.end(); ++it) {
      out[it.key()] = value.contains(it.key()) ? overlay(it.value(), value[it.key()]) : it.value();
    }
    return out;
  }
  if (schema.is_array() && !schema.empty() && schema[0].is_object()) {
    Json out = Json::array();
    for (const auto& el : value) out.push_back(overlay(schema[0], el));
    return out;
  }
  return value;
}

fgr::cd complex_of(const Json& pair) { return {pair.at(0).get<double>(), pair.at(1).get<double>()}; }

}  // namespace

const Json& config_schema() {
  static const Json schema = build_schema();
  return schema;
}

void validate_config(const Json& cfg) { check(config_schema(), cfg, ""); }

Json resolve_config(const Json& overrides) {
  validate_config(overrides);
  return overlay(config_schema(), overrides);
}

Json parse_config_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
  }
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

static void dump(const Json& j, int indent, std::string& out) {
  const std::string pad(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(it.key()).dump() + ": ";
      dump(it.value(), indent + 2, out);
    }
    out += "\n" + std::string(indent, ' ') + "}";
  } else if (j.is_array()) {
    const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
    if (j.empty() || flat) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        dump(j[i], indent, out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      dump(j[i], indent + 2, out);
    }
    out += "\n" + std::string(indent, ' ') + "]";
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      out += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string t = buf;
    if (t.find_first_of(".e") == std::string::npos) t += ".0";
    out += t;
  } else {
    out += j.dump();
  }
}

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, 0, out);
  return out + "\n";
}

std::string serialize_config(const Json& cfg) { return dump_json(overlay(config_schema(), cfg)); }

std::string config_hash(const Json& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int default_workers() {
  const char* env = std::getenv("VORTEX_SPECTRA_WORKERS");
  if (!env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<int>(std::min(v, 256L));
}

profiles::NonlinearityModel model_from_config(const Json& cfg) {
  const std::string kind = cfg.at("model").at("kind").get<std::string>();
  if (kind == "cubic_quintic") return profiles::NonlinearityModel::cubic_quintic();
  if (kind == "polynomial") {
    const auto c = cfg.at("model").at("coefficients").get<std::vector<double>>();
    if (c.empty()) fail("model.coefficients", "polynomial model needs coefficients");
    return profiles::NonlinearityModel::polynomial(c);
  }
  fail("model.kind", "unknown nonlinearity '" + kind + "'");
}

profiles::RadialPotential potential_from_config(const Json& cfg) {
  const std::string kind = cfg.at("potential").at("kind").get<std::string>();
  const double eps = cfg.at("potential").at("epsilon").get<double>();
  if (kind == "none") {
    if (eps != 0.0) fail("potential.epsilon", "potential kind none takes no strength");
    return profiles::RadialPotential::none();
  }
  if (kind == "gaussian_well") return profiles::RadialPotential::gaussian_well(eps);
  fail("potential.kind", "unknown potential '" + kind + "'");
}

profiles::RadialGrid grid_from_config(const Json& cfg) {
  const int n = cfg.at("grid").at("n").get<int>();
  const double r_max = cfg.at("grid").at("r_max").get<double>();
  if (n < 16 || !(r_max > 0.0)) fail("grid", "grid needs n >= 16 and r_max > 0");
  return profiles::RadialGrid(static_cast<std::size_t>(n), r_max);
}

spectra::SpectrumConfig spectrum_from_config(const Json& cfg) {
  const Json& s = cfg.at("spectrum");
  spectra::SpectrumConfig out;
  out.k_max = s.at("k_max").get<int>();
  if (out.k_max < 0) fail("spectrum.k_max", "k_max must be nonnegative");
  out.filter.residual_tol = s.at("residual_tol").get<double>();
  out.filter.localization_threshold = s.at("localization_threshold").get<double>();
  out.filter.kernel_tol = s.at("kernel_tol").get<double>();
  out.filter.instability_tol = s.at("instability_tol").get<double>();
  out.filter.vector_window = s.at("vector_window").get<double>();
  const int w = cfg.at("workers").get<int>();
  out.workers = w > 0 ? w : default_workers();
  return out;
}

fgr::Coupling coupling_from_config(const Json& terms) {
  std::vector<fgr::GaussianTerm> out;
  for (const auto& t : terms) {
    fgr::GaussianTerm g;
    g.amplitude = complex_of(t.at("amplitude"));
    g.width = t.at("width").get<double>();
    g.cx = t.at("center").at(0).get<double>();
    g.cy = t.at("center").at(1).get<double>();
    g.gamma = t.at("gamma").get<double>();
    g.qx = t.at("carrier").at(0).get<double>();
    g.qy = t.at("carrier").at(1).get<double>();
    out.push_back(g);
  }
  return fgr::Coupling::from_terms(std::move(out));
}

fgr::Model1Config model1_from_config(const Json& cfg) {
  const Json& f = cfg.at("fgr").at("model1");
  fgr::Model1Config m;
  m.G = coupling_from_config(f.at("coupling"));
  m.grid = {f.at("box").get<double>(), f.at("n_grid").get<int>()};
  m.dt = f.at("dt").get<double>();
  m.z0 = complex_of(f.at("z0"));
  m.t_final = f.at("t_final").get<double>();
  if (m.t_final <= 0.0) {
    if (std::abs(m.z0) == 0.0) fail("fgr.model1.t_final", "automatic horizon needs nonzero z0");
    fgr::QuadratureConfig q;
    q.grid = m.grid;
    const double c = fgr::fgr_constant(m.G, q).value;
    if (!(c > 0.0)) fail("fgr.model1.t_final", "automatic horizon needs a coupling with c > 0");
    m.t_final = 3.0 / (4.0 * M_PI * c * std::pow(std::abs(m.z0), 4));
  }
  m.sample_every = f.at("sample_every").get<int>();
  return m;
}

fgr::Model2Config model2_from_config(const Json& cfg) {
  const Json& f = cfg.at("fgr").at("model2");
  fgr::Model2Config m;
  for (const auto& mode : f.at("modes")) m.modes.push_back({mode.at("lambda").get<double>(), mode.at("s").get<int>()});
  m.omega = f.at("omega").get<double>();
  for (const auto& c : f.at("couplings")) {
    fgr::ModeCoupling mc;
    mc.alpha = c.at("alpha").get<std::vector<int>>();
    mc.a = coupling_from_config(c.at("a"));
    mc.b = coupling_from_config(c.at("b"));
    m.couplings.push_back(std::move(mc));
  }
  m.grid = {f.at("box").get<double>(), f.at("n_grid").get<int>()};
  m.dt = f.at("dt").get<double>();
  m.t_final = f.at("t_final").get<double>();
  for (const auto& z : f.at("z0")) m.z0.push_back(complex_of(z));
  m.sample_every = f.at("sample_every").get<int>();
  m.circle_points = f.at("circle_points").get<int>();
  return m;
}

}  // namespace vortex::harness
