#include <sstream>
#include <vector>

#include "json.hpp"

#include "io_util.hpp"
#include "vortex/profiles.hpp"

namespace vortex::profiles {

void write_profile_csv(const RadialProfile& profile, const std::string& path) {
  auto out = detail::open_output(path);
  out << "r,psi\n";
  for (Eigen::Index i = 0; i < profile.psi.size(); ++i) {
    out << detail::fmt17(profile.grid.r()[i]) << ',' << detail::fmt17(profile.psi[i]) << '\n';
  }
}

void write_profile_sidecar(const RadialProfile& profile, const std::string& path) {
  nlohmann::ordered_json j;
  j["omega"] = profile.omega;
  j["m"] = profile.m;
  j["epsilon"] = profile.epsilon;
  j["q"] = profile.q;
  j["E"] = profile.E;
  j["d"] = profile.d;
  j["residual_norm"] = profile.residual_norm;
  j["grid"] = {{"r_max", profile.grid.r_max()}, {"n", profile.grid.n()}};
  auto out = detail::open_output(path);
  out << j.dump(2) << '\n';
}

RadialProfile read_profile(const std::string& csv_path, const std::string& sidecar_path) {
  auto side = detail::open_input(sidecar_path);
  nlohmann::json j;
  try {
    side >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, sidecar_path + ": " + e.what());
  }
  RadialGrid grid(j.at("grid").at("n").get<std::size_t>(), j.at("grid").at("r_max").get<double>());
  RadialProfile p(grid);
  p.omega = j.at("omega").get<double>();
  p.m = j.at("m").get<int>();
  p.epsilon = j.at("epsilon").get<double>();
  p.q = j.at("q").get<double>();
  p.E = j.at("E").get<double>();
  p.d = j.at("d").get<double>();
  p.residual_norm = j.at("residual_norm").get<double>();

  auto in = detail::open_input(csv_path);
  std::string line;
  std::getline(in, line);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  if (values.size() != grid.n()) {
    throw Error(ErrorCode::GridMismatch, csv_path + ": node count differs from sidecar");
  }
  p.psi = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return p;
}

}  // namespace vortex::profiles
