#include "vortex/linop.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "io_util.hpp"
#include "json.hpp"
#include "vortex/errors.hpp"

namespace vortex::linop {

using profiles::NonlinearityModel;
using profiles::RadialPotential;
using profiles::RadialProfile;

BlockPieces assemble_pieces(const RadialProfile& profile, const RadialPotential& potential,
                            const NonlinearityModel& model, int k, const BlockConfig& cfg) {
  const auto& grid = profile.grid;
  if (std::abs(k) > cfg.k_max) {
    std::ostringstream os;
    os << "harmonic k=" << k << " exceeds k_max=" << cfg.k_max;
    throw Error(ErrorCode::GridMismatch, os.str());
  }
  if (profile.psi.size() != static_cast<Eigen::Index>(grid.n()) || grid.n() < 8) {
    throw Error(ErrorCode::GridMismatch, "profile does not match its grid or grid below stencil size");
  }
  const Eigen::Index n = profile.psi.size();
  const double eps = potential.active() ? potential.strength : 0.0;
  const Eigen::VectorXd V = potential.sample(grid);

  Eigen::VectorXd diag(n);
  BlockPieces pieces;
  pieces.W.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = profile.psi[i] * profile.psi[i];
    const double bp = model.beta_prime(s);
    diag[i] = profile.omega + eps * V[i] + model.beta(s) + bp * s;
    pieces.W[i] = bp * s;
  }
  const int m = profile.m;
  pieces.H_plus = profiles::symmetric_radial_operator(grid, std::abs(m + k));
  pieces.H_plus.diagonal() += diag;
  if (k == 0) {
    pieces.H_minus = pieces.H_plus;
  } else {
    pieces.H_minus = profiles::symmetric_radial_operator(grid, std::abs(m - k));
    pieces.H_minus.diagonal() += diag;
  }
  return pieces;
}

HarmonicBlockOperator assemble_block(const RadialProfile& profile, const RadialPotential& potential,
                                     const NonlinearityModel& model, int k,
                                     const BlockConfig& cfg) {
  const BlockPieces p = assemble_pieces(profile, potential, model, k, cfg);
  const Eigen::Index n = p.W.size();

  HarmonicBlockOperator out;
  out.k = k;
  out.m = profile.m;
  out.omega = profile.omega;
  out.epsilon = profile.epsilon;
  out.n = n;
  out.r_max = profile.grid.r_max();
  out.r = profile.grid.r();
  out.S.setZero(2 * n, 2 * n);
  out.S.topLeftCorner(n, n) = p.H_plus;
  out.S.bottomRightCorner(n, n) = p.H_minus;
  out.S.topRightCorner(n, n).diagonal() = p.W;
  out.S.bottomLeftCorner(n, n).diagonal() = p.W;
  out.K = out.S;
  out.K.bottomRows(n) *= -1.0;
  return out;
}

EssentialBand essential_band(double omega) {
  if (!(omega > 0.0)) throw Error(ErrorCode::ConfigError, "essential band needs omega > 0");
  return {-omega, omega};
}

void write_block_dump(const HarmonicBlockOperator& block, const std::string& path) {
  nlohmann::ordered_json header;
  header["k"] = block.k;
  header["n"] = block.n;
  header["omega"] = block.omega;
  header["rows"] = block.K.rows();
  header["cols"] = block.K.cols();
  header["matrices"] = {"K", "S"};
  header["layout"] = "row-major float64 little-endian";

  auto out = detail::open_output(path, true);
  const std::string line = header.dump() + "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  for (const Eigen::MatrixXd* M : {&block.K, &block.S}) {
    for (Eigen::Index i = 0; i < M->rows(); ++i) {
      for (Eigen::Index j = 0; j < M->cols(); ++j) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>((*M)(i, j));
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        char bytes[8];
        std::memcpy(bytes, &bits, 8);
        out.write(bytes, 8);
      }
    }
  }
}

}  // namespace vortex::linop
