#pragma once

#include <string>

#include <Eigen/Dense>

#include "vortex/profiles.hpp"

namespace vortex::linop {

// Radial 2x2 block of the linearisation for angular harmonic k, acting on (a, conj b)
// with a at winding m + k and b at winding m - k. Vectors live in the symmetrised
// variables M^{1/2} a, so the Euclidean product equals the r dr product.
struct HarmonicBlockOperator {
  int k = 0;
  int m = 0;
  double omega = 0.0;
  double epsilon = 0.0;
  Eigen::Index n = 0;
  Eigen::MatrixXd K;
  Eigen::MatrixXd S;
  double r_max = 0.0;
  Eigen::VectorXd r;

  double edge() const { return omega; }
};

struct BlockPieces {
  Eigen::MatrixXd H_plus;   // H_{m+k}
  Eigen::MatrixXd H_minus;  // H_{m-k}
  Eigen::VectorXd W;        // beta'(psi^2) psi^2
};

struct BlockConfig {
  int k_max = 8;
};

BlockPieces assemble_pieces(const profiles::RadialProfile& profile,
                            const profiles::RadialPotential& potential,
                            const profiles::NonlinearityModel& model, int k,
                            const BlockConfig& cfg = {});

HarmonicBlockOperator assemble_block(const profiles::RadialProfile& profile,
                                     const profiles::RadialPotential& potential,
                                     const profiles::NonlinearityModel& model, int k,
                                     const BlockConfig& cfg = {});

struct EssentialBand {
  double lower;  // the ray (-inf, lower]
  double upper;  // the ray [upper, inf)

  bool contains(double mu) const { return mu <= lower || mu >= upper; }
};

EssentialBand essential_band(double omega);

// One header line of JSON, then K and S as little-endian row-major doubles.
void write_block_dump(const HarmonicBlockOperator& block, const std::string& path);

}  // namespace vortex::linop
