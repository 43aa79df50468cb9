#pragma once

#include <vector>

#include "vortex/spectra.hpp"

namespace vortex::spectra::detail {

struct BlockAnalysis {
  std::vector<EigenPair> pairs;
  KernelDims kernel;
  int jordan_clusters = 0;
};

BlockAnalysis analyze_block(const linop::HarmonicBlockOperator& block, const FilterConfig& cfg,
                            bool kernel_analysis);

}  // namespace vortex::spectra::detail
