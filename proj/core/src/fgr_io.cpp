#include "io_util.hpp"
#include "vortex/fgr.hpp"

namespace vortex::fgr {

void write_time_series_csv(const TimeSeries& ts, const std::string& path) {
  using vortex::detail::fmt17;
  auto out = vortex::detail::open_output(path);
  out << 't';
  for (std::size_t j = 0; j < ts.z_abs2.size(); ++j) out << ",z" << j + 1 << "_abs2";
  out << ",signed_energy,leak_integral,field_l2";
  const bool with_prediction = !ts.predicted.empty();
  if (with_prediction) out << ",predicted";
  out << '\n';
  for (std::size_t i = 0; i < ts.t.size(); ++i) {
    out << fmt17(ts.t[i]);
    for (const auto& col : ts.z_abs2) out << ',' << fmt17(col[i]);
    out << ',' << fmt17(ts.signed_energy[i]) << ',' << fmt17(ts.leak_integral[i]) << ',' << fmt17(ts.field_l2[i]);
    if (with_prediction) out << ',' << fmt17(ts.predicted[i]);
    out << '\n';
  }
}

}  // namespace vortex::fgr
