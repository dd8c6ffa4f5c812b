#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "coexist/raman.hpp"
#include "csv_util.hpp"

namespace coexist::raman {

void write_profile_csv(std::ostream& out, const RamanGainProfile& profile) {
  out << "shift_thz,gain_per_w_km\n";
  for (const auto& p : profile.points()) {
    fmt::print(out, "{},{}\n", p.shift_thz, p.gain_per_w_km);
  }
}

RamanGainProfile read_profile_csv(std::istream& in, Wavelength reference_pump) {
  const auto rows = detail::read_numeric_csv(in, {"shift_thz", "gain_per_w_km"});
  std::vector<GainPoint> points;
  points.reserve(rows.size());
  for (const auto& r : rows) points.push_back({r[0], r[1]});
  return RamanGainProfile(reference_pump, std::move(points));
}

RamanGainProfile load_profile_csv(const std::string& path, Wavelength reference_pump) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open Raman profile '{}'", path));
  try {
    return read_profile_csv(in, reference_pump);
  } catch (const std::exception& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace coexist::raman
