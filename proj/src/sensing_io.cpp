#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "coexist/sensing.hpp"
#include "csv_util.hpp"

namespace coexist::sensing {

namespace {

void put_f64_le(std::ostream& out, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  std::array<char, 8> bytes{};
  for (auto& b : bytes) {
    b = static_cast<char>(bits & 0xffU);
    bits >>= 8;
  }
  out.write(bytes.data(), bytes.size());
}

bool get_f64_le(std::istream& in, double& value) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) return false;
  std::uint64_t bits = 0;
  for (std::size_t i = bytes.size(); i-- > 0;) bits = (bits << 8) | bytes[i];
  value = std::bit_cast<double>(bits);
  return true;
}

void require_finite(const PhaseTrace& trace) {
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    if (!std::isfinite(trace.samples[i])) throw std::invalid_argument(fmt::format("sample {} is not finite", i));
  }
}

}  // namespace

void write_trace_csv(std::ostream& out, const PhaseTrace& trace) {
  out << "time_s,phase_rad\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    fmt::print(out, "{:.9f},{}\n", trace.time_at(i), trace.samples[i]);
  }
}

PhaseTrace read_trace_csv(std::istream& in) {
  const auto rows = detail::read_numeric_csv(in, {"time_s", "phase_rad"});
  if (rows.size() < 2) throw std::invalid_argument("a trace needs at least two samples");
  PhaseTrace trace;
  const double span = rows.back()[0] - rows.front()[0];
  if (!(span > 0.0)) throw std::invalid_argument("trace times must increase");
  trace.sample_rate_hz = std::round(static_cast<double>(rows.size() - 1) / span * 1e6) / 1e6;
  trace.samples.reserve(rows.size());
  for (const auto& r : rows) trace.samples.push_back(r[1]);
  require_finite(trace);
  return trace;
}

void write_trace_binary(std::ostream& out, const PhaseTrace& trace) {
  out.write(kBinaryMagic, sizeof kBinaryMagic);
  put_f64_le(out, trace.sample_rate_hz);
  for (double s : trace.samples) put_f64_le(out, s);
}

PhaseTrace read_trace_binary(std::istream& in) {
  char magic[sizeof kBinaryMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kBinaryMagic, sizeof magic) != 0) {
    throw std::invalid_argument("not a binary phase trace (bad magic)");
  }
  PhaseTrace trace;
  if (!get_f64_le(in, trace.sample_rate_hz) || !(trace.sample_rate_hz > 0.0)) {
    throw std::invalid_argument("binary phase trace has a truncated or invalid header");
  }
  double v = 0.0;
  while (get_f64_le(in, v)) trace.samples.push_back(v);
  if (in.gcount() != 0) throw std::invalid_argument("binary phase trace ends with a partial sample");
  require_finite(trace);
  return trace;
}

PhaseTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open trace '{}'", path));
  char magic[sizeof kBinaryMagic] = {};
  in.read(magic, sizeof magic);
  const bool binary = in.gcount() == sizeof magic && std::memcmp(magic, kBinaryMagic, sizeof magic) == 0;
  in.clear();
  in.seekg(0);
  try {
    return binary ? read_trace_binary(in) : read_trace_csv(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace coexist::sensing
