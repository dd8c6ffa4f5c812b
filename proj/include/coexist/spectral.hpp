#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace coexist::spectral {

inline constexpr double kMinWavelengthNm = 1000.0;
inline constexpr double kMaxWavelengthNm = 2000.0;
inline constexpr double kMinFrequencyThz = 149.9;
inline constexpr double kMaxFrequencyThz = 299.8;

// Quantum channels must sit below this wavelength whenever any channel in the
// plan is optically amplified (ASE and Raman from strong C-band carriers).
inline constexpr double kQuantumCeilingNm = 1290.0;

// Passband comparisons tolerate 1 MHz, the resolution of the JSON plan format.
inline constexpr double kFrequencyToleranceGhz = 1e-3;

/// Vacuum wavelength in nanometres, restricted to [1000, 2000] nm.
class Wavelength {
 public:
  /// Throws std::out_of_range outside [1000, 2000] nm.
  static Wavelength from_nm(double nm);

  double nm() const { return nm_; }
  double um() const { return nm_ * 1e-3; }

  friend bool operator==(Wavelength, Wavelength) = default;
  friend auto operator<=>(Wavelength, Wavelength) = default;

 private:
  explicit Wavelength(double nm) : nm_(nm) {}
  double nm_;
};

/// Optical frequency in terahertz, restricted to [149.9, 299.8] THz.
class Frequency {
 public:
  /// Throws std::out_of_range outside [149.9, 299.8] THz.
  static Frequency from_thz(double thz);

  double thz() const { return thz_; }
  double ghz() const { return thz_ * 1e3; }
  double hz() const { return thz_ * 1e12; }

  friend bool operator==(Frequency, Frequency) = default;
  friend auto operator<=>(Frequency, Frequency) = default;

 private:
  explicit Frequency(double thz) : thz_(thz) {}
  double thz_;
};

Frequency wl_to_freq(Wavelength lambda);

/// The result must also be a valid Wavelength, so frequencies above
/// c / 1000 nm = 299.792458 THz throw std::out_of_range.
Wavelength freq_to_wl(Frequency nu);

/// nu(target) - nu(pump) in THz. Positive: target is anti-Stokes of pump.
double shift_between(Wavelength pump, Wavelength target);

/// Photon energy h*nu in joules.
double photon_energy(Frequency nu);

struct Band {
  std::string name;
  Wavelength lambda_min;
  Wavelength lambda_max;

  /// Throws std::invalid_argument unless lambda_min < lambda_max.
  Band(std::string name, Wavelength lambda_min, Wavelength lambda_max);

  Frequency low_edge() const { return wl_to_freq(lambda_max); }
  Frequency high_edge() const { return wl_to_freq(lambda_min); }
  double span_ghz() const { return high_edge().ghz() - low_edge().ghz(); }
  Frequency center() const;
  bool contains(Frequency nu) const;
};

// Telecom windows (glossary values).
Band o_band();
Band s_band();
Band c_band();
Band l_band();

enum class GridAnchor {
  kBandEdge,  // first passband starts at the band's low-frequency edge
  kItu,       // centers on 193.1 THz + k * spacing
};

inline constexpr double kItuAnchorThz = 193.1;

/// Number of channels of the given width placeable at `spacing_ghz` with
/// their passbands inside the band. Throws std::invalid_argument for
/// spacing <= 0, negative width, or width wider than the band.
std::size_t grid_capacity(const Band& band, double spacing_ghz, double channel_width_ghz,
                          GridAnchor anchor = GridAnchor::kBandEdge);

/// Centers matching grid_capacity, ascending in frequency.
std::vector<Frequency> grid_centers(const Band& band, double spacing_ghz,
                                    double channel_width_ghz,
                                    GridAnchor anchor = GridAnchor::kBandEdge);

enum class Role { kClassical, kTimeFrequency, kQuantum };

std::string_view to_string(Role role);
/// Accepts "classical", "time_frequency", "quantum".
Role role_from_string(std::string_view text);

struct Channel {
  Frequency center;
  double width_ghz = 0.0;
  Role role = Role::kClassical;
  // Not applicable for quantum channels; their level lives in the detector model.
  std::optional<double> launch_power_dbm;
  bool amplified = false;

  double lower_edge_ghz() const { return center.ghz() - width_ghz / 2.0; }
  double upper_edge_ghz() const { return center.ghz() + width_ghz / 2.0; }
  Wavelength wavelength() const { return freq_to_wl(center); }
  /// Launch power in watts; throws std::invalid_argument if absent.
  double launch_power_w() const;

  friend bool operator==(const Channel&, const Channel&) = default;
};

struct ChannelPlan {
  std::vector<Channel> channels;
  double guard_band_ghz = 0.0;
};

namespace rules {
inline constexpr std::string_view kOverlap = "overlap";
inline constexpr std::string_view kGuardBand = "guard-band";
inline constexpr std::string_view kQuantumAbove1290 = "quantum-above-1290-with-amplified-classical";
inline constexpr std::string_view kInvalidWidth = "invalid-width";
inline constexpr std::string_view kPassbandOutOfRange = "passband-out-of-range";
inline constexpr std::string_view kQuantumAmplified = "quantum-amplified";
inline constexpr std::string_view kNegativeGuardBand = "negative-guard-band";
}  // namespace rules

struct Violation {
  std::string rule;
  std::vector<std::size_t> channels;  // indices into ChannelPlan::channels
  std::string message;
};

/// Empty iff every plan invariant holds. Sorted by the lowest center
/// frequency among the involved channels, then by rule name.
std::vector<Violation> validate_plan(const ChannelPlan& plan);

// JSON plan format: {"guard_band_ghz": x, "channels": [{"center_thz", "width_ghz",
// "role", "launch_power_dbm"?, "amplified"}]}. Centers are quantized to 1e-6 THz.
double quantize_thz(double thz);
nlohmann::json to_json(const Channel& channel);
nlohmann::json to_json(const ChannelPlan& plan);
nlohmann::json to_json(const Violation& violation);
/// Throws std::invalid_argument naming the offending JSON path.
Channel channel_from_json(const nlohmann::json& j, const std::string& path = "channel");
ChannelPlan plan_from_json(const nlohmann::json& j, const std::string& path = "plan");

}  // namespace coexist::spectral
