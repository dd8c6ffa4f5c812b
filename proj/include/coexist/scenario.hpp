#pragma once

// The scenario document: one JSON file describing the shared fiber (plan,
// route, detector, environment) plus optional time-transfer and sensing runs.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coexist/linkbudget.hpp"
#include "coexist/raman.hpp"
#include "coexist/sensing.hpp"
#include "coexist/spectral.hpp"
#include "coexist/timesync.hpp"

namespace coexist::scenario {

/// Directory holding `raman_gain.csv` / `attenuation.csv` overrides.
inline constexpr const char* kProfileDirEnv = "COEXIST_SIM_PROFILE_DIR";

struct RamanSettings {
  raman::Direction direction = raman::Direction::kCoPropagating;
  raman::SpontaneousOptions options;
};

struct TimesyncSettings {
  timesync::ClockState clock{5000, 0.0, 1};
  timesync::LinkDelays delays{250'000'000, 250'000'000, 100.0};
  std::size_t rounds = 100;
  std::uint64_t seed = 1;
  timesync::Picoseconds turnaround_ps = timesync::kDefaultTurnaroundPs;
};

struct SensingSettings {
  std::vector<sensing::DisturbanceEvent> events;
  double duration_s = 10.0;
  double sample_rate_hz = 1000.0;
  double noise_sigma_rad = 0.01;
  std::uint64_t seed = 1;
  spectral::Wavelength lambda = spectral::Wavelength::from_nm(1550.0);
  double group_index = sensing::kDefaultGroupIndex;
  std::size_t window = 16;
  double threshold_sigma = 5.0;

  /// One 5 ms Gaussian pulse at t = 5 s with detector SNR of about 10.
  static SensingSettings defaults();
};

struct Scenario {
  spectral::ChannelPlan plan;
  linkbudget::LinkModel link;
  linkbudget::DetectorModel detector;
  raman::ThermalEnvironment environment;
  raman::RamanGainProfile raman_profile;
  linkbudget::AttenuationProfile attenuation;
  RamanSettings raman;
  std::optional<std::size_t> quantum_index;  // resolved to the first quantum channel if unset
  std::optional<double> signal_rate_pps;
  TimesyncSettings timesync;
  SensingSettings sensing;

  /// Throws std::invalid_argument if the plan has no quantum channel.
  const spectral::Channel& quantum_channel() const;
};

class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { kParse, kSchema, kPlan };

  ScenarioError(Kind kind, const std::string& what, std::vector<spectral::Violation> violations = {})
      : std::runtime_error(what), kind_(kind), violations_(std::move(violations)) {}

  Kind kind() const { return kind_; }
  const std::vector<spectral::Violation>& violations() const { return violations_; }

 private:
  Kind kind_;
  std::vector<spectral::Violation> violations_;
};

/// Parses JSON text; errors carry "line L, column C".
nlohmann::json parse_document(std::string_view text);

/// Schema-level parse with defaults filled in. Plan rules are not checked.
/// Relative CSV paths resolve against `base_dir`.
Scenario parse_scenario(const nlohmann::json& doc, const std::string& base_dir = ".");

/// Reads, parses and validates; plan violations raise ScenarioError(kPlan).
Scenario load_scenario(const std::string& path);

/// Fully resolved scenario, every default included.
nlohmann::json to_json(const Scenario& s);
nlohmann::json to_json(const TimesyncSettings& t);
nlohmann::json to_json(const SensingSettings& s);
nlohmann::json to_json(const sensing::DisturbanceEvent& e);

TimesyncSettings timesync_from_json(const nlohmann::json& j, const std::string& path = "timesync");
SensingSettings sensing_from_json(const nlohmann::json& j, const std::string& path = "sensing");

/// Profile resolution order: inline table in `profiles`, CSV named in
/// `profiles`, file in $COEXIST_SIM_PROFILE_DIR, built-in default.
raman::RamanGainProfile resolve_raman_profile(const nlohmann::json& profiles, const std::string& base_dir = ".");
linkbudget::AttenuationProfile resolve_attenuation(const nlohmann::json& profiles, const std::string& base_dir = ".");

std::string read_file(const std::string& path);

}  // namespace coexist::scenario
