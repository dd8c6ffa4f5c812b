#pragma once

// Route composition (spans, amplifiers, filters) and the noise budget of a
// quantum channel sharing the route with classical carriers.

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "coexist/raman.hpp"
#include "coexist/spectral.hpp"

namespace coexist::linkbudget {

using spectral::Band;
using spectral::Channel;
using spectral::ChannelPlan;
using spectral::Frequency;
using spectral::Wavelength;

struct AttenuationPoint {
  Wavelength lambda;
  double loss_db_per_km;

  friend bool operator==(const AttenuationPoint&, const AttenuationPoint&) = default;
};

class AttenuationProfile {
 public:
  /// Throws std::invalid_argument unless wavelengths increase strictly, there
  /// are at least 3 points, the table spans [1260, 1620] nm, and losses are >= 0.
  explicit AttenuationProfile(std::vector<AttenuationPoint> points);

  /// G.652-like table with the 1383 nm water peak.
  static AttenuationProfile default_profile();

  const std::vector<AttenuationPoint>& points() const { return points_; }
  bool covers(Wavelength lambda) const;
  /// dB/km by linear interpolation; std::out_of_range outside the table.
  double loss_at(Wavelength lambda) const;

  friend bool operator==(const AttenuationProfile&, const AttenuationProfile&) = default;

 private:
  std::vector<AttenuationPoint> points_;
};

double attenuation_db(const AttenuationProfile& profile, Wavelength lambda, double length_km);

inline constexpr double kMaxSpanTotalKm = 2000.0;
inline constexpr double kMaxAmplifierGainDb = 40.0;
// Isolation figures above this are treated as this value.
inline constexpr double kIsolationCapDb = 200.0;

struct FiberSpan {
  double length_km;
  AttenuationProfile attenuation;

  double transmission(Frequency nu) const;
};

struct Amplifier {
  double gain_db;
  double noise_factor;  // n_sp
  Band band;            // unity gain outside

  double gain_at(Frequency nu) const;
};

struct OpticalFilter {
  Frequency center;
  double passband_width_ghz;
  double insertion_loss_db;
  double out_of_band_isolation_db;
  double return_loss_db;

  bool passes(Frequency nu) const;
  /// Insertion loss inside the passband, capped isolation outside, in dB.
  double loss_db_at(Frequency nu) const;
  double transmission(Frequency nu) const;
};

using LinkElement = std::variant<FiberSpan, Amplifier, OpticalFilter>;

class LinkModel {
 public:
  /// Throws std::invalid_argument when an element breaks its invariants, there
  /// is no span, or the spans add up to more than 2000 km.
  explicit LinkModel(std::vector<LinkElement> elements);

  const std::vector<LinkElement>& elements() const { return elements_; }
  double total_length_km() const;
  /// Index of the last filter on the route, if any.
  std::optional<std::size_t> terminal_filter_index() const;

  /// Power transmission at `nu` through elements [first, last), optionally
  /// skipping one element.
  double transmission(Frequency nu, std::size_t first, std::size_t last,
                      std::optional<std::size_t> skip = std::nullopt) const;

 private:
  std::vector<LinkElement> elements_;
};

struct DetectorModel {
  double gate_rate_hz;
  double gate_width_s;
  double efficiency;
  double dark_rate_cps;

  /// Throws std::invalid_argument unless gate_rate > 0, gate_width > 0,
  /// gate_width * gate_rate <= 1, efficiency in [0, 1], dark_rate >= 0.
  void validate() const;
};

struct NoiseBudget {
  double raman_rate = 0.0;
  double ase_rate = 0.0;
  double leakage_rate = 0.0;
  double dark_rate = 0.0;
  double total_rate = 0.0;  // ((raman + ase) + leakage) + dark
  double qber_estimate = 0.0;
};

/// Two-polarization ASE 2 n_sp h nu (G - 1) B in watts; zero outside the band.
double ase_power(const Amplifier& amp, Frequency at, double bandwidth_ghz);

/// Classical photons per second surviving `link_loss_db` and the filter.
/// Channels inside the passband pass at insertion loss, others at isolation.
double leakage_rate(std::span<const Channel> classical, const OpticalFilter& filter,
                    double link_loss_db);

/// 0.5 * p_noise / (p_signal + p_noise); zero when both are zero.
double qber_estimate(double p_signal_per_gate, double p_noise_per_gate);

/// Thrown by total_budget for an invalid plan or a missing quantum channel.
class BudgetError : public std::invalid_argument {
 public:
  BudgetError(const std::string& what, std::vector<spectral::Violation> violations = {})
      : std::invalid_argument(what), violations_(std::move(violations)) {}
  const std::vector<spectral::Violation>& violations() const { return violations_; }

 private:
  std::vector<spectral::Violation> violations_;
};

/// Full noise budget at the quantum receiver at the end of `link`. Raman
/// scattering is accumulated span by span for co-propagating carriers and
/// integrated over the quantum channel's width.
NoiseBudget total_budget(const LinkModel& link, const ChannelPlan& plan, const Channel& quantum,
                         const DetectorModel& detector, const raman::RamanGainProfile& profile,
                         const raman::ThermalEnvironment& env, double signal_rate,
                         const raman::SpontaneousOptions& options = {});

// Serialization. Link elements use a `kind` discriminator: span | amplifier | filter.
nlohmann::json to_json(const AttenuationProfile& profile);
nlohmann::json to_json(const LinkElement& element);
nlohmann::json to_json(const LinkModel& link);
nlohmann::json to_json(const DetectorModel& detector);
nlohmann::json to_json(const NoiseBudget& budget);

AttenuationProfile attenuation_from_json(const nlohmann::json& j, const std::string& path);
/// Spans without an `attenuation` table use `default_attenuation`.
LinkModel link_from_json(const nlohmann::json& j, const AttenuationProfile& default_attenuation,
                         const std::string& path = "link");
DetectorModel detector_from_json(const nlohmann::json& j, const std::string& path = "detector");

inline constexpr const char* kBudgetCsvHeader =
    "raman_rate,ase_rate,leakage_rate,dark_rate,total_rate,qber_estimate";
/// One CSV row, no newline, every value in shortest round-trip form.
std::string budget_csv_row(const NoiseBudget& budget);

// CSV with header `lambda_nm,loss_db_per_km`.
void write_attenuation_csv(std::ostream& out, const AttenuationProfile& profile);
AttenuationProfile read_attenuation_csv(std::istream& in);
AttenuationProfile load_attenuation_csv(const std::string& path);

}  // namespace coexist::linkbudget
