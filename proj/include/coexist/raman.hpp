#pragma once

// Spontaneous Raman scattering from classical pumps into a quantum channel.

#include <iosfwd>
#include <string>
#include <vector>

#include "coexist/spectral.hpp"

namespace coexist::raman {

using spectral::Channel;
using spectral::Wavelength;

struct GainPoint {
  double shift_thz;
  double gain_per_w_km;

  friend bool operator==(const GainPoint&, const GainPoint&) = default;
};

/// Tabulated Raman gain coefficient g_R versus pump-probe frequency shift,
/// measured for one reference pump wavelength.
class RamanGainProfile {
 public:
  /// Throws std::invalid_argument unless shifts start at 0 with zero gain,
  /// increase strictly, number at least 4, and all gains are finite and >= 0.
  RamanGainProfile(Wavelength reference_pump, std::vector<GainPoint> points);

  /// Fused-silica shape: 8 points on [0, 36] THz, 0.42 /(W km) peak at 13.2 THz.
  static RamanGainProfile default_profile();

  Wavelength reference_pump() const { return reference_pump_; }
  const std::vector<GainPoint>& points() const { return points_; }
  double max_shift_thz() const { return points_.back().shift_thz; }

 private:
  Wavelength reference_pump_;
  std::vector<GainPoint> points_;
};

class ThermalEnvironment {
 public:
  /// Throws std::out_of_range outside [4, 400] K.
  explicit ThermalEnvironment(double kelvin);
  double kelvin() const { return kelvin_; }

 private:
  double kelvin_;
};

enum class Direction { kCoPropagating, kCounterPropagating };

std::string_view to_string(Direction d);
/// Accepts "co" / "co_propagating" and "counter" / "counter_propagating".
Direction direction_from_string(std::string_view text);

struct ScatterGeometry {
  Direction direction = Direction::kCoPropagating;
  double fiber_length_km = 0.0;
  double pump_attenuation_db_per_km = 0.0;
  double probe_attenuation_db_per_km = 0.0;

  /// Throws std::invalid_argument for non-positive length or negative loss.
  void validate() const;
};

/// Calibration constant turning g_R * weight into a scattered fraction per
/// GHz of detection bandwidth per km, in W/GHz. Chosen so the reference desk
/// scenario (0 dBm at 1550 nm into a 1310 nm quantum channel, 100 GHz filter,
/// 50 km at 0.2/0.35 dB/km, 293 K) yields about 1e5 photons/s.
inline constexpr double kDefaultSpontaneousCoefficient = 9.5e-10;

struct SpontaneousOptions {
  double k_spont = kDefaultSpontaneousCoefficient;
  // Rescale g_R by nu_pump / nu_reference_pump.
  bool scale_with_pump_frequency = false;
};

/// Bose-Einstein phonon occupation 1 / (exp(h*dnu / kT) - 1).
/// Throws std::domain_error for shift <= 0.
double thermal_occupation(double shift_thz, const ThermalEnvironment& env);

/// n + 1. Throws std::domain_error for n < 0.
double stokes_weight(double occupation);
/// n. Throws std::domain_error for n < 0.
double antistokes_weight(double occupation);

/// Linear interpolation at |shift|; zero beyond the last tabulated shift.
double gain_at_shift(const RamanGainProfile& profile, double shift_thz);

/// (1 - exp(-a L)) / a with a = dB/km * ln(10)/10; exactly L when lossless.
double effective_length(double attenuation_db_per_km, double length_km);

/// Spectral scattering coefficient rho in 1/(GHz km) for a pump at
/// `pump_thz` scattering into `probe_thz`.
double scattering_coefficient(double pump_thz, double probe_thz, const RamanGainProfile& profile,
                              const ThermalEnvironment& env, const SpontaneousOptions& options = {});

/// Scattered power in watts reaching the fiber end for a given pump power.
double scattered_power(double pump_power_w, double pump_thz, double probe_thz,
                       double filter_width_ghz, const RamanGainProfile& profile,
                       const ScatterGeometry& geometry, const ThermalEnvironment& env,
                       const SpontaneousOptions& options = {});

/// Raman noise photons per second arriving in the quantum detection window.
/// Throws std::invalid_argument for a quantum pump, a pump without launch
/// power, or a non-positive filter width.
double spontaneous_rate(const Channel& pump, Wavelength quantum_center, double filter_width_ghz,
                        const RamanGainProfile& profile, const ScatterGeometry& geometry,
                        const ThermalEnvironment& env, const SpontaneousOptions& options = {});

// CSV with header `shift_thz,gain_per_w_km`. The reference pump is not part of
// the format; readers supply it.
void write_profile_csv(std::ostream& out, const RamanGainProfile& profile);
RamanGainProfile read_profile_csv(std::istream& in, Wavelength reference_pump);
RamanGainProfile load_profile_csv(const std::string& path, Wavelength reference_pump);

}  // namespace coexist::raman
