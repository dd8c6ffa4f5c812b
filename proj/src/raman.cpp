#include "coexist/raman.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "coexist/constants.hpp"

namespace coexist::raman {

namespace {

constexpr double kDbToNeper = 0.23025850929940457;  // ln(10) / 10

double linear_attenuation(double db_per_km) { return db_per_km * kDbToNeper; }

}  // namespace

RamanGainProfile::RamanGainProfile(Wavelength reference_pump, std::vector<GainPoint> points)
    : reference_pump_(reference_pump), points_(std::move(points)) {
  if (points_.size() < 4) {
    throw std::invalid_argument(
        fmt::format("Raman gain profile needs at least 4 points, got {}", points_.size()));
  }
  if (points_.front().shift_thz != 0.0 || points_.front().gain_per_w_km != 0.0) {
    throw std::invalid_argument("Raman gain profile must start at shift 0 with gain 0");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.shift_thz) || !std::isfinite(p.gain_per_w_km) || p.gain_per_w_km < 0.0) {
      throw std::invalid_argument(fmt::format("Raman gain point {} is not finite and non-negative", i));
    }
    if (i > 0 && !(p.shift_thz > points_[i - 1].shift_thz)) {
      throw std::invalid_argument(
          fmt::format("Raman gain shifts must increase strictly (point {})", i));
    }
  }
}

RamanGainProfile RamanGainProfile::default_profile() {
  return RamanGainProfile(Wavelength::from_nm(1550.0), {
                                                           {0.0, 0.0},
                                                           {3.0, 0.08},
                                                           {8.0, 0.25},
                                                           {13.2, 0.42},
                                                           {15.0, 0.33},
                                                           {18.0, 0.20},
                                                           {25.0, 0.06},
                                                           {36.0, 0.02},
                                                       });
}

ThermalEnvironment::ThermalEnvironment(double kelvin) : kelvin_(kelvin) {
  if (!(kelvin >= 4.0 && kelvin <= 400.0)) {
    throw std::out_of_range(fmt::format("temperature {} K outside [4, 400] K", kelvin));
  }
}

std::string_view to_string(Direction d) {
  return d == Direction::kCoPropagating ? "co_propagating" : "counter_propagating";
}

Direction direction_from_string(std::string_view text) {
  if (text == "co" || text == "co_propagating") return Direction::kCoPropagating;
  if (text == "counter" || text == "counter_propagating") return Direction::kCounterPropagating;
  throw std::invalid_argument(fmt::format("unknown scattering direction '{}'", text));
}

void ScatterGeometry::validate() const {
  if (!(fiber_length_km > 0.0)) {
    throw std::invalid_argument(fmt::format("fiber length must be positive, got {} km", fiber_length_km));
  }
  if (!(pump_attenuation_db_per_km >= 0.0) || !(probe_attenuation_db_per_km >= 0.0)) {
    throw std::invalid_argument("fiber attenuation must be non-negative");
  }
}

double thermal_occupation(double shift_thz, const ThermalEnvironment& env) {
  if (!(shift_thz > 0.0)) {
    throw std::domain_error(fmt::format("phonon occupation needs a positive shift, got {} THz", shift_thz));
  }
  const double x = kPlanck * shift_thz * 1e12 / (kBoltzmann * env.kelvin());
  return 1.0 / std::expm1(x);
}

double stokes_weight(double occupation) {
  if (!(occupation >= 0.0)) throw std::domain_error("phonon occupation must be non-negative");
  return occupation + 1.0;
}

double antistokes_weight(double occupation) {
  if (!(occupation >= 0.0)) throw std::domain_error("phonon occupation must be non-negative");
  return occupation;
}

double gain_at_shift(const RamanGainProfile& profile, double shift_thz) {
  const double s = std::abs(shift_thz);
  const auto& pts = profile.points();
  if (s > pts.back().shift_thz) return 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (s <= pts[i].shift_thz) {
      const auto& a = pts[i - 1];
      const auto& b = pts[i];
      const double t = (s - a.shift_thz) / (b.shift_thz - a.shift_thz);
      return a.gain_per_w_km + t * (b.gain_per_w_km - a.gain_per_w_km);
    }
  }
  return 0.0;
}

double effective_length(double attenuation_db_per_km, double length_km) {
  if (attenuation_db_per_km == 0.0) return length_km;
  const double alpha = linear_attenuation(attenuation_db_per_km);
  return -std::expm1(-alpha * length_km) / alpha;
}

double scattering_coefficient(double pump_thz, double probe_thz, const RamanGainProfile& profile,
                              const ThermalEnvironment& env, const SpontaneousOptions& options) {
  const double shift = probe_thz - pump_thz;
  const double magnitude = std::abs(shift);
  double gain = gain_at_shift(profile, magnitude);
  if (gain == 0.0) return 0.0;
  if (options.scale_with_pump_frequency) {
    gain *= pump_thz / spectral::wl_to_freq(profile.reference_pump()).thz();
  }
  const double n = thermal_occupation(magnitude, env);
  const double weight = shift > 0.0 ? antistokes_weight(n) : stokes_weight(n);
  return options.k_spont * gain * weight;
}

double scattered_power(double pump_power_w, double pump_thz, double probe_thz,
                       double filter_width_ghz, const RamanGainProfile& profile,
                       const ScatterGeometry& geometry, const ThermalEnvironment& env,
                       const SpontaneousOptions& options) {
  geometry.validate();
  if (!(filter_width_ghz > 0.0)) {
    throw std::invalid_argument(fmt::format("filter width must be positive, got {} GHz", filter_width_ghz));
  }
  const double rho = scattering_coefficient(pump_thz, probe_thz, profile, env, options);
  if (rho == 0.0 || pump_power_w == 0.0) return 0.0;
  const double length = geometry.fiber_length_km;
  const double per_km = pump_power_w * rho * filter_width_ghz;
  if (geometry.direction == Direction::kCoPropagating) {
    const double probe_transmission =
        std::exp(-linear_attenuation(geometry.probe_attenuation_db_per_km) * length);
    // Light scattered at z sees pump loss over z and probe loss over L - z.
    const double net_db = geometry.pump_attenuation_db_per_km - geometry.probe_attenuation_db_per_km;
    return per_km * effective_length(net_db, length) * probe_transmission;
  }
  const double combined_db = geometry.pump_attenuation_db_per_km + geometry.probe_attenuation_db_per_km;
  return per_km * effective_length(combined_db, length);
}

double spontaneous_rate(const Channel& pump, Wavelength quantum_center, double filter_width_ghz,
                        const RamanGainProfile& profile, const ScatterGeometry& geometry,
                        const ThermalEnvironment& env, const SpontaneousOptions& options) {
  if (pump.role == spectral::Role::kQuantum) {
    throw std::invalid_argument("a quantum channel cannot act as a Raman pump");
  }
  const auto probe = spectral::wl_to_freq(quantum_center);
  const double power = scattered_power(pump.launch_power_w(), pump.center.thz(), probe.thz(),
                                       filter_width_ghz, profile, geometry, env, options);
  return power / spectral::photon_energy(probe);
}

}  // namespace coexist::raman
