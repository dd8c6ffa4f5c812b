#include "coexist/linkbudget.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace coexist::linkbudget {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_element(const LinkElement& element, std::size_t index) {
  std::visit(
      overloaded{
          [&](const FiberSpan& s) {
            if (!(s.length_km > 0.0)) {
              throw std::invalid_argument(
                  fmt::format("element {}: span length must be positive, got {} km", index, s.length_km));
            }
          },
          [&](const Amplifier& a) {
            if (!(a.gain_db >= 0.0 && a.gain_db <= kMaxAmplifierGainDb)) {
              throw std::invalid_argument(
                  fmt::format("element {}: amplifier gain {} dB outside [0, 40] dB", index, a.gain_db));
            }
            if (!(a.noise_factor >= 1.0)) {
              throw std::invalid_argument(
                  fmt::format("element {}: amplifier n_sp {} must be >= 1", index, a.noise_factor));
            }
          },
          [&](const OpticalFilter& f) {
            if (!(f.passband_width_ghz > 0.0)) {
              throw std::invalid_argument(fmt::format("element {}: filter passband must be positive", index));
            }
            const double lo = f.center.ghz() - f.passband_width_ghz / 2.0;
            const double hi = f.center.ghz() + f.passband_width_ghz / 2.0;
            if (lo < spectral::kMinFrequencyThz * 1e3 || hi > spectral::kMaxFrequencyThz * 1e3) {
              throw std::invalid_argument(
                  fmt::format("element {}: filter passband leaves the valid frequency range", index));
            }
            if (!(f.insertion_loss_db >= 0.0) || !(f.out_of_band_isolation_db >= 0.0) ||
                !(f.return_loss_db >= 0.0)) {
              throw std::invalid_argument(fmt::format("element {}: filter losses must be non-negative", index));
            }
            if (f.out_of_band_isolation_db < f.insertion_loss_db) {
              throw std::invalid_argument(
                  fmt::format("element {}: filter isolation {} dB is below its insertion loss {} dB", index,
                              f.out_of_band_isolation_db, f.insertion_loss_db));
            }
          },
      },
      element);
}

}  // namespace

AttenuationProfile::AttenuationProfile(std::vector<AttenuationPoint> points) : points_(std::move(points)) {
  if (points_.size() < 3) {
    throw std::invalid_argument(
        fmt::format("attenuation profile needs at least 3 points, got {}", points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].loss_db_per_km >= 0.0) || !std::isfinite(points_[i].loss_db_per_km)) {
      throw std::invalid_argument(fmt::format("attenuation point {} has an invalid loss", i));
    }
    if (i > 0 && !(points_[i].lambda > points_[i - 1].lambda)) {
      throw std::invalid_argument(fmt::format("attenuation wavelengths must increase strictly (point {})", i));
    }
  }
  if (points_.front().lambda.nm() > 1260.0 || points_.back().lambda.nm() < 1620.0) {
    throw std::invalid_argument("attenuation profile must span [1260, 1620] nm");
  }
}

AttenuationProfile AttenuationProfile::default_profile() {
  auto at = [](double nm, double loss) { return AttenuationPoint{Wavelength::from_nm(nm), loss}; };
  return AttenuationProfile({
      at(1260, 0.50),
      at(1310, 0.35),
      at(1383, 0.60),
      at(1458, 0.28),
      at(1550, 0.20),
      at(1620, 0.23),
  });
}

bool AttenuationProfile::covers(Wavelength lambda) const {
  return lambda >= points_.front().lambda && lambda <= points_.back().lambda;
}

double AttenuationProfile::loss_at(Wavelength lambda) const {
  if (!covers(lambda)) {
    throw std::out_of_range(fmt::format("{} nm is outside the attenuation table [{}, {}] nm", lambda.nm(),
                                        points_.front().lambda.nm(), points_.back().lambda.nm()));
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (lambda <= points_[i].lambda) {
      const auto& a = points_[i - 1];
      const auto& b = points_[i];
      const double t = (lambda.nm() - a.lambda.nm()) / (b.lambda.nm() - a.lambda.nm());
      return a.loss_db_per_km + t * (b.loss_db_per_km - a.loss_db_per_km);
    }
  }
  return points_.back().loss_db_per_km;
}

double attenuation_db(const AttenuationProfile& profile, Wavelength lambda, double length_km) {
  return profile.loss_at(lambda) * length_km;
}

double FiberSpan::transmission(Frequency nu) const {
  return db_to_linear(-attenuation_db(attenuation, spectral::freq_to_wl(nu), length_km));
}

double Amplifier::gain_at(Frequency nu) const { return band.contains(nu) ? db_to_linear(gain_db) : 1.0; }

bool OpticalFilter::passes(Frequency nu) const {
  return std::abs(nu.ghz() - center.ghz()) <= passband_width_ghz / 2.0;
}

double OpticalFilter::loss_db_at(Frequency nu) const {
  return passes(nu) ? insertion_loss_db : std::min(out_of_band_isolation_db, kIsolationCapDb);
}

double OpticalFilter::transmission(Frequency nu) const { return db_to_linear(-loss_db_at(nu)); }

LinkModel::LinkModel(std::vector<LinkElement> elements) : elements_(std::move(elements)) {
  for (std::size_t i = 0; i < elements_.size(); ++i) validate_element(elements_[i], i);
  const bool has_span = std::any_of(elements_.begin(), elements_.end(),
                                    [](const LinkElement& e) { return std::holds_alternative<FiberSpan>(e); });
  if (!has_span) throw std::invalid_argument("link needs at least one fiber span");
  if (total_length_km() > kMaxSpanTotalKm) {
    throw std::invalid_argument(
        fmt::format("link length {} km exceeds {} km", total_length_km(), kMaxSpanTotalKm));
  }
}

double LinkModel::total_length_km() const {
  double total = 0.0;
  for (const auto& e : elements_) {
    if (const auto* s = std::get_if<FiberSpan>(&e)) total += s->length_km;
  }
  return total;
}

std::optional<std::size_t> LinkModel::terminal_filter_index() const {
  for (std::size_t i = elements_.size(); i-- > 0;) {
    if (std::holds_alternative<OpticalFilter>(elements_[i])) return i;
  }
  return std::nullopt;
}

double LinkModel::transmission(Frequency nu, std::size_t first, std::size_t last,
                               std::optional<std::size_t> skip) const {
  double t = 1.0;
  for (std::size_t i = first; i < std::min(last, elements_.size()); ++i) {
    if (skip && *skip == i) continue;
    t *= std::visit(overloaded{
                        [&](const FiberSpan& s) { return s.transmission(nu); },
                        [&](const Amplifier& a) { return a.gain_at(nu); },
                        [&](const OpticalFilter& f) { return f.transmission(nu); },
                    },
                    elements_[i]);
  }
  return t;
}

void DetectorModel::validate() const {
  if (!(gate_rate_hz > 0.0) || !(gate_width_s > 0.0)) {
    throw std::invalid_argument("detector gate rate and gate width must be positive");
  }
  if (gate_width_s * gate_rate_hz > 1.0) {
    throw std::invalid_argument(
        fmt::format("detector duty cycle {} exceeds 1", gate_width_s * gate_rate_hz));
  }
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument(fmt::format("detector efficiency {} outside [0, 1]", efficiency));
  }
  if (!(dark_rate_cps >= 0.0)) throw std::invalid_argument("detector dark rate must be non-negative");
}

double ase_power(const Amplifier& amp, Frequency at, double bandwidth_ghz) {
  if (!(bandwidth_ghz > 0.0)) {
    throw std::invalid_argument(fmt::format("ASE bandwidth must be positive, got {} GHz", bandwidth_ghz));
  }
  if (!amp.band.contains(at)) return 0.0;
  return 2.0 * amp.noise_factor * spectral::photon_energy(at) * (db_to_linear(amp.gain_db) - 1.0) *
         bandwidth_ghz * 1e9;
}

double leakage_rate(std::span<const Channel> classical, const OpticalFilter& filter, double link_loss_db) {
  double rate = 0.0;
  for (const auto& ch : classical) {
    const double residual_w = ch.launch_power_w() * db_to_linear(-(link_loss_db + filter.loss_db_at(ch.center)));
    rate += residual_w / spectral::photon_energy(ch.center);
  }
  return rate;
}

double qber_estimate(double p_signal_per_gate, double p_noise_per_gate) {
  const double denom = p_signal_per_gate + p_noise_per_gate;
  if (denom <= 0.0) return 0.0;
  return 0.5 * p_noise_per_gate / denom;
}

NoiseBudget total_budget(const LinkModel& link, const ChannelPlan& plan, const Channel& quantum,
                         const DetectorModel& detector, const raman::RamanGainProfile& profile,
                         const raman::ThermalEnvironment& env, double signal_rate,
                         const raman::SpontaneousOptions& options) {
  if (auto violations = spectral::validate_plan(plan); !violations.empty()) {
    throw BudgetError(fmt::format("channel plan has {} violation(s)", violations.size()), std::move(violations));
  }
  if (quantum.role != spectral::Role::kQuantum ||
      std::find(plan.channels.begin(), plan.channels.end(), quantum) == plan.channels.end()) {
    throw BudgetError("quantum channel is not part of the plan");
  }
  detector.validate();
  if (!(signal_rate >= 0.0)) throw std::invalid_argument("signal rate must be non-negative");

  const auto& elements = link.elements();
  const Frequency q = quantum.center;
  const Wavelength q_lambda = quantum.wavelength();
  NoiseBudget budget;

  for (const auto& pump : plan.channels) {
    if (pump.role == spectral::Role::kQuantum) continue;
    const Wavelength p_lambda = pump.wavelength();
    double pump_w = pump.launch_power_w();
    double noise_w = 0.0;
    for (const auto& element : elements) {
      if (const auto* span = std::get_if<FiberSpan>(&element)) {
        const raman::ScatterGeometry geometry{raman::Direction::kCoPropagating, span->length_km,
                                              span->attenuation.loss_at(p_lambda),
                                              span->attenuation.loss_at(q_lambda)};
        noise_w = noise_w * span->transmission(q) +
                  raman::scattered_power(pump_w, pump.center.thz(), q.thz(), quantum.width_ghz, profile,
                                         geometry, env, options);
        pump_w *= span->transmission(pump.center);
      } else if (const auto* amp = std::get_if<Amplifier>(&element)) {
        pump_w *= amp->gain_at(pump.center);
        noise_w *= amp->gain_at(q);
      } else if (const auto* filter = std::get_if<OpticalFilter>(&element)) {
        pump_w *= filter->transmission(pump.center);
        noise_w *= filter->transmission(q);
      }
    }
    budget.raman_rate += noise_w / spectral::photon_energy(q);
  }

  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto* amp = std::get_if<Amplifier>(&elements[i]);
    if (!amp) continue;
    const Frequency at = amp->band.center();
    const double emitted = ase_power(*amp, at, amp->band.span_ghz());
    budget.ase_rate += emitted * link.transmission(at, i + 1, elements.size()) / spectral::photon_energy(at);
  }

  const auto terminal = link.terminal_filter_index();
  const OpticalFilter all_pass{q, quantum.width_ghz, 0.0, 0.0, 0.0};
  const OpticalFilter& filter = terminal ? std::get<OpticalFilter>(elements[*terminal]) : all_pass;
  for (const auto& ch : plan.channels) {
    if (ch.role == spectral::Role::kQuantum) continue;
    const double loss_db = -10.0 * std::log10(link.transmission(ch.center, 0, elements.size(), terminal));
    budget.leakage_rate += leakage_rate(std::span<const Channel>(&ch, 1), filter, loss_db);
  }

  budget.dark_rate = detector.dark_rate_cps;
  budget.total_rate = ((budget.raman_rate + budget.ase_rate) + budget.leakage_rate) + budget.dark_rate;

  const double p_noise = budget.total_rate * detector.gate_width_s;
  const double p_signal = signal_rate * detector.efficiency / detector.gate_rate_hz;
  budget.qber_estimate = qber_estimate(p_signal, p_noise);
  return budget;
}

}  // namespace coexist::linkbudget
