#include "coexist/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "coexist/constants.hpp"
#include "coexist/random.hpp"

namespace coexist::sensing {

namespace {

// Gaussian pulses are evaluated within +-12 sigma (exp(-72) below that).
constexpr double kPulseSupportSigmas = 12.0;
// Floor for the median baseline of a noise-free trace.
constexpr double kMinBaseline = 1e-12;

void validate_event(const DisturbanceEvent& e, std::size_t index, double duration_s, double fiber_length_km) {
  if (!(e.duration_s > 0.0)) {
    throw std::invalid_argument(fmt::format("event {}: duration must be positive", index));
  }
  if (!(e.amplitude_um >= 0.0)) {
    throw std::invalid_argument(fmt::format("event {}: amplitude must be non-negative", index));
  }
  if (!(e.start_s >= 0.0 && e.start_s <= duration_s)) {
    throw std::invalid_argument(
        fmt::format("event {}: start {} s outside the trace window [0, {}] s", index, e.start_s, duration_s));
  }
  if (!(e.position_km >= 0.0 && e.position_km <= fiber_length_km)) {
    throw std::invalid_argument(
        fmt::format("event {}: position {} km outside the fiber [0, {}] km", index, e.position_km, fiber_length_km));
  }
  if (const auto* s = std::get_if<Sinusoid>(&e.shape); s && !(s->frequency_hz > 0.0)) {
    throw std::invalid_argument(fmt::format("event {}: sinusoid frequency must be positive", index));
  }
}

// Sample index range [first, last) where the event can be non-zero.
std::pair<std::size_t, std::size_t> event_support(const DisturbanceEvent& e, double fs, std::size_t n) {
  double lo = e.start_s;
  double hi = e.start_s + e.duration_s;
  if (std::holds_alternative<GaussianPulse>(e.shape)) {
    lo = e.start_s - kPulseSupportSigmas * e.duration_s;
    hi = e.start_s + kPulseSupportSigmas * e.duration_s;
  }
  const double first = std::clamp(std::ceil(lo * fs), 0.0, static_cast<double>(n));
  const double last = std::clamp(std::floor(hi * fs) + 1.0, 0.0, static_cast<double>(n));
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(std::max(first, last))};
}

double median(std::vector<double> values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return (lower + upper) / 2.0;
}

}  // namespace

double round_trip_phase(double delta_path_um, Wavelength lambda, double group_index) {
  return 4.0 * kPi * group_index * delta_path_um / lambda.um();
}

double path_change_um(const DisturbanceEvent& event, double t) {
  if (std::holds_alternative<GaussianPulse>(event.shape)) {
    const double z = (t - event.start_s) / event.duration_s;
    if (std::abs(z) > kPulseSupportSigmas) return 0.0;
    return event.amplitude_um * std::exp(-0.5 * z * z);
  }
  const auto& sine = std::get<Sinusoid>(event.shape);
  if (t < event.start_s || t >= event.start_s + event.duration_s) return 0.0;
  return event.amplitude_um * std::sin(2.0 * kPi * sine.frequency_hz * (t - event.start_s));
}

PhaseTrace synthesize_trace(std::span<const DisturbanceEvent> events, double duration_s, double sample_rate_hz,
                            double noise_sigma_rad, const linkbudget::FiberSpan& fiber, Wavelength lambda,
                            std::uint64_t seed, double group_index) {
  if (!(sample_rate_hz > 0.0) || !(duration_s > 0.0)) {
    throw std::invalid_argument("trace duration and sample rate must be positive");
  }
  if (duration_s * sample_rate_hz > kMaxSamples) {
    throw std::invalid_argument(fmt::format("trace of {} samples exceeds the 1e8 limit", duration_s * sample_rate_hz));
  }
  if (!(noise_sigma_rad >= 0.0)) throw std::invalid_argument("noise sigma must be non-negative");
  if (!(group_index > 0.0)) throw std::invalid_argument("group index must be positive");
  for (std::size_t i = 0; i < events.size(); ++i) validate_event(events[i], i, duration_s, fiber.length_km);

  PhaseTrace trace;
  trace.sample_rate_hz = sample_rate_hz;
  trace.fiber_length_km = fiber.length_km;
  trace.lambda = lambda;
  trace.group_index = group_index;
  trace.samples.assign(static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz)), 0.0);

  for (const auto& e : events) {
    const auto [first, last] = event_support(e, sample_rate_hz, trace.samples.size());
    for (std::size_t i = first; i < last; ++i) {
      trace.samples[i] += round_trip_phase(path_change_um(e, trace.time_at(i)), lambda, group_index);
    }
  }
  if (noise_sigma_rad > 0.0) {
    Xoshiro256StarStar rng(seed);
    for (auto& s : trace.samples) s += rng.gaussian(0.0, noise_sigma_rad);
  }
  return trace;
}

double event_snr(const DisturbanceEvent& event, double sample_rate_hz, double noise_sigma_rad, Wavelength lambda,
                 double group_index) {
  const double peak_phase = round_trip_phase(event.amplitude_um, lambda, group_index);
  const double dt = 1.0 / sample_rate_hz;
  double peak_step = 0.0;
  if (std::holds_alternative<GaussianPulse>(event.shape)) {
    peak_step = peak_phase * std::exp(-0.5) / event.duration_s * dt;
  } else {
    peak_step = std::min(peak_phase * 2.0 * kPi * std::get<Sinusoid>(event.shape).frequency_hz * dt, 2.0 * peak_phase);
  }
  if (noise_sigma_rad == 0.0) return peak_step > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return peak_step / (std::sqrt(2.0) * noise_sigma_rad);
}

double pulse_amplitude_for_snr(double snr, double width_s, double sample_rate_hz, double noise_sigma_rad,
                               Wavelength lambda, double group_index) {
  const double peak_step = snr * std::sqrt(2.0) * noise_sigma_rad;
  const double peak_phase = peak_step * width_s * sample_rate_hz / std::exp(-0.5);
  return peak_phase * lambda.um() / (4.0 * kPi * group_index);
}

std::size_t window_count(std::size_t sample_count, std::size_t window) {
  return sample_count > window ? sample_count - window : 0;
}

std::vector<double> windowed_sigma(std::span<const double> samples, std::size_t window, std::size_t first,
                                   std::size_t last) {
  last = std::min(last, window_count(samples.size(), window));
  std::vector<double> out;
  if (first >= last) return out;
  out.reserve(last - first);
  const double w = static_cast<double>(window);
  for (std::size_t k = first; k < last; ++k) {
    double sum = 0.0;
    for (std::size_t j = k; j < k + window; ++j) sum += samples[j + 1] - samples[j];
    const double mean = sum / w;
    double sq = 0.0;
    for (std::size_t j = k; j < k + window; ++j) {
      const double d = (samples[j + 1] - samples[j]) - mean;
      sq += d * d;
    }
    out.push_back(std::sqrt(sq / w));
  }
  return out;
}

std::vector<Detection> detect_events(const PhaseTrace& trace, std::size_t window, double threshold_sigma) {
  if (window < 2) throw std::invalid_argument(fmt::format("window must be at least 2 samples, got {}", window));
  if (!(threshold_sigma > 0.0)) throw std::invalid_argument("threshold must be positive");
  if (trace.samples.size() <= window) {
    throw std::invalid_argument(
        fmt::format("trace of {} samples is shorter than the {}-sample window", trace.samples.size(), window));
  }
  const std::vector<double> sigma = windowed_sigma(trace.samples, window, 0, trace.samples.size());
  const double baseline = std::max(median(sigma), kMinBaseline);

  std::vector<Detection> out;
  std::size_t group_last = 0;
  std::size_t best_index = 0;
  double best_score = 0.0;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    out.push_back({(static_cast<double>(best_index) + static_cast<double>(window) / 2.0) / trace.sample_rate_hz,
                   best_score});
    open = false;
  };
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    const double score = sigma[k] / baseline;
    if (!(score > threshold_sigma)) continue;
    if (open && k - group_last > window) flush();
    if (!open) {
      open = true;
      best_index = k;
      best_score = score;
    } else if (score > best_score) {
      best_index = k;
      best_score = score;
    }
    group_last = k;
  }
  flush();
  return out;
}

}  // namespace coexist::sensing
