#pragma once

// Vibration sensing on coherent-frequency links: the round-trip phase seen by
// the Doppler-cancellation loop, synthetic disturbance traces, and a
// variance-of-derivative event detector.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "coexist/linkbudget.hpp"
#include "coexist/spectral.hpp"

namespace coexist::sensing {

using spectral::Wavelength;

inline constexpr double kDefaultGroupIndex = 1.468;
inline constexpr double kMaxSamples = 1e8;

/// Gaussian path-length bump peaking at the event start; `duration` is its
/// standard deviation.
struct GaussianPulse {};

/// A * sin(2 pi f (t - start)) on [start, start + duration).
struct Sinusoid {
  double frequency_hz;
};

using EventShape = std::variant<GaussianPulse, Sinusoid>;

struct DisturbanceEvent {
  double position_km = 0.0;
  double start_s = 0.0;
  double duration_s = 1.0;
  double amplitude_um = 0.0;  // peak optical-path-length change
  EventShape shape = GaussianPulse{};
};

struct PhaseTrace {
  double sample_rate_hz = 1.0;
  std::vector<double> samples;  // radians
  double fiber_length_km = 0.0;
  Wavelength lambda = Wavelength::from_nm(1550.0);
  double group_index = kDefaultGroupIndex;

  double time_at(std::size_t i) const { return static_cast<double>(i) / sample_rate_hz; }
};

/// 4 pi n dL / lambda for a round trip.
double round_trip_phase(double delta_path_um, Wavelength lambda, double group_index = kDefaultGroupIndex);

/// Path-length change of one event at time t, in micrometres.
double path_change_um(const DisturbanceEvent& event, double t);

/// Sum of event waveforms converted to phase, plus seeded white phase noise.
/// Throws std::invalid_argument for events outside [0, duration] or outside
/// the fiber, non-positive sample rate, or more than 1e8 samples.
PhaseTrace synthesize_trace(std::span<const DisturbanceEvent> events, double duration_s, double sample_rate_hz,
                            double noise_sigma_rad, const linkbudget::FiberSpan& fiber, Wavelength lambda,
                            std::uint64_t seed, double group_index = kDefaultGroupIndex);

/// Peak per-sample phase step of a noise-free event divided by the step
/// standard deviation of the noise (sqrt(2) * noise_sigma). This is the SNR
/// the detector sees.
double event_snr(const DisturbanceEvent& event, double sample_rate_hz, double noise_sigma_rad, Wavelength lambda,
                 double group_index = kDefaultGroupIndex);

/// Amplitude (um) of a GaussianPulse of the given width that reaches `snr`.
double pulse_amplitude_for_snr(double snr, double width_s, double sample_rate_hz, double noise_sigma_rad,
                               Wavelength lambda, double group_index = kDefaultGroupIndex);

struct Detection {
  double time_s;  // center of the highest-scoring window
  double score;   // windowed sigma over the median baseline

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Standard deviation of the first difference over windows of `window`
/// differences starting at sample first..last-1. Each value is computed
/// independently, so chunked evaluation matches a single pass exactly.
std::vector<double> windowed_sigma(std::span<const double> samples, std::size_t window, std::size_t first,
                                   std::size_t last);
/// Number of windows available: samples.size() - window.
std::size_t window_count(std::size_t sample_count, std::size_t window);

/// Events where windowed sigma / median(windowed sigma) > threshold_sigma.
/// Above-threshold windows closer than one window length merge; each group
/// reports its maximum. Throws std::invalid_argument for window < 2,
/// threshold <= 0, or a trace with no more than `window` samples.
std::vector<Detection> detect_events(const PhaseTrace& trace, std::size_t window, double threshold_sigma);

// CSV `time_s,phase_rad`. Times are i / sample_rate with 9 decimals.
void write_trace_csv(std::ostream& out, const PhaseTrace& trace);
/// Sample rate is recovered from the time column.
PhaseTrace read_trace_csv(std::istream& in);

// Binary: 8-byte magic "CXPHASE1", little-endian f64 sample rate, then
// little-endian f64 samples.
inline constexpr char kBinaryMagic[8] = {'C', 'X', 'P', 'H', 'A', 'S', 'E', '1'};
void write_trace_binary(std::ostream& out, const PhaseTrace& trace);
PhaseTrace read_trace_binary(std::istream& in);

/// Reads either format, chosen by the leading magic bytes.
PhaseTrace load_trace(const std::string& path);

}  // namespace coexist::sensing
