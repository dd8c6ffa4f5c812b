#pragma once

// Two-way time transfer in the White Rabbit style: timestamp exchange,
// offset/delay estimation and the asymmetry bias the method cannot observe.
// All times are integer picoseconds.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "coexist/random.hpp"
#include "coexist/spectral.hpp"

namespace coexist::timesync {

using Picoseconds = std::int64_t;

inline constexpr Picoseconds kDefaultTurnaroundPs = 1'000'000;         // 1 us
inline constexpr Picoseconds kExchangeSpacingPs = 1'000'000'000'000;  // 1 s

struct ClockState {
  Picoseconds offset = 0;  // slave minus master
  double drift_ppb = 0.0;
  Picoseconds granularity = 1;
};

struct LinkDelays {
  Picoseconds forward = 1;   // master -> slave
  Picoseconds backward = 1;  // slave -> master
  double jitter_sigma_ps = 0.0;
};

/// t1, t4 on the master timescale; t2, t3 on the slave timescale.
struct TwoWayExchange {
  Picoseconds t1 = 0;
  Picoseconds t2 = 0;
  Picoseconds t3 = 0;
  Picoseconds t4 = 0;

  friend bool operator==(const TwoWayExchange&, const TwoWayExchange&) = default;
};

struct SyncEstimate {
  Picoseconds offset_est = 0;
  Picoseconds round_trip = 0;
  Picoseconds one_way_delay_est = 0;
};

/// Floors `value` to a multiple of `granularity` (toward negative infinity).
Picoseconds quantize(Picoseconds value, Picoseconds granularity);

/// One exchange drawing both jitters from `rng`:
///   t2 = q(t1 + forward + offset + j1), t3 = t2 + turnaround,
///   t4 = q(t3 - offset + backward + j2).
/// Throws std::invalid_argument for t1 < 0, granularity < 1 or
/// non-positive delays.
TwoWayExchange run_exchange(const ClockState& clock, const LinkDelays& delays, Picoseconds t1,
                            Xoshiro256StarStar& rng, Picoseconds turnaround = kDefaultTurnaroundPs);

/// Same, with a fresh generator seeded by `seed`.
TwoWayExchange run_exchange(const ClockState& clock, const LinkDelays& delays, Picoseconds t1,
                            std::uint64_t seed, Picoseconds turnaround = kDefaultTurnaroundPs);

/// offset_est = floor(((t2 - t1) - (t4 - t3)) / 2);
/// one_way_delay_est = round_trip / 2, truncated (round_trip is positive).
SyncEstimate estimate(const TwoWayExchange& x);

/// floor((forward - backward) / 2), the bias of estimate() on this link.
Picoseconds asymmetry_error(const LinkDelays& delays);

/// Group-delay difference D * L * (lambda_fwd - lambda_bwd), rounded to 1 ps.
/// Throws std::invalid_argument for length <= 0.
Picoseconds chromatic_asymmetry(spectral::Wavelength lambda_fwd, spectral::Wavelength lambda_bwd,
                                double dispersion_ps_per_nm_km, double length_km);

struct RoundRecord {
  std::size_t round = 0;
  TwoWayExchange exchange;
  Picoseconds offset_est = 0;
  Picoseconds true_offset = 0;
  Picoseconds error = 0;
};

struct SessionStats {
  double mean_offset_error_ps = 0.0;
  double std_offset_error_ps = 0.0;  // population standard deviation
};

struct SessionResult {
  std::vector<RoundRecord> rounds;
  SessionStats stats;
};

/// `rounds` exchanges at t1 = k * 1 s. The slave offset during round k is
/// offset + round(drift_ppb * 1e-9 * t1). One generator seeded once drives
/// every jitter draw. Throws std::invalid_argument for rounds == 0.
SessionResult simulate_session(const ClockState& clock, const LinkDelays& delays, std::size_t rounds,
                               std::uint64_t seed, Picoseconds turnaround = kDefaultTurnaroundPs);

inline constexpr const char* kRoundCsvHeader = "round,t1,t2,t3,t4,offset_est_ps,true_offset_ps,error_ps";
void write_rounds_csv(std::ostream& out, const std::vector<RoundRecord>& rounds);

}  // namespace coexist::timesync
