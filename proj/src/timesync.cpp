#include "coexist/timesync.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace coexist::timesync {

namespace {

void check_inputs(const ClockState& clock, const LinkDelays& delays, Picoseconds t1) {
  if (t1 < 0) throw std::invalid_argument(fmt::format("t1 must be non-negative, got {} ps", t1));
  if (clock.granularity < 1) {
    throw std::invalid_argument(fmt::format("timestamp granularity must be >= 1 ps, got {}", clock.granularity));
  }
  if (delays.forward <= 0 || delays.backward <= 0) {
    throw std::invalid_argument("link delays must be positive");
  }
  if (!(delays.jitter_sigma_ps >= 0.0)) throw std::invalid_argument("jitter sigma must be non-negative");
}

// Integer part of a jitter draw, floored so that q(base + j) = q(base + floor(j))
// holds exactly for integer base.
Picoseconds jitter_ps(double sigma, Xoshiro256StarStar& rng) {
  if (sigma == 0.0) return 0;
  return static_cast<Picoseconds>(std::floor(rng.gaussian(0.0, sigma)));
}

// Floor division by two. Unlike truncation it commutes with adding an integer,
// so the offset estimate's bias is exactly asymmetry_error() for any offset.
Picoseconds half_floor(Picoseconds v) { return (v >= 0 || v % 2 == 0) ? v / 2 : v / 2 - 1; }

}  // namespace

Picoseconds quantize(Picoseconds value, Picoseconds granularity) {
  Picoseconds q = value / granularity;
  if ((value % granularity) != 0 && value < 0) --q;
  return q * granularity;
}

TwoWayExchange run_exchange(const ClockState& clock, const LinkDelays& delays, Picoseconds t1,
                            Xoshiro256StarStar& rng, Picoseconds turnaround) {
  check_inputs(clock, delays, t1);
  const Picoseconds j1 = jitter_ps(delays.jitter_sigma_ps, rng);
  const Picoseconds j2 = jitter_ps(delays.jitter_sigma_ps, rng);
  TwoWayExchange x;
  x.t1 = t1;
  x.t2 = quantize(t1 + delays.forward + clock.offset + j1, clock.granularity);
  x.t3 = x.t2 + turnaround;
  x.t4 = quantize(x.t3 - clock.offset + delays.backward + j2, clock.granularity);
  return x;
}

TwoWayExchange run_exchange(const ClockState& clock, const LinkDelays& delays, Picoseconds t1,
                            std::uint64_t seed, Picoseconds turnaround) {
  Xoshiro256StarStar rng(seed);
  return run_exchange(clock, delays, t1, rng, turnaround);
}

SyncEstimate estimate(const TwoWayExchange& x) {
  const Picoseconds ms = x.t2 - x.t1;
  const Picoseconds sm = x.t4 - x.t3;
  SyncEstimate e;
  e.offset_est = half_floor(ms - sm);
  e.round_trip = ms + sm;
  e.one_way_delay_est = e.round_trip / 2;
  return e;
}

Picoseconds asymmetry_error(const LinkDelays& delays) { return half_floor(delays.forward - delays.backward); }

Picoseconds chromatic_asymmetry(spectral::Wavelength lambda_fwd, spectral::Wavelength lambda_bwd,
                                double dispersion_ps_per_nm_km, double length_km) {
  if (!(length_km > 0.0)) throw std::invalid_argument(fmt::format("length must be positive, got {} km", length_km));
  return static_cast<Picoseconds>(
      std::llround(dispersion_ps_per_nm_km * length_km * (lambda_fwd.nm() - lambda_bwd.nm())));
}

SessionResult simulate_session(const ClockState& clock, const LinkDelays& delays, std::size_t rounds,
                               std::uint64_t seed, Picoseconds turnaround) {
  if (rounds == 0) throw std::invalid_argument("a session needs at least one round");
  Xoshiro256StarStar rng(seed);
  SessionResult result;
  result.rounds.reserve(rounds);
  double sum = 0.0;
  for (std::size_t k = 0; k < rounds; ++k) {
    const Picoseconds t1 = static_cast<Picoseconds>(k) * kExchangeSpacingPs;
    ClockState now = clock;
    now.offset = clock.offset + static_cast<Picoseconds>(std::llround(clock.drift_ppb * 1e-9 * static_cast<double>(t1)));
    RoundRecord r;
    r.round = k;
    r.exchange = run_exchange(now, delays, t1, rng, turnaround);
    r.offset_est = estimate(r.exchange).offset_est;
    r.true_offset = now.offset;
    r.error = r.offset_est - r.true_offset;
    sum += static_cast<double>(r.error);
    result.rounds.push_back(r);
  }
  const double n = static_cast<double>(rounds);
  const double mean = sum / n;
  double sq = 0.0;
  for (const auto& r : result.rounds) {
    const double d = static_cast<double>(r.error) - mean;
    sq += d * d;
  }
  result.stats = {mean, std::sqrt(sq / n)};
  return result;
}

void write_rounds_csv(std::ostream& out, const std::vector<RoundRecord>& rounds) {
  out << kRoundCsvHeader << '\n';
  for (const auto& r : rounds) {
    fmt::print(out, "{},{},{},{},{},{},{},{}\n", r.round, r.exchange.t1, r.exchange.t2, r.exchange.t3,
               r.exchange.t4, r.offset_est, r.true_offset, r.error);
  }
}

}  // namespace coexist::timesync
