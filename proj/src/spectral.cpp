#include "coexist/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "coexist/constants.hpp"

namespace coexist::spectral {

namespace {

// c in nm*THz: c[m/s] * 1e9 nm/m / 1e12 Hz/THz.
constexpr double kCNmThz = kSpeedOfLight * 1e-3;

// Absorbs rounding when (span - width) / spacing lands on an integer.
constexpr double kCountSlack = 1e-9;

}  // namespace

Wavelength Wavelength::from_nm(double nm) {
  if (!(nm >= kMinWavelengthNm && nm <= kMaxWavelengthNm)) {
    throw std::out_of_range(
        fmt::format("wavelength {} nm outside [{}, {}] nm", nm, kMinWavelengthNm, kMaxWavelengthNm));
  }
  return Wavelength(nm);
}

Frequency Frequency::from_thz(double thz) {
  if (!(thz >= kMinFrequencyThz && thz <= kMaxFrequencyThz)) {
    throw std::out_of_range(
        fmt::format("frequency {} THz outside [{}, {}] THz", thz, kMinFrequencyThz, kMaxFrequencyThz));
  }
  return Frequency(thz);
}

Frequency wl_to_freq(Wavelength lambda) { return Frequency::from_thz(kCNmThz / lambda.nm()); }

Wavelength freq_to_wl(Frequency nu) { return Wavelength::from_nm(kCNmThz / nu.thz()); }

double shift_between(Wavelength pump, Wavelength target) {
  return wl_to_freq(target).thz() - wl_to_freq(pump).thz();
}

double photon_energy(Frequency nu) { return kPlanck * nu.hz(); }

Band::Band(std::string name_, Wavelength lambda_min_, Wavelength lambda_max_)
    : name(std::move(name_)), lambda_min(lambda_min_), lambda_max(lambda_max_) {
  if (!(lambda_min < lambda_max)) {
    throw std::invalid_argument(fmt::format("band '{}': lambda_min {} nm must be below lambda_max {} nm",
                                            name, lambda_min.nm(), lambda_max.nm()));
  }
}

Frequency Band::center() const {
  return Frequency::from_thz((low_edge().thz() + high_edge().thz()) / 2.0);
}

bool Band::contains(Frequency nu) const {
  return nu.thz() >= low_edge().thz() && nu.thz() <= high_edge().thz();
}

Band o_band() { return Band("O", Wavelength::from_nm(1260), Wavelength::from_nm(1360)); }
Band s_band() { return Band("S", Wavelength::from_nm(1460), Wavelength::from_nm(1530)); }
Band c_band() { return Band("C", Wavelength::from_nm(1530), Wavelength::from_nm(1565)); }
Band l_band() { return Band("L", Wavelength::from_nm(1565), Wavelength::from_nm(1625)); }

namespace {

void check_grid_args(const Band& band, double spacing_ghz, double width_ghz) {
  if (!(spacing_ghz > 0.0)) {
    throw std::invalid_argument(fmt::format("grid spacing must be positive, got {} GHz", spacing_ghz));
  }
  if (!(width_ghz >= 0.0)) {
    throw std::invalid_argument(fmt::format("channel width must be non-negative, got {} GHz", width_ghz));
  }
  if (width_ghz > band.span_ghz()) {
    throw std::invalid_argument(fmt::format("channel width {} GHz exceeds band '{}' span {} GHz",
                                            width_ghz, band.name, band.span_ghz()));
  }
}

// Inclusive range of ITU grid indices k whose passband fits the band.
std::pair<long long, long long> itu_index_range(const Band& band, double spacing_ghz,
                                                double width_ghz) {
  const double anchor = kItuAnchorThz * 1e3;
  const double lo = band.low_edge().ghz() + width_ghz / 2.0;
  const double hi = band.high_edge().ghz() - width_ghz / 2.0;
  const auto first = static_cast<long long>(std::ceil((lo - anchor) / spacing_ghz - kCountSlack));
  const auto last = static_cast<long long>(std::floor((hi - anchor) / spacing_ghz + kCountSlack));
  return {first, last};
}

}  // namespace

std::size_t grid_capacity(const Band& band, double spacing_ghz, double channel_width_ghz,
                          GridAnchor anchor) {
  check_grid_args(band, spacing_ghz, channel_width_ghz);
  if (anchor == GridAnchor::kItu) {
    const auto [first, last] = itu_index_range(band, spacing_ghz, channel_width_ghz);
    return last < first ? 0 : static_cast<std::size_t>(last - first + 1);
  }
  const double free_span = band.span_ghz() - channel_width_ghz;
  return static_cast<std::size_t>(std::floor(free_span / spacing_ghz + kCountSlack)) + 1;
}

std::vector<Frequency> grid_centers(const Band& band, double spacing_ghz,
                                    double channel_width_ghz, GridAnchor anchor) {
  const std::size_t count = grid_capacity(band, spacing_ghz, channel_width_ghz, anchor);
  std::vector<Frequency> centers;
  centers.reserve(count);
  if (anchor == GridAnchor::kItu) {
    const auto first = itu_index_range(band, spacing_ghz, channel_width_ghz).first;
    for (std::size_t k = 0; k < count; ++k) {
      const double ghz = kItuAnchorThz * 1e3 + static_cast<double>(first + static_cast<long long>(k)) * spacing_ghz;
      centers.push_back(Frequency::from_thz(ghz * 1e-3));
    }
    return centers;
  }
  const double first_ghz = band.low_edge().ghz() + channel_width_ghz / 2.0;
  for (std::size_t k = 0; k < count; ++k) {
    centers.push_back(Frequency::from_thz((first_ghz + static_cast<double>(k) * spacing_ghz) * 1e-3));
  }
  return centers;
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kClassical:
      return "classical";
    case Role::kTimeFrequency:
      return "time_frequency";
    case Role::kQuantum:
      return "quantum";
  }
  return "unknown";
}

Role role_from_string(std::string_view text) {
  if (text == "classical") return Role::kClassical;
  if (text == "time_frequency") return Role::kTimeFrequency;
  if (text == "quantum") return Role::kQuantum;
  throw std::invalid_argument(
      fmt::format("unknown channel role '{}' (expected classical, time_frequency or quantum)", text));
}

double Channel::launch_power_w() const {
  if (!launch_power_dbm) {
    throw std::invalid_argument(fmt::format("channel at {} THz has no launch power", center.thz()));
  }
  return std::pow(10.0, *launch_power_dbm / 10.0) * 1e-3;
}

std::vector<Violation> validate_plan(const ChannelPlan& plan) {
  const auto& chans = plan.channels;
  std::vector<Violation> out;

  if (plan.guard_band_ghz < 0.0) {
    out.push_back({std::string(rules::kNegativeGuardBand), {},
                   fmt::format("guard band {} GHz is negative", plan.guard_band_ghz)});
  }

  for (std::size_t i = 0; i < chans.size(); ++i) {
    const Channel& ch = chans[i];
    if (!(ch.width_ghz > 0.0)) {
      out.push_back({std::string(rules::kInvalidWidth), {i},
                     fmt::format("channel {} width {} GHz is not positive", i, ch.width_ghz)});
    } else if (ch.lower_edge_ghz() < kMinFrequencyThz * 1e3 ||
               ch.upper_edge_ghz() > kMaxFrequencyThz * 1e3) {
      out.push_back({std::string(rules::kPassbandOutOfRange), {i},
                     fmt::format("channel {} passband [{}, {}] GHz leaves the valid range", i,
                                 ch.lower_edge_ghz(), ch.upper_edge_ghz())});
    }
    if (ch.role == Role::kQuantum && ch.amplified) {
      out.push_back({std::string(rules::kQuantumAmplified), {i},
                     fmt::format("quantum channel {} is marked amplified", i)});
    }
  }

  // Overlap: every pair. Guard band: neighbours in frequency order only.
  for (std::size_t i = 0; i < chans.size(); ++i) {
    for (std::size_t j = i + 1; j < chans.size(); ++j) {
      const double gap = std::max(chans[j].lower_edge_ghz() - chans[i].upper_edge_ghz(),
                                  chans[i].lower_edge_ghz() - chans[j].upper_edge_ghz());
      if (gap < -kFrequencyToleranceGhz) {
        out.push_back({std::string(rules::kOverlap), {i, j},
                       fmt::format("channels {} and {} overlap by {} GHz", i, j, -gap)});
      }
    }
  }
  std::vector<std::size_t> order(chans.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return chans[a].center.thz() < chans[b].center.thz();
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t a = order[k - 1];
    const std::size_t b = order[k];
    const double gap = chans[b].lower_edge_ghz() - chans[a].upper_edge_ghz();
    if (gap >= -kFrequencyToleranceGhz && gap < plan.guard_band_ghz - kFrequencyToleranceGhz) {
      out.push_back({std::string(rules::kGuardBand), {std::min(a, b), std::max(a, b)},
                     fmt::format("channels {} and {} are {} GHz apart, guard band is {} GHz",
                                 std::min(a, b), std::max(a, b), gap, plan.guard_band_ghz)});
    }
  }

  const bool any_amplified =
      std::any_of(chans.begin(), chans.end(), [](const Channel& c) { return c.amplified; });
  if (any_amplified) {
    for (std::size_t i = 0; i < chans.size(); ++i) {
      if (chans[i].role != Role::kQuantum) continue;
      const double nm = kCNmThz / chans[i].center.thz();
      if (!(nm < kQuantumCeilingNm)) {
        out.push_back({std::string(rules::kQuantumAbove1290), {i},
                       fmt::format("quantum channel {} at {:.3f} nm must be below {} nm when amplified "
                                   "channels share the fiber",
                                   i, nm, kQuantumCeilingNm)});
      }
    }
  }

  auto lowest_center = [&](const Violation& v) {
    double lowest = kMaxFrequencyThz + 1.0;
    for (std::size_t idx : v.channels) lowest = std::min(lowest, chans[idx].center.thz());
    return lowest;
  };
  std::stable_sort(out.begin(), out.end(), [&](const Violation& a, const Violation& b) {
    return std::forward_as_tuple(lowest_center(a), a.rule) <
           std::forward_as_tuple(lowest_center(b), b.rule);
  });
  return out;
}

}  // namespace coexist::spectral
