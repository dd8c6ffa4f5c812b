// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/core.h>
#include <json.hpp>

#include "coexist/cli.hpp"
#include "coexist/raman.hpp"
#include "coexist/scenario.hpp"
#include "coexist/sensing.hpp"
#include "coexist/spectral.hpp"
#include "coexist/timesync.hpp"
#include "test_support.hpp"

using nlohmann::json;
using coexist::test::Gen;
using coexist::test::scenario_path;
namespace fs = std::filesystem;
namespace raman = coexist::raman;
namespace sensing = coexist::sensing;
namespace spectral = coexist::spectral;
namespace timesync = coexist::timesync;

namespace {

using spectral::Wavelength;

struct Verdict {
  bool pass;
  std::string detail;
};

struct Cli {
  int code;
  std::string out;
  std::string err;
};

Cli run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = coexist::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Verdict shift_check() {
  const double shift = spectral::shift_between(Wavelength::from_nm(1550.0), Wavelength::from_nm(1320.0));
  const bool ok = std::abs(shift - 33.70) < 0.005 && std::abs(shift - 33.72) <= 0.05;
  return {ok, fmt::format("shift_between(1550, 1320) = {:.4f} THz", shift)};
}

Verdict channel_counts() {
  const spectral::Band c("C-sub", Wavelength::from_nm(1540.0), Wavelength::from_nm(1546.0));
  const spectral::Band l("L-sub", Wavelength::from_nm(1570.0), Wavelength::from_nm(1572.0));
  const auto a = spectral::grid_capacity(c, 100.0, 0.0);
  const auto b = spectral::grid_capacity(l, 50.0, 50.0);
  return {a == 8 && b == 4,
          fmt::format("1540-1546 nm at 100 GHz spacing: {}, 1570-1572 nm at 50 GHz spacing and width: {}", a, b)};
}

Verdict raman_magnitude() {
  const auto r = run_cli({"noise", "raman", scenario_path("desk_scenario.json")});
  if (r.code != 0) return {false, r.err};
  const auto report = json::parse(r.out);
  const double rate = report["result"]["total_rate_pps"];
  const bool co = report["result"]["direction"] == "co_propagating";
  return {co && rate >= 1e4 && rate <= 1e6, fmt::format("desk co-propagating rate {:.4g} photons/s", rate)};
}

Verdict antistokes_ratio() {
  const raman::ThermalEnvironment room(293.0);
  auto ratio = [&](double shift) {
    const double n = raman::thermal_occupation(shift, room);
    return raman::antistokes_weight(n) / raman::stokes_weight(n);
  };
  const double a = ratio(13.2);
  const double b = ratio(33.70);
  const bool ok = std::abs(a - 0.115) <= 0.001 && std::abs(b - 4.0e-3) <= 0.1e-3;
  return {ok, fmt::format("ratio at 13.2 THz {:.5f}, at 33.70 THz {:.3e}", a, b)};
}

Verdict closed_form_vs_numeric() {
  const auto profile = raman::RamanGainProfile::default_profile();
  const raman::ThermalEnvironment room(293.0);
  Gen g(5);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const raman::ScatterGeometry geom{raman::Direction::kCoPropagating, g.real(1.0, 150.0), g.real(0.15, 0.6),
                                      g.real(0.15, 0.6)};
    const double pump_thz = g.real(185.0, 200.0);
    const double probe_thz = pump_thz + (g.coin() ? 1.0 : -1.0) * g.real(1.0, 35.0);
    const double width = g.real(10.0, 200.0);
    const double pump_w = g.real(1e-4, 1e-2);
    const double closed = raman::scattered_power(pump_w, pump_thz, probe_thz, width, profile, geom, room);
    const double rho = raman::scattering_coefficient(pump_thz, probe_thz, profile, room);

    const double ap = geom.pump_attenuation_db_per_km * std::log(10.0) / 10.0;
    const double aq = geom.probe_attenuation_db_per_km * std::log(10.0) / 10.0;
    const int steps = 10'000;
    const double dz = geom.fiber_length_km / steps;
    double numeric = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double z = (k + 0.5) * dz;
      numeric += pump_w * std::exp(-ap * z) * rho * width * std::exp(-aq * (geom.fiber_length_km - z)) * dz;
    }
    if (!(closed > 0.0)) return {false, fmt::format("draw {}: closed form {}", i, closed)};
    worst = std::max(worst, std::abs(closed - numeric) / numeric);
  }
  return {worst < 1e-3, fmt::format("worst relative deviation {:.2e} over 100 draws", worst)};
}

Verdict two_way_algebra() {
  Gen g(6);
  for (int i = 0; i < 1000; ++i) {
    const timesync::ClockState clock{g.integer(-1'000'000'000, 1'000'000'000), 0.0, 1};
    const timesync::LinkDelays delays{g.integer(1, 1'000'000'000), g.integer(1, 1'000'000'000), 0.0};
    const auto x = timesync::run_exchange(clock, delays, g.integer(0, 1'000'000'000'000), static_cast<std::uint64_t>(i));
    const auto bias = timesync::estimate(x).offset_est - clock.offset;
    const auto diff = delays.forward - delays.backward;
    // Integer half with floor for odd differences.
    const auto half = (diff - (((diff % 2) + 2) % 2)) / 2;
    if (bias != half) return {false, fmt::format("draw {}: bias {} vs {}", i, bias, half)};
    const timesync::LinkDelays sym{delays.forward, delays.forward, 0.0};
    const auto y = timesync::run_exchange(clock, sym, 0, static_cast<std::uint64_t>(i));
    if (timesync::estimate(y).offset_est != clock.offset) return {false, fmt::format("draw {}: symmetric miss", i)};
  }
  return {true, "1000 draws exact"};
}

Verdict session_stats() {
  const auto r = timesync::simulate_session(timesync::ClockState{5000, 0.0, 1},
                                            timesync::LinkDelays{250'000'000, 250'000'000, 100.0}, 10'000, 1);
  const double s = r.stats.std_offset_error_ps;
  return {s >= 60.0 && s <= 80.0, fmt::format("std of offset error {:.2f} ps", s)};
}

Verdict plan_gate() {
  const auto clean = coexist::scenario::load_scenario(scenario_path("reference_plan.json"));
  const auto v0 = spectral::validate_plan(clean.plan);
  auto moved = clean.plan;
  for (auto& ch : moved.channels) {
    if (ch.role == spectral::Role::kQuantum) ch.center = spectral::wl_to_freq(Wavelength::from_nm(1310.0));
  }
  std::sort(moved.channels.begin(), moved.channels.end(),
            [](const auto& a, const auto& b) { return a.center.thz() < b.center.thz(); });
  const auto v1 = spectral::validate_plan(moved);
  const bool ok = v0.empty() && v1.size() == 1 && v1[0].rule == "quantum-above-1290-with-amplified-classical";
  return {ok, fmt::format("reference plan {} violation(s); at 1310 nm: {}", v0.size(),
                          v1.empty() ? std::string("none") : fmt::format("{} x {}", v1.size(), v1[0].rule))};
}

Verdict sensing_round_trip() {
  const auto lambda = Wavelength::from_nm(1550.0);
  const coexist::linkbudget::FiberSpan fiber{50.0, coexist::linkbudget::AttenuationProfile::default_profile()};
  const double fs = 1000.0, sigma = 0.01, width = 0.005;
  const double amp = sensing::pulse_amplitude_for_snr(10.0, width, fs, sigma, lambda);
  Gen g(9);
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const double at = g.real(1.0, 9.0);
    const std::vector<sensing::DisturbanceEvent> events{{20.0, at, width, amp, sensing::GaussianPulse{}}};
    const auto trace = sensing::synthesize_trace(events, 10.0, fs, sigma, fiber, lambda, seed);
    const auto d = sensing::detect_events(trace, 16, 5.0);
    if (d.size() == 1 && std::abs(d[0].time_s - at) <= 16.0 / fs) ++hits;
  }
  int alarms = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::vector<sensing::DisturbanceEvent> events{{20.0, 5.0, width, 0.0, sensing::GaussianPulse{}}};
    const auto trace = sensing::synthesize_trace(events, 100.0, fs, sigma, fiber, lambda, seed);
    if (!sensing::detect_events(trace, 16, 8.0).empty()) ++alarms;
  }
  return {hits == 50 && alarms <= 2, fmt::format("{}/50 pulses at SNR 10 found; {}/50 zero-amplitude traces alarmed",
                                                 hits, alarms)};
}

std::string slurp_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += f.filename().string() + "\n" + coexist::scenario::read_file(f.string());
  return all;
}

Verdict determinism() {
  const fs::path tmp = fs::temp_directory_path() / ("coexist_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  const auto desk = scenario_path("desk_scenario.json");
  const std::string trace_csv = (tmp / "trace_csv" / "trace.csv").string();
  const std::string trace_bin = (tmp / "trace_bin" / "trace.bin").string();
  run_cli({"sense", "synth", desk, "--out", (tmp / "trace_csv").string()});
  run_cli({"sense", "synth", desk, "--trace-format", "binary", "--out", (tmp / "trace_bin").string()});
  const std::vector<std::vector<std::string>> commands = {
      {"plan", "validate", scenario_path("reference_plan.json")},
      {"plan", "capacity", "--lambda-min", "1570", "--lambda-max", "1572", "--spacing", "50"},
      {"noise", "raman", desk},
      {"noise", "budget", desk},
      {"noise", "budget", desk, "--sweep", "environment.temperature_k=77:300:8"},
      {"timesync", "simulate", desk, "--seed", "7"},
      {"sense", "synth", desk, "--trace-format", "binary"},
      {"sense", "detect", trace_csv},
      {"sense", "detect", trace_bin},
      {"profile", "dump", "--kind", "raman"},
      {"profile", "dump", "--kind", "attenuation"},
  };
  int checked = 0;
  for (const auto& cmd : commands) {
    // Streamed and file outputs both.
    const auto a = run_cli(cmd);
    const auto b = run_cli(cmd);
    if (a.code != 0 || a.out != b.out) {
      fs::remove_all(tmp);
      return {false, fmt::format("{} {} differs or failed (exit {})", cmd[0], cmd[1], a.code)};
    }
    std::string files[2];
    for (int k = 0; k < 2; ++k) {
      const auto dir = tmp / ("run" + std::to_string(k));
      auto args = cmd;
      args.insert(args.end(), {"--format", "both", "--out", dir.string()});
      run_cli(args);
      files[k] = slurp_dir(dir);
      fs::remove_all(dir);
    }
    if (files[0].empty() || files[0] != files[1]) {
      fs::remove_all(tmp);
      return {false, fmt::format("{} {} files differ", cmd[0], cmd[1])};
    }
    ++checked;
  }
  fs::remove_all(tmp);
  return {true, fmt::format("{} invocations byte-identical across repeat runs", checked)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"frequency shift 1550/1320 nm", shift_check},
      {"channel counts 8 and 4", channel_counts},
      {"Raman rate order of magnitude", raman_magnitude},
      {"anti-Stokes suppression", antistokes_ratio},
      {"closed form vs numerical integral", closed_form_vs_numeric},
      {"two-way algebra", two_way_algebra},
      {"session statistics", session_stats},
      {"plan gate", plan_gate},
      {"sensing round trip", sensing_round_trip},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print("{} {:2d} {}: {} ({:.2f} s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail, secs);
    if (!v.pass) ++failed;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
