#include "coexist/scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json_util.hpp"

namespace coexist::scenario {

using nlohmann::json;
using namespace detail;
namespace fs = std::filesystem;

SensingSettings SensingSettings::defaults() {
  SensingSettings s;
  constexpr double kWidth = 0.005;
  const double amplitude =
      sensing::pulse_amplitude_for_snr(10.0, kWidth, s.sample_rate_hz, s.noise_sigma_rad, s.lambda, s.group_index);
  s.events.push_back({0.0, 5.0, kWidth, amplitude, sensing::GaussianPulse{}});
  return s;
}

const spectral::Channel& Scenario::quantum_channel() const {
  if (quantum_index) {
    if (*quantum_index >= plan.channels.size() || plan.channels[*quantum_index].role != spectral::Role::kQuantum) {
      throw std::invalid_argument(fmt::format("quantum.channel_index {} is not a quantum channel", *quantum_index));
    }
    return plan.channels[*quantum_index];
  }
  for (const auto& c : plan.channels) {
    if (c.role == spectral::Role::kQuantum) return c;
  }
  throw std::invalid_argument("the plan has no quantum channel");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw ScenarioError(ScenarioError::Kind::kParse, fmt::format("line {}, column {}: {}", line, column, what));
  }
}

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base_dir) / p).string();
}

std::optional<std::string> env_profile(const char* file) {
  const char* dir = std::getenv(kProfileDirEnv);
  if (!dir || !*dir) return std::nullopt;
  const fs::path p = fs::path(dir) / file;
  if (!fs::exists(p)) return std::nullopt;
  return p.string();
}

}  // namespace

raman::RamanGainProfile resolve_raman_profile(const json& profiles, const std::string& base_dir) {
  const std::string path = "profiles";
  expect_keys(profiles, path,
              {"raman_reference_pump_nm", "raman_gain", "raman_gain_csv", "attenuation", "attenuation_csv"});
  const double ref_nm = number_or(profiles, "raman_reference_pump_nm", path, 1550.0);
  const auto ref = at_path(join_path(path, "raman_reference_pump_nm"), [&] { return spectral::Wavelength::from_nm(ref_nm); });
  if (profiles.contains("raman_gain")) {
    const auto& pts = array(profiles, "raman_gain", path);
    std::vector<raman::GainPoint> points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string p = index_path(join_path(path, "raman_gain"), i);
      if (!pts[i].is_array() || pts[i].size() != 2) schema_error(p, "expected [shift_thz, gain_per_w_km]");
      points.push_back({as_number(pts[i][0], p + "[0]"), as_number(pts[i][1], p + "[1]")});
    }
    return at_path(join_path(path, "raman_gain"), [&] { return raman::RamanGainProfile(ref, std::move(points)); });
  }
  if (profiles.contains("raman_gain_csv")) {
    const std::string file = resolve(base_dir, string(profiles, "raman_gain_csv", path));
    return at_path(join_path(path, "raman_gain_csv"), [&] { return raman::load_profile_csv(file, ref); });
  }
  if (auto file = env_profile("raman_gain.csv")) {
    return at_path(kProfileDirEnv, [&] { return raman::load_profile_csv(*file, ref); });
  }
  return raman::RamanGainProfile::default_profile();
}

linkbudget::AttenuationProfile resolve_attenuation(const json& profiles, const std::string& base_dir) {
  const std::string path = "profiles";
  if (profiles.contains("attenuation")) {
    return linkbudget::attenuation_from_json(profiles["attenuation"], join_path(path, "attenuation"));
  }
  if (profiles.contains("attenuation_csv")) {
    const std::string file = resolve(base_dir, string(profiles, "attenuation_csv", path));
    return at_path(join_path(path, "attenuation_csv"), [&] { return linkbudget::load_attenuation_csv(file); });
  }
  if (auto file = env_profile("attenuation.csv")) {
    return at_path(kProfileDirEnv, [&] { return linkbudget::load_attenuation_csv(*file); });
  }
  return linkbudget::AttenuationProfile::default_profile();
}

namespace {

linkbudget::LinkModel default_link(const linkbudget::AttenuationProfile& attenuation) {
  return linkbudget::LinkModel({linkbudget::FiberSpan{50.0, attenuation}});
}

constexpr linkbudget::DetectorModel kDefaultDetector{1e8, 1e-9, 0.2, 100.0};

sensing::DisturbanceEvent event_from_json(const json& j, const std::string& path) {
  sensing::DisturbanceEvent e;
  expect_keys(j, path, {"position_km", "start_s", "duration_s", "amplitude_um", "shape", "frequency_hz"});
  e.position_km = number_or(j, "position_km", path, 0.0);
  e.start_s = number(j, "start_s", path);
  e.duration_s = number(j, "duration_s", path);
  e.amplitude_um = number(j, "amplitude_um", path);
  const std::string shape = string_or(j, "shape", path, "gaussian_pulse");
  if (shape == "gaussian_pulse") {
    e.shape = sensing::GaussianPulse{};
  } else if (shape == "sinusoid") {
    e.shape = sensing::Sinusoid{number(j, "frequency_hz", path)};
  } else {
    schema_error(join_path(path, "shape"), fmt::format("unknown shape '{}' (gaussian_pulse, sinusoid)", shape));
  }
  if (!(e.duration_s > 0.0)) schema_error(join_path(path, "duration_s"), "must be positive");
  if (!(e.amplitude_um >= 0.0)) schema_error(join_path(path, "amplitude_um"), "must be non-negative");
  if (!(e.start_s >= 0.0)) schema_error(join_path(path, "start_s"), "must be non-negative");
  return e;
}

}  // namespace

namespace {

// Reports echo the generator name; accept it back but refuse any other.
void check_rng(const json& j, const std::string& path) {
  if (j.contains("rng") && string(j, "rng", path) != "xoshiro256**") {
    schema_error(join_path(path, "rng"), "only xoshiro256** is supported");
  }
}

}  // namespace

TimesyncSettings timesync_from_json(const json& j, const std::string& path) {
  TimesyncSettings t;
  expect_keys(j, path, {"offset_ps", "drift_ppb", "granularity_ps", "forward_ps", "backward_ps", "jitter_sigma_ps",
                        "rounds", "seed", "turnaround_ps", "rng"});
  check_rng(j, path);
  t.clock.offset = integer_or(j, "offset_ps", path, t.clock.offset);
  t.clock.drift_ppb = number_or(j, "drift_ppb", path, t.clock.drift_ppb);
  t.clock.granularity = integer_or(j, "granularity_ps", path, t.clock.granularity);
  t.delays.forward = integer_or(j, "forward_ps", path, t.delays.forward);
  t.delays.backward = integer_or(j, "backward_ps", path, t.delays.backward);
  t.delays.jitter_sigma_ps = number_or(j, "jitter_sigma_ps", path, t.delays.jitter_sigma_ps);
  t.rounds = unsigned_or(j, "rounds", path, t.rounds);
  t.seed = unsigned_or(j, "seed", path, t.seed);
  t.turnaround_ps = integer_or(j, "turnaround_ps", path, t.turnaround_ps);
  if (t.clock.granularity < 1) schema_error(join_path(path, "granularity_ps"), "must be >= 1");
  if (t.delays.forward <= 0) schema_error(join_path(path, "forward_ps"), "must be positive");
  if (t.delays.backward <= 0) schema_error(join_path(path, "backward_ps"), "must be positive");
  if (!(t.delays.jitter_sigma_ps >= 0.0)) schema_error(join_path(path, "jitter_sigma_ps"), "must be non-negative");
  if (t.rounds == 0) schema_error(join_path(path, "rounds"), "must be at least 1");
  return t;
}

SensingSettings sensing_from_json(const json& j, const std::string& path) {
  expect_keys(j, path, {"events", "duration_s", "sample_rate_hz", "noise_sigma_rad", "seed", "lambda_nm", "group_index",
                        "window", "threshold_sigma", "rng"});
  check_rng(j, path);
  SensingSettings s = SensingSettings::defaults();
  if (j.contains("events")) {
    s.events.clear();
    const auto& evs = array(j, "events", path);
    for (std::size_t i = 0; i < evs.size(); ++i) {
      s.events.push_back(event_from_json(evs[i], index_path(join_path(path, "events"), i)));
    }
  }
  s.duration_s = number_or(j, "duration_s", path, s.duration_s);
  s.sample_rate_hz = number_or(j, "sample_rate_hz", path, s.sample_rate_hz);
  s.noise_sigma_rad = number_or(j, "noise_sigma_rad", path, s.noise_sigma_rad);
  s.seed = unsigned_or(j, "seed", path, s.seed);
  const double nm = number_or(j, "lambda_nm", path, s.lambda.nm());
  s.lambda = at_path(join_path(path, "lambda_nm"), [&] { return spectral::Wavelength::from_nm(nm); });
  s.group_index = number_or(j, "group_index", path, s.group_index);
  s.window = unsigned_or(j, "window", path, s.window);
  s.threshold_sigma = number_or(j, "threshold_sigma", path, s.threshold_sigma);
  if (!(s.duration_s > 0.0)) schema_error(join_path(path, "duration_s"), "must be positive");
  if (!(s.sample_rate_hz > 0.0)) schema_error(join_path(path, "sample_rate_hz"), "must be positive");
  if (!(s.noise_sigma_rad >= 0.0)) schema_error(join_path(path, "noise_sigma_rad"), "must be non-negative");
  if (!(s.group_index > 0.0)) schema_error(join_path(path, "group_index"), "must be positive");
  if (s.window < 2) schema_error(join_path(path, "window"), "must be at least 2");
  if (!(s.threshold_sigma > 0.0)) schema_error(join_path(path, "threshold_sigma"), "must be positive");
  return s;
}

Scenario parse_scenario(const json& doc, const std::string& base_dir) {
  try {
    if (!doc.is_object()) schema_error("$", "scenario must be a JSON object");
    expect_keys(doc, "$", {"plan", "link", "detector", "environment", "profiles", "raman", "quantum", "timesync",
                           "sensing"});
    static const json kEmpty = json::object();
    auto section = [&](const char* key) -> const json& {
      if (!doc.contains(key)) return kEmpty;
      if (!doc[key].is_object()) schema_error(key, "expected an object");
      return doc[key];
    };

    const json& profiles = section("profiles");
    auto raman_profile = resolve_raman_profile(profiles, base_dir);
    auto attenuation = resolve_attenuation(profiles, base_dir);

    auto plan = spectral::plan_from_json(require(doc, "plan", ""), "plan");
    auto link = doc.contains("link") ? linkbudget::link_from_json(doc["link"], attenuation, "link")
                                     : default_link(attenuation);
    auto detector = doc.contains("detector") ? linkbudget::detector_from_json(doc["detector"], "detector")
                                             : kDefaultDetector;
    const json& env = section("environment");
    expect_keys(env, "environment", {"temperature_k"});
    const double kelvin = number_or(env, "temperature_k", "environment", 293.0);
    auto environment = at_path("environment.temperature_k", [&] { return raman::ThermalEnvironment(kelvin); });

    RamanSettings raman;
    const json& rj = section("raman");
    expect_keys(rj, "raman", {"direction", "k_spont", "scale_with_pump_frequency"});
    raman.direction = at_path("raman.direction", [&] {
      return raman::direction_from_string(string_or(rj, "direction", "raman", "co_propagating"));
    });
    raman.options.k_spont = number_or(rj, "k_spont", "raman", raman.options.k_spont);
    raman.options.scale_with_pump_frequency =
        boolean_or(rj, "scale_with_pump_frequency", "raman", raman.options.scale_with_pump_frequency);
    if (!(raman.options.k_spont >= 0.0)) schema_error("raman.k_spont", "must be non-negative");

    const json& q = section("quantum");
    expect_keys(q, "quantum", {"channel_index", "signal_rate_pps"});
    std::optional<std::size_t> quantum_index;
    if (q.contains("channel_index")) quantum_index = unsigned_or(q, "channel_index", "quantum", 0);
    std::optional<double> signal_rate;
    if (q.contains("signal_rate_pps")) {
      signal_rate = number(q, "signal_rate_pps", "quantum");
      if (*signal_rate < 0.0) schema_error("quantum.signal_rate_pps", "must be non-negative");
    }

    Scenario s{std::move(plan),
               std::move(link),
               detector,
               environment,
               std::move(raman_profile),
               std::move(attenuation),
               raman,
               quantum_index,
               signal_rate,
               doc.contains("timesync") ? timesync_from_json(section("timesync")) : TimesyncSettings{},
               doc.contains("sensing") ? sensing_from_json(section("sensing")) : SensingSettings::defaults()};
    if (quantum_index) {
      at_path("quantum.channel_index", [&]() -> const spectral::Channel& { return s.quantum_channel(); });
    }
    return s;
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(ScenarioError::Kind::kSchema, e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ScenarioError(ScenarioError::Kind::kParse, e.what());
  }
  const json doc = parse_document(text);
  Scenario s = parse_scenario(doc, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
  auto violations = spectral::validate_plan(s.plan);
  if (!violations.empty()) {
    std::string what = fmt::format("{}: channel plan has {} violation(s)", path, violations.size());
    for (const auto& v : violations) what += fmt::format("\n  [{}] {}", v.rule, v.message);
    throw ScenarioError(ScenarioError::Kind::kPlan, what, std::move(violations));
  }
  return s;
}

json to_json(const sensing::DisturbanceEvent& e) {
  json j{{"position_km", e.position_km},
         {"start_s", e.start_s},
         {"duration_s", e.duration_s},
         {"amplitude_um", e.amplitude_um}};
  if (const auto* s = std::get_if<sensing::Sinusoid>(&e.shape)) {
    j["shape"] = "sinusoid";
    j["frequency_hz"] = s->frequency_hz;
  } else {
    j["shape"] = "gaussian_pulse";
  }
  return j;
}

json to_json(const TimesyncSettings& t) {
  return json{{"offset_ps", t.clock.offset},
              {"drift_ppb", t.clock.drift_ppb},
              {"granularity_ps", t.clock.granularity},
              {"forward_ps", t.delays.forward},
              {"backward_ps", t.delays.backward},
              {"jitter_sigma_ps", t.delays.jitter_sigma_ps},
              {"rounds", t.rounds},
              {"seed", t.seed},
              {"turnaround_ps", t.turnaround_ps},
              {"rng", "xoshiro256**"}};
}

json to_json(const SensingSettings& s) {
  json events = json::array();
  for (const auto& e : s.events) events.push_back(to_json(e));
  return json{{"events", std::move(events)},
              {"duration_s", s.duration_s},
              {"sample_rate_hz", s.sample_rate_hz},
              {"noise_sigma_rad", s.noise_sigma_rad},
              {"seed", s.seed},
              {"lambda_nm", s.lambda.nm()},
              {"group_index", s.group_index},
              {"window", s.window},
              {"threshold_sigma", s.threshold_sigma},
              {"rng", "xoshiro256**"}};
}

json to_json(const Scenario& s) {
  json gain = json::array();
  for (const auto& p : s.raman_profile.points()) gain.push_back(json::array({p.shift_thz, p.gain_per_w_km}));
  json quantum = json::object();
  if (s.quantum_index) quantum["channel_index"] = *s.quantum_index;
  if (s.signal_rate_pps) quantum["signal_rate_pps"] = *s.signal_rate_pps;
  return json{
      {"plan", spectral::to_json(s.plan)},
      {"link", linkbudget::to_json(s.link)},
      {"detector", linkbudget::to_json(s.detector)},
      {"environment", {{"temperature_k", s.environment.kelvin()}}},
      {"profiles",
       {{"raman_reference_pump_nm", s.raman_profile.reference_pump().nm()},
        {"raman_gain", std::move(gain)},
        {"attenuation", linkbudget::to_json(s.attenuation)}}},
      {"raman",
       {{"direction", std::string(raman::to_string(s.raman.direction))},
        {"k_spont", s.raman.options.k_spont},
        {"scale_with_pump_frequency", s.raman.options.scale_with_pump_frequency}}},
      {"quantum", std::move(quantum)},
      {"timesync", to_json(s.timesync)},
      {"sensing", to_json(s.sensing)},
  };
}

}  // namespace coexist::scenario
