#include "coexist/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "coexist/constants.hpp"
#include "coexist/linkbudget.hpp"
#include "coexist/raman.hpp"
#include "coexist/scenario.hpp"
#include "coexist/sensing.hpp"
#include "coexist/spectral.hpp"
#include "coexist/timesync.hpp"

namespace coexist::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { kJson, kCsv, kBoth };

struct Artifact {
  std::string filename;
  std::string bytes;
};

struct Output {
  std::string stem;
  json report;
  std::string csv;
  std::vector<Artifact> extras;
  std::string summary;
  int exit_code = kOk;
};

struct Globals {
  std::string out_dir;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::string sweep;
};

Format parse_format(const std::string& text, Format fallback) {
  if (text.empty()) return fallback;
  if (text == "json") return Format::kJson;
  if (text == "csv") return Format::kCsv;
  if (text == "both") return Format::kBoth;
  throw UsageError(fmt::format("--format must be json, csv or both, got '{}'", text));
}

json envelope(const std::string& command, const std::string& digest, json effective, json result) {
  return json{{"tool", "coexist-sim"},
              {"version", kVersion},
              {"command", command},
              {"scenario_digest", "sha256:" + digest},
              {"effective", std::move(effective)},
              {"result", std::move(result)}};
}

std::string csv_quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

struct LoadedScenario {
  scenario::Scenario scenario;
  std::string digest;
};

std::string base_dir_of(const std::string& path) {
  const auto dir = fs::path(path).parent_path().string();
  return dir.empty() ? "." : dir;
}

LoadedScenario load(const std::string& path) {
  std::string text;
  try {
    text = scenario::read_file(path);
  } catch (const std::exception& e) {
    throw scenario::ScenarioError(scenario::ScenarioError::Kind::kParse, e.what());
  }
  auto s = scenario::load_scenario(path);
  return {std::move(s), sha256_hex(text)};
}

// ---- sweeps ---------------------------------------------------------------

struct Sweep {
  std::string key;
  json::json_pointer pointer;
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;

  double value(std::size_t i) const {
    if (steps == 1) return start;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
};

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--sweep expects KEY=START:STOP:STEPS");
  Sweep s;
  s.key = text.substr(0, eq);
  std::string pointer;
  std::stringstream keys(s.key);
  for (std::string part; std::getline(keys, part, '.');) pointer += "/" + part;
  s.pointer = json::json_pointer(pointer);
  const std::string range = text.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = range.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) throw UsageError("--sweep expects KEY=START:STOP:STEPS");
  try {
    std::size_t used = 0;
    s.start = std::stod(range.substr(0, c1));
    s.stop = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
    const long steps = std::stol(range.substr(c2 + 1), &used);
    if (steps < 1 || used != range.size() - c2 - 1) throw UsageError("--sweep STEPS must be a positive integer");
    s.steps = static_cast<std::size_t>(steps);
  } catch (const std::logic_error&) {
    throw UsageError(fmt::format("--sweep range '{}' is not START:STOP:STEPS", range));
  }
  return s;
}

json apply_sweep(const json& doc, const Sweep& sweep, double value) {
  json variant = doc;
  if (!variant.contains(sweep.pointer.parent_pointer())) {
    throw UsageError(fmt::format("--sweep key '{}' does not name a field in the scenario", sweep.key));
  }
  variant[sweep.pointer] = value;
  return variant;
}

// Evaluates `fn` for every sweep point on a bounded pool; results keep sweep order.
template <typename Result>
std::vector<Result> run_sweep(const Sweep& sweep, const std::function<Result(std::size_t)>& fn) {
  std::vector<Result> results(sweep.steps);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < sweep.steps; begin += workers) {
    const std::size_t end = std::min(sweep.steps, begin + workers);
    std::vector<std::future<Result>> batch;
    for (std::size_t i = begin; i < end; ++i) batch.push_back(std::async(std::launch::async, fn, i));
    for (std::size_t i = begin; i < end; ++i) results[i] = batch[i - begin].get();
  }
  return results;
}

// ---- noise computations ----------------------------------------------------

struct Computation {
  json result;
  std::string csv_header;
  std::vector<std::string> csv_rows;
  std::string summary;
};

Computation compute_raman(const scenario::Scenario& s) {
  const auto& q = s.quantum_channel();
  const double length = s.link.total_length_km();
  const double probe_loss = s.attenuation.loss_at(q.wavelength());
  Computation c;
  c.csv_header = "index,center_thz,shift_thz,rate_pps";
  json channels = json::array();
  double total = 0.0;
  for (std::size_t i = 0; i < s.plan.channels.size(); ++i) {
    const auto& ch = s.plan.channels[i];
    if (ch.role == spectral::Role::kQuantum) continue;
    const raman::ScatterGeometry geometry{s.raman.direction, length, s.attenuation.loss_at(ch.wavelength()), probe_loss};
    const double rate = raman::spontaneous_rate(ch, q.wavelength(), q.width_ghz, s.raman_profile, geometry,
                                                s.environment, s.raman.options);
    const double shift = spectral::quantize_thz(q.center.thz() - ch.center.thz());
    total += rate;
    channels.push_back({{"index", i}, {"center_thz", spectral::quantize_thz(ch.center.thz())},
                        {"shift_thz", shift}, {"rate_pps", rate}});
    c.csv_rows.push_back(fmt::format("{},{},{},{}", i, spectral::quantize_thz(ch.center.thz()), shift, rate));
  }
  c.result = json{{"quantum_center_thz", spectral::quantize_thz(q.center.thz())},
                  {"filter_width_ghz", q.width_ghz},
                  {"fiber_length_km", length},
                  {"direction", std::string(raman::to_string(s.raman.direction))},
                  {"temperature_k", s.environment.kelvin()},
                  {"channels", std::move(channels)},
                  {"total_rate_pps", total}};
  c.summary = fmt::format("Raman noise into {:.3f} nm: {:.6g} photons/s from {} carrier(s)",
                          q.wavelength().nm(), total, c.csv_rows.size());
  return c;
}

Computation compute_budget(const scenario::Scenario& s) {
  if (!s.signal_rate_pps) throw UsageError("quantum.signal_rate_pps: required for a noise budget");
  const auto& q = s.quantum_channel();
  const auto budget = linkbudget::total_budget(s.link, s.plan, q, s.detector, s.raman_profile, s.environment,
                                               *s.signal_rate_pps, s.raman.options);
  Computation c;
  c.result = linkbudget::to_json(budget);
  c.result["quantum_center_thz"] = spectral::quantize_thz(q.center.thz());
  c.result["signal_rate_pps"] = *s.signal_rate_pps;
  c.csv_header = linkbudget::kBudgetCsvHeader;
  c.csv_rows.push_back(linkbudget::budget_csv_row(budget));
  c.summary = fmt::format("noise {:.6g} photons/s (Raman {:.6g}, ASE {:.6g}, leakage {:.6g}, dark {:.6g}), QBER {:.4f}",
                          budget.total_rate, budget.raman_rate, budget.ase_rate, budget.leakage_rate,
                          budget.dark_rate, budget.qber_estimate);
  return c;
}

std::string join_csv(const std::string& header, const std::vector<std::string>& rows) {
  std::string out = header + "\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

Output noise_command(const std::string& command, const std::string& stem, const std::string& path,
                     const Globals& g, Computation (*compute)(const scenario::Scenario&)) {
  auto base = load(path);
  Output o;
  o.stem = stem;
  if (g.sweep.empty()) {
    auto c = compute(base.scenario);
    o.report = envelope(command, base.digest, scenario::to_json(base.scenario), std::move(c.result));
    o.csv = join_csv(c.csv_header, c.csv_rows);
    o.summary = c.summary;
    return o;
  }

  const Sweep sweep = parse_sweep(g.sweep);
  const json doc = scenario::parse_document(scenario::read_file(path));
  const std::string dir = base_dir_of(path);
  using Point = std::optional<Computation>;
  std::vector<std::string> errors(sweep.steps);
  auto points = run_sweep<Point>(sweep, [&](std::size_t i) -> Point {
    try {
      auto s = scenario::parse_scenario(apply_sweep(doc, sweep, sweep.value(i)), dir);
      if (auto v = spectral::validate_plan(s.plan); !v.empty()) {
        throw scenario::ScenarioError(scenario::ScenarioError::Kind::kPlan,
                                      fmt::format("sweep point {}: channel plan has {} violation(s)", i, v.size()),
                                      std::move(v));
      }
      return compute(s);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      return std::nullopt;
    }
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i]) throw UsageError(fmt::format("--sweep {}={}: {}", sweep.key, sweep.value(i), errors[i]));
  }

  json rows = json::array();
  std::string header;
  std::vector<std::string> csv_rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = sweep.value(i);
    rows.push_back({{"index", i}, {"value", v}, {"result", points[i]->result}});
    header = "sweep_index,sweep_value," + points[i]->csv_header;
    for (const auto& r : points[i]->csv_rows) csv_rows.push_back(fmt::format("{},{},{}", i, v, r));
  }
  o.report = envelope(command, base.digest, scenario::to_json(base.scenario),
                      json{{"sweep", {{"key", sweep.key}, {"start", sweep.start}, {"stop", sweep.stop},
                                      {"steps", sweep.steps}, {"points", std::move(rows)}}}});
  o.csv = join_csv(header, csv_rows);
  o.summary = fmt::format("{} sweep points over {}", sweep.steps, sweep.key);
  return o;
}

// ---- commands --------------------------------------------------------------

Output plan_validate(const std::string& path) {
  const std::string text = [&] {
    try {
      return scenario::read_file(path);
    } catch (const std::exception& e) {
      throw scenario::ScenarioError(scenario::ScenarioError::Kind::kParse, e.what());
    }
  }();
  const auto s = scenario::parse_scenario(scenario::parse_document(text), base_dir_of(path));
  const auto violations = spectral::validate_plan(s.plan);
  json list = json::array();
  std::string csv = "rule,channels,message\n";
  for (const auto& v : violations) {
    list.push_back(spectral::to_json(v));
    std::string chans;
    for (std::size_t i = 0; i < v.channels.size(); ++i) chans += (i ? " " : "") + std::to_string(v.channels[i]);
    csv += fmt::format("{},{},{}\n", v.rule, chans, csv_quote(v.message));
  }
  Output o;
  o.stem = "validate";
  o.report = envelope("plan validate", sha256_hex(text), scenario::to_json(s),
                      json{{"violation_count", violations.size()}, {"violations", std::move(list)}});
  o.csv = std::move(csv);
  o.summary = fmt::format("{} violations", violations.size());
  for (const auto& v : violations) o.summary += fmt::format("\n  [{}] {}", v.rule, v.message);
  o.exit_code = violations.empty() ? kOk : kViolations;
  return o;
}

struct CapacityArgs {
  double lambda_min_nm = 0.0;
  double lambda_max_nm = 0.0;
  double spacing_ghz = 100.0;
  double width_ghz = 0.0;
  std::string anchor = "band-edge";
};

Output plan_capacity(const CapacityArgs& a) {
  if (a.anchor != "band-edge" && a.anchor != "itu") throw UsageError("--anchor must be band-edge or itu");
  const spectral::Band band("custom", spectral::Wavelength::from_nm(a.lambda_min_nm),
                            spectral::Wavelength::from_nm(a.lambda_max_nm));
  const auto anchor = a.anchor == "itu" ? spectral::GridAnchor::kItu : spectral::GridAnchor::kBandEdge;
  const std::size_t capacity = spectral::grid_capacity(band, a.spacing_ghz, a.width_ghz, anchor);
  json centers = json::array();
  std::string csv = "index,center_thz\n";
  const auto grid = spectral::grid_centers(band, a.spacing_ghz, a.width_ghz, anchor);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    centers.push_back(spectral::quantize_thz(grid[i].thz()));
    csv += fmt::format("{},{}\n", i, spectral::quantize_thz(grid[i].thz()));
  }
  const json effective{{"lambda_min_nm", a.lambda_min_nm}, {"lambda_max_nm", a.lambda_max_nm},
                       {"spacing_ghz", a.spacing_ghz},     {"width_ghz", a.width_ghz},
                       {"anchor", a.anchor}};
  Output o;
  o.stem = "capacity";
  o.report = envelope("plan capacity", sha256_hex(effective.dump()), effective,
                      json{{"capacity", capacity}, {"span_ghz", band.span_ghz()}, {"centers_thz", std::move(centers)}});
  o.csv = std::move(csv);
  o.summary = fmt::format("{} channels fit {}-{} nm at {} GHz spacing ({} GHz wide)", capacity, a.lambda_min_nm,
                          a.lambda_max_nm, a.spacing_ghz, a.width_ghz);
  return o;
}

Output timesync_simulate(const std::string& path, std::optional<std::size_t> rounds, const Globals& g) {
  scenario::TimesyncSettings t;
  std::string digest;
  if (!path.empty()) {
    auto loaded = load(path);
    t = loaded.scenario.timesync;
    digest = loaded.digest;
  }
  if (rounds) {
    if (*rounds == 0) throw UsageError("--rounds must be at least 1");
    t.rounds = *rounds;
  }
  if (g.seed) t.seed = *g.seed;
  const json effective = scenario::to_json(t);
  if (digest.empty()) digest = sha256_hex(effective.dump());

  const auto session = timesync::simulate_session(t.clock, t.delays, t.rounds, t.seed, t.turnaround_ps);
  std::ostringstream csv;
  timesync::write_rounds_csv(csv, session.rounds);
  Output o;
  o.stem = "timesync";
  o.report = envelope("timesync simulate", digest, effective,
                      json{{"rounds", t.rounds},
                           {"mean_offset_error_ps", session.stats.mean_offset_error_ps},
                           {"std_offset_error_ps", session.stats.std_offset_error_ps},
                           {"asymmetry_error_ps", timesync::asymmetry_error(t.delays)}});
  o.csv = csv.str();
  o.summary = fmt::format("{} rounds: offset error mean {:.3f} ps, std {:.3f} ps", t.rounds,
                          session.stats.mean_offset_error_ps, session.stats.std_offset_error_ps);
  return o;
}

Output sense_synth(const std::string& path, const std::string& trace_format, const Globals& g) {
  if (trace_format != "csv" && trace_format != "binary") throw UsageError("--trace-format must be csv or binary");
  scenario::SensingSettings settings = scenario::SensingSettings::defaults();
  double fiber_km = 50.0;
  auto attenuation = linkbudget::AttenuationProfile::default_profile();
  std::string digest;
  if (!path.empty()) {
    auto loaded = load(path);
    settings = loaded.scenario.sensing;
    fiber_km = loaded.scenario.link.total_length_km();
    attenuation = loaded.scenario.attenuation;
    digest = loaded.digest;
  }
  if (g.seed) settings.seed = *g.seed;
  json effective = scenario::to_json(settings);
  effective["fiber_length_km"] = fiber_km;
  if (digest.empty()) digest = sha256_hex(effective.dump());

  const linkbudget::FiberSpan fiber{fiber_km, attenuation};
  const auto trace = sensing::synthesize_trace(settings.events, settings.duration_s, settings.sample_rate_hz,
                                               settings.noise_sigma_rad, fiber, settings.lambda, settings.seed,
                                               settings.group_index);
  json events = json::array();
  for (const auto& e : settings.events) {
    auto j = scenario::to_json(e);
    j["snr"] = sensing::event_snr(e, settings.sample_rate_hz, settings.noise_sigma_rad, settings.lambda,
                                  settings.group_index);
    events.push_back(std::move(j));
  }
  Output o;
  o.stem = "trace";
  o.report = envelope("sense synth", digest, effective,
                      json{{"samples", trace.samples.size()},
                           {"sample_rate_hz", trace.sample_rate_hz},
                           {"events", std::move(events)},
                           {"trace_format", trace_format}});
  std::ostringstream bytes;
  if (trace_format == "csv") {
    sensing::write_trace_csv(bytes, trace);
    o.csv = bytes.str();
  } else {
    sensing::write_trace_binary(bytes, trace);
    o.extras.push_back({"trace.bin", bytes.str()});
  }
  o.summary = fmt::format("synthesized {} samples at {} Hz with {} event(s)", trace.samples.size(),
                          trace.sample_rate_hz, settings.events.size());
  return o;
}

Output sense_detect(const std::string& path, std::size_t window, double threshold) {
  const std::string bytes = scenario::read_file(path);
  const auto trace = sensing::load_trace(path);
  const auto detections = sensing::detect_events(trace, window, threshold);
  json list = json::array();
  std::string csv = "time_s,score\n";
  for (const auto& d : detections) {
    list.push_back({{"time_s", d.time_s}, {"score", d.score}});
    csv += fmt::format("{},{}\n", d.time_s, d.score);
  }
  const json effective{{"window", window},
                       {"threshold_sigma", threshold},
                       {"sample_rate_hz", trace.sample_rate_hz},
                       {"samples", trace.samples.size()}};
  Output o;
  o.stem = "detect";
  o.report = envelope("sense detect", sha256_hex(bytes), effective,
                      json{{"count", detections.size()}, {"detections", std::move(list)}});
  o.csv = std::move(csv);
  o.summary = fmt::format("{} event(s) detected", detections.size());
  for (const auto& d : detections) o.summary += fmt::format("\n  t = {:.4f} s, score {:.2f}", d.time_s, d.score);
  return o;
}

Output profile_dump(const std::string& kind) {
  const json none = json::object();
  std::ostringstream csv;
  json points = json::array();
  if (kind == "raman") {
    const auto p = scenario::resolve_raman_profile(none);
    raman::write_profile_csv(csv, p);
    for (const auto& pt : p.points()) points.push_back(json::array({pt.shift_thz, pt.gain_per_w_km}));
  } else if (kind == "attenuation") {
    const auto p = scenario::resolve_attenuation(none);
    linkbudget::write_attenuation_csv(csv, p);
    points = linkbudget::to_json(p);
  } else {
    throw UsageError("--kind must be raman or attenuation");
  }
  const json effective{{"kind", kind}};
  Output o;
  o.stem = kind == "raman" ? "raman_gain" : "attenuation";
  o.report = envelope("profile dump", sha256_hex(csv.str()), effective, json{{"points", std::move(points)}});
  o.csv = csv.str();
  o.summary = fmt::format("{} profile with {} points", kind, o.report["result"]["points"].size());
  return o;
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void emit(const Output& o, Format format, const Globals& g, std::ostream& out, std::ostream& err) {
  const bool want_json = format != Format::kCsv;
  const bool want_csv = format != Format::kJson && !o.csv.empty();
  const std::string report = o.report.dump(2) + "\n";
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    const fs::path dir(g.out_dir);
    if (want_json) write_file(dir / (o.stem + ".json"), report);
    if (want_csv) write_file(dir / (o.stem + ".csv"), o.csv);
    for (const auto& a : o.extras) write_file(dir / a.filename, a.bytes);
    out << o.summary << "\n";
    return;
  }
  if (want_json) out << report;
  if (want_csv) out << o.csv;
  for (const auto& a : o.extras) out << a.bytes;
  err << o.summary << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planner and simulator for fibers shared by classical, time/frequency and quantum channels",
               "coexist-sim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Globals g;
  app.add_option("--out", g.out_dir, "Directory for report files (stdout when omitted)");
  app.add_option("--format", g.format, "json|csv|both (default depends on the command)");
  app.add_option("--seed", g.seed, "Override the scenario's RNG seed");
  app.add_option("--sweep", g.sweep, "KEY=START:STOP:STEPS over a scenario field (noise commands)");

  auto* plan = app.add_subcommand("plan", "Channel plans");
  plan->require_subcommand(1);
  std::string scenario_path;
  auto* validate = plan->add_subcommand("validate", "Check a scenario's channel plan");
  validate->add_option("scenario", scenario_path)->required();
  CapacityArgs cap;
  auto* capacity = plan->add_subcommand("capacity", "Channels that fit a band");
  capacity->add_option("--lambda-min", cap.lambda_min_nm, "Band short edge (nm)")->required();
  capacity->add_option("--lambda-max", cap.lambda_max_nm, "Band long edge (nm)")->required();
  capacity->add_option("--spacing", cap.spacing_ghz, "Grid spacing (GHz)")->capture_default_str();
  capacity->add_option("--width", cap.width_ghz, "Channel width (GHz)")->capture_default_str();
  capacity->add_option("--anchor", cap.anchor, "band-edge|itu")->capture_default_str();

  auto* noise = app.add_subcommand("noise", "Noise into the quantum channel");
  noise->require_subcommand(1);
  auto* noise_raman = noise->add_subcommand("raman", "Spontaneous Raman rate per classical carrier");
  noise_raman->add_option("scenario", scenario_path)->required();
  auto* noise_budget = noise->add_subcommand("budget", "Full noise budget and QBER estimate");
  noise_budget->add_option("scenario", scenario_path)->required();

  auto* ts = app.add_subcommand("timesync", "Two-way time transfer");
  ts->require_subcommand(1);
  std::optional<std::size_t> rounds;
  auto* simulate = ts->add_subcommand("simulate", "Simulate a session of exchanges");
  simulate->add_option("scenario", scenario_path);
  simulate->add_option("--rounds", rounds, "Number of exchanges");

  auto* sense = app.add_subcommand("sense", "Vibration sensing");
  sense->require_subcommand(1);
  std::string trace_format = "csv";
  auto* synth = sense->add_subcommand("synth", "Synthesize a phase trace");
  synth->add_option("scenario", scenario_path);
  synth->add_option("--trace-format", trace_format, "csv|binary")->capture_default_str();
  std::string trace_path;
  std::size_t window = 16;
  double threshold = 5.0;
  auto* detect = sense->add_subcommand("detect", "Detect disturbances in a phase trace");
  detect->add_option("trace", trace_path)->required();
  detect->add_option("--window", window, "Window length in samples")->capture_default_str();
  detect->add_option("--threshold", threshold, "Score threshold (multiples of the median)")->capture_default_str();

  auto* profile = app.add_subcommand("profile", "Built-in data tables");
  profile->require_subcommand(1);
  std::string kind = "raman";
  auto* dump = profile->add_subcommand("dump", "Print the effective Raman gain or attenuation table");
  dump->add_option("--kind", kind, "raman|attenuation")->capture_default_str();

  for (auto* sub : {plan, validate, capacity, noise, noise_raman, noise_budget, ts, simulate, sense, synth, detect,
                    profile, dump}) {
    sub->fallthrough();
  }

  std::vector<const char*> argv{"coexist-sim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (!g.sweep.empty() && !noise->parsed()) throw UsageError("--sweep applies to noise raman and noise budget");
    Output o;
    Format fallback = Format::kJson;
    if (validate->parsed()) {
      o = plan_validate(scenario_path);
    } else if (capacity->parsed()) {
      o = plan_capacity(cap);
    } else if (noise_raman->parsed()) {
      o = noise_command("noise raman", "raman", scenario_path, g, compute_raman);
    } else if (noise_budget->parsed()) {
      o = noise_command("noise budget", "budget", scenario_path, g, compute_budget);
    } else if (simulate->parsed()) {
      o = timesync_simulate(scenario_path, rounds, g);
      fallback = Format::kCsv;
    } else if (synth->parsed()) {
      o = sense_synth(scenario_path, trace_format, g);
      fallback = Format::kCsv;
    } else if (detect->parsed()) {
      o = sense_detect(trace_path, window, threshold);
    } else if (dump->parsed()) {
      o = profile_dump(kind);
      fallback = Format::kCsv;
    }
    emit(o, parse_format(g.format, fallback), g, out, err);
    return o.exit_code;
  } catch (const scenario::ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == scenario::ScenarioError::Kind::kPlan ? kViolations : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace coexist::cli
