#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "coexist/scenario.hpp"
#include "test_support.hpp"

using namespace coexist::scenario;
using coexist::spectral::Role;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json reference_doc() { return json::parse(read_file(coexist::test::scenario_path("reference_plan.json"))); }

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / fs::path("coexist_scenario_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& contents) const {
    const auto p = path_ / name;
    std::ofstream(p) << contents;
    return p.string();
  }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

ScenarioError::Kind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ScenarioError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ScenarioError";
  return ScenarioError::Kind::kParse;
}

}  // namespace

TEST(Load, ReferencePlanIsClean) {
  const auto s = load_scenario(coexist::test::scenario_path("reference_plan.json"));
  EXPECT_EQ(s.quantum_channel().role, Role::kQuantum);
  EXPECT_NEAR(s.quantum_channel().wavelength().nm(), 1270.0, 1e-3);
  EXPECT_TRUE(coexist::spectral::validate_plan(s.plan).empty());
}

TEST(Load, QuantumAt1310ListsTheCeilingRule) {
  auto doc = reference_doc();
  for (auto& ch : doc["plan"]["channels"]) {
    if (ch["role"] == "quantum") ch["center_thz"] = coexist::spectral::quantize_thz(299792.458 / 1310.0);
  }
  TempDir dir;
  const auto path = dir.file("moved.json", doc.dump());
  try {
    load_scenario(path);
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.kind(), ScenarioError::Kind::kPlan);
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0].rule, "quantum-above-1290-with-amplified-classical");
    EXPECT_NE(std::string(e.what()).find("quantum-above-1290-with-amplified-classical"), std::string::npos);
  }
}

TEST(Load, EmptyFileIsPositionedParseError) {
  TempDir dir;
  const auto path = dir.file("empty.json", "");
  try {
    load_scenario(path);
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.kind(), ScenarioError::Kind::kParse);
    EXPECT_NE(std::string(e.what()).find("line 1, column 1"), std::string::npos) << e.what();
  }
}

TEST(Load, ParseErrorPosition) {
  try {
    parse_document("{\n  \"plan\": {\n    \"channels\": [,]\n  }\n}");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3, column 18"), std::string::npos) << e.what();
  }
}

TEST(Load, MissingFileAndSchemaErrors) {
  EXPECT_EQ(kind_of([] { load_scenario("/nonexistent/scenario.json"); }), ScenarioError::Kind::kParse);
  EXPECT_EQ(kind_of([] { parse_scenario(json::object()); }), ScenarioError::Kind::kSchema);
  EXPECT_EQ(kind_of([] { parse_scenario(json::array()); }), ScenarioError::Kind::kSchema);
  auto doc = reference_doc();
  doc["environment"] = {{"temperature_k", 500}};
  EXPECT_EQ(kind_of([&] { parse_scenario(doc); }), ScenarioError::Kind::kSchema);
  doc = reference_doc();
  doc["link"]["elements"][0]["lenght_km"] = 5;
  try {
    parse_scenario(doc);
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("link.elements[0].lenght_km: unknown field"), std::string::npos) << e.what();
  }
  doc = reference_doc();
  doc["quantum"]["channel_index"] = 0;
  EXPECT_EQ(kind_of([&] { parse_scenario(doc); }), ScenarioError::Kind::kSchema);
  doc = reference_doc();
  doc["timesync"] = {{"rng", "mt19937"}};
  EXPECT_EQ(kind_of([&] { parse_scenario(doc); }), ScenarioError::Kind::kSchema);
}

TEST(Defaults, FilledAndEchoed) {
  const json doc = {{"plan",
                     {{"channels",
                       {{{"center_thz", 193.414489}, {"width_ghz", 50}, {"role", "classical"}, {"launch_power_dbm", 0}},
                        {{"center_thz", 236.057053}, {"width_ghz", 100}, {"role", "quantum"}}}}}}};
  const auto s = parse_scenario(doc);
  EXPECT_EQ(s.link.total_length_km(), 50.0);
  EXPECT_EQ(s.environment.kelvin(), 293.0);
  EXPECT_EQ(s.detector.gate_rate_hz, 1e8);
  EXPECT_FALSE(s.signal_rate_pps);
  const json echo = to_json(s);
  for (const char* key : {"plan", "link", "detector", "environment", "profiles", "raman", "quantum", "timesync",
                          "sensing"}) {
    EXPECT_TRUE(echo.contains(key)) << key;
  }
  EXPECT_EQ(echo["timesync"]["rng"], "xoshiro256**");
  EXPECT_EQ(echo["raman"]["k_spont"], 9.5e-10);
  EXPECT_EQ(echo["sensing"]["events"].size(), 1u);
}

TEST(Defaults, EchoReparsesToTheSameScenario) {
  for (const char* name : {"reference_plan.json", "desk_scenario.json"}) {
    const auto s = load_scenario(coexist::test::scenario_path(name));
    const json echo = to_json(s);
    const auto again = parse_scenario(echo);
    EXPECT_EQ(to_json(again).dump(), echo.dump()) << name;
  }
}

TEST(Profiles, PrecedenceInlineCsvEnvDefault) {
  TempDir dir;
  dir.file("gain.csv", "shift_thz,gain_per_w_km\n0,0\n10,0.5\n20,0.1\n30,0\n");
  dir.file("raman_gain.csv", "shift_thz,gain_per_w_km\n0,0\n10,0.7\n20,0.1\n30,0\n");
  const auto def = coexist::raman::RamanGainProfile::default_profile();

  EXPECT_EQ(resolve_raman_profile(json::object()).points(), def.points());

  ::setenv(kProfileDirEnv, dir.str().c_str(), 1);
  EXPECT_DOUBLE_EQ(coexist::raman::gain_at_shift(resolve_raman_profile(json::object()), 10.0), 0.7);
  const json csv = {{"raman_gain_csv", "gain.csv"}};
  EXPECT_DOUBLE_EQ(coexist::raman::gain_at_shift(resolve_raman_profile(csv, dir.str()), 10.0), 0.5);
  const json both = {{"raman_gain_csv", "gain.csv"}, {"raman_gain", {{0, 0}, {10, 0.9}, {20, 0.1}, {30, 0}}}};
  EXPECT_DOUBLE_EQ(coexist::raman::gain_at_shift(resolve_raman_profile(both, dir.str()), 10.0), 0.9);
  ::unsetenv(kProfileDirEnv);

  EXPECT_EQ(resolve_attenuation(json::object()), coexist::linkbudget::AttenuationProfile::default_profile());
  const json inline_att = {{"attenuation", {{1260, 1.0}, {1400, 0.5}, {1620, 0.25}}}};
  EXPECT_DOUBLE_EQ(resolve_attenuation(inline_att).loss_at(coexist::spectral::Wavelength::from_nm(1400)), 0.5);
}

TEST(Sections, TimesyncAndSensing) {
  const auto t = timesync_from_json(json{{"offset_ps", -7}, {"granularity_ps", 8}, {"rounds", 3}});
  EXPECT_EQ(t.clock.offset, -7);
  EXPECT_EQ(t.clock.granularity, 8);
  EXPECT_EQ(t.rounds, 3u);
  EXPECT_EQ(t.delays.forward, 250'000'000);
  EXPECT_THROW(timesync_from_json(json{{"granularity_ps", 0}}), std::invalid_argument);
  EXPECT_THROW(timesync_from_json(json{{"rounds", 1.5}}), std::invalid_argument);

  const auto s = sensing_from_json(
      json{{"events", {{{"start_s", 1}, {"duration_s", 0.5}, {"amplitude_um", 0.1}, {"shape", "sinusoid"},
                        {"frequency_hz", 20}}}}});
  ASSERT_EQ(s.events.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<coexist::sensing::Sinusoid>(s.events[0].shape));
  EXPECT_THROW(sensing_from_json(json{{"window", 1}}), std::invalid_argument);
  EXPECT_THROW(sensing_from_json(json{{"events", {{{"start_s", 1}, {"duration_s", 1}, {"amplitude_um", 1},
                                                    {"shape", "square"}}}}}),
               std::invalid_argument);
}
