#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "coexist/spectral.hpp"
#include "test_support.hpp"

using namespace coexist::spectral;
using coexist::test::Gen;

namespace {

Wavelength nm(double v) { return Wavelength::from_nm(v); }

Channel classical(double center_thz, double width_ghz, bool amplified = false) {
  return Channel{Frequency::from_thz(center_thz), width_ghz, Role::kClassical, 0.0, amplified};
}

Channel quantum_at(double lambda_nm, double width_ghz = 100.0) {
  return Channel{wl_to_freq(nm(lambda_nm)), width_ghz, Role::kQuantum, std::nullopt, false};
}

}  // namespace

TEST(Conversion, KnownWavelengths) {
  EXPECT_NEAR(wl_to_freq(nm(1550)).thz(), 193.4145, 1e-4);
  EXPECT_NEAR(wl_to_freq(nm(1320)).thz(), 227.1155, 1e-4);
  EXPECT_NEAR(freq_to_wl(Frequency::from_thz(193.4145)).nm(), 1550.0, 1e-3);
  EXPECT_NEAR(freq_to_wl(Frequency::from_thz(227.1155)).nm(), 1320.0, 1e-3);
  EXPECT_NEAR(freq_to_wl(Frequency::from_thz(299.79)).nm(), 1000.0, 0.01);
  EXPECT_NEAR(freq_to_wl(wl_to_freq(nm(1499))).nm(), 1499.0, 1e-9);
}

TEST(Conversion, RangeChecks) {
  EXPECT_THROW(Wavelength::from_nm(999.9), std::out_of_range);
  EXPECT_THROW(Wavelength::from_nm(2000.1), std::out_of_range);
  EXPECT_THROW(Wavelength::from_nm(std::nan("")), std::out_of_range);
  EXPECT_THROW(Frequency::from_thz(149.8), std::out_of_range);
  EXPECT_THROW(Frequency::from_thz(299.9), std::out_of_range);
  // 299.795 THz is a valid frequency but about 999.99 nm.
  EXPECT_THROW(freq_to_wl(Frequency::from_thz(299.795)), std::out_of_range);
  EXPECT_NO_THROW(freq_to_wl(Frequency::from_thz(149.9)));
}

TEST(Conversion, RoundTripProperty) {
  Gen g(11);
  for (int i = 0; i < 1000; ++i) {
    const double lambda = g.real(1000.0, 2000.0);
    const double back = freq_to_wl(wl_to_freq(nm(lambda))).nm();
    EXPECT_LE(std::abs(back - lambda) / lambda, 1e-9) << lambda;
  }
}

TEST(Conversion, PhotonEnergyAt1550) {
  EXPECT_NEAR(photon_energy(wl_to_freq(nm(1550))), 1.28158e-19, 1e-23);
}

TEST(Shift, OBandAgainstCBand) {
  EXPECT_NEAR(shift_between(nm(1550), nm(1320)), 33.70, 0.01);
  EXPECT_NEAR(shift_between(nm(1320), nm(1550)), -33.70, 0.01);
  EXPECT_EQ(shift_between(nm(1550), nm(1550)), 0.0);
}

TEST(Shift, ExactAntisymmetry) {
  Gen g(12);
  for (int i = 0; i < 1000; ++i) {
    const auto a = nm(g.real(1000.0, 2000.0));
    const auto b = nm(g.real(1000.0, 2000.0));
    EXPECT_EQ(shift_between(a, b), -shift_between(b, a));
  }
}

TEST(Band, EdgesAndSpan) {
  const Band b("t", nm(1540), nm(1546));
  EXPECT_NEAR(b.span_ghz(), 755.51, 0.01);
  EXPECT_LT(b.low_edge(), b.high_edge());
  EXPECT_TRUE(b.contains(wl_to_freq(nm(1543))));
  EXPECT_FALSE(b.contains(wl_to_freq(nm(1550))));
  EXPECT_THROW(Band("bad", nm(1546), nm(1540)), std::invalid_argument);
  EXPECT_THROW(Band("bad", nm(1546), nm(1546)), std::invalid_argument);
}

TEST(Grid, ReferenceChannelCounts) {
  EXPECT_EQ(grid_capacity(Band("a", nm(1540), nm(1546)), 100.0, 0.0), 8u);
  EXPECT_EQ(grid_capacity(Band("b", nm(1570), nm(1572)), 50.0, 50.0), 4u);
}

TEST(Grid, OneChannelAlwaysFits) {
  const Band b("c", nm(1530), nm(1565));
  for (double w : {25.0, 100.0}) EXPECT_EQ(grid_capacity(b, b.span_ghz() + w, w), 1u);
  for (double w : {0.0, 25.0, 100.0}) EXPECT_EQ(grid_capacity(b, b.span_ghz() - w + 1.0, w), 1u);
  // Zero-width channels fit at both edges.
  EXPECT_EQ(grid_capacity(b, b.span_ghz(), 0.0), 2u);
}

TEST(Grid, RejectsBadArguments) {
  const Band b("a", nm(1540), nm(1546));
  EXPECT_THROW(grid_capacity(b, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(grid_capacity(b, -50.0, 0.0), std::invalid_argument);
  EXPECT_THROW(grid_capacity(b, 50.0, -1.0), std::invalid_argument);
  EXPECT_THROW(grid_capacity(b, 50.0, 800.0), std::invalid_argument);
}

TEST(Grid, CentersMatchCapacityAndStayInBand) {
  const Band b("a", nm(1540), nm(1546));
  const auto centers = grid_centers(b, 100.0, 25.0);
  ASSERT_EQ(centers.size(), grid_capacity(b, 100.0, 25.0));
  EXPECT_NEAR(centers.front().ghz(), b.low_edge().ghz() + 12.5, 1e-6);
  for (const auto& c : centers) {
    EXPECT_GE(c.ghz() - 12.5, b.low_edge().ghz() - 1e-6);
    EXPECT_LE(c.ghz() + 12.5, b.high_edge().ghz() + 1e-6);
  }
}

TEST(Grid, ItuAnchorSitsOnTheGrid) {
  const auto centers = grid_centers(c_band(), 100.0, 50.0, GridAnchor::kItu);
  ASSERT_FALSE(centers.empty());
  for (const auto& c : centers) {
    const double k = (c.ghz() - kItuAnchorThz * 1e3) / 100.0;
    EXPECT_NEAR(k, std::round(k), 1e-6);
  }
  EXPECT_EQ(centers.size(), grid_capacity(c_band(), 100.0, 50.0, GridAnchor::kItu));
}

TEST(Grid, CapacityMonotoneInSpacingAndWidth) {
  Gen g(13);
  for (int i = 0; i < 300; ++i) {
    const double lo = g.real(1000.0, 1900.0);
    const Band b("r", nm(lo), nm(g.real(lo + 1.0, 2000.0)));
    const double s1 = g.real(1.0, 500.0);
    const double s2 = s1 + g.real(0.0, 500.0);
    const double w1 = g.real(0.0, b.span_ghz() / 2);
    const double w2 = w1 + g.real(0.0, b.span_ghz() / 2);
    EXPECT_GE(grid_capacity(b, s1, w1), grid_capacity(b, s2, w1));
    EXPECT_GE(grid_capacity(b, s1, w1), grid_capacity(b, s1, w2));
  }
}

TEST(Grid, GeneratedPlansValidateClean) {
  Gen g(14);
  for (int i = 0; i < 300; ++i) {
    const double lo = g.real(1500.0, 1600.0);
    const Band b("r", nm(lo), nm(lo + g.real(1.0, 20.0)));
    const double width = g.real(1.0, 100.0);
    if (width > b.span_ghz()) continue;
    const double spacing = width + g.real(0.0, 100.0);
    ChannelPlan plan;
    plan.guard_band_ghz = spacing - width;
    for (const auto& c : grid_centers(b, spacing, width)) plan.channels.push_back(classical(c.thz(), width, true));
    EXPECT_EQ(plan.channels.size(), grid_capacity(b, spacing, width));
    EXPECT_TRUE(validate_plan(plan).empty()) << "spacing " << spacing << " width " << width;
  }
}

TEST(Validate, SelfOverlap) {
  ChannelPlan plan{{classical(193.4, 50), classical(193.4, 50)}, 0.0};
  const auto v = validate_plan(plan);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, rules::kOverlap);
  EXPECT_EQ(v[0].channels, (std::vector<std::size_t>{0, 1}));
}

TEST(Validate, TouchingPassbandsAreFine) {
  ChannelPlan plan{{classical(193.40, 50), classical(193.45, 50)}, 0.0};
  EXPECT_TRUE(validate_plan(plan).empty());
}

TEST(Validate, GuardBand) {
  ChannelPlan plan{{classical(193.40, 50), classical(193.46, 50)}, 25.0};
  const auto v = validate_plan(plan);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, rules::kGuardBand);
  plan.guard_band_ghz = 10.0;
  EXPECT_TRUE(validate_plan(plan).empty());
}

TEST(Validate, QuantumCeilingOnlyWithAmplification) {
  ChannelPlan plan{{classical(193.4, 50, false), quantum_at(1310)}, 0.0};
  EXPECT_TRUE(validate_plan(plan).empty());
  plan.channels[0].amplified = true;
  const auto v = validate_plan(plan);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, rules::kQuantumAbove1290);
  EXPECT_EQ(v[0].channels, (std::vector<std::size_t>{1}));
  plan.channels[1] = quantum_at(1270);
  EXPECT_TRUE(validate_plan(plan).empty());
}

TEST(Validate, StructuralRules) {
  ChannelPlan plan{{classical(193.4, 0.0)}, -1.0};
  auto v = validate_plan(plan);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].rule, rules::kInvalidWidth);
  EXPECT_EQ(v[1].rule, rules::kNegativeGuardBand);

  ChannelPlan edge{{classical(299.79, 100.0)}, 0.0};
  v = validate_plan(edge);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, rules::kPassbandOutOfRange);

  auto q = quantum_at(1270);
  q.amplified = true;
  v = validate_plan(ChannelPlan{{q}, 0.0});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, rules::kQuantumAmplified);
}

TEST(Validate, OrderedByFrequencyThenRule) {
  ChannelPlan plan{{classical(194.0, 50), classical(194.0, 50), classical(193.0, 50), classical(193.0, 50)}, 0.0};
  const auto v = validate_plan(plan);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].channels, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(v[1].channels, (std::vector<std::size_t>{0, 1}));
}

TEST(Json, ChannelRoundTripIsBitExact) {
  Gen g(15);
  for (int i = 0; i < 200; ++i) {
    auto ch = classical(quantize_thz(g.real(150.0, 299.0)), g.real(1.0, 200.0), g.coin());
    ch.launch_power_dbm = g.real(-10.0, 10.0);
    const auto text = to_json(ch).dump();
    const auto back = channel_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back, ch);
    EXPECT_EQ(to_json(back).dump(), text);
  }
}

TEST(Json, CentersStoredWithSixDecimals) {
  auto j = to_json(classical(193.41448932, 50));
  EXPECT_EQ(j["center_thz"].get<double>(), 193.414489);
}

TEST(Json, SchemaErrorsNameThePath) {
  using nlohmann::json;
  auto expect_error = [](const json& j, const std::string& fragment) {
    try {
      plan_from_json(j);
      FAIL() << "no error for " << j.dump();
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_error(json{{"channels", {{{"center_thz", 193.4}, {"width_ghz", 50}, {"role", "classical"}}}}},
               "plan.channels[0].launch_power_dbm");
  expect_error(json{{"channels", {{{"center_thz", 193.4}, {"width_ghz", 50}, {"role", "laser"}}}}},
               "plan.channels[0].role");
  expect_error(json{{"channels", {{{"center_thz", 400.0}, {"width_ghz", 50}, {"role", "quantum"}}}}},
               "plan.channels[0].center_thz");
  expect_error(json{{"channels", json::array()}, {"guard", 1}}, "plan.guard");
}

TEST(Json, QuantumLaunchPowerIgnored) {
  const auto ch = channel_from_json(
      nlohmann::json{{"center_thz", 228.8}, {"width_ghz", 50}, {"role", "quantum"}, {"launch_power_dbm", 3}});
  EXPECT_FALSE(ch.launch_power_dbm);
  EXPECT_FALSE(to_json(ch).contains("launch_power_dbm"));
}
