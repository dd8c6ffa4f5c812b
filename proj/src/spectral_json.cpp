#include <cmath>

#include "coexist/spectral.hpp"
#include "json_util.hpp"

namespace coexist::spectral {

using nlohmann::json;

double quantize_thz(double thz) { return std::round(thz * 1e6) / 1e6; }

json to_json(const Channel& channel) {
  json j{
      {"center_thz", quantize_thz(channel.center.thz())},
      {"width_ghz", channel.width_ghz},
      {"role", std::string(to_string(channel.role))},
      {"amplified", channel.amplified},
  };
  if (channel.role != Role::kQuantum && channel.launch_power_dbm) {
    j["launch_power_dbm"] = *channel.launch_power_dbm;
  }
  return j;
}

json to_json(const ChannelPlan& plan) {
  json chans = json::array();
  for (const auto& c : plan.channels) chans.push_back(to_json(c));
  return json{{"guard_band_ghz", plan.guard_band_ghz}, {"channels", std::move(chans)}};
}

json to_json(const Violation& violation) {
  return json{{"rule", violation.rule},
              {"channels", violation.channels},
              {"message", violation.message}};
}

Channel channel_from_json(const json& j, const std::string& path) {
  using namespace detail;
  expect_keys(j, path, {"center_thz", "width_ghz", "role", "launch_power_dbm", "amplified"});
  const double center = quantize_thz(number(j, "center_thz", path));
  const Role role = at_path(join_path(path, "role"), [&] { return role_from_string(string(j, "role", path)); });
  Channel ch{
      at_path(join_path(path, "center_thz"), [&] { return Frequency::from_thz(center); }),
      number(j, "width_ghz", path),
      role,
      std::nullopt,
      boolean_or(j, "amplified", path, false),
  };
  if (!(ch.width_ghz > 0.0)) schema_error(join_path(path, "width_ghz"), "must be positive");
  if (role == Role::kQuantum) {
    // Ignored: quantum levels are photon fluxes, not dBm.
    if (ch.amplified) schema_error(join_path(path, "amplified"), "quantum channels cannot be amplified");
  } else {
    ch.launch_power_dbm = number(j, "launch_power_dbm", path);
  }
  return ch;
}

ChannelPlan plan_from_json(const json& j, const std::string& path) {
  using namespace detail;
  expect_keys(j, path, {"channels", "guard_band_ghz"});
  ChannelPlan plan;
  plan.guard_band_ghz = number_or(j, "guard_band_ghz", path, 0.0);
  if (plan.guard_band_ghz < 0.0) schema_error(join_path(path, "guard_band_ghz"), "must be non-negative");
  const auto& chans = array(j, "channels", path);
  const std::string base = join_path(path, "channels");
  for (std::size_t i = 0; i < chans.size(); ++i) {
    plan.channels.push_back(channel_from_json(chans[i], index_path(base, i)));
  }
  return plan;
}

}  // namespace coexist::spectral
