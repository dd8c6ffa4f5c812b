#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "coexist/linkbudget.hpp"
#include "csv_util.hpp"
#include "json_util.hpp"

namespace coexist::linkbudget {

using nlohmann::json;
using namespace detail;

json to_json(const AttenuationProfile& profile) {
  json points = json::array();
  for (const auto& p : profile.points()) points.push_back(json::array({p.lambda.nm(), p.loss_db_per_km}));
  return points;
}

namespace {

json band_to_json(const Band& band) {
  return json{{"name", band.name}, {"lambda_min_nm", band.lambda_min.nm()}, {"lambda_max_nm", band.lambda_max.nm()}};
}

Band band_from_json(const json& j, const std::string& path) {
  expect_keys(j, path, {"name", "lambda_min_nm", "lambda_max_nm"});
  const std::string name = string_or(j, "name", path, "custom");
  const double lo = number(j, "lambda_min_nm", path);
  const double hi = number(j, "lambda_max_nm", path);
  return at_path(path, [&] { return Band(name, Wavelength::from_nm(lo), Wavelength::from_nm(hi)); });
}

}  // namespace

json to_json(const LinkElement& element) {
  if (const auto* s = std::get_if<FiberSpan>(&element)) {
    return json{{"kind", "span"}, {"length_km", s->length_km}, {"attenuation", to_json(s->attenuation)}};
  }
  if (const auto* a = std::get_if<Amplifier>(&element)) {
    return json{{"kind", "amplifier"},
                {"gain_db", a->gain_db},
                {"noise_factor", a->noise_factor},
                {"band", band_to_json(a->band)}};
  }
  const auto& f = std::get<OpticalFilter>(element);
  return json{{"kind", "filter"},
              {"center_thz", spectral::quantize_thz(f.center.thz())},
              {"passband_width_ghz", f.passband_width_ghz},
              {"insertion_loss_db", f.insertion_loss_db},
              {"out_of_band_isolation_db", f.out_of_band_isolation_db},
              {"return_loss_db", f.return_loss_db}};
}

json to_json(const LinkModel& link) {
  json elements = json::array();
  for (const auto& e : link.elements()) elements.push_back(to_json(e));
  return json{{"elements", std::move(elements)}};
}

json to_json(const DetectorModel& d) {
  return json{{"gate_rate_hz", d.gate_rate_hz},
              {"gate_width_s", d.gate_width_s},
              {"efficiency", d.efficiency},
              {"dark_rate_cps", d.dark_rate_cps}};
}

json to_json(const NoiseBudget& b) {
  return json{{"raman_rate", b.raman_rate},     {"ase_rate", b.ase_rate},
              {"leakage_rate", b.leakage_rate}, {"dark_rate", b.dark_rate},
              {"total_rate", b.total_rate},     {"qber_estimate", b.qber_estimate}};
}

AttenuationProfile attenuation_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of [lambda_nm, loss_db_per_km] pairs");
  std::vector<AttenuationPoint> points;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = index_path(path, i);
    if (!j[i].is_array() || j[i].size() != 2) schema_error(p, "expected [lambda_nm, loss_db_per_km]");
    const double nm = as_number(j[i][0], p + "[0]");
    const double loss = as_number(j[i][1], p + "[1]");
    points.push_back({at_path(p, [&] { return Wavelength::from_nm(nm); }), loss});
  }
  return at_path(path, [&] { return AttenuationProfile(std::move(points)); });
}

LinkModel link_from_json(const json& j, const AttenuationProfile& default_attenuation, const std::string& path) {
  expect_keys(j, path, {"elements"});
  const auto& elems = array(j, "elements", path);
  const std::string base = join_path(path, "elements");
  std::vector<LinkElement> elements;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const auto& e = elems[i];
    const std::string p = index_path(base, i);
    const std::string kind = string(e, "kind", p);
    if (kind == "span") {
      expect_keys(e, p, {"kind", "length_km", "attenuation"});
      AttenuationProfile att =
          e.contains("attenuation") ? attenuation_from_json(e["attenuation"], join_path(p, "attenuation"))
                                    : default_attenuation;
      elements.emplace_back(FiberSpan{number(e, "length_km", p), std::move(att)});
    } else if (kind == "amplifier") {
      expect_keys(e, p, {"kind", "gain_db", "noise_factor", "band"});
      elements.emplace_back(Amplifier{number(e, "gain_db", p), number(e, "noise_factor", p),
                                      band_from_json(require(e, "band", p), join_path(p, "band"))});
    } else if (kind == "filter") {
      expect_keys(e, p, {"kind", "center_thz", "passband_width_ghz", "insertion_loss_db", "out_of_band_isolation_db",
                         "return_loss_db"});
      const double center = spectral::quantize_thz(number(e, "center_thz", p));
      elements.emplace_back(OpticalFilter{
          at_path(join_path(p, "center_thz"), [&] { return Frequency::from_thz(center); }),
          number(e, "passband_width_ghz", p),
          number_or(e, "insertion_loss_db", p, 0.0),
          number(e, "out_of_band_isolation_db", p),
          number_or(e, "return_loss_db", p, 0.0),
      });
    } else {
      schema_error(join_path(p, "kind"), fmt::format("unknown element kind '{}' (span, amplifier, filter)", kind));
    }
  }
  return at_path(path, [&] { return LinkModel(std::move(elements)); });
}

DetectorModel detector_from_json(const json& j, const std::string& path) {
  expect_keys(j, path, {"gate_rate_hz", "gate_width_s", "efficiency", "dark_rate_cps"});
  DetectorModel d{number(j, "gate_rate_hz", path), number(j, "gate_width_s", path),
                  number(j, "efficiency", path), number_or(j, "dark_rate_cps", path, 0.0)};
  at_path(path, [&] {
    d.validate();
    return 0;
  });
  return d;
}

std::string budget_csv_row(const NoiseBudget& b) {
  return fmt::format("{},{},{},{},{},{}", b.raman_rate, b.ase_rate, b.leakage_rate, b.dark_rate, b.total_rate,
                     b.qber_estimate);
}

void write_attenuation_csv(std::ostream& out, const AttenuationProfile& profile) {
  out << "lambda_nm,loss_db_per_km\n";
  for (const auto& p : profile.points()) fmt::print(out, "{},{}\n", p.lambda.nm(), p.loss_db_per_km);
}

AttenuationProfile read_attenuation_csv(std::istream& in) {
  const auto rows = read_numeric_csv(in, {"lambda_nm", "loss_db_per_km"});
  std::vector<AttenuationPoint> points;
  for (const auto& r : rows) points.push_back({Wavelength::from_nm(r[0]), r[1]});
  return AttenuationProfile(std::move(points));
}

AttenuationProfile load_attenuation_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open attenuation table '{}'", path));
  try {
    return read_attenuation_csv(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace coexist::linkbudget
