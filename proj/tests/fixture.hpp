#pragma once

#include <string>

#include <json.hpp>

#include "ejb/config.hpp"
#include "ejb/engine.hpp"
#include "oracles.hpp"

namespace fixture {

inline std::string path(const std::string& name) { return std::string(EJB_FIXTURE_DIR) + "/" + name; }

inline nlohmann::json config_doc() { return nlohmann::json::parse(oracle::slurp(path("config.json"))); }

// Dataset from an edited copy of the fixture config; paths stay relative to the fixture dir.
inline ejb::Dataset dataset(const nlohmann::json& doc) {
  return ejb::load_dataset(ejb::parse_config(doc, path("config.json")));
}

inline ejb::Dataset dataset() { return ejb::load_dataset(ejb::load_config(path("config.json"))); }

struct ExpectedRow {
  std::string id;
  double pss;
  double roads_km;
  double roads_score;
  double facilities;
  double facilities_score;
  std::string ca;
  std::string ct;
};

inline double number_or_nan(const std::string& s) {
  return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
}

// Oracle values; NaN marks a school without a defined PSS.
inline std::vector<ExpectedRow> expected_scores() {
  std::vector<ExpectedRow> out;
  const auto rows = oracle::read_plain_csv(path("expected_scores.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out.push_back({r[0], number_or_nan(r[1]), std::stod(r[2]), number_or_nan(r[3]), std::stod(r[4]),
                   number_or_nan(r[5]), r.size() > 6 ? r[6] : "", r.size() > 7 ? r[7] : ""});
  }
  return out;
}

}  // namespace fixture
