#include "ejb/engine.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "ejb/csv.hpp"
#include "ejb/geojson.hpp"

namespace ejb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string finish(const json& doc) { return doc.dump(2) + "\n"; }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string score_unit(ExposureUnit u) {
  return u == ExposureUnit::kilometers ? "fraction x kilometers" : "fraction x count";
}

json break_set_json(const BreakSet& bs) {
  return {{"method", to_string(bs.method)}, {"k", bs.k},
          {"requested_k", bs.requested_k},  {"breaks", bs.breaks},
          {"labels", bs.labels},            {"warnings", bs.warnings}};
}

json layer_json(const HazardLayer& layer) {
  return {{"id", layer.id},
          {"title", layer.title},
          {"kind", to_string(layer.kind)},
          {"exposure_unit", to_string(layer.exposure_unit())},
          {"feature_count", layer.features.size()}};
}

json parameters_json(const RunRequest& r) {
  return {{"layer", r.layer_id},
          {"radius_m", r.radius_m},
          {"method", to_string(r.method)},
          {"k", r.k}};
}

const ZoneSet& require_scale(const Dataset& data, ZoneScale scale, int status,
                             const std::string& code) {
  const ZoneSet* set = data.zone_set(scale);
  if (!set) {
    throw RequestError(code, status,
                       "zone scale " + std::string(to_string(scale)) + " is not loaded");
  }
  return *set;
}

std::string required_text(const fs::path& path, const std::string& what) {
  try {
    return read_file(path);
  } catch (const ConfigError&) {
    throw ConfigError("cannot read " + what + " file " + path.string());
  }
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

const HazardLayer* Dataset::layer(std::string_view id) const {
  for (const auto& l : layers) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

const ZoneSet* Dataset::zone_set(ZoneScale scale) const {
  for (const auto& z : zone_sets) {
    if (z.scale == scale) return &z;
  }
  return nullptr;
}

Dataset load_dataset(const RunConfig& config) {
  Dataset data;
  data.config = config;

  auto digest = [&](std::string role, const std::string& path, const std::string& text) {
    data.digests.push_back({std::move(role), path, sha256_hex(text)});
  };
  digest("config", config.config_path.filename().string(),
         required_text(config.config_path, "config"));

  const std::string schools_text = required_text(config.resolve(config.schools.path), "schools");
  digest("schools", config.schools.path, schools_text);
  ParsedSchools parsed = parse_schools(schools_text, config.schools.columns,
                                       config.schools.delimiter);
  data.schools = std::move(parsed.schools);
  data.school_diagnostics = std::move(parsed.diagnostics);

  for (const auto& e : config.layers) {
    const std::string text = required_text(config.resolve(e.path), "hazard layer " + e.id);
    digest("layer:" + e.id, e.path, text);
    std::vector<GeoFeature> features;
    try {
      features = parse_geojson(text, e.id_property);
    } catch (const GeoJsonError& err) {
      throw GeoJsonError("hazard layer " + e.id + ": " + err.what(), err.byte_offset());
    }
    data.layers.push_back(make_hazard_layer(e.id, e.title, e.kind, std::move(features)));
  }

  for (const auto& e : config.zone_sets) {
    const std::string scale(to_string(e.scale));
    const std::string text = required_text(config.resolve(e.path), "zone set " + scale);
    digest("zones:" + scale, e.path, text);
    std::vector<GeoFeature> features;
    try {
      features = parse_geojson(text, e.properties.id_property);
    } catch (const GeoJsonError& err) {
      throw GeoJsonError("zone set " + scale + ": " + err.what(), err.byte_offset());
    }
    data.zone_sets.push_back(make_zone_set(e.scale, std::move(features), e.properties));
  }
  return data;
}

ValidationReport validate(const Dataset& data) {
  return validate_dataset(data.schools, data.layers, data.zone_sets, data.school_diagnostics);
}

std::string RunRequest::key() const {
  return layer_id + "|" + format_double(radius_m) + "|" + std::string(to_string(scale)) + "|" +
         std::string(to_string(method)) + "|" + std::to_string(k);
}

RunRequest make_request(const Dataset& data, const std::map<std::string, std::string>& params) {
  RunRequest r;
  r.radius_m = data.config.defaults.radius_m;
  r.k = data.config.defaults.k;
  r.method = data.config.defaults.method;
  r.layer_id = data.config.defaults.layer;

  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = params.find(key);
    if (it == params.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };

  if (auto v = get("layer")) r.layer_id = *v;
  if (r.layer_id.empty()) throw RequestError("invalid_parameter", 400, "parameter 'layer' is required");
  if (!data.layer(r.layer_id)) {
    throw RequestError("unknown_layer", 400, "unknown hazard layer '" + r.layer_id + "'");
  }

  if (auto v = get("radius_m")) {
    double radius = 0.0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), radius);
    if (ec != std::errc{} || ptr != v->data() + v->size() || !std::isfinite(radius) ||
        !(radius > 0.0)) {
      throw RequestError("invalid_parameter", 400, "radius_m must be a positive number");
    }
    r.radius_m = radius;
  }
  if (auto v = get("scale")) {
    auto s = parse_zone_scale(*v);
    if (!s) throw RequestError("unknown_scale", 400, "unknown scale '" + *v + "'");
    r.scale = *s;
  }
  if (auto v = get("method")) {
    auto m = parse_class_method(*v);
    if (!m) throw RequestError("invalid_parameter", 400, "unknown method '" + *v + "'");
    r.method = *m;
  }
  if (auto v = get("k")) {
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), k);
    if (ec != std::errc{} || ptr != v->data() + v->size() || k < 1) {
      throw RequestError("invalid_parameter", 400, "k must be an integer >= 1");
    }
    r.k = k;
  }
  return r;
}

RunResult run_burden(const Dataset& data, const RunRequest& request, unsigned threads) {
  const HazardLayer* layer = data.layer(request.layer_id);
  if (!layer) {
    throw RequestError("unknown_layer", 400, "unknown hazard layer '" + request.layer_id + "'");
  }
  if (!(request.radius_m > 0.0) || !std::isfinite(request.radius_m)) {
    throw RequestError("invalid_parameter", 400, "radius_m must be a positive number");
  }
  if (request.k < 1) throw RequestError("invalid_parameter", 400, "k must be >= 1");
  const ZoneSet& zones = require_scale(data, request.scale, 400, "unknown_scale");

  RunResult run;
  run.request = request;
  run.layer = layer;
  run.zone_set = &zones;

  const FeatureIndex index = build_layer_index(*layer, request.radius_m);
  const auto exposures = compute_exposures(data.schools, *layer, request.radius_m, &index, threads);

  std::vector<BurdenScore> scores;
  for (std::size_t i = 0; i < data.schools.size(); ++i) {
    const School& s = data.schools[i];
    SchoolResult row;
    row.school_id = s.id;
    row.name = s.name;
    row.hs = exposures[i].hs;
    row.latinx_share = s.latinx_share;
    row.zone_id = assign_zone(s, zones);
    run.assignment[s.id] = row.zone_id;
    if (s.has_pss()) {
      BurdenScore b = proximity_burden(s, exposures[i]);
      row.pss = b.pss;
      row.score = b.score;
      scores.push_back(std::move(b));
      if (!row.zone_id) row.exclusion = "no_zone";
    } else {
      row.exclusion = "zero_enrollment";
    }
    run.schools.push_back(std::move(row));
  }
  std::sort(run.schools.begin(), run.schools.end(),
            [](const auto& a, const auto& b) { return a.school_id < b.school_id; });

  try {
    run.surface = classify_surface(collective_burden(scores, run.assignment, zones), zones.scale,
                                   request.method, request.k,
                                   data.config.defaults.exclude_empty_zones);
  } catch (const ClassifyError& e) {
    throw RequestError("too_many_classes", 422, e.what());
  }
  return run;
}

json request_json(const RunRequest& r) {
  json j = parameters_json(r);
  j["scale"] = to_string(r.scale);
  return j;
}

std::string render_surface_geojson(const Dataset& data, const RunResult& run) {
  std::map<std::string, const School*> by_id;
  for (const auto& s : data.schools) by_id.emplace(s.id, &s);

  json features = json::array();
  for (std::size_t i = 0; i < run.surface.zones.size(); ++i) {
    const ZoneBurden& zb = run.surface.zones[i];
    const Zone& zone = *run.zone_set->find(zb.zone_id);
    const std::size_t c = run.surface.class_index[i];
    json props = {{"zone_id", zb.zone_id},
                  {"name", zone.name},
                  {"cpb", zb.cpb},
                  {"n_schools", zb.n_schools},
                  {"class_index", c},
                  {"class_label", run.surface.break_set.labels.at(c)}};
    if (zone.latinx_share) props["latinx_share"] = *zone.latinx_share;
    if (auto share = student_latinx_share(zb.school_ids, by_id)) {
      props["student_latinx_share"] = *share;
    }
    features.push_back(
        {{"type", "Feature"}, {"id", zb.zone_id}, {"properties", props}, {"geometry", zone.geometry}});
  }

  json excluded = json::array();
  for (const auto& s : run.schools) {
    if (!s.exclusion.empty()) excluded.push_back({{"school_id", s.school_id}, {"reason", s.exclusion}});
  }

  json meta = {{"request", request_json(run.request)},
               {"layer", layer_json(*run.layer)},
               {"break_set", break_set_json(run.surface.break_set)},
               {"units",
                {{"pss", "fraction"},
                 {"hs", to_string(run.layer->exposure_unit())},
                 {"score", score_unit(run.layer->exposure_unit())},
                 {"cpb", score_unit(run.layer->exposure_unit())}}},
               {"excluded_schools", excluded},
               {"engine_version", kEngineVersion}};
  return finish({{"type", "FeatureCollection"}, {"meta", meta}, {"features", features}});
}

std::string render_schools_csv(const RunResult& run) {
  std::string out = "school_id,pss,hs,score,zone\n";
  for (const auto& s : run.schools) {
    out += csv_field(s.school_id);
    out += ',';
    if (s.pss) out += format_double(*s.pss);
    out += ',';
    out += format_double(s.hs);
    out += ',';
    if (s.score) out += format_double(*s.score);
    out += ',';
    if (s.zone_id) out += csv_field(*s.zone_id);
    out += '\n';
  }
  return out;
}

std::string render_schools_json(const RunResult& run) {
  json arr = json::array();
  for (const auto& s : run.schools) {
    arr.push_back({{"school_id", s.school_id},
                   {"name", s.name},
                   {"pss", optional_number(s.pss)},
                   {"hs", s.hs},
                   {"hs_unit", to_string(run.layer->exposure_unit())},
                   {"score", optional_number(s.score)},
                   {"zone", s.zone_id ? json(*s.zone_id) : json(nullptr)},
                   {"scale", to_string(run.request.scale)},
                   {"excluded", !s.exclusion.empty()},
                   {"exclusion_reason", s.exclusion.empty() ? json(nullptr) : json(s.exclusion)},
                   {"latinx_share", optional_number(s.latinx_share)}});
  }
  return finish(arr);
}

std::string render_run_metadata(const Dataset& data, const RunResult& run) {
  json inputs = json::array();
  for (const auto& d : data.digests) {
    inputs.push_back({{"role", d.role}, {"path", d.path}, {"sha256", d.sha256}});
  }
  std::size_t excluded = 0;
  for (const auto& s : run.schools) excluded += s.exclusion.empty() ? 0 : 1;
  json doc = {{"engine_version", kEngineVersion},
              {"request", request_json(run.request)},
              {"break_set", break_set_json(run.surface.break_set)},
              {"inputs", inputs},
              {"counts",
               {{"schools", run.schools.size()},
                {"schools_excluded", excluded},
                {"zones", run.surface.zones.size()},
                {"layer_features", run.layer->features.size()}}},
              {"units",
               {{"pss", "fraction"},
                {"hs", to_string(run.layer->exposure_unit())},
                {"score", score_unit(run.layer->exposure_unit())}}}};
  return finish(doc);
}

std::string render_validation(const ValidationReport& report) { return finish(to_json(report)); }

MaupReport run_maup(const Dataset& data, const RunRequest& request, unsigned threads) {
  const ZoneSet& cas = require_scale(data, ZoneScale::community_area, 409, "scale_unavailable");
  const ZoneSet& cts = require_scale(data, ZoneScale::census_tract, 409, "scale_unavailable");
  RunRequest ca_req = request;
  ca_req.scale = ZoneScale::community_area;
  RunRequest ct_req = request;
  ct_req.scale = ZoneScale::census_tract;
  const RunResult ca = run_burden(data, ca_req, threads);
  const RunResult ct = run_burden(data, ct_req, threads);
  return maup_compare(ca.surface, ct.surface, derive_containment(cts, cas));
}

std::string render_maup(const Dataset&, const RunRequest& request, const MaupReport& report) {
  return finish({{"engine_version", kEngineVersion},
                 {"parameters", parameters_json(request)},
                 {"report", to_json(report)}});
}

ClassDemographics run_demographics(const Dataset& data, const RunRequest& request,
                                   unsigned threads) {
  const RunResult run = run_burden(data, request, threads);
  return class_demographics(run.surface, data.schools, *run.zone_set);
}

std::string render_demographics(const Dataset&, const RunRequest& request,
                                const ClassDemographics& report) {
  return finish({{"engine_version", kEngineVersion},
                 {"request", request_json(request)},
                 {"report", to_json(report)}});
}

std::string render_catalog(const Dataset& data) {
  json layers = json::array();
  for (const auto& l : data.layers) layers.push_back(layer_json(l));
  json zone_sets = json::array();
  for (const auto& z : data.zone_sets) {
    zone_sets.push_back({{"scale", to_string(z.scale)}, {"zone_count", z.zones.size()}});
  }
  const RunDefaults& d = data.config.defaults;
  return finish({{"layers", layers},
                 {"zone_sets", zone_sets},
                 {"school_count", data.schools.size()},
                 {"defaults",
                  {{"layer", d.layer.empty() ? json(nullptr) : json(d.layer)},
                   {"radius_m", d.radius_m},
                   {"method", to_string(d.method)},
                   {"k", d.k}}},
                 {"engine_version", kEngineVersion}});
}

}  // namespace ejb
