#include "ejb/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ejb/error.hpp"

namespace ejb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string get_string(const json& obj, const char* key, const std::string& fallback = {}) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw ConfigError(std::string("config: '") + key + "' must be a string");
  return it->get<std::string>();
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  std::string v = get_string(obj, key);
  if (v.empty()) throw ConfigError("config: " + where + " needs '" + key + "'");
  return v;
}

ShareUnit get_unit(const json& obj, const char* key) {
  const std::string s = get_string(obj, key, "fraction");
  auto u = parse_share_unit(s);
  if (!u) throw ConfigError("config: '" + std::string(key) + "' must be fraction or percent");
  return *u;
}

}  // namespace

fs::path RunConfig::resolve(const std::string& p) const {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

RunConfig parse_config(const json& doc, const fs::path& config_path, bool check_paths) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig cfg;
  cfg.config_path = config_path;
  cfg.base_dir = config_path.has_parent_path() ? config_path.parent_path() : fs::path(".");

  const auto schools_it = doc.find("schools");
  if (schools_it == doc.end() || !schools_it->is_object()) {
    throw ConfigError("config: missing 'schools' object");
  }
  const json& sj = *schools_it;
  cfg.schools.path = require_string(sj, "path", "schools");
  const std::string delim = get_string(sj, "delimiter", ",");
  if (delim.size() != 1) throw ConfigError("config: schools.delimiter must be one character");
  cfg.schools.delimiter = delim.front();
  if (auto cols = sj.find("columns"); cols != sj.end()) {
    if (!cols->is_object()) throw ConfigError("config: schools.columns must be an object");
    SchoolColumns& c = cfg.schools.columns;
    c.id = get_string(*cols, "id", c.id);
    c.name = get_string(*cols, "name", c.name);
    c.lon = get_string(*cols, "lon", c.lon);
    c.lat = get_string(*cols, "lat", c.lat);
    c.total_students = get_string(*cols, "total_students", c.total_students);
    c.pss = get_string(*cols, "pss", c.pss);
    c.neighborhood_students = get_string(*cols, "neighborhood_students",
                                         c.pss.empty() ? c.neighborhood_students : "");
    c.pss_unit = get_unit(*cols, "pss_unit");
    c.latinx_share = get_string(*cols, "latinx_share", c.latinx_share);
    c.latinx_unit = get_unit(*cols, "latinx_unit");
    c.grade_band = get_string(*cols, "grade_band", c.grade_band);
  }

  std::set<std::string> layer_ids;
  if (auto layers = doc.find("hazard_layers"); layers != doc.end()) {
    if (!layers->is_array()) throw ConfigError("config: hazard_layers must be an array");
    for (const auto& lj : *layers) {
      LayerEntry e;
      e.id = require_string(lj, "id", "hazard layer");
      e.title = get_string(lj, "title", e.id);
      const std::string kind = require_string(lj, "kind", "hazard layer " + e.id);
      auto k = parse_hazard_kind(kind);
      if (!k) throw ConfigError("config: layer " + e.id + " has unknown kind '" + kind + "'");
      e.kind = *k;
      e.path = require_string(lj, "path", "hazard layer " + e.id);
      e.id_property = get_string(lj, "id_property");
      if (!layer_ids.insert(e.id).second) {
        throw ConfigError("config: duplicate hazard layer id " + e.id);
      }
      cfg.layers.push_back(std::move(e));
    }
  }

  std::set<ZoneScale> scales;
  if (auto zones = doc.find("zone_sets"); zones != doc.end()) {
    if (!zones->is_array()) throw ConfigError("config: zone_sets must be an array");
    for (const auto& zj : *zones) {
      ZoneSetEntry e;
      const std::string scale = require_string(zj, "scale", "zone set");
      auto s = parse_zone_scale(scale);
      if (!s) throw ConfigError("config: unknown zone scale '" + scale + "'");
      e.scale = *s;
      e.path = require_string(zj, "path", "zone set " + scale);
      e.properties.id_property = get_string(zj, "id_property");
      e.properties.name_property = get_string(zj, "name_property", "name");
      e.properties.latinx_property = get_string(zj, "latinx_property");
      e.properties.latinx_unit = get_unit(zj, "latinx_unit");
      if (!scales.insert(e.scale).second) {
        throw ConfigError("config: duplicate zone set for scale " + scale);
      }
      cfg.zone_sets.push_back(std::move(e));
    }
  }

  if (auto d = doc.find("defaults"); d != doc.end()) {
    if (!d->is_object()) throw ConfigError("config: defaults must be an object");
    if (auto r = d->find("radius_m"); r != d->end()) {
      if (!r->is_number() || !(r->get<double>() > 0.0)) {
        throw ConfigError("config: defaults.radius_m must be a positive number");
      }
      cfg.defaults.radius_m = r->get<double>();
    }
    if (auto k = d->find("k"); k != d->end()) {
      if (!k->is_number_integer() || k->get<long long>() < 1) {
        throw ConfigError("config: defaults.k must be an integer >= 1");
      }
      cfg.defaults.k = k->get<std::size_t>();
    }
    const std::string method = get_string(*d, "method", "natural_breaks");
    auto m = parse_class_method(method);
    if (!m) throw ConfigError("config: unknown classification method '" + method + "'");
    cfg.defaults.method = *m;
    cfg.defaults.layer = get_string(*d, "layer");
    if (!cfg.defaults.layer.empty() && !layer_ids.contains(cfg.defaults.layer)) {
      throw ConfigError("config: default layer " + cfg.defaults.layer + " is not configured");
    }
    if (auto x = d->find("exclude_empty_zones"); x != d->end()) {
      if (!x->is_boolean()) throw ConfigError("config: defaults.exclude_empty_zones must be boolean");
      cfg.defaults.exclude_empty_zones = x->get<bool>();
    }
  }

  cfg.output_dir = get_string(doc, "output_dir", cfg.output_dir);
  cfg.static_dir = get_string(doc, "static_dir");

  if (check_paths) {
    auto must_exist = [&](const std::string& p, const std::string& what) {
      if (!fs::is_regular_file(cfg.resolve(p))) {
        throw ConfigError("config: " + what + " file not found: " + cfg.resolve(p).string());
      }
    };
    must_exist(cfg.schools.path, "schools");
    for (const auto& l : cfg.layers) must_exist(l.path, "hazard layer " + l.id);
    for (const auto& z : cfg.zone_sets) {
      must_exist(z.path, "zone set " + std::string(to_string(z.scale)));
    }
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path);
}

}  // namespace ejb
