#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ejb/classify.hpp"
#include "ejb/geo.hpp"
#include "ejb/ingest.hpp"

namespace ejb {

struct SchoolsEntry {
  std::string path;
  char delimiter = ',';
  SchoolColumns columns;
};

struct LayerEntry {
  std::string id;
  std::string title;
  HazardKind kind = HazardKind::point;
  std::string path;
  std::string id_property;
};

struct ZoneSetEntry {
  ZoneScale scale = ZoneScale::community_area;
  std::string path;
  ZoneProperties properties;
};

struct RunDefaults {
  double radius_m = kMileM;
  std::size_t k = 4;
  ClassMethod method = ClassMethod::natural_breaks;
  std::string layer;
  /// Leave zones without schools out of break computation (still classified).
  bool exclude_empty_zones = false;
};

/// Run manifest. Relative paths resolve against the config file's directory.
struct RunConfig {
  std::filesystem::path config_path;
  std::filesystem::path base_dir;
  SchoolsEntry schools;
  std::vector<LayerEntry> layers;
  std::vector<ZoneSetEntry> zone_sets;
  RunDefaults defaults;
  std::string output_dir = "out";
  std::string static_dir;

  std::filesystem::path resolve(const std::string& p) const;
};

/// Parses and checks a config document. Throws ConfigError on schema problems,
/// duplicate ids/scales, or (when `check_paths`) missing input files.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& config_path,
                       bool check_paths = true);

/// Reads `path` and parses it. Throws ConfigError when unreadable or malformed.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace ejb
