#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ejb/burden.hpp"
#include "ejb/classify.hpp"
#include "ejb/config.hpp"
#include "ejb/error.hpp"
#include "ejb/ingest.hpp"
#include "ejb/stats.hpp"

namespace ejb {

inline constexpr const char* kEngineVersion = "0.1.0";

/// A rejected run request. `code` is the machine-readable error code and
/// `status` the HTTP status the service answers with.
class RequestError : public Error {
 public:
  RequestError(std::string code, int status, const std::string& message)
      : Error(message), code_(std::move(code)), status_(status) {}
  const std::string& code() const { return code_; }
  int status() const { return status_; }

 private:
  std::string code_;
  int status_;
};

struct InputDigest {
  std::string role;
  std::string path;
  std::string sha256;
};

/// Everything loaded from a config; immutable once built.
struct Dataset {
  RunConfig config;
  std::vector<School> schools;
  std::vector<Diagnostic> school_diagnostics;
  std::vector<HazardLayer> layers;
  std::vector<ZoneSet> zone_sets;
  std::vector<InputDigest> digests;

  const HazardLayer* layer(std::string_view id) const;
  const ZoneSet* zone_set(ZoneScale scale) const;
};

/// Reads every input named by the config. Throws ConfigError for unreadable
/// files and GeoJsonError / IngestError for malformed content.
Dataset load_dataset(const RunConfig& config);

ValidationReport validate(const Dataset& data);

struct RunRequest {
  std::string layer_id;
  double radius_m = kMileM;
  ZoneScale scale = ZoneScale::community_area;
  ClassMethod method = ClassMethod::natural_breaks;
  std::size_t k = 4;

  /// Canonical text form, used as a cache key.
  std::string key() const;
};

/// Builds a request from string parameters, falling back to config defaults.
/// Throws RequestError with code invalid_parameter / unknown_layer / unknown_scale.
RunRequest make_request(const Dataset& data, const std::map<std::string, std::string>& params);

struct SchoolResult {
  std::string school_id;
  std::string name;
  std::optional<double> pss;
  double hs = 0.0;
  std::optional<double> score;
  std::optional<std::string> zone_id;
  /// Empty when the school contributes; else "zero_enrollment" or "no_zone".
  std::string exclusion;
  std::optional<double> latinx_share;
};

struct RunResult {
  RunRequest request;
  const HazardLayer* layer = nullptr;
  const ZoneSet* zone_set = nullptr;
  /// Sorted by school id.
  std::vector<SchoolResult> schools;
  ZoneAssignment assignment;
  ClassifiedSurface surface;
};

/// Per-school scores, per-zone sums, then classification. Throws RequestError
/// (unknown layer/scale, bad radius or k, too many classes).
RunResult run_burden(const Dataset& data, const RunRequest& request, unsigned threads = 1);

/// Classified zones as a GeoJSON FeatureCollection with a top-level "meta".
std::string render_surface_geojson(const Dataset& data, const RunResult& run);
/// Per-school scores CSV: school_id,pss,hs,score,zone.
std::string render_schools_csv(const RunResult& run);
/// Per-school audit list (JSON array sorted by school id).
std::string render_schools_json(const RunResult& run);
/// Run parameters, input digests and engine version.
std::string render_run_metadata(const Dataset& data, const RunResult& run);
std::string render_validation(const ValidationReport& report);

/// Classifies the request's layer at both scales and compares them. Throws
/// RequestError "scale_unavailable" (409) when either scale is not loaded.
MaupReport run_maup(const Dataset& data, const RunRequest& request, unsigned threads = 1);
std::string render_maup(const Dataset& data, const RunRequest& request, const MaupReport& report);

ClassDemographics run_demographics(const Dataset& data, const RunRequest& request,
                                   unsigned threads = 1);
std::string render_demographics(const Dataset& data, const RunRequest& request,
                                const ClassDemographics& report);

/// Catalog of loaded layers, zone sets and school count.
std::string render_catalog(const Dataset& data);

nlohmann::json request_json(const RunRequest& request);
std::string sha256_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace ejb
