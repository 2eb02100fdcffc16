#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ejb/geo.hpp"
#include "ejb/geojson.hpp"

namespace ejb {

enum class ShareUnit { fraction, percent };

struct School {
  std::string id;
  std::string name;
  GeoPoint location;
  long long total_students = 0;
  /// Absent when the input declares a share column instead of a count.
  std::optional<long long> neighborhood_students;
  /// Neighborhood-student share as a fraction; meaningful only when has_pss().
  double pss_fraction = 0.0;
  std::optional<double> latinx_share;
  std::string grade_band;

  bool has_pss() const { return total_students > 0; }
};

/// Which input columns feed which School field. Empty names mean "not present".
/// Exactly one of `neighborhood_students` / `pss` must be named.
struct SchoolColumns {
  std::string id = "school_id";
  std::string name;
  std::string lon = "lon";
  std::string lat = "lat";
  std::string total_students = "total_students";
  std::string neighborhood_students = "neighborhood_students";
  std::string pss;
  ShareUnit pss_unit = ShareUnit::fraction;
  std::string latinx_share;
  ShareUnit latinx_unit = ShareUnit::fraction;
  std::string grade_band;
};

enum class Severity { info, warn, error };

struct Diagnostic {
  Severity severity = Severity::info;
  std::string code;
  std::string subject;
  std::string message;
};

struct ParsedSchools {
  std::vector<School> schools;
  /// Row-level problems; rows with an error are not in `schools`.
  std::vector<Diagnostic> diagnostics;
};

/// Reads a delimited school table. Throws IngestError when a mapped column is
/// missing from the header. Bad rows and duplicate ids become error diagnostics.
ParsedSchools parse_schools(std::string_view text, const SchoolColumns& columns,
                            char delimiter = ',');

enum class HazardKind { point, line, polygon };
enum class ExposureUnit { count, kilometers };

struct HazardLayer {
  std::string id;
  std::string title;
  HazardKind kind = HazardKind::point;
  std::vector<GeoFeature> features;

  ExposureUnit exposure_unit() const {
    return kind == HazardKind::line ? ExposureUnit::kilometers : ExposureUnit::count;
  }
};

/// Throws IngestError if any feature part does not match `kind`.
HazardLayer make_hazard_layer(std::string id, std::string title, HazardKind kind,
                              std::vector<GeoFeature> features);

enum class ZoneScale { community_area, census_tract };

struct Zone {
  std::string id;
  std::string name;
  std::vector<Polygon> polygons;
  /// Input geometry object, re-emitted unchanged in outputs.
  nlohmann::json geometry;
  /// Resident Latinx share from the zone file, when provided.
  std::optional<double> latinx_share;
  BBox bbox;
};

struct ZoneSet {
  ZoneScale scale = ZoneScale::community_area;
  std::vector<Zone> zones;

  const Zone* find(std::string_view id) const;
};

struct ZoneProperties {
  std::string id_property;
  std::string name_property = "name";
  std::string latinx_property;
  ShareUnit latinx_unit = ShareUnit::fraction;
};

/// Builds zones from polygon features. Throws IngestError for non-polygon
/// geometry or shares outside [0, 1].
ZoneSet make_zone_set(ZoneScale scale, std::vector<GeoFeature> features,
                      const ZoneProperties& props);

struct ValidationReport {
  std::vector<Diagnostic> entries;

  std::size_t count(Severity s) const;
  bool usable() const { return count(Severity::error) == 0; }
};

/// Cross-checks parsed inputs. `carried` (e.g. school row errors) is included
/// first. Schools outside every zone of any set yield one warning per school.
ValidationReport validate_dataset(const std::vector<School>& schools,
                                  const std::vector<HazardLayer>& layers,
                                  const std::vector<ZoneSet>& zone_sets,
                                  std::vector<Diagnostic> carried = {});

std::string_view to_string(Severity s);
std::string_view to_string(HazardKind k);
std::string_view to_string(ExposureUnit u);
std::string_view to_string(ZoneScale s);
std::string_view to_string(ShareUnit u);
std::optional<HazardKind> parse_hazard_kind(std::string_view s);
std::optional<ZoneScale> parse_zone_scale(std::string_view s);
std::optional<ShareUnit> parse_share_unit(std::string_view s);

nlohmann::json to_json(const ValidationReport& report);

}  // namespace ejb
