#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ejb/ingest.hpp"
#include "ejb/spatial_index.hpp"

namespace ejb {

/// Hazard exposure of one school: a feature count for point and polygon layers,
/// kilometers of road for line layers.
struct ExposureResult {
  std::string school_id;
  std::string layer_id;
  double radius_m = 0.0;
  double hs = 0.0;
  ExposureUnit unit = ExposureUnit::count;
};

/// Per-school proximity burden: score = pss * hs.
struct BurdenScore {
  std::string school_id;
  std::string layer_id;
  double radius_m = 0.0;
  double pss = 0.0;
  double hs = 0.0;
  double score = 0.0;
};

/// Collective burden of one zone: sum of contributing school scores.
struct ZoneBurden {
  std::string zone_id;
  ZoneScale scale = ZoneScale::community_area;
  double cpb = 0.0;
  std::size_t n_schools = 0;
  std::vector<std::string> school_ids;
};

using ZoneAssignment = std::map<std::string, std::optional<std::string>>;

/// One index entry per layer feature; bbox is the union of its parts.
FeatureIndex build_layer_index(const HazardLayer& layer, double cell_size_hint_m);

/// Exposure of `school` to `layer` within the closed disc of `radius_m`.
/// With a null index every feature is tested. Throws ConfigError if the index
/// was not built over this layer, or if radius_m is not positive.
ExposureResult hazard_exposure(const School& school, const HazardLayer& layer, double radius_m,
                               const FeatureIndex* index);

/// Exposure for every school, in input order. Work is split across `threads`
/// workers; results do not depend on the thread count.
std::vector<ExposureResult> compute_exposures(const std::vector<School>& schools,
                                              const HazardLayer& layer, double radius_m,
                                              const FeatureIndex* index, unsigned threads = 1);

/// Throws std::logic_error for a school without a defined PSS (callers exclude
/// those first) or for an exposure that belongs to another school.
BurdenScore proximity_burden(const School& school, const ExposureResult& exposure);

/// Containing zone, boundary inclusive; ties go to the smallest zone id.
std::optional<std::string> assign_zone(const GeoPoint& location, const ZoneSet& zone_set);
std::optional<std::string> assign_zone(const School& school, const ZoneSet& zone_set);

/// One entry per zone in set order. Each zone sums its schools' scores in
/// ascending school-id order; unassigned schools contribute nowhere.
std::vector<ZoneBurden> collective_burden(const std::vector<BurdenScore>& scores,
                                          const ZoneAssignment& assignment,
                                          const ZoneSet& zone_set);

}  // namespace ejb
