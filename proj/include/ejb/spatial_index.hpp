#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ejb/geo.hpp"

namespace ejb {

/// Uniform lon/lat grid over feature bounding boxes. Feature ids are positions
/// in the span handed to build(). Queries return candidate supersets; exact
/// membership is left to the geo predicates.
class FeatureIndex {
 public:
  using Cell = std::pair<std::int64_t, std::int64_t>;

  FeatureIndex() = default;

  /// Cell edge is `cell_size_hint_m` meters of arc, converted to degrees at the
  /// median latitude of the feature set.
  static FeatureIndex build(std::span<const BBox> boxes, double cell_size_hint_m);
  static FeatureIndex build(std::span<const Geometry> geometries, double cell_size_hint_m);

  /// Ascending ids of every feature whose bbox overlaps the bbox of the closed
  /// disc (covers both haversine and locally projected disc membership).
  std::vector<std::size_t> query_radius_candidates(const GeoPoint& center, double radius_m) const;

  std::size_t feature_count() const { return boxes_.size(); }
  std::size_t occupied_cells() const { return bins_.size(); }
  double cell_lon_deg() const { return cell_lon_; }
  double cell_lat_deg() const { return cell_lat_; }
  const BBox& feature_bbox(std::size_t id) const { return boxes_.at(id); }

  /// Ids registered in the cell containing `p` (test/diagnostic helper).
  std::vector<std::size_t> cell_members(const GeoPoint& p) const;

 private:
  Cell cell_of(double lon, double lat) const;

  double cell_lon_ = 1.0;
  double cell_lat_ = 1.0;
  std::vector<BBox> boxes_;
  std::map<Cell, std::vector<std::size_t>> bins_;
  std::vector<std::size_t> oversized_;
};

/// Lon/lat bounding box of the closed disc, padded to cover the spherical cap
/// and the equirectangular disc alike.
BBox disc_bbox(const GeoPoint& center, double radius_m);

}  // namespace ejb
