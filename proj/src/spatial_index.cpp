#include "ejb/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ejb {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
// Features whose bbox would cover more cells than this go to a list that every
// query returns.
constexpr std::int64_t kMaxCellsPerFeature = 1 << 16;

double median_latitude(std::span<const BBox> boxes) {
  std::vector<double> lats;
  lats.reserve(boxes.size());
  for (const auto& b : boxes) lats.push_back(0.5 * (b.min_lat + b.max_lat));
  auto mid = lats.begin() + static_cast<std::ptrdiff_t>(lats.size() / 2);
  std::nth_element(lats.begin(), mid, lats.end());
  return *mid;
}

}  // namespace

BBox disc_bbox(const GeoPoint& center, double radius_m) {
  constexpr double pad = 1.0 + 1e-6;
  const double dlat = radius_m / kMetersPerDegree * pad;
  const double cos_lat = std::cos(center.lat * kDegToRad);
  double dlon = 360.0;
  if (cos_lat > 1e-6) {
    const double planar = radius_m / (kMetersPerDegree * cos_lat);
    const double s = std::sin(radius_m / kEarthRadiusM) / cos_lat;
    const double cap = s < 1.0 ? std::asin(s) / kDegToRad : 360.0;
    dlon = std::max(planar, cap) * pad;
  }
  return {center.lon - dlon, center.lat - dlat, center.lon + dlon, center.lat + dlat};
}

FeatureIndex FeatureIndex::build(std::span<const Geometry> geometries, double cell_size_hint_m) {
  std::vector<BBox> boxes;
  boxes.reserve(geometries.size());
  for (const auto& g : geometries) boxes.push_back(bbox_of(g));
  return build(boxes, cell_size_hint_m);
}

FeatureIndex FeatureIndex::build(std::span<const BBox> boxes, double cell_size_hint_m) {
  FeatureIndex index;
  index.boxes_.assign(boxes.begin(), boxes.end());
  if (boxes.empty() || !(cell_size_hint_m > 0.0)) return index;

  const double lat0 = median_latitude(boxes);
  index.cell_lat_ = cell_size_hint_m / kMetersPerDegree;
  index.cell_lon_ = index.cell_lat_ / std::max(std::cos(lat0 * kDegToRad), 1e-6);

  for (std::size_t id = 0; id < boxes.size(); ++id) {
    const BBox& b = boxes[id];
    const Cell lo = index.cell_of(b.min_lon, b.min_lat);
    const Cell hi = index.cell_of(b.max_lon, b.max_lat);
    const std::int64_t span = (hi.first - lo.first + 1) * (hi.second - lo.second + 1);
    if (span > kMaxCellsPerFeature || span <= 0) {
      index.oversized_.push_back(id);
      continue;
    }
    for (std::int64_t cx = lo.first; cx <= hi.first; ++cx) {
      for (std::int64_t cy = lo.second; cy <= hi.second; ++cy) {
        index.bins_[{cx, cy}].push_back(id);
      }
    }
  }
  return index;
}

FeatureIndex::Cell FeatureIndex::cell_of(double lon, double lat) const {
  return {static_cast<std::int64_t>(std::floor(lon / cell_lon_)),
          static_cast<std::int64_t>(std::floor(lat / cell_lat_))};
}

std::vector<std::size_t> FeatureIndex::query_radius_candidates(const GeoPoint& center,
                                                               double radius_m) const {
  std::vector<std::size_t> out;
  if (boxes_.empty()) return out;

  const BBox q = disc_bbox(center, radius_m);
  const Cell lo = cell_of(q.min_lon, q.min_lat);
  const Cell hi = cell_of(q.max_lon, q.max_lat);
  const std::int64_t span = (hi.first - lo.first + 1) * (hi.second - lo.second + 1);

  if (span > static_cast<std::int64_t>(bins_.size())) {
    for (const auto& [cell, ids] : bins_) {
      if (cell.first < lo.first || cell.first > hi.first || cell.second < lo.second ||
          cell.second > hi.second) {
        continue;
      }
      out.insert(out.end(), ids.begin(), ids.end());
    }
  } else {
    for (std::int64_t cx = lo.first; cx <= hi.first; ++cx) {
      for (std::int64_t cy = lo.second; cy <= hi.second; ++cy) {
        auto it = bins_.find({cx, cy});
        if (it != bins_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
  }
  out.insert(out.end(), oversized_.begin(), oversized_.end());

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](std::size_t id) { return !boxes_[id].intersects(q); });
  return out;
}

std::vector<std::size_t> FeatureIndex::cell_members(const GeoPoint& p) const {
  auto it = bins_.find(cell_of(p.lon, p.lat));
  if (it == bins_.end()) return {};
  return it->second;
}

}  // namespace ejb
