#pragma once

#include <span>
#include <variant>
#include <vector>

namespace ejb {

/// Mean Earth radius used by every distance computation (spherical model).
inline constexpr double kEarthRadiusM = 6371008.8;
/// International mile.
inline constexpr double kMileM = 1609.344;
/// Meters per degree of arc on the model sphere.
inline constexpr double kMetersPerDegree = kEarthRadiusM * 3.14159265358979323846 / 180.0;

/// WGS84 longitude/latitude in degrees.
struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

/// Meters east/north of a projection origin.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

struct Polyline {
  std::vector<GeoPoint> points;
};

/// Closed ring: first point equals last.
using Ring = std::vector<GeoPoint>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

using Geometry = std::variant<GeoPoint, Polyline, Polygon>;

struct BBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
  }
  bool intersects(const BBox& o) const {
    return min_lon <= o.max_lon && o.min_lon <= max_lon && min_lat <= o.max_lat &&
           o.min_lat <= max_lat;
  }
  void expand(const BBox& o);
};

BBox bbox_of(const Geometry& g);
BBox bbox_of(std::span<const GeoPoint> pts);

bool is_closed(const Ring& ring);

/// Great-circle distance in meters (haversine). Exactly symmetric.
double haversine_distance(const GeoPoint& a, const GeoPoint& b);

/// Equirectangular projection about `origin`. Accurate to well under 0.1% for
/// points within ~10 km of the origin at mid latitudes.
PlanarPoint local_project(const GeoPoint& origin, const GeoPoint& p);

/// Planar length of `line` after projection about `origin`.
double projected_length(const GeoPoint& origin, const Polyline& line);

/// Length in meters of the part of a projected segment lying in the closed disc
/// of `radius` around the planar origin.
double segment_length_in_disc(const PlanarPoint& a, const PlanarPoint& b, double radius);

/// Total length (meters) of the portions of `line` inside the closed disc of
/// `radius` around `center`, measured in the local projection about `center`.
double clip_length_in_disc(const GeoPoint& center, double radius, const Polyline& line);

/// Even-odd rule over all rings. Points on any ring boundary count as inside.
bool point_in_polygon(const GeoPoint& p, const Polygon& poly);

/// 0 when `p` is inside `poly`, else the minimum planar distance (projection
/// about `p`) to any ring segment.
double min_distance_to_polygon(const GeoPoint& p, const Polygon& poly);

/// A point guaranteed to lie strictly inside the polygon (area centroid when it
/// qualifies, otherwise the midpoint of the widest interior run on a scanline).
GeoPoint representative_point(const Polygon& poly);

}  // namespace ejb
