#include "ejb/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ejb {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Sign of the cross product (b - a) x (p - a); exact zero means collinear.
double cross(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  return (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
}

bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  if (p.lon < std::min(a.lon, b.lon) || p.lon > std::max(a.lon, b.lon) ||
      p.lat < std::min(a.lat, b.lat) || p.lat > std::max(a.lat, b.lat)) {
    return false;
  }
  return cross(a, b, p) == 0.0;
}

bool on_ring_boundary(const GeoPoint& p, const Ring& ring) {
  for (std::size_t i = 1; i < ring.size(); ++i) {
    if (on_segment(ring[i - 1], ring[i], p)) return true;
  }
  return false;
}

// Crossing-number parity of a horizontal ray from p toward +lon.
bool ray_parity(const GeoPoint& p, const Ring& ring) {
  bool odd = false;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    const GeoPoint& a = ring[i - 1];
    const GeoPoint& b = ring[i];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) odd = !odd;
    }
  }
  return odd;
}

double origin_to_segment(const PlanarPoint& a, const PlanarPoint& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(-(a.x * dx + a.y * dy) / len2, 0.0, 1.0);
  return std::hypot(a.x + t * dx, a.y + t * dy);
}

double ring_signed_area2(const Ring& ring, double& cx, double& cy) {
  double area2 = 0.0;
  cx = cy = 0.0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    const GeoPoint& a = ring[i - 1];
    const GeoPoint& b = ring[i];
    const double c = a.lon * b.lat - b.lon * a.lat;
    area2 += c;
    cx += (a.lon + b.lon) * c;
    cy += (a.lat + b.lat) * c;
  }
  return area2;
}

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

void BBox::expand(const BBox& o) {
  min_lon = std::min(min_lon, o.min_lon);
  min_lat = std::min(min_lat, o.min_lat);
  max_lon = std::max(max_lon, o.max_lon);
  max_lat = std::max(max_lat, o.max_lat);
}

BBox bbox_of(std::span<const GeoPoint> pts) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BBox box{inf, inf, -inf, -inf};
  for (const auto& p : pts) box.expand({p.lon, p.lat, p.lon, p.lat});
  return box;
}

BBox bbox_of(const Geometry& g) {
  struct Visitor {
    BBox operator()(const GeoPoint& p) const { return {p.lon, p.lat, p.lon, p.lat}; }
    BBox operator()(const Polyline& l) const { return bbox_of(std::span(l.points)); }
    BBox operator()(const Polygon& p) const { return bbox_of(std::span(p.outer)); }
  };
  return std::visit(Visitor{}, g);
}

bool is_closed(const Ring& ring) { return ring.size() >= 4 && ring.front() == ring.back(); }

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = std::fabs(b.lat - a.lat) * kDegToRad;
  const double dlon = std::fabs(b.lon - a.lon) * kDegToRad;
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  const double h = s_lat * s_lat +
                   std::cos(a.lat * kDegToRad) * std::cos(b.lat * kDegToRad) * s_lon * s_lon;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

PlanarPoint local_project(const GeoPoint& origin, const GeoPoint& p) {
  const double k = kEarthRadiusM * kDegToRad;
  return {k * (p.lon - origin.lon) * std::cos(origin.lat * kDegToRad),
          k * (p.lat - origin.lat)};
}

double projected_length(const GeoPoint& origin, const Polyline& line) {
  double total = 0.0;
  for (std::size_t i = 1; i < line.points.size(); ++i) {
    const PlanarPoint a = local_project(origin, line.points[i - 1]);
    const PlanarPoint b = local_project(origin, line.points[i]);
    total += std::hypot(b.x - a.x, b.y - a.y);
  }
  return total;
}

double segment_length_in_disc(const PlanarPoint& a, const PlanarPoint& b, double radius) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return 0.0;

  // Parameter of the point on the supporting line closest to the origin; the
  // chord half-width is measured from there to stay stable when |a| >> radius.
  const double tc = -(a.x * dx + a.y * dy) / len2;
  const double hx = a.x + tc * dx;
  const double hy = a.y + tc * dy;
  const double rem = radius * radius - (hx * hx + hy * hy);
  if (rem <= 0.0) return 0.0;

  const double half = std::sqrt(rem / len2);
  const double t0 = std::max(0.0, tc - half);
  const double t1 = std::min(1.0, tc + half);
  if (t1 <= t0) return 0.0;
  return (t1 - t0) * std::sqrt(len2);
}

double clip_length_in_disc(const GeoPoint& center, double radius, const Polyline& line) {
  double total = 0.0;
  if (line.points.empty()) return total;
  PlanarPoint prev = local_project(center, line.points.front());
  for (std::size_t i = 1; i < line.points.size(); ++i) {
    const PlanarPoint cur = local_project(center, line.points[i]);
    total += segment_length_in_disc(prev, cur, radius);
    prev = cur;
  }
  return total;
}

bool point_in_polygon(const GeoPoint& p, const Polygon& poly) {
  if (poly.outer.empty()) return false;
  if (on_ring_boundary(p, poly.outer)) return true;
  for (const auto& hole : poly.holes) {
    if (on_ring_boundary(p, hole)) return true;
  }
  bool odd = ray_parity(p, poly.outer);
  for (const auto& hole : poly.holes) {
    if (ray_parity(p, hole)) odd = !odd;
  }
  return odd;
}

double min_distance_to_polygon(const GeoPoint& p, const Polygon& poly) {
  if (point_in_polygon(p, poly)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto scan = [&](const Ring& ring) {
    for (std::size_t i = 1; i < ring.size(); ++i) {
      best = std::min(best, origin_to_segment(local_project(p, ring[i - 1]),
                                              local_project(p, ring[i])));
    }
  };
  scan(poly.outer);
  for (const auto& hole : poly.holes) scan(hole);
  return best;
}

GeoPoint representative_point(const Polygon& poly) {
  double cx = 0.0;
  double cy = 0.0;
  double area2 = ring_signed_area2(poly.outer, cx, cy);
  for (const auto& hole : poly.holes) {
    double hx = 0.0;
    double hy = 0.0;
    double ha = ring_signed_area2(hole, hx, hy);
    // Holes subtract regardless of their winding direction.
    if ((ha > 0) == (area2 > 0)) {
      ha = -ha;
      hx = -hx;
      hy = -hy;
    }
    area2 += ha;
    cx += hx;
    cy += hy;
  }
  if (area2 != 0.0) {
    const GeoPoint centroid{cx / (3.0 * area2), cy / (3.0 * area2)};
    bool on_edge = on_ring_boundary(centroid, poly.outer);
    for (const auto& hole : poly.holes) on_edge = on_edge || on_ring_boundary(centroid, hole);
    if (!on_edge && point_in_polygon(centroid, poly)) return centroid;
  }

  const BBox box = bbox_of(std::span(poly.outer));
  const double y = area2 != 0.0 ? cy / (3.0 * area2) : 0.5 * (box.min_lat + box.max_lat);
  const double scan_y = (y > box.min_lat && y < box.max_lat) ? y : 0.5 * (box.min_lat + box.max_lat);

  std::vector<double> xs;
  auto collect = [&](const Ring& ring) {
    for (std::size_t i = 1; i < ring.size(); ++i) {
      const GeoPoint& a = ring[i - 1];
      const GeoPoint& b = ring[i];
      if ((a.lat > scan_y) != (b.lat > scan_y)) {
        xs.push_back(a.lon + (scan_y - a.lat) * (b.lon - a.lon) / (b.lat - a.lat));
      }
    }
  };
  collect(poly.outer);
  for (const auto& hole : poly.holes) collect(hole);
  std::sort(xs.begin(), xs.end());

  double best_width = -1.0;
  GeoPoint best = poly.outer.front();
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
    const double w = xs[i + 1] - xs[i];
    if (w > best_width) {
      best_width = w;
      best = {0.5 * (xs[i] + xs[i + 1]), scan_y};
    }
  }
  return best;
}

}  // namespace ejb
