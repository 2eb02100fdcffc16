#include "ejb/geojson.hpp"

#include <cmath>
#include <set>

#include "ejb/error.hpp"

namespace ejb {

using nlohmann::json;

namespace {

std::string where(std::size_t index) { return "feature " + std::to_string(index); }

GeoPoint to_point(const json& c, std::size_t index) {
  if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
    throw GeoJsonError(where(index) + ": position must be an array of at least two numbers");
  }
  GeoPoint p{c[0].get<double>(), c[1].get<double>()};
  if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) {
    throw GeoJsonError(where(index) + ": non-finite coordinate");
  }
  return p;
}

std::vector<GeoPoint> to_points(const json& c, std::size_t index) {
  if (!c.is_array()) throw GeoJsonError(where(index) + ": expected an array of positions");
  std::vector<GeoPoint> pts;
  pts.reserve(c.size());
  for (const auto& pos : c) pts.push_back(to_point(pos, index));
  return pts;
}

Polyline to_polyline(const json& c, std::size_t index) {
  Polyline line{to_points(c, index)};
  if (line.points.size() < 2) {
    throw GeoJsonError(where(index) + ": LineString needs at least two positions");
  }
  return line;
}

Ring to_ring(const json& c, std::size_t index) {
  Ring ring = to_points(c, index);
  if (ring.size() < 4) {
    throw GeoJsonError(where(index) + ": polygon ring needs at least four positions");
  }
  if (ring.front() != ring.back()) {
    throw GeoJsonError(where(index) + ": polygon ring is not closed");
  }
  return ring;
}

Polygon to_polygon(const json& c, std::size_t index) {
  if (!c.is_array() || c.empty()) {
    throw GeoJsonError(where(index) + ": polygon needs an outer ring");
  }
  Polygon poly;
  poly.outer = to_ring(c[0], index);
  for (std::size_t i = 1; i < c.size(); ++i) poly.holes.push_back(to_ring(c[i], index));
  return poly;
}

std::vector<Geometry> to_parts(const json& geom, std::size_t index) {
  if (!geom.is_object()) {
    throw GeoJsonError(where(index) + ": unsupported geometry type null");
  }
  const auto type_it = geom.find("type");
  if (type_it == geom.end() || !type_it->is_string()) {
    throw GeoJsonError(where(index) + ": geometry has no type");
  }
  const std::string type = type_it->get<std::string>();
  const auto coords_it = geom.find("coordinates");
  if (coords_it == geom.end()) {
    throw GeoJsonError(where(index) + ": unsupported geometry type " + type);
  }
  const json& c = *coords_it;

  std::vector<Geometry> parts;
  if (type == "Point") {
    parts.emplace_back(to_point(c, index));
  } else if (type == "LineString") {
    parts.emplace_back(to_polyline(c, index));
  } else if (type == "MultiLineString") {
    if (!c.is_array()) throw GeoJsonError(where(index) + ": malformed MultiLineString");
    for (const auto& part : c) parts.emplace_back(to_polyline(part, index));
  } else if (type == "Polygon") {
    parts.emplace_back(to_polygon(c, index));
  } else if (type == "MultiPolygon") {
    if (!c.is_array()) throw GeoJsonError(where(index) + ": malformed MultiPolygon");
    for (const auto& part : c) parts.emplace_back(to_polygon(part, index));
  } else {
    throw GeoJsonError(where(index) + ": unsupported geometry type " + type);
  }
  if (parts.empty()) throw GeoJsonError(where(index) + ": empty " + type);
  return parts;
}

json point_json(const GeoPoint& p) { return json::array({p.lon, p.lat}); }

json points_json(const std::vector<GeoPoint>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(point_json(p));
  return arr;
}

json polygon_json(const Polygon& poly) {
  json rings = json::array({points_json(poly.outer)});
  for (const auto& h : poly.holes) rings.push_back(points_json(h));
  return rings;
}

}  // namespace

std::string json_scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  return v.dump();
}

std::vector<GeoFeature> parse_geojson(std::string_view text, const std::string& id_property) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw GeoJsonError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(),
                       e.byte);
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    throw GeoJsonError("top-level object is not a FeatureCollection");
  }
  const auto features_it = doc.find("features");
  if (features_it == doc.end() || !features_it->is_array()) {
    throw GeoJsonError("FeatureCollection has no features array");
  }

  std::vector<GeoFeature> out;
  std::set<std::string> seen;
  std::size_t index = 0;
  for (const auto& f : *features_it) {
    if (!f.is_object() || f.value("type", "") != "Feature") {
      throw GeoJsonError(where(index) + ": not a Feature object");
    }
    GeoFeature feature;
    if (auto p = f.find("properties"); p != f.end() && p->is_object()) feature.properties = *p;

    if (auto id = f.find("id"); id != f.end() && !id->is_null()) {
      feature.id = json_scalar_to_string(*id);
    } else if (!id_property.empty() && feature.properties.contains(id_property) &&
               !feature.properties[id_property].is_null()) {
      feature.id = json_scalar_to_string(feature.properties[id_property]);
    } else {
      feature.id = "f" + std::to_string(index);
    }
    if (!seen.insert(feature.id).second) {
      throw GeoJsonError(where(index) + ": duplicate feature id " + feature.id);
    }

    const auto g = f.find("geometry");
    if (g == f.end()) throw GeoJsonError(where(index) + ": missing geometry");
    feature.parts = to_parts(*g, index);
    feature.geometry = *g;
    out.push_back(std::move(feature));
    ++index;
  }
  return out;
}

json geometry_to_json(const std::vector<Geometry>& parts) {
  if (parts.empty()) return nullptr;
  if (parts.size() == 1) {
    const Geometry& g = parts.front();
    if (auto p = std::get_if<GeoPoint>(&g)) {
      return {{"type", "Point"}, {"coordinates", point_json(*p)}};
    }
    if (auto l = std::get_if<Polyline>(&g)) {
      return {{"type", "LineString"}, {"coordinates", points_json(l->points)}};
    }
    return {{"type", "Polygon"}, {"coordinates", polygon_json(std::get<Polygon>(g))}};
  }
  json coords = json::array();
  if (std::holds_alternative<Polyline>(parts.front())) {
    for (const auto& g : parts) coords.push_back(points_json(std::get<Polyline>(g).points));
    return {{"type", "MultiLineString"}, {"coordinates", coords}};
  }
  for (const auto& g : parts) coords.push_back(polygon_json(std::get<Polygon>(g)));
  return {{"type", "MultiPolygon"}, {"coordinates", coords}};
}

json features_to_geojson(const std::vector<GeoFeature>& features) {
  json arr = json::array();
  for (const auto& f : features) {
    arr.push_back({{"type", "Feature"},
                   {"id", f.id},
                   {"properties", f.properties},
                   {"geometry", geometry_to_json(f.parts)}});
  }
  return {{"type", "FeatureCollection"}, {"features", arr}};
}

}  // namespace ejb
