#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ejb/geo.hpp"

namespace ejb {

/// One GeoJSON feature. Multi* geometries are expanded into `parts`, all
/// sharing the feature id. `geometry` keeps the input geometry object as parsed.
struct GeoFeature {
  std::string id;
  std::vector<Geometry> parts;
  nlohmann::json properties = nlohmann::json::object();
  nlohmann::json geometry;
};

/// Parses a FeatureCollection (RFC 7946 subset: Point, LineString,
/// MultiLineString, Polygon, MultiPolygon). Feature ids come from the "id"
/// member, else from `id_property`, else "f<index>". Throws GeoJsonError.
std::vector<GeoFeature> parse_geojson(std::string_view text, const std::string& id_property = {});

/// Geometry object for a feature's parts (Multi* when more than one part).
nlohmann::json geometry_to_json(const std::vector<Geometry>& parts);

/// FeatureCollection rebuilt from parsed parts.
nlohmann::json features_to_geojson(const std::vector<GeoFeature>& features);

/// String form of a JSON scalar used as an identifier.
std::string json_scalar_to_string(const nlohmann::json& v);

}  // namespace ejb
