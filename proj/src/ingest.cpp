#include "ejb/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "ejb/burden.hpp"
#include "ejb/csv.hpp"
#include "ejb/error.hpp"

namespace ejb {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<long long> parse_count(std::string_view s) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

double to_fraction(double v, ShareUnit unit) { return unit == ShareUnit::percent ? v / 100.0 : v; }

bool matches(const Geometry& g, HazardKind kind) {
  switch (kind) {
    case HazardKind::point: return std::holds_alternative<GeoPoint>(g);
    case HazardKind::line: return std::holds_alternative<Polyline>(g);
    case HazardKind::polygon: return std::holds_alternative<Polygon>(g);
  }
  return false;
}

bool all_valid(const Geometry& g) {
  struct Visitor {
    bool operator()(const GeoPoint& p) const { return is_valid(p); }
    bool operator()(const Polyline& l) const {
      return std::all_of(l.points.begin(), l.points.end(), [](auto& p) { return is_valid(p); });
    }
    bool ring(const Ring& r) const {
      return std::all_of(r.begin(), r.end(), [](auto& p) { return is_valid(p); });
    }
    bool operator()(const Polygon& p) const {
      return ring(p.outer) &&
             std::all_of(p.holes.begin(), p.holes.end(), [&](auto& h) { return ring(h); });
    }
  };
  return std::visit(Visitor{}, g);
}

std::string row_subject(std::size_t line) { return "row " + std::to_string(line); }

}  // namespace

ParsedSchools parse_schools(std::string_view text, const SchoolColumns& columns,
                            char delimiter) {
  const CsvTable table = parse_delimited(text, delimiter);

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    col.emplace(std::string(trim(table.header[i])), i);
  }
  auto require = [&](const std::string& name, std::string_view role) -> std::size_t {
    auto it = col.find(name);
    if (it == col.end()) {
      throw IngestError("school table: missing column '" + name + "' (mapped as " +
                        std::string(role) + ")");
    }
    return it->second;
  };
  auto optional_col = [&](const std::string& name,
                          std::string_view role) -> std::optional<std::size_t> {
    if (name.empty()) return std::nullopt;
    return require(name, role);
  };

  if (columns.pss.empty() == columns.neighborhood_students.empty()) {
    throw IngestError(
        "school column mapping must name exactly one of neighborhood_students or pss");
  }
  const std::size_t c_id = require(columns.id, "id");
  const std::size_t c_lon = require(columns.lon, "lon");
  const std::size_t c_lat = require(columns.lat, "lat");
  const std::size_t c_total = require(columns.total_students, "total_students");
  const auto c_nbhd = optional_col(columns.neighborhood_students, "neighborhood_students");
  const auto c_pss = optional_col(columns.pss, "pss");
  const auto c_name = optional_col(columns.name, "name");
  const auto c_latinx = optional_col(columns.latinx_share, "latinx_share");
  const auto c_grade = optional_col(columns.grade_band, "grade_band");

  ParsedSchools out;
  std::set<std::string> ids;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    auto error = [&](std::string code, std::string message) {
      out.diagnostics.push_back(
          {Severity::error, std::move(code), row_subject(line), std::move(message)});
    };
    auto cell = [&](std::size_t c) -> std::string_view {
      return c < row.size() ? trim(row[c]) : std::string_view{};
    };

    if (row.size() != table.header.size()) {
      error("row_width", "row " + std::to_string(line) + " has " + std::to_string(row.size()) +
                             " fields, header has " + std::to_string(table.header.size()));
      continue;
    }

    School s;
    s.id = std::string(cell(c_id));
    if (s.id.empty()) {
      error("missing_id", "row " + std::to_string(line) + ": empty school id");
      continue;
    }
    if (c_name) s.name = std::string(cell(*c_name));
    if (c_grade) s.grade_band = std::string(cell(*c_grade));

    const auto lon = parse_real(cell(c_lon));
    const auto lat = parse_real(cell(c_lat));
    if (!lon || !lat) {
      error("non_numeric", "row " + std::to_string(line) + ": coordinates are not numeric");
      continue;
    }
    s.location = {*lon, *lat};

    const auto total = parse_count(cell(c_total));
    if (!total || *total < 0) {
      error("non_numeric", "row " + std::to_string(line) +
                               ": total_students is not a nonnegative integer");
      continue;
    }
    s.total_students = *total;

    if (c_nbhd) {
      const auto nbhd = parse_count(cell(*c_nbhd));
      if (!nbhd || *nbhd < 0) {
        error("non_numeric", "row " + std::to_string(line) +
                                 ": neighborhood_students is not a nonnegative integer");
        continue;
      }
      if (*nbhd > *total) {
        error("invalid_count", "row " + std::to_string(line) + ": neighborhood_students (" +
                                   std::to_string(*nbhd) + ") exceeds total_students (" +
                                   std::to_string(*total) + ")");
        continue;
      }
      s.neighborhood_students = *nbhd;
      if (*total > 0) s.pss_fraction = static_cast<double>(*nbhd) / static_cast<double>(*total);
    } else {
      const auto pss = parse_real(cell(*c_pss));
      if (!pss) {
        error("non_numeric", "row " + std::to_string(line) + ": pss is not numeric");
        continue;
      }
      const double f = to_fraction(*pss, columns.pss_unit);
      if (f < 0.0 || f > 1.0) {
        error("invalid_share", "row " + std::to_string(line) + ": pss outside its unit range");
        continue;
      }
      s.pss_fraction = f;
    }

    if (c_latinx && !cell(*c_latinx).empty()) {
      const auto share = parse_real(cell(*c_latinx));
      if (!share) {
        error("non_numeric", "row " + std::to_string(line) + ": latinx share is not numeric");
        continue;
      }
      const double f = to_fraction(*share, columns.latinx_unit);
      if (f < 0.0 || f > 1.0) {
        error("invalid_share",
              "row " + std::to_string(line) + ": latinx share outside its unit range");
        continue;
      }
      s.latinx_share = f;
    }

    if (!ids.insert(s.id).second) {
      error("duplicate_id", "row " + std::to_string(line) + ": duplicate school id " + s.id);
      continue;
    }
    out.schools.push_back(std::move(s));
  }
  return out;
}

HazardLayer make_hazard_layer(std::string id, std::string title, HazardKind kind,
                              std::vector<GeoFeature> features) {
  for (const auto& f : features) {
    for (const auto& g : f.parts) {
      if (!matches(g, kind)) {
        throw IngestError("layer " + id + ": feature " + f.id + " does not match layer kind " +
                          std::string(to_string(kind)));
      }
    }
  }
  return {std::move(id), std::move(title), kind, std::move(features)};
}

const Zone* ZoneSet::find(std::string_view id) const {
  for (const auto& z : zones) {
    if (z.id == id) return &z;
  }
  return nullptr;
}

ZoneSet make_zone_set(ZoneScale scale, std::vector<GeoFeature> features,
                      const ZoneProperties& props) {
  ZoneSet set;
  set.scale = scale;
  for (auto& f : features) {
    Zone z;
    z.id = f.id;
    z.name = z.id;
    if (!props.name_property.empty() && f.properties.contains(props.name_property) &&
        !f.properties[props.name_property].is_null()) {
      z.name = json_scalar_to_string(f.properties[props.name_property]);
    }
    for (auto& g : f.parts) {
      auto* poly = std::get_if<Polygon>(&g);
      if (!poly) throw IngestError("zone " + z.id + ": geometry must be Polygon or MultiPolygon");
      z.polygons.push_back(std::move(*poly));
    }
    z.bbox = bbox_of(std::span(z.polygons.front().outer));
    for (const auto& p : z.polygons) z.bbox.expand(bbox_of(std::span(p.outer)));

    if (!props.latinx_property.empty() && f.properties.contains(props.latinx_property)) {
      const auto& v = f.properties[props.latinx_property];
      if (v.is_number()) {
        const double share = to_fraction(v.get<double>(), props.latinx_unit);
        if (!(share >= 0.0 && share <= 1.0)) {
          throw IngestError("zone " + z.id + ": latinx share outside [0, 1]");
        }
        z.latinx_share = share;
      } else if (!v.is_null()) {
        throw IngestError("zone " + z.id + ": latinx share is not numeric");
      }
    }
    z.geometry = std::move(f.geometry);
    set.zones.push_back(std::move(z));
  }
  return set;
}

std::size_t ValidationReport::count(Severity s) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](auto& d) { return d.severity == s; }));
}

ValidationReport validate_dataset(const std::vector<School>& schools,
                                  const std::vector<HazardLayer>& layers,
                                  const std::vector<ZoneSet>& zone_sets,
                                  std::vector<Diagnostic> carried) {
  ValidationReport report;
  report.entries = std::move(carried);
  auto add = [&](Severity sev, std::string code, std::string subject, std::string message) {
    report.entries.push_back({sev, std::move(code), std::move(subject), std::move(message)});
  };

  std::vector<std::map<std::string, std::size_t>> zone_counts(zone_sets.size());
  for (const auto& s : schools) {
    if (!is_valid(s.location)) {
      add(Severity::error, "coordinate_out_of_range", "school " + s.id,
          "school location outside valid lon/lat range");
      continue;
    }
    if (!s.has_pss()) {
      add(Severity::warn, "zero_enrollment", "school " + s.id,
          "total_students is 0; PSS undefined, school excluded from burden");
    }
    std::string missing;
    for (std::size_t i = 0; i < zone_sets.size(); ++i) {
      if (auto z = assign_zone(s, zone_sets[i])) {
        ++zone_counts[i][*z];
      } else {
        if (!missing.empty()) missing += ", ";
        missing += to_string(zone_sets[i].scale);
      }
    }
    if (!missing.empty()) {
      add(Severity::warn, "school_outside_zones", "school " + s.id,
          "school lies outside every zone at scale(s): " + missing);
    }
  }

  for (const auto& layer : layers) {
    if (layer.features.empty()) {
      add(Severity::warn, "empty_layer", "layer " + layer.id, "hazard layer has no features");
    }
    for (const auto& f : layer.features) {
      if (!std::all_of(f.parts.begin(), f.parts.end(), all_valid)) {
        add(Severity::error, "coordinate_out_of_range", "layer " + layer.id + " feature " + f.id,
            "feature coordinates outside valid lon/lat range");
      }
    }
  }

  for (std::size_t i = 0; i < zone_sets.size(); ++i) {
    const auto& set = zone_sets[i];
    const std::string scale(to_string(set.scale));
    if (set.zones.empty()) {
      add(Severity::warn, "empty_zone_set", "scale " + scale, "zone set has no zones");
    }
    for (const auto& z : set.zones) {
      for (const auto& p : z.polygons) {
        if (!all_valid(Geometry{p})) {
          add(Severity::error, "coordinate_out_of_range", scale + " zone " + z.id,
              "zone coordinates outside valid lon/lat range");
          break;
        }
      }
      if (!zone_counts[i].contains(z.id)) {
        add(Severity::info, "zone_without_schools", scale + " zone " + z.id,
            "zone contains no schools; its collective burden is 0");
      }
    }
  }
  return report;
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warn: return "warn";
    case Severity::error: return "error";
  }
  return "";
}

std::string_view to_string(HazardKind k) {
  switch (k) {
    case HazardKind::point: return "point";
    case HazardKind::line: return "line";
    case HazardKind::polygon: return "polygon";
  }
  return "";
}

std::string_view to_string(ExposureUnit u) {
  return u == ExposureUnit::kilometers ? "kilometers" : "count";
}

std::string_view to_string(ZoneScale s) {
  return s == ZoneScale::census_tract ? "census_tract" : "community_area";
}

std::string_view to_string(ShareUnit u) { return u == ShareUnit::percent ? "percent" : "fraction"; }

std::optional<HazardKind> parse_hazard_kind(std::string_view s) {
  if (s == "point") return HazardKind::point;
  if (s == "line") return HazardKind::line;
  if (s == "polygon") return HazardKind::polygon;
  return std::nullopt;
}

std::optional<ZoneScale> parse_zone_scale(std::string_view s) {
  if (s == "community_area") return ZoneScale::community_area;
  if (s == "census_tract") return ZoneScale::census_tract;
  return std::nullopt;
}

std::optional<ShareUnit> parse_share_unit(std::string_view s) {
  if (s == "fraction") return ShareUnit::fraction;
  if (s == "percent") return ShareUnit::percent;
  return std::nullopt;
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& d : report.entries) {
    entries.push_back({{"severity", to_string(d.severity)},
                       {"code", d.code},
                       {"subject", d.subject},
                       {"message", d.message}});
  }
  return {{"usable", report.usable()},
          {"counts",
           {{"info", report.count(Severity::info)},
            {"warn", report.count(Severity::warn)},
            {"error", report.count(Severity::error)}}},
          {"entries", entries}};
}

}  // namespace ejb
