#include "ejb/burden.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <mutex>
#include <thread>

#include "ejb/error.hpp"

namespace ejb {

namespace {

bool feature_within(const GeoFeature& f, HazardKind kind, const GeoPoint& center, double r) {
  for (const auto& g : f.parts) {
    if (kind == HazardKind::point) {
      if (haversine_distance(center, std::get<GeoPoint>(g)) <= r) return true;
    } else if (min_distance_to_polygon(center, std::get<Polygon>(g)) <= r) {
      return true;
    }
  }
  return false;
}

double feature_length_m(const GeoFeature& f, const GeoPoint& center, double r) {
  double total = 0.0;
  for (const auto& g : f.parts) total += clip_length_in_disc(center, r, std::get<Polyline>(g));
  return total;
}

}  // namespace

FeatureIndex build_layer_index(const HazardLayer& layer, double cell_size_hint_m) {
  std::vector<BBox> boxes;
  boxes.reserve(layer.features.size());
  for (const auto& f : layer.features) {
    BBox box = bbox_of(f.parts.front());
    for (const auto& g : f.parts) box.expand(bbox_of(g));
    boxes.push_back(box);
  }
  return FeatureIndex::build(boxes, cell_size_hint_m);
}

ExposureResult hazard_exposure(const School& school, const HazardLayer& layer, double radius_m,
                               const FeatureIndex* index) {
  if (!(radius_m > 0.0)) throw ConfigError("radius must be positive");
  if (index && index->feature_count() != layer.features.size()) {
    throw ConfigError("spatial index was not built over layer " + layer.id);
  }

  std::vector<std::size_t> ids;
  if (index) {
    ids = index->query_radius_candidates(school.location, radius_m);
  } else {
    ids.resize(layer.features.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  }

  ExposureResult out{school.id, layer.id, radius_m, 0.0, layer.exposure_unit()};
  if (layer.kind == HazardKind::line) {
    double meters = 0.0;
    for (std::size_t id : ids) meters += feature_length_m(layer.features[id], school.location, radius_m);
    out.hs = meters / 1000.0;
  } else {
    std::size_t count = 0;
    for (std::size_t id : ids) {
      if (feature_within(layer.features[id], layer.kind, school.location, radius_m)) ++count;
    }
    out.hs = static_cast<double>(count);
  }
  return out;
}

std::vector<ExposureResult> compute_exposures(const std::vector<School>& schools,
                                              const HazardLayer& layer, double radius_m,
                                              const FeatureIndex* index, unsigned threads) {
  std::vector<ExposureResult> out(schools.size());
  threads = std::clamp<unsigned>(threads, 1, std::max<std::size_t>(1, schools.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < schools.size(); ++i) {
      out[i] = hazard_exposure(schools[i], layer, radius_m, index);
    }
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < schools.size(); i = next++) {
          try {
            out[i] = hazard_exposure(schools[i], layer, radius_m, index);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

BurdenScore proximity_burden(const School& school, const ExposureResult& exposure) {
  if (!school.has_pss()) {
    throw std::logic_error("school " + school.id + " has no enrolled students; PSS undefined");
  }
  if (exposure.school_id != school.id) {
    throw std::logic_error("exposure for " + exposure.school_id + " applied to " + school.id);
  }
  return {school.id,        exposure.layer_id, exposure.radius_m,
          school.pss_fraction, exposure.hs,   school.pss_fraction * exposure.hs};
}

std::optional<std::string> assign_zone(const GeoPoint& location, const ZoneSet& zone_set) {
  const std::string* best = nullptr;
  for (const auto& z : zone_set.zones) {
    if (!z.bbox.contains(location)) continue;
    if (best && *best <= z.id) continue;
    const bool inside = std::any_of(z.polygons.begin(), z.polygons.end(),
                                    [&](const Polygon& p) { return point_in_polygon(location, p); });
    if (inside) best = &z.id;
  }
  if (!best) return std::nullopt;
  return *best;
}

std::optional<std::string> assign_zone(const School& school, const ZoneSet& zone_set) {
  return assign_zone(school.location, zone_set);
}

std::vector<ZoneBurden> collective_burden(const std::vector<BurdenScore>& scores,
                                          const ZoneAssignment& assignment,
                                          const ZoneSet& zone_set) {
  std::vector<const BurdenScore*> sorted;
  sorted.reserve(scores.size());
  for (const auto& s : scores) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->school_id < b->school_id; });

  std::map<std::string, std::size_t> slot;
  std::vector<ZoneBurden> out;
  out.reserve(zone_set.zones.size());
  for (const auto& z : zone_set.zones) {
    slot.emplace(z.id, out.size());
    out.push_back({z.id, zone_set.scale, 0.0, 0, {}});
  }

  for (const BurdenScore* s : sorted) {
    auto a = assignment.find(s->school_id);
    if (a == assignment.end() || !a->second) continue;
    auto it = slot.find(*a->second);
    if (it == slot.end()) continue;
    ZoneBurden& zb = out[it->second];
    zb.cpb += s->score;
    zb.school_ids.push_back(s->school_id);
    ++zb.n_schools;
  }
  return out;
}

}  // namespace ejb
