#include "ejb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ejb/error.hpp"

namespace ejb {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw StatsError("correlation series differ in length");
  if (xs.size() < 2) throw StatsError("correlation needs at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw StatsError("correlation undefined for a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> mean_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw StatsError("correlation series differ in length");
  const auto rx = mean_ranks(xs);
  const auto ry = mean_ranks(ys);
  return pearson(rx, ry);
}

std::optional<double> student_latinx_share(const std::vector<std::string>& school_ids,
                                           const std::map<std::string, const School*>& by_id) {
  double weighted = 0.0;
  double enrollment = 0.0;
  for (const auto& id : school_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) continue;
    const School& s = *it->second;
    if (!s.latinx_share || s.total_students <= 0) continue;
    weighted += static_cast<double>(s.total_students) * *s.latinx_share;
    enrollment += static_cast<double>(s.total_students);
  }
  if (enrollment == 0.0) return std::nullopt;
  return weighted / enrollment;
}

ClassDemographics class_demographics(const ClassifiedSurface& surface,
                                     const std::vector<School>& schools,
                                     const ZoneSet& zone_set) {
  std::map<std::string, const School*> by_id;
  for (const auto& s : schools) by_id.emplace(s.id, &s);

  ClassDemographics out;
  out.scale = surface.scale;
  out.n_zones = surface.zones.size();
  const std::size_t k = surface.break_set.k;
  out.classes.resize(k);

  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    double weighted = 0.0;
    double enrollment = 0.0;
    double resident_sum = 0.0;
    std::size_t resident_n = 0;
  };
  std::vector<Acc> acc(k);
  std::vector<double> student_series;
  std::vector<double> resident_series;

  for (std::size_t c = 0; c < k; ++c) {
    out.classes[c].class_index = c;
    if (c < surface.break_set.labels.size()) out.classes[c].label = surface.break_set.labels[c];
  }

  for (std::size_t i = 0; i < surface.zones.size(); ++i) {
    const ZoneBurden& zb = surface.zones[i];
    const std::size_t c = surface.class_index[i];
    ClassStats& cs = out.classes[c];
    ++cs.n_zones;

    const Zone* zone = zone_set.find(zb.zone_id);
    if (zone && zone->latinx_share) {
      acc[c].resident_sum += *zone->latinx_share;
      ++acc[c].resident_n;
    }

    const auto share = student_latinx_share(zb.school_ids, by_id);
    if (!share) {
      ++cs.n_missing_demographics;
      continue;
    }
    acc[c].sum += *share;
    ++acc[c].n;
    cs.min_latinx_share = std::min(cs.min_latinx_share.value_or(*share), *share);
    cs.max_latinx_share = std::max(cs.max_latinx_share.value_or(*share), *share);
    if (*share > kPredominantShare) ++cs.n_predominantly_latinx;
    for (const auto& id : zb.school_ids) {
      const School& s = *by_id.at(id);
      if (!s.latinx_share || s.total_students <= 0) continue;
      acc[c].weighted += static_cast<double>(s.total_students) * *s.latinx_share;
      acc[c].enrollment += static_cast<double>(s.total_students);
    }
    if (zone && zone->latinx_share) {
      student_series.push_back(*share);
      resident_series.push_back(*zone->latinx_share);
    }
  }

  for (std::size_t c = 0; c < k; ++c) {
    ClassStats& cs = out.classes[c];
    if (acc[c].n > 0) cs.mean_latinx_share = acc[c].sum / static_cast<double>(acc[c].n);
    if (acc[c].enrollment > 0) cs.student_weighted_latinx_share = acc[c].weighted / acc[c].enrollment;
    if (acc[c].resident_n > 0) {
      cs.mean_resident_latinx_share = acc[c].resident_sum / static_cast<double>(acc[c].resident_n);
    }
  }

  try {
    out.student_resident_correlation = pearson(student_series, resident_series);
  } catch (const StatsError&) {
    out.student_resident_correlation.reset();
  }
  return out;
}

ContainmentMap derive_containment(const ZoneSet& cts, const ZoneSet& cas) {
  ContainmentMap out;
  for (const auto& ct : cts.zones) {
    // Largest part by bbox extent stands in for the tract.
    const Polygon* main = &ct.polygons.front();
    double best_extent = -1.0;
    for (const auto& p : ct.polygons) {
      const BBox b = bbox_of(std::span(p.outer));
      const double extent = (b.max_lon - b.min_lon) * (b.max_lat - b.min_lat);
      if (extent > best_extent) {
        best_extent = extent;
        main = &p;
      }
    }
    out[ct.id] = assign_zone(representative_point(*main), cas);
  }
  return out;
}

MaupReport maup_compare(const ClassifiedSurface& ca_surface, const ClassifiedSurface& ct_surface,
                        const ContainmentMap& ct_to_ca) {
  MaupReport r;
  r.ca_histogram.assign(ca_surface.break_set.k, 0);
  r.ct_histogram.assign(ct_surface.break_set.k, 0);
  for (std::size_t c : ca_surface.class_index) ++r.ca_histogram[c];
  for (std::size_t c : ct_surface.class_index) ++r.ct_histogram[c];
  if (!ca_surface.zones.empty()) {
    r.ca_top_class_ratio = static_cast<double>(r.ca_histogram.back()) /
                           static_cast<double>(ca_surface.zones.size());
  }
  if (!ct_surface.zones.empty()) {
    r.ct_top_class_ratio = static_cast<double>(r.ct_histogram.back()) /
                           static_cast<double>(ct_surface.zones.size());
  }

  std::map<std::string, std::size_t> ca_pos;
  for (std::size_t i = 0; i < ca_surface.zones.size(); ++i) ca_pos[ca_surface.zones[i].zone_id] = i;

  std::vector<std::pair<std::string, std::size_t>> cts;
  for (std::size_t i = 0; i < ct_surface.zones.size(); ++i) {
    cts.emplace_back(ct_surface.zones[i].zone_id, i);
  }
  std::sort(cts.begin(), cts.end());

  std::vector<double> ct_values;
  std::vector<double> ca_values;
  for (const auto& [ct_id, i] : cts) {
    auto m = ct_to_ca.find(ct_id);
    std::optional<std::size_t> parent;
    if (m != ct_to_ca.end() && m->second) {
      if (auto p = ca_pos.find(*m->second); p != ca_pos.end()) parent = p->second;
    }
    if (!parent) {
      r.unmapped_cts.push_back(ct_id);
      continue;
    }
    ct_values.push_back(ct_surface.zones[i].cpb);
    ca_values.push_back(ca_surface.zones[*parent].cpb);
    if (ct_surface.class_index[i] != ca_surface.class_index[*parent]) {
      r.discordant_cts.push_back(ct_id);
    }
  }

  try {
    r.rank_correlation = spearman(ct_values, ca_values);
  } catch (const StatsError& e) {
    r.rank_correlation_note = e.what();
  }
  return r;
}

json to_json(const ClassDemographics& d) {
  json classes = json::array();
  for (const auto& c : d.classes) {
    classes.push_back({{"class_index", c.class_index},
                       {"label", c.label},
                       {"n_zones", c.n_zones},
                       {"n_missing_demographics", c.n_missing_demographics},
                       {"mean_latinx_share", optional_number(c.mean_latinx_share)},
                       {"min_latinx_share", optional_number(c.min_latinx_share)},
                       {"max_latinx_share", optional_number(c.max_latinx_share)},
                       {"student_weighted_latinx_share",
                        optional_number(c.student_weighted_latinx_share)},
                       {"mean_resident_latinx_share", optional_number(c.mean_resident_latinx_share)},
                       {"n_predominantly_latinx", c.n_predominantly_latinx}});
  }
  return {{"scale", to_string(d.scale)},
          {"n_zones", d.n_zones},
          {"share_unit", "fraction"},
          {"predominant_share_threshold", kPredominantShare},
          {"student_resident_correlation", optional_number(d.student_resident_correlation)},
          {"classes", classes}};
}

json to_json(const MaupReport& r) {
  return {{"scales", {"community_area", "census_tract"}},
          {"community_area_histogram", r.ca_histogram},
          {"census_tract_histogram", r.ct_histogram},
          {"community_area_top_class_ratio", r.ca_top_class_ratio},
          {"census_tract_top_class_ratio", r.ct_top_class_ratio},
          {"rank_correlation", optional_number(r.rank_correlation)},
          {"rank_correlation_note", r.rank_correlation_note},
          {"discordant_census_tracts", r.discordant_cts},
          {"unmapped_census_tracts", r.unmapped_cts}};
}

}  // namespace ejb
