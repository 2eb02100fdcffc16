#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ejb/classify.hpp"

namespace ejb {

/// Share above which a zone counts as predominantly Latinx in reports.
inline constexpr double kPredominantShare = 0.5;

/// Sample Pearson correlation. Throws StatsError for mismatched lengths, fewer
/// than two points, or a constant series.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Pearson over mean ranks (ties share the average rank).
double spearman(std::span<const double> xs, std::span<const double> ys);

/// 1-based mean ranks.
std::vector<double> mean_ranks(std::span<const double> xs);

struct ClassStats {
  std::size_t class_index = 0;
  std::string label;
  std::size_t n_zones = 0;
  /// Zones with no school Latinx data; excluded from the share statistics.
  std::size_t n_missing_demographics = 0;
  /// Over zones: enrollment-weighted Latinx share of each zone's schools.
  std::optional<double> mean_latinx_share;
  std::optional<double> min_latinx_share;
  std::optional<double> max_latinx_share;
  /// Over all schools of the class, weighted by total enrollment.
  std::optional<double> student_weighted_latinx_share;
  /// Mean of the zones' resident shares, where the zone file provides one.
  std::optional<double> mean_resident_latinx_share;
  std::size_t n_predominantly_latinx = 0;
};

struct ClassDemographics {
  ZoneScale scale = ZoneScale::community_area;
  std::vector<ClassStats> classes;
  std::size_t n_zones = 0;
  /// Pearson between zone student share and resident share, when defined.
  std::optional<double> student_resident_correlation;
};

/// Enrollment-weighted Latinx share of the listed schools; nullopt when none
/// of them carries both enrollment and a share.
std::optional<double> student_latinx_share(const std::vector<std::string>& school_ids,
                                           const std::map<std::string, const School*>& by_id);

/// Per-class demographic summary. Schools enter through each zone's
/// contributing school list; `zone_set` supplies resident shares.
ClassDemographics class_demographics(const ClassifiedSurface& surface,
                                     const std::vector<School>& schools,
                                     const ZoneSet& zone_set);

struct MaupReport {
  std::vector<std::size_t> ca_histogram;
  std::vector<std::size_t> ct_histogram;
  /// Spearman between each mapped CT's cpb and its parent CA's cpb.
  std::optional<double> rank_correlation;
  std::string rank_correlation_note;
  std::vector<std::string> discordant_cts;
  std::vector<std::string> unmapped_cts;
  /// Share of zones in the top class at each scale.
  double ca_top_class_ratio = 0.0;
  double ct_top_class_ratio = 0.0;
};

using ContainmentMap = std::map<std::string, std::optional<std::string>>;

/// Parent CA of each CT, via a representative interior point of the CT.
ContainmentMap derive_containment(const ZoneSet& cts, const ZoneSet& cas);

MaupReport maup_compare(const ClassifiedSurface& ca_surface, const ClassifiedSurface& ct_surface,
                        const ContainmentMap& ct_to_ca);

nlohmann::json to_json(const ClassDemographics& d);
nlohmann::json to_json(const MaupReport& r);

}  // namespace ejb
