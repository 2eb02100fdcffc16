#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ejb/burden.hpp"

namespace ejb {

enum class ClassMethod { natural_breaks, quantile };

struct BreakSet {
  ClassMethod method = ClassMethod::natural_breaks;
  /// Effective class count; equals breaks.size() + 1.
  std::size_t k = 1;
  /// Class count asked for; larger than k when quantile thresholds collapsed.
  std::size_t requested_k = 1;
  /// Strictly ascending upper bounds of classes 0..k-2.
  std::vector<double> breaks;
  std::vector<std::string> labels;
  std::vector<std::string> warnings;
};

/// Optimal contiguous partition of the sorted values.
struct JenksPartition {
  std::vector<double> sorted_values;
  /// Exclusive end offset (into sorted_values) of each class.
  std::vector<std::size_t> class_ends;
  /// Total within-class sum of squared deviations from class means.
  double cost = 0.0;
};

/// Fisher's exact optimal 1-D partition (dynamic programming over distinct
/// values, O(k n^2)). Among partitions whose cost ties the optimum within a
/// relative 1e-12, the one with the lexicographically smallest class ends wins.
/// Throws ClassifyError when values is empty, k == 0, or k exceeds the number
/// of distinct values.
JenksPartition jenks_partition(std::span<const double> values, std::size_t k);

BreakSet jenks_breaks(std::span<const double> values, std::size_t k);

/// Thresholds at the ceil(j*n/k)-th order statistic, j = 1..k-1. A threshold
/// equal to its predecessor or to the maximum value is dropped with a warning.
BreakSet quantile_breaks(std::span<const double> values, std::size_t k);

BreakSet compute_breaks(ClassMethod method, std::span<const double> values, std::size_t k);

/// Smallest j with value <= breaks[j], else k - 1.
std::size_t assign_class(double value, const BreakSet& bs);

/// "Low", "Medium", "High", "Very High" for k = 4; other counts get their own
/// fixed lists, falling back to "Class 1".."Class k".
std::vector<std::string> default_labels(std::size_t k);

struct ClassifiedSurface {
  ZoneScale scale = ZoneScale::community_area;
  std::vector<ZoneBurden> zones;
  BreakSet break_set;
  std::vector<std::size_t> class_index;
};

/// Breaks over every zone's cpb (or only zones with schools when
/// `exclude_empty_zones` is set); every zone is then classified.
ClassifiedSurface classify_surface(std::vector<ZoneBurden> zones, ZoneScale scale,
                                   ClassMethod method, std::size_t k,
                                   bool exclude_empty_zones = false);

std::string_view to_string(ClassMethod m);
std::optional<ClassMethod> parse_class_method(std::string_view s);

}  // namespace ejb
