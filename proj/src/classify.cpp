#include "ejb/classify.hpp"

#include <algorithm>
#include <limits>

#include "ejb/csv.hpp"
#include "ejb/error.hpp"

namespace ejb {

namespace {

// Prefix sums over distinct values (weighted by multiplicity), shifted by a
// central value to limit cancellation in S2 - S1^2 / W.
class ClassCost {
 public:
  ClassCost(const std::vector<double>& values, const std::vector<std::size_t>& weights) {
    const double shift = values[values.size() / 2];
    w_.assign(values.size() + 1, 0.0);
    s1_.assign(values.size() + 1, 0.0);
    s2_.assign(values.size() + 1, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double w = static_cast<double>(weights[i]);
      const double d = values[i] - shift;
      w_[i + 1] = w_[i] + w;
      s1_[i + 1] = s1_[i] + w * d;
      s2_[i + 1] = s2_[i] + w * d * d;
    }
  }

  // Within-class SSD of distinct values [b, e).
  double operator()(std::size_t b, std::size_t e) const {
    const double w = w_[e] - w_[b];
    const double s1 = s1_[e] - s1_[b];
    const double s2 = s2_[e] - s2_[b];
    return std::max(0.0, s2 - s1 * s1 / w);
  }

 private:
  std::vector<double> w_, s1_, s2_;
};

double two_pass_ssd(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ssd = 0.0;
  for (double x : xs) ssd += (x - mean) * (x - mean);
  return ssd;
}

}  // namespace

std::vector<std::string> default_labels(std::size_t k) {
  switch (k) {
    case 1: return {"All"};
    case 2: return {"Low", "High"};
    case 3: return {"Low", "Medium", "High"};
    case 4: return {"Low", "Medium", "High", "Very High"};
    case 5: return {"Very Low", "Low", "Medium", "High", "Very High"};
    default: break;
  }
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= k; ++i) labels.push_back("Class " + std::to_string(i));
  return labels;
}

JenksPartition jenks_partition(std::span<const double> values, std::size_t k) {
  if (values.empty()) throw ClassifyError("natural breaks need at least one value");
  if (k == 0) throw ClassifyError("class count must be at least 1");

  JenksPartition out;
  out.sorted_values.assign(values.begin(), values.end());
  std::sort(out.sorted_values.begin(), out.sorted_values.end());

  std::vector<double> distinct;
  std::vector<std::size_t> weight;
  for (double v : out.sorted_values) {
    if (distinct.empty() || distinct.back() != v) {
      distinct.push_back(v);
      weight.push_back(1);
    } else {
      ++weight.back();
    }
  }
  const std::size_t m = distinct.size();
  if (k > m) {
    throw ClassifyError("k = " + std::to_string(k) + " exceeds the " + std::to_string(m) +
                        " distinct values; lower k to at most " + std::to_string(m));
  }

  const ClassCost ssd(distinct, weight);
  constexpr double inf = std::numeric_limits<double>::infinity();

  // best[j][i]: optimal cost of splitting distinct[i..m) into j classes.
  std::vector<std::vector<double>> best(k + 1, std::vector<double>(m + 1, inf));
  for (std::size_t i = 0; i < m; ++i) best[1][i] = ssd(i, m);
  for (std::size_t j = 2; j <= k; ++j) {
    for (std::size_t i = 0; i + j <= m; ++i) {
      double b = inf;
      for (std::size_t e = i + 1; e + (j - 1) <= m; ++e) b = std::min(b, ssd(i, e) + best[j - 1][e]);
      best[j][i] = b;
    }
  }

  // Walk left to right taking the smallest end that stays optimal, which
  // yields the lexicographically smallest class ends among near-ties.
  const double tol = 1e-12 * std::max(ssd(0, m), std::numeric_limits<double>::min());
  std::vector<std::size_t> distinct_ends;
  std::size_t pos = 0;
  for (std::size_t j = k; j >= 2; --j) {
    const double target = best[j][pos] + tol;
    std::size_t chosen = m;
    for (std::size_t e = pos + 1; e + (j - 1) <= m; ++e) {
      if (ssd(pos, e) + best[j - 1][e] <= target) {
        chosen = e;
        break;
      }
    }
    distinct_ends.push_back(chosen);
    pos = chosen;
  }
  distinct_ends.push_back(m);

  std::size_t offset = 0;
  std::size_t d = 0;
  for (std::size_t end : distinct_ends) {
    for (; d < end; ++d) offset += weight[d];
    out.class_ends.push_back(offset);
  }

  std::size_t begin = 0;
  for (std::size_t end : out.class_ends) {
    out.cost += two_pass_ssd(std::span(out.sorted_values).subspan(begin, end - begin));
    begin = end;
  }
  return out;
}

BreakSet jenks_breaks(std::span<const double> values, std::size_t k) {
  const JenksPartition p = jenks_partition(values, k);
  BreakSet bs;
  bs.method = ClassMethod::natural_breaks;
  bs.k = k;
  bs.requested_k = k;
  for (std::size_t c = 0; c + 1 < p.class_ends.size(); ++c) {
    bs.breaks.push_back(p.sorted_values[p.class_ends[c] - 1]);
  }
  bs.labels = default_labels(k);
  return bs;
}

BreakSet quantile_breaks(std::span<const double> values, std::size_t k) {
  if (values.empty()) throw ClassifyError("quantile breaks need at least one value");
  if (k == 0) throw ClassifyError("class count must be at least 1");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  BreakSet bs;
  bs.method = ClassMethod::quantile;
  bs.requested_k = k;
  for (std::size_t j = 1; j < k; ++j) {
    const std::size_t rank = (j * n + k - 1) / k;  // ceil(j n / k), 1-based
    const double t = sorted[rank - 1];
    if ((!bs.breaks.empty() && bs.breaks.back() == t) || t == sorted.back()) {
      bs.warnings.push_back("quantile threshold " + std::to_string(j) + " (" + format_double(t) +
                            ") collapsed; fewer effective classes");
      continue;
    }
    bs.breaks.push_back(t);
  }
  bs.k = bs.breaks.size() + 1;
  bs.labels = default_labels(bs.k);
  return bs;
}

BreakSet compute_breaks(ClassMethod method, std::span<const double> values, std::size_t k) {
  return method == ClassMethod::quantile ? quantile_breaks(values, k) : jenks_breaks(values, k);
}

std::size_t assign_class(double value, const BreakSet& bs) {
  auto it = std::lower_bound(bs.breaks.begin(), bs.breaks.end(), value);
  return static_cast<std::size_t>(it - bs.breaks.begin());
}

ClassifiedSurface classify_surface(std::vector<ZoneBurden> zones, ZoneScale scale,
                                   ClassMethod method, std::size_t k, bool exclude_empty_zones) {
  std::vector<double> values;
  for (const auto& z : zones) {
    if (exclude_empty_zones && z.n_schools == 0) continue;
    values.push_back(z.cpb);
  }
  if (values.empty()) throw ClassifyError("no zone values to classify");

  ClassifiedSurface s;
  s.scale = scale;
  s.break_set = compute_breaks(method, values, k);
  s.class_index.reserve(zones.size());
  for (const auto& z : zones) s.class_index.push_back(assign_class(z.cpb, s.break_set));
  s.zones = std::move(zones);
  return s;
}

std::string_view to_string(ClassMethod m) {
  return m == ClassMethod::quantile ? "quantile" : "natural_breaks";
}

std::optional<ClassMethod> parse_class_method(std::string_view s) {
  if (s == "natural_breaks") return ClassMethod::natural_breaks;
  if (s == "quantile") return ClassMethod::quantile;
  return std::nullopt;
}

}  // namespace ejb
