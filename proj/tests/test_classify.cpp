#include <doctest.h>

#include <random>

#include "ejb/classify.hpp"
#include "ejb/error.hpp"
#include "oracles.hpp"

using namespace ejb;

namespace {

std::vector<std::size_t> class_sizes(const std::vector<double>& values, const BreakSet& bs) {
  std::vector<std::size_t> sizes(bs.k, 0);
  for (double v : values) ++sizes[assign_class(v, bs)];
  return sizes;
}

}  // namespace

TEST_CASE("jenks: small fixed cases") {
  const std::vector<double> v{1, 2, 3, 100, 101, 102};
  const BreakSet bs = jenks_breaks(v, 2);
  CHECK(bs.breaks == std::vector<double>{3});
  CHECK(bs.k == 2);
  CHECK(jenks_partition(v, 2).cost == doctest::Approx(4.0));

  // Two optimal partitions tie; the smaller first class wins.
  const std::vector<double> tie{1, 2, 3};
  CHECK(jenks_partition(tie, 2).class_ends == std::vector<std::size_t>{1, 3});

  const std::vector<double> same{4, 4, 4};
  const BreakSet one = jenks_breaks(same, 1);
  CHECK(one.breaks.empty());
  CHECK(one.labels == std::vector<std::string>{"All"});
  CHECK_THROWS_AS(jenks_breaks(same, 2), ClassifyError);
  CHECK_THROWS_AS(jenks_breaks(std::vector<double>{}, 1), ClassifyError);
  CHECK_THROWS_AS(jenks_breaks(v, 0), ClassifyError);
  CHECK_THROWS_AS(jenks_breaks(v, 7), ClassifyError);

  // Each distinct value its own class.
  CHECK(jenks_breaks(v, 6).breaks == std::vector<double>{1, 2, 3, 100, 101});
}

TEST_CASE("jenks: matches exhaustive enumeration exactly") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nd(1, 12), vd(0, 30);
  int checked = 0;
  while (checked < 300) {
    const int n = nd(rng);
    std::vector<std::int64_t> iv(static_cast<std::size_t>(n));
    for (auto& x : iv) x = vd(rng) - 10;
    std::vector<std::int64_t> sorted = iv;
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    std::vector<double> dv(iv.begin(), iv.end());
    for (std::size_t k = 1; k <= std::min<std::size_t>(4, distinct); ++k) {
      const JenksPartition p = jenks_partition(dv, k);
      const auto best = oracle::exhaustive_jenks(iv, k, true);
      const auto any = oracle::exhaustive_jenks(iv, k, false);
      std::vector<std::int64_t> s(iv);
      std::sort(s.begin(), s.end());
      CHECK(oracle::equal(oracle::partition_cost(s, p.class_ends), best.cost));
      CHECK(oracle::equal(best.cost, any.cost));
      CHECK(p.class_ends == best.ends);
      const double exact = static_cast<double>(best.cost.num) / static_cast<double>(best.cost.den);
      CHECK(std::fabs(p.cost - exact) <= 1e-9 * std::max(1.0, exact));
      ++checked;
    }
  }
}

TEST_CASE("jenks: invariant under positive affine maps") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 50), a(0.1, 20), b(-100, 100);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(20);
    for (auto& x : v) x = u(rng);
    const double sa = a(rng), sb = b(rng);
    std::vector<double> w;
    for (double x : v) w.push_back(sa * x + sb);
    CHECK(jenks_partition(v, 4).class_ends == jenks_partition(w, 4).class_ends);
  }
}

TEST_CASE("jenks: input order does not matter") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 50);
  std::vector<double> v(40);
  for (auto& x : v) x = std::round(u(rng));
  const BreakSet a = jenks_breaks(v, 4);
  std::shuffle(v.begin(), v.end(), rng);
  const BreakSet b = jenks_breaks(v, 4);
  CHECK(a.breaks == b.breaks);
}

TEST_CASE("quantile breaks") {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
  const BreakSet bs = quantile_breaks(v, 4);
  CHECK(bs.breaks == std::vector<double>{2, 4, 6});
  CHECK(class_sizes(v, bs) == std::vector<std::size_t>{2, 2, 2, 2});
  CHECK(bs.warnings.empty());

  const std::vector<double> same(10, 3.0);
  const BreakSet flat = quantile_breaks(same, 4);
  CHECK(flat.k == 1);
  CHECK(flat.requested_k == 4);
  CHECK(flat.breaks.empty());
  CHECK_FALSE(flat.warnings.empty());

  const std::vector<double> heavy{0, 0, 0, 0, 0, 0, 1, 2};
  const BreakSet h = quantile_breaks(heavy, 4);
  CHECK(h.breaks == std::vector<double>{0});
  CHECK(h.k == 2);
  CHECK(h.warnings.size() == 2);
}

TEST_CASE("quantile: balanced class sizes for distinct values") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(1000);
  for (auto& x : v) x = u(rng);
  for (std::size_t k : {2u, 3u, 4u, 5u, 7u}) {
    const BreakSet bs = quantile_breaks(v, k);
    REQUIRE(bs.k == k);
    for (std::size_t s : class_sizes(v, bs)) {
      CHECK(s >= v.size() / k);
      CHECK(s <= (v.size() + k - 1) / k);
    }
    // Membership survives any strictly increasing transform.
    std::vector<double> w;
    for (double x : v) w.push_back(std::exp(3 * x) - 7);
    const BreakSet bw = quantile_breaks(w, k);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(assign_class(v[i], bs) == assign_class(w[i], bw));
  }
}

TEST_CASE("class assignment") {
  BreakSet bs;
  bs.k = 4;
  bs.breaks = {1.0, 2.0, 5.0};
  CHECK(assign_class(-3.0, bs) == 0);
  CHECK(assign_class(1.0, bs) == 0);
  CHECK(assign_class(1.5, bs) == 1);
  CHECK(assign_class(2.0, bs) == 1);
  CHECK(assign_class(5.0, bs) == 2);
  CHECK(assign_class(5.0001, bs) == 3);
  std::size_t prev = 0;
  for (double x = -1; x < 7; x += 0.01) {
    const std::size_t c = assign_class(x, bs);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("labels") {
  CHECK(default_labels(4) == std::vector<std::string>{"Low", "Medium", "High", "Very High"});
  CHECK(default_labels(2) == std::vector<std::string>{"Low", "High"});
  CHECK(default_labels(5).size() == 5);
  CHECK(default_labels(7)[6] == "Class 7");
  CHECK(to_string(ClassMethod::natural_breaks) == "natural_breaks");
  CHECK(parse_class_method("quantile") == ClassMethod::quantile);
  CHECK_FALSE(parse_class_method("equal_interval").has_value());
}

TEST_CASE("surface classification") {
  std::vector<ZoneBurden> zs;
  const double cpbs[] = {0, 0, 1, 2, 10, 11, 30};
  const std::size_t n[] = {0, 2, 1, 1, 3, 2, 4};
  for (int i = 0; i < 7; ++i) zs.push_back({"z" + std::to_string(i), ZoneScale::census_tract, cpbs[i], n[i], {}});
  const ClassifiedSurface s = classify_surface(zs, ZoneScale::census_tract, ClassMethod::natural_breaks, 3);
  REQUIRE(s.class_index.size() == 7);
  CHECK(s.class_index.back() == 2);
  CHECK(s.class_index[0] == 0);
  CHECK(s.break_set.k == 3);
  for (std::size_t i = 0; i < zs.size(); ++i) CHECK(s.class_index[i] == assign_class(zs[i].cpb, s.break_set));

  const ClassifiedSurface ex = classify_surface(zs, ZoneScale::census_tract, ClassMethod::quantile, 2, true);
  CHECK(ex.class_index.size() == 7);
  CHECK(ex.class_index[0] == 0);
  CHECK_THROWS_AS(classify_surface({}, ZoneScale::census_tract, ClassMethod::quantile, 2), ClassifyError);
}
