#include <doctest.h>

#include <random>

#include "ejb/burden.hpp"
#include "ejb/engine.hpp"
#include "ejb/error.hpp"
#include "ejb/stats.hpp"
#include "oracles.hpp"

using namespace ejb;

namespace {

ClassifiedSurface surface(ZoneScale scale, std::vector<std::pair<std::string, double>> zones,
                          std::vector<double> breaks) {
  ClassifiedSurface s;
  s.scale = scale;
  s.break_set.breaks = std::move(breaks);
  s.break_set.k = s.break_set.breaks.size() + 1;
  s.break_set.requested_k = s.break_set.k;
  s.break_set.labels = default_labels(s.break_set.k);
  for (auto& [id, v] : zones) {
    s.zones.push_back({id, scale, v, 1, {}});
    s.class_index.push_back(assign_class(v, s.break_set));
  }
  return s;
}

Zone rect_zone(const std::string& id, double lon0, double lat0, double lon1, double lat1) {
  Zone z;
  z.id = id;
  z.polygons.push_back({{{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}}, {}});
  z.bbox = {lon0, lat0, lon1, lat1};
  return z;
}

}  // namespace

TEST_CASE("pearson: exact lines and errors") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{3, 5, 7, 9, 11};
  const std::vector<double> down{10, 8, 6, 4, 2};
  CHECK(pearson(x, up) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, down) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(pearson(x, std::vector<double>(5, 2.0)), StatsError);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), StatsError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), StatsError);
}

TEST_CASE("pearson: random series against an extended-precision oracle") {
  std::mt19937_64 rng(50);
  std::normal_distribution<double> g(0, 1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(50), y(50);
    const double mix = (t % 11) / 10.0;
    for (std::size_t i = 0; i < 50; ++i) {
      x[i] = 1e3 + g(rng);
      y[i] = mix * x[i] + (1 - mix) * g(rng);
    }
    const double r = pearson(x, y);
    CHECK(std::fabs(r - static_cast<double>(oracle::pearson_ld(x, y))) <= 1e-12);
    CHECK(std::fabs(r) <= 1.0);
    std::vector<double> ax;
    for (double v : x) ax.push_back(-3.5 * v + 17);
    CHECK(pearson(ax, y) == doctest::Approx(-r).epsilon(1e-10));
  }
}

TEST_CASE("spearman with ties against hand ranks") {
  const std::vector<double> x{10, 20, 20, 30, 40, 40, 40, 50, 60, 70};
  const std::vector<double> y{3, 1, 4, 1, 5, 9, 2, 6, 5, 3};
  const std::vector<double> rx{1, 2.5, 2.5, 4, 6, 6, 6, 8, 9, 10};
  const std::vector<double> ry{4.5, 1.5, 6, 1.5, 7.5, 10, 3, 9, 7.5, 4.5};
  CHECK(mean_ranks(x) == rx);
  CHECK(mean_ranks(y) == ry);
  CHECK(spearman(x, y) == doctest::Approx(static_cast<double>(oracle::pearson_ld(rx, ry))).epsilon(1e-14));

  std::vector<double> inc{1, 5, 9, 100, 1000};
  std::vector<double> dec(inc.rbegin(), inc.rend());
  CHECK(spearman(inc, inc) == doctest::Approx(1.0));
  CHECK(spearman(inc, dec) == doctest::Approx(-1.0));
}

TEST_CASE("maup: hand-derived six-zone comparison") {
  const auto ca = surface(ZoneScale::community_area, {{"A", 10}, {"B", 2}}, {2});
  const auto ct = surface(ZoneScale::census_tract, {{"A1", 9}, {"A2", 1}, {"B1", 2}, {"B2", 3}}, {2});
  const ContainmentMap map{{"A1", "A"}, {"A2", "A"}, {"B1", "B"}, {"B2", "B"}};
  const MaupReport r = maup_compare(ca, ct, map);
  CHECK(r.ca_histogram == std::vector<std::size_t>{1, 1});
  CHECK(r.ct_histogram == std::vector<std::size_t>{2, 2});
  CHECK(r.discordant_cts == std::vector<std::string>{"A2", "B2"});
  CHECK(r.unmapped_cts.empty());
  REQUIRE(r.rank_correlation.has_value());
  CHECK(*r.rank_correlation == doctest::Approx(0.0));
  CHECK(r.ca_top_class_ratio == 0.5);
  CHECK(r.ct_top_class_ratio == 0.5);

  const ContainmentMap partial{{"A1", "A"}, {"A2", "A"}, {"B1", "B"}, {"B2", std::nullopt}};
  const MaupReport p = maup_compare(ca, ct, partial);
  CHECK(p.unmapped_cts == std::vector<std::string>{"B2"});
  CHECK(p.discordant_cts == std::vector<std::string>{"A2"});

  const auto j = to_json(r);
  CHECK(j["discordant_census_tracts"].size() == 2);
}

TEST_CASE("maup: identical partitions agree perfectly") {
  const auto ca = surface(ZoneScale::community_area, {{"1", 0}, {"2", 4}, {"3", 9}, {"4", 20}}, {4, 9});
  auto ct = ca;
  ct.scale = ZoneScale::census_tract;
  const ContainmentMap map{{"1", "1"}, {"2", "2"}, {"3", "3"}, {"4", "4"}};
  const MaupReport r = maup_compare(ca, ct, map);
  CHECK(r.discordant_cts.empty());
  CHECK(*r.rank_correlation == doctest::Approx(1.0));

  const auto flat = surface(ZoneScale::census_tract, {{"1", 1}, {"2", 1}, {"3", 1}, {"4", 1}}, {});
  const MaupReport f = maup_compare(flat, flat, map);
  CHECK_FALSE(f.rank_correlation.has_value());
  CHECK_FALSE(f.rank_correlation_note.empty());
}

TEST_CASE("maup: a CA split in two with every school in one half") {
  ZoneSet cas;
  cas.scale = ZoneScale::community_area;
  cas.zones = {rect_zone("A", 0, 0, 2, 1)};
  ZoneSet cts;
  cts.scale = ZoneScale::census_tract;
  cts.zones = {rect_zone("A1", 0, 0, 1, 1), rect_zone("A2", 1, 0, 2, 1)};
  const std::vector<BurdenScore> scores{{"s1", "l", 1, 0.5, 2, 1.0}, {"s2", "l", 1, 0.25, 12, 3.0}};
  const std::vector<GeoPoint> at{{0.2, 0.5}, {0.7, 0.3}};
  ZoneAssignment ca_asg, ct_asg;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ca_asg[scores[i].school_id] = assign_zone(at[i], cas);
    ct_asg[scores[i].school_id] = assign_zone(at[i], cts);
  }
  const auto ca = collective_burden(scores, ca_asg, cas);
  const auto ct = collective_burden(scores, ct_asg, cts);
  CHECK(ct[0].cpb == ca[0].cpb);
  CHECK(ct[0].cpb == 4.0);
  CHECK(ct[1].cpb == 0.0);
  CHECK(ct[1].n_schools == 0);
  const ContainmentMap m = derive_containment(cts, cas);
  CHECK(m.at("A1") == "A");
  CHECK(m.at("A2") == "A");
}

TEST_CASE("containment from geometry") {
  ZoneSet cas;
  cas.scale = ZoneScale::community_area;
  cas.zones = {rect_zone("A", 0, 0, 2, 1), rect_zone("B", 2, 0, 4, 1)};
  ZoneSet cts;
  cts.scale = ZoneScale::census_tract;
  cts.zones = {rect_zone("A1", 0, 0, 1, 1), rect_zone("A2", 1, 0, 2, 1), rect_zone("B1", 2, 0, 4, 1),
               rect_zone("X", 10, 10, 11, 11)};
  const ContainmentMap m = derive_containment(cts, cas);
  CHECK(m.at("A1") == "A");
  CHECK(m.at("A2") == "A");
  CHECK(m.at("B1") == "B");
  CHECK_FALSE(m.at("X").has_value());
}

TEST_CASE("class demographics") {
  std::vector<School> schools;
  auto add = [&](const std::string& id, long long total, std::optional<double> share) {
    School s;
    s.id = id;
    s.total_students = total;
    s.neighborhood_students = total / 2;
    s.pss_fraction = 0.5;
    s.latinx_share = share;
    schools.push_back(s);
  };
  add("a", 100, 0.9);
  add("b", 300, 0.5);
  add("c", 200, 0.2);
  add("d", 100, std::nullopt);

  ZoneSet zs;
  zs.zones = {rect_zone("z1", 0, 0, 1, 1), rect_zone("z2", 1, 0, 2, 1), rect_zone("z3", 2, 0, 3, 1)};
  zs.zones[0].latinx_share = 0.8;
  zs.zones[1].latinx_share = 0.3;

  ClassifiedSurface s = surface(ZoneScale::community_area, {{"z1", 5}, {"z2", 1}, {"z3", 0}}, {});
  s.zones[0].school_ids = {"a", "b"};
  s.zones[1].school_ids = {"c"};
  s.zones[2].school_ids = {"d"};

  const ClassDemographics one = class_demographics(s, schools, zs);
  REQUIRE(one.classes.size() == 1);
  const ClassStats& c = one.classes[0];
  CHECK(c.n_zones == 3);
  CHECK(c.n_missing_demographics == 1);
  const double z1 = (100 * 0.9 + 300 * 0.5) / 400.0;
  CHECK(*c.mean_latinx_share == doctest::Approx((z1 + 0.2) / 2));
  CHECK(*c.min_latinx_share == doctest::Approx(0.2));
  CHECK(*c.max_latinx_share == doctest::Approx(z1));
  CHECK(*c.student_weighted_latinx_share == doctest::Approx((90 + 150 + 40) / 600.0));
  CHECK(*c.mean_resident_latinx_share == doctest::Approx(0.55));
  CHECK(c.n_predominantly_latinx == 1);
  CHECK(*one.student_resident_correlation == doctest::Approx(1.0));

  const ClassifiedSurface split = surface(ZoneScale::community_area, {{"z1", 5}, {"z2", 1}, {"z3", 0}}, {1});
  ClassifiedSurface s2 = split;
  for (std::size_t i = 0; i < 3; ++i) s2.zones[i].school_ids = s.zones[i].school_ids;
  const ClassDemographics two = class_demographics(s2, schools, zs);
  CHECK(two.classes[1].n_zones == 1);
  CHECK(*two.classes[1].min_latinx_share == doctest::Approx(z1));
  CHECK(two.classes[0].n_missing_demographics == 1);
  CHECK(to_json(two)["classes"].size() == 2);
}

TEST_CASE("fixture: top class is predominantly Latinx and sharper at tract scale") {
  const Dataset data = load_dataset(load_config(EJB_FIXTURE_DIR "/config.json"));
  const RunRequest req = make_request(data, {});
  const ClassDemographics d = run_demographics(data, req);
  REQUIRE(d.classes.back().min_latinx_share.has_value());
  CHECK(*d.classes.back().min_latinx_share >= 0.58);
  const MaupReport m = run_maup(data, req);
  CHECK(m.ct_top_class_ratio >= m.ca_top_class_ratio);
  CHECK(m.unmapped_cts.empty());
}
