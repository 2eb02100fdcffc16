#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "ejb/spatial_index.hpp"
#include "oracles.hpp"

using namespace ejb;

namespace {

const GeoPoint kCenter{-87.65, 41.85};

std::vector<std::size_t> brute_bbox(const std::vector<BBox>& boxes, const BBox& q) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i].intersects(q)) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("empty and single-feature indexes") {
  const FeatureIndex empty = FeatureIndex::build(std::span<const BBox>{}, kMileM);
  CHECK(empty.feature_count() == 0);
  CHECK(empty.query_radius_candidates(kCenter, kMileM).empty());

  const std::vector<Geometry> one{kCenter};
  const FeatureIndex idx = FeatureIndex::build(std::span<const Geometry>(one), kMileM);
  CHECK(idx.occupied_cells() == 1);
  CHECK(idx.query_radius_candidates(kCenter, 10.0) == std::vector<std::size_t>{0});
  CHECK(idx.query_radius_candidates({-80.0, 41.85}, 10.0).empty());
}

TEST_CASE("cell size follows the hint in meters") {
  const std::vector<Geometry> g{kCenter, GeoPoint{-87.6, 41.9}};
  const FeatureIndex idx = FeatureIndex::build(std::span<const Geometry>(g), 1000.0);
  CHECK(idx.cell_lat_deg() == doctest::Approx(1000.0 / kMetersPerDegree).epsilon(1e-9));
  CHECK(idx.cell_lon_deg() > idx.cell_lat_deg());
}

TEST_CASE("a polyline is registered in every cell it spans") {
  const GeoPoint a = oracle::offset(kCenter, -2500, 0);
  const GeoPoint b = oracle::offset(kCenter, 2500, 0);
  const std::vector<Geometry> g{Polyline{{a, b}}};
  const FeatureIndex idx = FeatureIndex::build(std::span<const Geometry>(g), 1000.0);
  CHECK(idx.occupied_cells() >= 5);
  for (double x : {-2400.0, -1200.0, 0.0, 1200.0, 2400.0}) {
    CHECK(idx.cell_members(oracle::offset(kCenter, x, 0)) == std::vector<std::size_t>{0});
  }
}

TEST_CASE("disc bbox covers both disc models") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), lat(-70, 70), r(10, 20000);
  for (int i = 0; i < 2000; ++i) {
    const GeoPoint c{-87.0, lat(rng)};
    const double radius = r(rng);
    const BBox box = disc_bbox(c, radius);
    const double a = ang(rng);
    const GeoPoint planar = oracle::offset(c, radius * std::cos(a), radius * std::sin(a));
    CHECK(box.contains(planar));
    // Walk outward along the bearing until the great-circle distance reaches r.
    double lo = 0, hi = 2 * radius;
    for (int it = 0; it < 60; ++it) {
      const double mid = (lo + hi) / 2;
      const GeoPoint q = oracle::offset(c, mid * std::cos(a), mid * std::sin(a));
      (haversine_distance(c, q) <= radius ? lo : hi) = mid;
    }
    CHECK(box.contains(oracle::offset(c, lo * std::cos(a), lo * std::sin(a))));
  }
}

TEST_CASE("candidates equal the bbox brute force for random points") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> d(-15000, 15000), r(100, 5000);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 10000; ++i) pts.push_back(oracle::offset(kCenter, d(rng), d(rng)));
  std::vector<BBox> boxes;
  for (const auto& p : pts) boxes.push_back({p.lon, p.lat, p.lon, p.lat});
  const FeatureIndex idx = FeatureIndex::build(std::span<const BBox>(boxes), kMileM);
  for (int q = 0; q < 200; ++q) {
    const GeoPoint c = oracle::offset(kCenter, d(rng), d(rng));
    const double radius = r(rng);
    const auto got = idx.query_radius_candidates(c, radius);
    CHECK(got == brute_bbox(boxes, disc_bbox(c, radius)));
    CHECK(std::is_sorted(got.begin(), got.end()));
    std::size_t within = 0, hit = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (haversine_distance(c, pts[i]) <= radius) {
        ++within;
        hit += std::binary_search(got.begin(), got.end(), i) ? 1 : 0;
      }
    }
    CHECK(hit == within);
  }
}

TEST_CASE("results do not depend on insertion order") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-8000, 8000), s(0, 3000);
  std::vector<BBox> boxes;
  for (int i = 0; i < 500; ++i) {
    const GeoPoint a = oracle::offset(kCenter, d(rng), d(rng));
    const GeoPoint b = oracle::offset(a, s(rng), s(rng));
    boxes.push_back({a.lon, a.lat, b.lon, b.lat});
  }
  std::vector<std::size_t> perm(boxes.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<BBox> shuffled;
  for (std::size_t i : perm) shuffled.push_back(boxes[i]);
  const FeatureIndex a = FeatureIndex::build(std::span<const BBox>(boxes), 700.0);
  const FeatureIndex b = FeatureIndex::build(std::span<const BBox>(shuffled), 700.0);
  for (int q = 0; q < 100; ++q) {
    const GeoPoint c = oracle::offset(kCenter, d(rng), d(rng));
    auto ra = a.query_radius_candidates(c, 1200.0);
    std::vector<std::size_t> rb;
    for (std::size_t j : b.query_radius_candidates(c, 1200.0)) rb.push_back(perm[j]);
    std::sort(rb.begin(), rb.end());
    CHECK(ra == rb);
  }
}

TEST_CASE("a feature spanning a huge area is still found") {
  std::vector<BBox> boxes{{-120.0, 20.0, -70.0, 50.0}, {kCenter.lon, kCenter.lat, kCenter.lon, kCenter.lat}};
  const FeatureIndex idx = FeatureIndex::build(std::span<const BBox>(boxes), 100.0);
  CHECK(idx.query_radius_candidates(kCenter, 50.0) == std::vector<std::size_t>{0, 1});
  CHECK(idx.query_radius_candidates({-100.0, 30.0}, 50.0) == std::vector<std::size_t>{0});
}
