#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hdogm/vsa_ogm.hpp"

using namespace hdogm;

namespace {

const MapExtent kWorld{0.0, 20.0, 0.0, 20.0};

LabeledPointSet random_points(std::size_t n, std::uint64_t seed, const MapExtent& e) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(e.x_min, e.x_max), uy(e.y_min, e.y_max);
  LabeledPointSet s;
  for (std::size_t i = 0; i < n; ++i) {
    s.points.push_back({ux(rng), uy(rng)});
    s.labels.push_back(static_cast<std::uint8_t>(rng() % 2));
  }
  return s;
}

double max_memory_diff(const TiledVsaMap& a, const TiledVsaMap& b) {
  double m = 0.0;
  for (std::size_t t = 0; t < a.tile_count(); ++t) {
    for (auto cls : {OccupancyClass::Empty, OccupancyClass::Occupied}) {
      const auto ma = a.memory(t, cls);
      const auto mb = b.memory(t, cls);
      for (std::size_t i = 0; i < ma.dim(); ++i) m = std::max(m, std::abs(ma[i] - mb[i]));
    }
  }
  return m;
}

}  // namespace

TEST(VsaModelSize, ReportedConfigurations) {
  EXPECT_EQ(TiledVsaMap(kWorld, 4, 4096, LengthScale(3), 0).model_size_bytes(), 524288u);
  EXPECT_EQ(TiledVsaMap(kWorld, 8, 10000, LengthScale(1), 0).model_size_bytes(), 5120000u);
  EXPECT_EQ(TiledVsaMap(kWorld, 1, 2, LengthScale(1), 0).model_size_bytes(), 16u);
}

TEST(VsaModelSize, IndependentOfIngestedPoints) {
  TiledVsaMap map(kWorld, 2, 64, LengthScale(1), 3);
  const auto before = map.model_size_bytes();
  map.ingest(random_points(500, 1, kWorld));
  EXPECT_EQ(map.model_size_bytes(), before);
  EXPECT_EQ(map.tile_count() * 2, 8u);
}

TEST(VsaNewMap, RejectsBadArguments) {
  EXPECT_THROW(TiledVsaMap(MapExtent{0, 0, 0, 1}, 4, 64, LengthScale(1), 0), InvalidArgument);
  EXPECT_THROW(TiledVsaMap(MapExtent{0, 1, 2, 1}, 4, 64, LengthScale(1), 0), InvalidArgument);
  EXPECT_THROW(TiledVsaMap(kWorld, 0, 64, LengthScale(1), 0), InvalidArgument);
  EXPECT_THROW(TiledVsaMap(kWorld, 1, 1, LengthScale(1), 0), InvalidArgument);
}

TEST(VsaNewMap, StartsZeroed) {
  TiledVsaMap map(kWorld, 4, 256, LengthScale(3), 1);
  for (std::size_t t = 0; t < map.tile_count(); ++t) {
    EXPECT_EQ(map.memory(t, OccupancyClass::Occupied), Hypervector::zeros(256));
    EXPECT_EQ(map.memory(t, OccupancyClass::Empty), Hypervector::zeros(256));
  }
  EXPECT_EQ(map.query_point(3.3, 7.1), 0.0);
  const auto grid = map.query_grid(1.0);
  EXPECT_EQ(grid.rows(), 20u);
  EXPECT_EQ(grid.cols(), 20u);
  for (double v : grid.values()) EXPECT_EQ(v, 0.0);
  EXPECT_NE(map.x_axis().seed(), map.y_axis().seed());
}

TEST(VsaIngest, EmptySetIsNoOp) {
  TiledVsaMap map(kWorld, 4, 128, LengthScale(3), 1);
  const TiledVsaMap copy = map;
  map.ingest({});
  EXPECT_EQ(max_memory_diff(map, copy), 0.0);
  EXPECT_EQ(map.points_ingested(), 0u);
}

TEST(VsaIngest, SingleOccupiedPointLandsInItsTile) {
  TiledVsaMap map(kWorld, 4, 512, LengthScale(3), 9);
  const Point2 p{7.2, 13.9};
  map.ingest({{p}, {1}});
  const std::size_t tile = map.tile_index(p);
  const Point2 c = map.tile_center(tile);
  EXPECT_DOUBLE_EQ(c.x, 7.5);
  EXPECT_DOUBLE_EQ(c.y, 12.5);
  const auto expected = encode_point2d(map.x_axis(), map.y_axis(), p.x - c.x, p.y - c.y, LengthScale(3));
  const auto got = map.memory(tile, OccupancyClass::Occupied);
  for (std::size_t i = 0; i < got.dim(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
  for (std::size_t t = 0; t < map.tile_count(); ++t) {
    EXPECT_EQ(map.memory(t, OccupancyClass::Empty), Hypervector::zeros(512));
    if (t != tile) EXPECT_EQ(map.memory(t, OccupancyClass::Occupied), Hypervector::zeros(512));
  }
  EXPECT_EQ(map.points_ingested(), 1u);
  EXPECT_EQ(map.class_count(tile, OccupancyClass::Occupied), 1u);
}

TEST(VsaIngest, OrderInvariantAndLinear) {
  const auto a = random_points(300, 1, kWorld);
  const auto b = random_points(200, 2, kWorld);
  TiledVsaMap ab(kWorld, 4, 256, LengthScale(3), 4), ba = ab, joint = ab;
  ab.ingest(a);
  ab.ingest(b);
  ba.ingest(b);
  ba.ingest(a);
  auto all = a;
  all.append(b);
  joint.ingest(all);
  EXPECT_LT(max_memory_diff(ab, ba), 1e-9);
  EXPECT_LT(max_memory_diff(ab, joint), 1e-9);
  EXPECT_EQ(joint.points_ingested(), 500u);
}

TEST(VsaIngest, LocalityProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    TiledVsaMap map(kWorld, 4, 64, LengthScale(2), trial);
    map.ingest(random_points(50, trial, kWorld));
    const TiledVsaMap before = map;
    const Point2 p{std::uniform_real_distribution<double>(0, 20)(rng),
                   std::uniform_real_distribution<double>(0, 20)(rng)};
    map.ingest({{p}, {static_cast<std::uint8_t>(trial % 2)}});
    const std::size_t touched = map.tile_index(p);
    for (std::size_t t = 0; t < map.tile_count(); ++t) {
      if (t == touched) continue;
      for (auto cls : {OccupancyClass::Empty, OccupancyClass::Occupied})
        EXPECT_EQ(map.memory(t, cls), before.memory(t, cls));
    }
  }
}

TEST(VsaIngest, ClampsOutOfExtentAndRejectsNaN) {
  TiledVsaMap map(kWorld, 2, 64, LengthScale(1), 1);
  map.ingest({{{-3.0, 5.0}, {25.0, 25.0}, {4.0, 4.0}}, {1, 0, 1}});
  EXPECT_EQ(map.clamped_points(), 2u);
  EXPECT_EQ(map.points_ingested(), 3u);
  const TiledVsaMap before = map;
  EXPECT_THROW(map.ingest({{{1.0, 1.0}, {std::nan(""), 2.0}}, {1, 1}}), InvalidArgument);
  EXPECT_EQ(max_memory_diff(map, before), 0.0);
  EXPECT_EQ(map.points_ingested(), 3u);
  EXPECT_THROW(map.ingest({{{1.0, 1.0}}, {2}}), InvalidArgument);
}

TEST(VsaQuery, SingleOccupiedPointPeaksAtItself) {
  // Averaged over 20 seeds at dim 4096, l = 3.
  const MapExtent world{-20, 20, -20, 20};
  double at_point = 0.0, at_3l = 0.0;
  int positive = 0;
  for (int s = 0; s < 20; ++s) {
    TiledVsaMap map(world, 4, 4096, LengthScale(3), 100 + s);
    map.ingest({{{0.0, 0.0}}, {1}});
    const double q0 = map.query_point(0, 0);
    if (q0 > 0) ++positive;
    at_point += q0 / 20;
    at_3l += map.query_point(9, 0) / 20;
  }
  EXPECT_EQ(positive, 20);
  EXPECT_GT(at_point, 0.0);
  EXPECT_GT(at_point, at_3l);
  EXPECT_NEAR(at_point, 1.0, 1e-9);
}

TEST(VsaQuery, EmptyRayScoresNegative) {
  double mean = 0.0;
  int negative = 0, total = 0;
  for (int s = 0; s < 20; ++s) {
    TiledVsaMap map(kWorld, 4, 4096, LengthScale(3), 200 + s);
    LabeledPointSet ray;
    for (int k = 1; k <= 8; ++k) {
      ray.points.push_back({1.0 + 0.5 * k, 2.5});
      ray.labels.push_back(0);
    }
    map.ingest(ray);
    for (const auto& p : ray.points) {
      const double v = map.query_point(p.x, p.y);
      mean += v;
      if (v < 0) ++negative;
      ++total;
    }
  }
  EXPECT_EQ(negative, total);
  EXPECT_LT(mean, 0.0);
}

TEST(VsaQuery, LabelSwapNegatesScores) {
  auto pts = random_points(400, 8, kWorld);
  auto swapped = pts;
  for (auto& l : swapped.labels) l = static_cast<std::uint8_t>(1 - l);
  TiledVsaMap a(kWorld, 4, 512, LengthScale(3), 5), b = a;
  a.ingest(pts);
  b.ingest(swapped);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 20);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), y = u(rng);
    EXPECT_NEAR(a.query_point(x, y), -b.query_point(x, y), 1e-9);
  }
}

TEST(VsaQuery, ScoresWithinUnitInterval) {
  TiledVsaMap map(kWorld, 4, 1024, LengthScale(1), 2);
  map.ingest(random_points(2000, 3, kWorld));
  for (double v : map.query_grid(0.5).values()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_THROW(map.query_point(std::nan(""), 0), InvalidArgument);
}

TEST(VsaQueryGrid, MatchesPerCellQueries) {
  for (std::size_t dim : {255u, 1024u}) {
    const MapExtent e{-3.0, 17.5, 2.0, 14.0};
    TiledVsaMap map(e, 3, dim, LengthScale(2), 6);
    map.ingest(random_points(600, 9, e));
    const auto grid = map.query_grid(0.7);
    EXPECT_EQ(grid.rows(), static_cast<std::size_t>(std::ceil(12.0 / 0.7)));
    EXPECT_EQ(grid.cols(), static_cast<std::size_t>(std::ceil(20.5 / 0.7)));
    for (std::size_t r = 0; r < grid.rows(); ++r) {
      for (std::size_t c = 0; c < grid.cols(); ++c) {
        const Point2 p = grid.cell_center(r, c);
        EXPECT_NEAR(grid.at(r, c), map.query_point(p.x, p.y), 1e-9);
      }
    }
  }
}

TEST(VsaQueryGrid, RejectsNonPositiveResolution) {
  TiledVsaMap map(kWorld, 1, 16, LengthScale(1), 0);
  EXPECT_THROW(map.query_grid(0.0), InvalidArgument);
  EXPECT_THROW(map.query_grid(-1.0), InvalidArgument);
}

TEST(Observation, AffineMapAndAgentMarker) {
  OccupancyGrid scores(1, 4, 1.0, {0, 0});
  scores.at(0, 0) = -1.0;
  scores.at(0, 1) = 1.0;
  scores.at(0, 2) = 0.0;
  scores.at(0, 3) = 0.3;
  const auto obs = to_observation(scores, {0, 3});
  EXPECT_EQ(obs.at(0, 0), 0.0);
  EXPECT_EQ(obs.at(0, 1), 0.5);
  EXPECT_EQ(obs.at(0, 2), 0.25);
  EXPECT_EQ(obs.at(0, 3), 1.0);
  EXPECT_THROW(to_observation(scores, {1, 0}), InvalidArgument);
  EXPECT_THROW(to_observation(scores, {0, 4}), InvalidArgument);
}

TEST(VsaSerialization, RoundTripAndLayout) {
  TiledVsaMap map(kWorld, 4, 256, LengthScale(3), 77);
  map.ingest(random_points(300, 4, kWorld));
  std::stringstream ss;
  map.save(ss);
  const std::string bytes = ss.str();
  const std::size_t header = 8 + 4 * 3 + 8 * 5 + 8 * 3 + map.tile_count() * 16;
  EXPECT_EQ(bytes.size(), header + map.model_size_bytes());
  EXPECT_EQ(bytes.substr(0, 8), "HDOGMVSA");
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 0u);  // dim 256 little-endian: 00 01 00 00
  EXPECT_EQ(static_cast<unsigned char>(bytes[13]), 1u);

  const auto loaded = TiledVsaMap::load(ss);
  EXPECT_EQ(loaded.dim(), 256u);
  EXPECT_EQ(loaded.tiles_per_dim(), 4u);
  EXPECT_EQ(loaded.extent(), kWorld);
  EXPECT_EQ(loaded.points_ingested(), 300u);
  EXPECT_EQ(loaded.x_axis(), map.x_axis());
  EXPECT_LT(max_memory_diff(map, loaded), 1e-5);
  for (double x : {1.0, 7.5, 13.2})
    EXPECT_NEAR(loaded.query_point(x, 4.0), map.query_point(x, 4.0), 1e-5);

  std::stringstream bad("NOTAMAP!");
  EXPECT_THROW(TiledVsaMap::load(bad), InvalidArgument);
}
