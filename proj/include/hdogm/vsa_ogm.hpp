#pragma once
/**
 * Tiled hyperdimensional occupancy mapper.
 *
 * The extent is split into tiles_per_dim x tiles_per_dim square-uniform tiles.
 * Each tile keeps two class memories (occupied, empty): the bundle of
 * encode_point2d(local x, local y) over every training point of that class
 * that fell in the tile, with local coordinates measured from the tile center.
 *
 * A query at q scores
 *
 *     s_occ = dot(enc(q), M_occ) / max(1, n_occ)
 *     s_emp = dot(enc(q), M_emp) / max(1, n_emp)
 *     score = s_occ^2 - s_emp^2          in [-1, 1]
 *
 * Memories are kept both in the time domain and as half spectra; bundling is
 * linear so a batch of points is accumulated spectrally and transformed once.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "hdogm/detail/binary_io.hpp"
#include "hdogm/geometry.hpp"
#include "hdogm/hdc.hpp"

namespace hdogm {

enum class OccupancyClass : std::uint8_t { Empty = 0, Occupied = 1 };

class TiledVsaMap {
 public:
  TiledVsaMap(const MapExtent& extent, std::size_t tiles_per_dim, std::size_t dim, LengthScale l,
              std::uint64_t seed)
      : extent_((extent.validate(), extent)),
        tiles_per_dim_((detail::require(tiles_per_dim >= 1, "tiles_per_dim must be >= 1"), tiles_per_dim)),
        dim_((detail::require(dim >= 2, "dimension must be >= 2"), dim)),
        l_(l),
        seed_(seed),
        bx_(make_axis(dim, detail::mix_seed(seed))),
        by_(make_axis(dim, detail::mix_seed(seed ^ 0x5DEECE66Dull))),
        tiles_(tiles_per_dim * tiles_per_dim, Tile(dim)) {}

  const MapExtent& extent() const noexcept { return extent_; }
  std::size_t tiles_per_dim() const noexcept { return tiles_per_dim_; }
  std::size_t tile_count() const noexcept { return tiles_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  LengthScale length_scale() const noexcept { return l_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const AxisBasis& x_axis() const noexcept { return bx_; }
  const AxisBasis& y_axis() const noexcept { return by_; }
  std::uint64_t points_ingested() const noexcept { return points_ingested_; }
  /// Points that fell outside the extent and were clamped onto its boundary.
  std::uint64_t clamped_points() const noexcept { return clamped_points_; }

  /// tiles^2 * 2 memories * dim * 4-byte floats.
  std::size_t model_size_bytes() const noexcept { return tiles_.size() * 2 * dim_ * sizeof(float); }

  std::size_t tile_index(const Point2& p) const noexcept {
    const Point2 c = extent_.clamp(p);
    return tile_row(c.y) * tiles_per_dim_ + tile_col(c.x);
  }

  Point2 tile_center(std::size_t tile) const noexcept {
    const std::size_t r = tile / tiles_per_dim_;
    const std::size_t c = tile % tiles_per_dim_;
    return {extent_.x_min + (static_cast<double>(c) + 0.5) * tile_width(),
            extent_.y_min + (static_cast<double>(r) + 0.5) * tile_height()};
  }

  Hypervector memory(std::size_t tile, OccupancyClass cls) const {
    return Hypervector(tiles_.at(tile).time[index(cls)]);
  }
  std::uint64_t class_count(std::size_t tile, OccupancyClass cls) const {
    return tiles_.at(tile).count[index(cls)];
  }

  /// Bundles every point into its tile's class memory. Points outside the
  /// extent are clamped; a NaN coordinate rejects the whole batch unchanged.
  void ingest(const LabeledPointSet& points) {
    points.validate();
    if (points.empty()) return;
    const std::size_t bins = dim_ / 2 + 1;
    const auto px = bx_.half_phasors();
    const auto py = by_.half_phasors();
    const double inv_l = 1.0 / l_.value();

    std::vector<std::vector<Complex>> acc(tiles_.size() * 2);
    std::vector<std::uint64_t> added(tiles_.size() * 2, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Point2 p = extent_.clamp(points.points[i]);
      if (!(p == points.points[i])) ++clamped_points_;
      const std::size_t tile = tile_index(p);
      const Point2 center = tile_center(tile);
      const double sx = (p.x - center.x) * inv_l;
      const double sy = (p.y - center.y) * inv_l;
      const std::size_t slot = tile * 2 + points.labels[i];
      auto& a = acc[slot];
      if (a.empty()) a.assign(bins, Complex(0.0, 0.0));
      for (std::size_t k = 0; k < bins; ++k) a[k] += std::polar(1.0, px[k] * sx + py[k] * sy);
      ++added[slot];
    }

    const auto& fft = detail::RealFft::get(dim_);
    for (std::size_t slot = 0; slot < acc.size(); ++slot) {
      if (acc[slot].empty()) continue;
      Tile& t = tiles_[slot / 2];
      const std::size_t cls = slot % 2;
      auto& spec = t.spectrum[cls];
      for (std::size_t k = 0; k < bins; ++k) spec[k] += acc[slot][k];
      const auto delta = fft.inverse(std::move(acc[slot]));
      auto& time = t.time[cls];
      for (std::size_t n = 0; n < dim_; ++n) time[n] += delta[n];
      t.count[cls] += added[slot];
    }
    points_ingested_ += points.size();
  }

  double query_point(double x, double y) const {
    detail::require(std::isfinite(x) && std::isfinite(y), "query_point: non-finite coordinate");
    const std::size_t tile = tile_index({x, y});
    const Point2 center = tile_center(tile);
    const auto q = point_spectrum(bx_, by_, x - center.x, y - center.y, l_);
    const Tile& t = tiles_[tile];
    const double s_occ = detail::spectral_dot(q, t.spectrum[1], dim_) / normalizer(t.count[1]);
    const double s_emp = detail::spectral_dot(q, t.spectrum[0], dim_) / normalizer(t.count[0]);
    return s_occ * s_occ - s_emp * s_emp;
  }

  /// Scores at every cell center. Equivalent to query_point per cell; the
  /// query spectrum factors into a per-column and per-row term.
  OccupancyGrid query_grid(double resolution) const {
    OccupancyGrid grid = OccupancyGrid::covering(extent_, resolution);
    const std::size_t bins = dim_ / 2 + 1;
    const double inv_l = 1.0 / l_.value();
    const auto px = bx_.half_phasors();
    const auto py = by_.half_phasors();

    std::vector<std::size_t> col_tile(grid.cols());
    std::vector<std::vector<Complex>> col_term(grid.cols(), std::vector<Complex>(bins));
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const double x = grid.cell_center(0, c).x;
      col_tile[c] = tile_col(std::clamp(x, extent_.x_min, extent_.x_max));
      const double sx = (x - column_center(col_tile[c])) * inv_l;
      for (std::size_t k = 0; k < bins; ++k) col_term[c][k] = std::polar(1.0, px[k] * sx);
    }

    // Per-bin weights of the half-spectrum inner product.
    std::vector<double> weight(bins, 2.0);
    weight[0] = 1.0;
    if (dim_ % 2 == 0) weight[bins - 1] = 1.0;

    std::vector<Complex> row_term(bins);
    std::vector<std::vector<Complex>> w_occ(tiles_per_dim_, std::vector<Complex>(bins));
    std::vector<std::vector<Complex>> w_emp(tiles_per_dim_, std::vector<Complex>(bins));
    for (std::size_t r = 0; r < grid.rows(); ++r) {
      const double y = grid.cell_center(r, 0).y;
      const std::size_t trow = tile_row(std::clamp(y, extent_.y_min, extent_.y_max));
      const double sy = (y - row_center(trow)) * inv_l;
      for (std::size_t k = 0; k < bins; ++k) row_term[k] = std::polar(1.0, py[k] * sy);
      // w = weight * row_term * conj(M) / (n * dim); Re(col_term * w) sums to s.
      for (std::size_t tc = 0; tc < tiles_per_dim_; ++tc) {
        const Tile& t = tiles_[trow * tiles_per_dim_ + tc];
        const double so = 1.0 / (normalizer(t.count[1]) * static_cast<double>(dim_));
        const double se = 1.0 / (normalizer(t.count[0]) * static_cast<double>(dim_));
        for (std::size_t k = 0; k < bins; ++k) {
          w_occ[tc][k] = weight[k] * so * row_term[k] * std::conj(t.spectrum[1][k]);
          w_emp[tc][k] = weight[k] * se * row_term[k] * std::conj(t.spectrum[0][k]);
        }
      }
      for (std::size_t c = 0; c < grid.cols(); ++c) {
        const auto& ct = col_term[c];
        const auto& wo = w_occ[col_tile[c]];
        const auto& we = w_emp[col_tile[c]];
        double s_occ = 0.0, s_emp = 0.0;
        for (std::size_t k = 0; k < bins; ++k) {
          s_occ += ct[k].real() * wo[k].real() - ct[k].imag() * wo[k].imag();
          s_emp += ct[k].real() * we[k].real() - ct[k].imag() * we[k].imag();
        }
        grid.at(r, c) = s_occ * s_occ - s_emp * s_emp;
      }
    }
    return grid;
  }

  // Little-endian layout:
  //   "HDOGMVSA" u32 version=1 u32 dim u32 tiles_per_dim
  //   f64 x_min x_max y_min y_max  f64 length_scale  u64 seed
  //   u64 points_ingested u64 clamped_points
  //   per tile: u64 n_empty u64 n_occupied
  //   payload per tile: f32[dim] empty memory, f32[dim] occupied memory
  void save(std::ostream& os) const {
    detail::write_magic(os, "HDOGMVSA");
    detail::write_u32(os, 1);
    detail::write_u32(os, static_cast<std::uint32_t>(dim_));
    detail::write_u32(os, static_cast<std::uint32_t>(tiles_per_dim_));
    for (double v : {extent_.x_min, extent_.x_max, extent_.y_min, extent_.y_max, l_.value()})
      detail::write_f64(os, v);
    detail::write_u64(os, seed_);
    detail::write_u64(os, points_ingested_);
    detail::write_u64(os, clamped_points_);
    for (const Tile& t : tiles_) {
      detail::write_u64(os, t.count[0]);
      detail::write_u64(os, t.count[1]);
    }
    for (const Tile& t : tiles_)
      for (const auto& mem : t.time)
        for (double v : mem) detail::write_f32(os, static_cast<float>(v));
  }

  static TiledVsaMap load(std::istream& is) {
    detail::expect_magic(is, "HDOGMVSA");
    if (detail::read_u32(is) != 1) throw InvalidArgument("binary map: unsupported version");
    const std::size_t dim = detail::read_u32(is);
    const std::size_t tiles = detail::read_u32(is);
    MapExtent extent;
    extent.x_min = detail::read_f64(is);
    extent.x_max = detail::read_f64(is);
    extent.y_min = detail::read_f64(is);
    extent.y_max = detail::read_f64(is);
    const double l = detail::read_f64(is);
    const std::uint64_t seed = detail::read_u64(is);
    TiledVsaMap map(extent, tiles, dim, LengthScale(l), seed);
    map.points_ingested_ = detail::read_u64(is);
    map.clamped_points_ = detail::read_u64(is);
    for (Tile& t : map.tiles_) {
      t.count[0] = detail::read_u64(is);
      t.count[1] = detail::read_u64(is);
    }
    const auto& fft = detail::RealFft::get(dim);
    for (Tile& t : map.tiles_) {
      for (std::size_t cls = 0; cls < 2; ++cls) {
        for (auto& v : t.time[cls]) v = detail::read_f32(is);
        t.spectrum[cls] = fft.forward(t.time[cls]);
      }
    }
    return map;
  }

 private:
  struct Tile {
    explicit Tile(std::size_t dim)
        : time{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)},
          spectrum{std::vector<Complex>(dim / 2 + 1), std::vector<Complex>(dim / 2 + 1)} {}
    // Index 0 = empty, 1 = occupied (matches the point labels).
    std::vector<double> time[2];
    std::vector<Complex> spectrum[2];
    std::uint64_t count[2] = {0, 0};
  };

  static std::size_t index(OccupancyClass cls) noexcept { return static_cast<std::size_t>(cls); }
  static double normalizer(std::uint64_t n) noexcept { return std::max<double>(1.0, static_cast<double>(n)); }

  double tile_width() const noexcept { return extent_.width() / static_cast<double>(tiles_per_dim_); }
  double tile_height() const noexcept { return extent_.height() / static_cast<double>(tiles_per_dim_); }

  std::size_t tile_col(double x) const noexcept {
    const auto c = static_cast<std::size_t>(std::max(0.0, std::floor((x - extent_.x_min) / tile_width())));
    return std::min(c, tiles_per_dim_ - 1);
  }
  std::size_t tile_row(double y) const noexcept {
    const auto r = static_cast<std::size_t>(std::max(0.0, std::floor((y - extent_.y_min) / tile_height())));
    return std::min(r, tiles_per_dim_ - 1);
  }
  double column_center(std::size_t c) const noexcept {
    return extent_.x_min + (static_cast<double>(c) + 0.5) * tile_width();
  }
  double row_center(std::size_t r) const noexcept {
    return extent_.y_min + (static_cast<double>(r) + 0.5) * tile_height();
  }

  MapExtent extent_;
  std::size_t tiles_per_dim_;
  std::size_t dim_;
  LengthScale l_;
  std::uint64_t seed_;
  AxisBasis bx_;
  AxisBasis by_;
  std::vector<Tile> tiles_;
  std::uint64_t points_ingested_ = 0;
  std::uint64_t clamped_points_ = 0;
};

/// Maps scores in [-1, 1] affinely onto [0, 0.5] and marks the agent cell 1.0.
inline OccupancyGrid to_observation(const OccupancyGrid& scores, const Cell& agent) {
  detail::require(scores.in_bounds(agent), "to_observation: agent cell out of bounds");
  OccupancyGrid obs = scores;
  for (auto& v : obs.values()) v = 0.25 * (std::clamp(v, -1.0, 1.0) + 1.0);
  obs.at(agent.row, agent.col) = 1.0;
  return obs;
}

}  // namespace hdogm
