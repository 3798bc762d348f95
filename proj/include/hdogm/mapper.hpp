#pragma once
// Common face of the two occupancy mappers so the episode loop can swap them.

#include <cstdint>
#include <memory>
#include <string>

#include "hdogm/bhm.hpp"
#include "hdogm/vsa_ogm.hpp"

namespace hdogm {

class Mapper {
 public:
  virtual ~Mapper() = default;
  virtual std::string name() const = 0;
  virtual void ingest(const LabeledPointSet& points) = 0;
  /// Per-cell map values: scores in [-1, 1] or probabilities in (0, 1).
  virtual OccupancyGrid query_grid(double resolution) const = 0;
  /// Values above this call a cell occupied.
  virtual double threshold() const noexcept = 0;
  /// Scaled agent observation in [0, 0.5] with the agent cell at 1.0; the
  /// map's decision threshold lands on 0.25.
  virtual OccupancyGrid observation(const OccupancyGrid& grid, const Cell& agent) const = 0;
  virtual std::size_t model_size_bytes() const noexcept = 0;
};

struct VsaParams {
  std::size_t dim = 4096;
  double length_scale = 3.0;
  std::size_t tiles = 4;
};

class VsaMapper final : public Mapper {
 public:
  VsaMapper(const MapExtent& extent, const VsaParams& p, std::uint64_t seed)
      : map_(extent, p.tiles, p.dim, LengthScale(p.length_scale), seed) {}

  std::string name() const override { return "vsa"; }
  void ingest(const LabeledPointSet& points) override { map_.ingest(points); }
  OccupancyGrid query_grid(double resolution) const override { return map_.query_grid(resolution); }
  double threshold() const noexcept override { return 0.0; }
  OccupancyGrid observation(const OccupancyGrid& grid, const Cell& agent) const override {
    return to_observation(grid, agent);
  }
  std::size_t model_size_bytes() const noexcept override { return map_.model_size_bytes(); }
  const TiledVsaMap& map() const noexcept { return map_; }

 private:
  TiledVsaMap map_;
};

class BhmMapper final : public Mapper {
 public:
  BhmMapper(const MapExtent& extent, const BhmOptions& options) : map_(extent, options) {}

  std::string name() const override { return "bhm"; }
  void ingest(const LabeledPointSet& points) override { map_.update(points); }
  OccupancyGrid query_grid(double resolution) const override { return map_.predict_grid(resolution); }
  double threshold() const noexcept override { return 0.5; }
  OccupancyGrid observation(const OccupancyGrid& grid, const Cell& agent) const override {
    detail::require(grid.in_bounds(agent), "observation: agent cell out of bounds");
    OccupancyGrid obs = grid;
    for (auto& v : obs.values()) v = 0.5 * std::clamp(v, 0.0, 1.0);
    obs.at(agent.row, agent.col) = 1.0;
    return obs;
  }
  std::size_t model_size_bytes() const noexcept override { return map_.model_size_bytes(); }
  const HilbertMap& map() const noexcept { return map_; }

 private:
  HilbertMap map_;
};

}  // namespace hdogm
