#pragma once
/**
 * Bayesian Hilbert map with a diagonal (variance-only) posterior.
 *
 * Features are radial-basis responses to a fixed grid of hinge points plus a
 * bias term. Weights carry an independent Gaussian posterior N(m_j, s_j^2),
 * updated scan by scan with the Jaakkola-Jordan bound on the logistic
 * likelihood:
 *
 *   lambda(xi) = tanh(xi / 2) / (4 xi),    lambda(0) = 1/8
 *   xi_i^2     = sum_j phi_ij^2 s_j^2 + (sum_j phi_ij m_j)^2
 *   1/s_j^2    = 1/s0_j^2 + 2 sum_i lambda(xi_i) phi_ij^2
 *   m_j        = s_j^2 (m0_j / s0_j^2 + sum_i (y_i - 1/2) phi_ij)
 *
 * where (m0, s0^2) is the posterior before the scan. The xi / posterior pair
 * is iterated `vb_iterations` times per scan.
 *
 * Prediction uses the probit-moderated logistic
 *   p = sigma(mu / sqrt(1 + pi sigma^2 / 8)),  mu = m . phi,  sigma^2 = sum s_j^2 phi_j^2.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <utility>
#include <vector>

#include "hdogm/detail/binary_io.hpp"
#include "hdogm/errors.hpp"
#include "hdogm/geometry.hpp"

namespace hdogm {

enum class BhmKernel : std::uint32_t {
  /// exp(-bandwidth * d^2)
  Multiplier = 0,
  /// exp(-d^2 / (2 bandwidth^2))
  LengthScale = 1,
};

struct BhmOptions {
  double hinge_spacing = 1.0;
  double bandwidth = 6.0;
  double prior_variance = 1e4;
  BhmKernel kernel = BhmKernel::Multiplier;
  std::size_t vb_iterations = 1;
};

/// Sparse feature vector: (index, value) pairs, hinge indices first, bias last.
using SparseFeatures = std::vector<std::pair<std::size_t, double>>;

inline double jj_lambda(double xi) {
  xi = std::abs(xi);
  if (xi < 1e-8) return 0.125;
  return std::tanh(0.5 * xi) / (4.0 * xi);
}

inline double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// sigma(mu / sqrt(1 + pi var / 8)), kept strictly inside (0, 1).
inline double moderated_probability(double mu, double var) {
  constexpr double tiny = 0x1p-53;
  return std::clamp(logistic(mu / std::sqrt(1.0 + std::numbers::pi * var / 8.0)), tiny, 1.0 - tiny);
}

/// Mean and variance for `hinges` weights plus bias, as 4-byte floats.
constexpr std::size_t bhm_model_size_bytes(std::size_t hinges) noexcept {
  return 2 * (hinges + 1) * sizeof(float);
}

class HilbertMap {
 public:
  static constexpr double kFeatureFloor = 1e-6;

  HilbertMap(const MapExtent& extent, const BhmOptions& options) : extent_(extent), options_(options) {
    extent.validate();
    detail::require(std::isfinite(options.hinge_spacing) && options.hinge_spacing > 0,
                    "hinge spacing must be > 0");
    detail::require(std::isfinite(options.bandwidth) && options.bandwidth > 0, "bandwidth must be > 0");
    detail::require(std::isfinite(options.prior_variance) && options.prior_variance > 0,
                    "prior variance must be > 0");
    detail::require(options.vb_iterations >= 1, "vb_iterations must be >= 1");
    const auto count = [&](double span) {
      const double n = span / options.hinge_spacing;
      return static_cast<std::size_t>(std::ceil(n - 1e-9 * std::max(1.0, n))) + 1;
    };
    nx_ = count(extent.width());
    ny_ = count(extent.height());
    step_x_ = extent.width() / static_cast<double>(nx_ - 1);
    step_y_ = extent.height() / static_cast<double>(ny_ - 1);
    const double floor_log = -std::log(kFeatureFloor);
    cutoff_sq_ = options.kernel == BhmKernel::Multiplier
                     ? floor_log / options.bandwidth
                     : 2.0 * options.bandwidth * options.bandwidth * floor_log;
    mean_.assign(hinge_count() + 1, 0.0);
    variance_.assign(hinge_count() + 1, options.prior_variance);
  }

  HilbertMap(const MapExtent& extent, double hinge_spacing, double bandwidth, double prior_variance = 1e4)
      : HilbertMap(extent, BhmOptions{hinge_spacing, bandwidth, prior_variance}) {}

  const MapExtent& extent() const noexcept { return extent_; }
  const BhmOptions& options() const noexcept { return options_; }
  std::size_t hinge_count() const noexcept { return nx_ * ny_; }
  std::size_t weight_count() const noexcept { return hinge_count() + 1; }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& variance() const noexcept { return variance_; }

  Point2 hinge(std::size_t j) const {
    detail::require(j < hinge_count(), "hinge index out of range");
    return {extent_.x_min + static_cast<double>(j % nx_) * step_x_,
            extent_.y_min + static_cast<double>(j / nx_) * step_y_};
  }

  std::size_t model_size_bytes() const noexcept { return bhm_model_size_bytes(hinge_count()); }

  double kernel(double dist_sq) const noexcept {
    return options_.kernel == BhmKernel::Multiplier
               ? std::exp(-options_.bandwidth * dist_sq)
               : std::exp(-dist_sq / (2.0 * options_.bandwidth * options_.bandwidth));
  }

  SparseFeatures sparse_features(const Point2& p) const {
    detail::require(std::isfinite(p.x) && std::isfinite(p.y), "features: non-finite point");
    SparseFeatures f;
    const double radius = std::sqrt(cutoff_sq_);
    const auto lo = [](double v, double origin, double step) {
      return static_cast<long>(std::ceil((v - origin) / step));
    };
    const auto hi = [](double v, double origin, double step) {
      return static_cast<long>(std::floor((v - origin) / step));
    };
    const long c0 = std::max(0L, lo(p.x - radius, extent_.x_min, step_x_));
    const long c1 = std::min(static_cast<long>(nx_) - 1, hi(p.x + radius, extent_.x_min, step_x_));
    const long r0 = std::max(0L, lo(p.y - radius, extent_.y_min, step_y_));
    const long r1 = std::min(static_cast<long>(ny_) - 1, hi(p.y + radius, extent_.y_min, step_y_));
    for (long r = r0; r <= r1; ++r) {
      const double dy = p.y - (extent_.y_min + static_cast<double>(r) * step_y_);
      for (long c = c0; c <= c1; ++c) {
        const double dx = p.x - (extent_.x_min + static_cast<double>(c) * step_x_);
        const double v = kernel(dx * dx + dy * dy);
        if (v >= kFeatureFloor) f.emplace_back(static_cast<std::size_t>(r) * nx_ + static_cast<std::size_t>(c), v);
      }
    }
    f.emplace_back(hinge_count(), 1.0);
    return f;
  }

  /// Dense feature vector of length hinge_count() + 1 (bias last).
  std::vector<double> features(const Point2& p) const {
    std::vector<double> dense(weight_count(), 0.0);
    for (const auto& [j, v] : sparse_features(p)) dense[j] = v;
    return dense;
  }

  void update(const LabeledPointSet& points) {
    points.validate();
    if (points.empty()) return;
    std::vector<SparseFeatures> phi;
    phi.reserve(points.size());
    for (const auto& p : points.points) phi.push_back(sparse_features(p));

    const std::vector<double> prior_mean = mean_;
    const std::vector<double> prior_var = variance_;
    std::vector<double> precision(weight_count());
    std::vector<double> target(weight_count());
    std::vector<char> touched(weight_count(), 0);
    for (const auto& f : phi)
      for (const auto& [j, v] : f) touched[j] = 1;

    for (std::size_t iter = 0; iter < options_.vb_iterations; ++iter) {
      for (std::size_t j = 0; j < weight_count(); ++j) {
        if (!touched[j]) continue;
        precision[j] = 1.0 / prior_var[j];
        target[j] = prior_mean[j] / prior_var[j];
      }
      for (std::size_t i = 0; i < phi.size(); ++i) {
        double quad = 0.0, lin = 0.0;
        for (const auto& [j, v] : phi[i]) {
          quad += v * v * variance_[j];
          lin += v * mean_[j];
        }
        const double lam = jj_lambda(std::sqrt(quad + lin * lin));
        const double centered = static_cast<double>(points.labels[i]) - 0.5;
        for (const auto& [j, v] : phi[i]) {
          precision[j] += 2.0 * lam * v * v;
          target[j] += centered * v;
        }
      }
      for (std::size_t j = 0; j < weight_count(); ++j) {
        if (!touched[j]) continue;
        // Precision only accumulates; guard against rounding above the prior.
        variance_[j] = std::min(prior_var[j], 1.0 / precision[j]);
        mean_[j] = variance_[j] * target[j];
      }
    }
  }

  double predict(const Point2& p) const {
    double mu = 0.0, var = 0.0;
    for (const auto& [j, v] : sparse_features(p)) {
      mu += mean_[j] * v;
      var += variance_[j] * v * v;
    }
    return moderated_probability(mu, var);
  }

  OccupancyGrid predict_grid(double resolution) const {
    OccupancyGrid grid = OccupancyGrid::covering(extent_, resolution);
    for (std::size_t r = 0; r < grid.rows(); ++r)
      for (std::size_t c = 0; c < grid.cols(); ++c) grid.at(r, c) = predict(grid.cell_center(r, c));
    return grid;
  }

  // Little-endian layout mirroring the VSA map:
  //   "HDOGMBHM" u32 version=1 u32 kernel u32 vb_iterations
  //   f64 x_min x_max y_min y_max  f64 hinge_spacing bandwidth prior_variance
  //   payload: f32[h+1] mean, f32[h+1] variance
  void save(std::ostream& os) const {
    detail::write_magic(os, "HDOGMBHM");
    detail::write_u32(os, 1);
    detail::write_u32(os, static_cast<std::uint32_t>(options_.kernel));
    detail::write_u32(os, static_cast<std::uint32_t>(options_.vb_iterations));
    for (double v : {extent_.x_min, extent_.x_max, extent_.y_min, extent_.y_max, options_.hinge_spacing,
                     options_.bandwidth, options_.prior_variance})
      detail::write_f64(os, v);
    for (double v : mean_) detail::write_f32(os, static_cast<float>(v));
    for (double v : variance_) detail::write_f32(os, static_cast<float>(v));
  }

  static HilbertMap load(std::istream& is) {
    detail::expect_magic(is, "HDOGMBHM");
    if (detail::read_u32(is) != 1) throw InvalidArgument("binary map: unsupported version");
    BhmOptions o;
    const std::uint32_t kernel = detail::read_u32(is);
    detail::require(kernel <= 1, "binary map: unknown kernel form");
    o.kernel = static_cast<BhmKernel>(kernel);
    o.vb_iterations = detail::read_u32(is);
    MapExtent e;
    e.x_min = detail::read_f64(is);
    e.x_max = detail::read_f64(is);
    e.y_min = detail::read_f64(is);
    e.y_max = detail::read_f64(is);
    o.hinge_spacing = detail::read_f64(is);
    o.bandwidth = detail::read_f64(is);
    o.prior_variance = detail::read_f64(is);
    HilbertMap map(e, o);
    for (auto& v : map.mean_) v = detail::read_f32(is);
    for (auto& v : map.variance_) v = detail::read_f32(is);
    return map;
  }

 private:
  MapExtent extent_;
  BhmOptions options_;
  std::size_t nx_ = 0, ny_ = 0;
  double step_x_ = 1.0, step_y_ = 1.0;
  double cutoff_sq_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> variance_;
};

}  // namespace hdogm
