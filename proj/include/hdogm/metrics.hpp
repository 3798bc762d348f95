#pragma once
// Map fidelity against ground truth and wall-clock latency.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "hdogm/errors.hpp"
#include "hdogm/geometry.hpp"

namespace hdogm {

struct MapAccuracy {
  double accuracy = 0.0;
  /// Absent when the observed cells hold only one truth class.
  std::optional<double> auc;
  std::size_t cells = 0;
};

/// Area under the ROC curve by the rank-sum statistic, ties at mid-rank.
/// Needs at least one positive and one negative.
inline std::optional<double> rank_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& positive) {
  detail::require(scores.size() == positive.size(), "auc: score/label count mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (positive[order[k]]) {
        pos_rank_sum += mid_rank;
        ++n_pos;
      }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

/// Cells where `observed` is set are scored. Truth cells >= 0.5 are occupied
/// (covers both 0/1 and 0.3/1.0 encodings); predictions above `threshold` are
/// called occupied.
inline MapAccuracy evaluate_map_accuracy(const OccupancyGrid& prediction, const OccupancyGrid& truth,
                                         const std::vector<bool>& observed, double threshold) {
  detail::require(prediction.rows() == truth.rows() && prediction.cols() == truth.cols(),
                  "accuracy: prediction and truth shapes differ");
  detail::require(observed.size() == truth.size(), "accuracy: observed mask shape differs");
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!observed[i]) continue;
    const bool occ = truth.values()[i] >= 0.5;
    const double p = prediction.values()[i];
    correct += (p > threshold) == occ ? 1 : 0;
    scores.push_back(p);
    labels.push_back(occ ? 1 : 0);
  }
  if (scores.empty()) throw UndefinedMetric("accuracy: no observed cells");
  MapAccuracy out;
  out.cells = scores.size();
  out.accuracy = static_cast<double>(correct) / static_cast<double>(scores.size());
  out.auc = rank_auc(scores, labels);
  return out;
}

struct LatencyStats {
  double mean_ms = 0.0;
  double std_ms = 0.0;  // population
  std::size_t repeats = 0;
};

inline LatencyStats summarize_latency(const std::vector<double>& samples_ms) {
  detail::require(!samples_ms.empty(), "latency: no samples");
  LatencyStats s;
  s.repeats = samples_ms.size();
  const double n = static_cast<double>(samples_ms.size());
  s.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : samples_ms) ss += (v - s.mean_ms) * (v - s.mean_ms);
  s.std_ms = std::sqrt(ss / n);
  return s;
}

/// Times `work` over `repeats` runs after `warmup` untimed runs. `prepare`
/// runs untimed before every call of `work`.
inline LatencyStats measure_latency(const std::function<void()>& prepare, const std::function<void()>& work,
                                    std::size_t repeats, std::size_t warmup = 3) {
  detail::require(repeats >= 5, "latency: repeats must be >= 5");
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < warmup; ++i) {
    prepare();
    work();
  }
  std::vector<double> samples;
  samples.reserve(repeats);
  for (std::size_t i = 0; i < repeats; ++i) {
    prepare();
    const auto t0 = clock::now();
    work();
    samples.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
  }
  return summarize_latency(samples);
}

}  // namespace hdogm
