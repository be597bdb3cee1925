#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ttc/dataset.hpp"
#include "ttc/matrix.hpp"

namespace ttc {

enum class MetricKind { Euclidean, StdEuclidean, Manhattan, Dtw };

// Similarity measure used for neighbor retrieval. SED must carry training
// channel stats; DTW may carry a Sakoe-Chiba radius (absent = unconstrained).
class DistanceMetric {
 public:
  static DistanceMetric euclidean();
  static DistanceMetric manhattan();
  static DistanceMetric std_euclidean(ChannelStats stats);
  static DistanceMetric dtw(std::optional<std::size_t> window = std::nullopt);

  MetricKind kind() const { return kind_; }
  const std::optional<std::size_t>& dtw_window() const { return window_; }
  const ChannelStats& stats() const { return *stats_; }

  std::string name() const;

 private:
  DistanceMetric(MetricKind kind, std::optional<std::size_t> window,
                 std::shared_ptr<const ChannelStats> stats)
      : kind_(kind), window_(window), stats_(std::move(stats)) {}

  MetricKind kind_;
  std::optional<std::size_t> window_;
  std::shared_ptr<const ChannelStats> stats_;
};

// CLI/config metric names: "ed", "sed", "man", "dtw".
MetricKind parse_metric_kind(const std::string& name);
std::string metric_kind_name(MetricKind kind);

// ED/SED/MAN are lockstep (require equal lengths). DTW is the dependent
// multivariate variant: one warping path shared by all channels, local cost =
// Euclidean norm of the row difference, three-way recurrence, terminal
// accumulated cost (no square root, no path-length normalization). A window
// that leaves no feasible path yields +infinity.
double distance(const Matrix& a, const Matrix& b, const DistanceMetric& metric);

struct NeighborHit {
  int train_index = 0;
  double distance = 0.0;
  std::string label;
};

// k nearest training samples, sorted ascending by (distance, train_index).
std::vector<NeighborHit> retrieve_neighbors(const TimeSeriesSample& query,
                                            const std::vector<TimeSeriesSample>& train,
                                            const DistanceMetric& metric, std::size_t k);

}  // namespace ttc
