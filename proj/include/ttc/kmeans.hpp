#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ttc/dataset.hpp"
#include "ttc/distance.hpp"

namespace ttc {

// Lloyd k-means state over channel-major flattened series (length t*m).
struct ClusterModel {
  std::size_t k = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignments;        // train index -> cluster id
  double objective = 0.0;              // within-cluster sum of squared distances
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;  // one entry per Lloyd iteration
  // Transform applied to inputs; queries must be flattened the same way.
  std::optional<ChannelStats> normalization;
};

// Index layout: v[c*t + i] = x(i, c). Optionally z-normalized per channel.
std::vector<double> flatten_sample(const TimeSeriesSample& sample,
                                   const ChannelStats* normalization);

// k-means++ seeding then Lloyd iterations; deterministic given the seed.
// An emptied cluster is reseeded to the training point farthest from its
// current centroid. Pass stats to cluster in per-channel z-normalized space
// (the default pipeline behavior), or nullptr for raw space.
ClusterModel kmeans_fit(const std::vector<TimeSeriesSample>& train, std::size_t k,
                        std::uint64_t seed, std::size_t max_iters,
                        const ChannelStats* normalization);

// Contrastive negatives: the query is assigned to its nearest centroid; from
// all points in *other* clusters, take the n_neg with the smallest distance to
// their own centroid (most representative), ties by train index. The returned
// NeighborHit.distance is that own-centroid distance, not a query distance.
std::vector<NeighborHit> select_negatives(const TimeSeriesSample& query,
                                          const ClusterModel& model,
                                          const std::vector<TimeSeriesSample>& train,
                                          std::size_t n_neg);

}  // namespace ttc
