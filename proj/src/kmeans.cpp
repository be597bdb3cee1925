#include "ttc/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ttc/error.hpp"
#include "ttc/rng.hpp"

namespace ttc {
namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

int nearest_centroid(const std::vector<double>& point,
                     const std::vector<std::vector<double>>& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq_dist(point, centroids[c]);
    if (d < best_d) {  // strict: ties stay with the lower cluster id
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<std::vector<double>> seed_plusplus(const std::vector<std::vector<double>>& points,
                                               std::size_t k, Rng& rng) {
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  centroids.push_back(points[rng.uniform_index(points.size())]);

  std::vector<double> d2(points.size());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, sq_dist(points[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t chosen;
    if (total <= 0.0) {
      chosen = rng.uniform_index(points.size());
    } else {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      chosen = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += d2[i];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    }
    centroids.push_back(points[chosen]);
  }
  return centroids;
}

double objective_of(const std::vector<std::vector<double>>& points,
                    const std::vector<int>& assignments,
                    const std::vector<std::vector<double>>& centroids) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum += sq_dist(points[i], centroids[static_cast<std::size_t>(assignments[i])]);
  }
  return sum;
}

}  // namespace

std::vector<double> flatten_sample(const TimeSeriesSample& sample,
                                   const ChannelStats* normalization) {
  const std::size_t t = sample.length();
  const std::size_t m = sample.channels();
  std::vector<double> flat(t * m);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < t; ++i) {
      double v = sample.values(i, c);
      if (normalization) {
        v = (v - normalization->mean[c]) / std::max(normalization->stddev[c], kStdFloor);
      }
      flat[c * t + i] = v;
    }
  }
  return flat;
}

ClusterModel kmeans_fit(const std::vector<TimeSeriesSample>& train, std::size_t k,
                        std::uint64_t seed, std::size_t max_iters,
                        const ChannelStats* normalization) {
  if (k == 0) throw Error("kmeans_fit: k must be positive");
  if (k > train.size()) {
    throw Error("kmeans_fit: k=" + std::to_string(k) + " exceeds training size " +
                std::to_string(train.size()));
  }
  if (max_iters == 0) throw Error("kmeans_fit: max_iters must be positive");

  std::vector<std::vector<double>> points;
  points.reserve(train.size());
  for (const auto& s : train) points.push_back(flatten_sample(s, normalization));

  Rng rng(seed);
  ClusterModel model;
  model.k = k;
  model.seed = seed;
  if (normalization) model.normalization = *normalization;
  model.centroids = seed_plusplus(points, k, rng);
  model.assignments.assign(points.size(), -1);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    std::vector<int> assignments(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      assignments[i] = nearest_centroid(points[i], model.centroids);
    }

    // Repair emptied clusters, then refresh affected assignments.
    for (std::size_t repair = 0; repair < k; ++repair) {
      std::vector<std::size_t> sizes(k, 0);
      for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
      std::size_t empty = k;
      for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
          empty = c;
          break;
        }
      }
      if (empty == k) break;
      std::size_t farthest = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = sq_dist(points[i], model.centroids[empty]);
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      model.centroids[empty] = points[farthest];
      for (std::size_t i = 0; i < points.size(); ++i) {
        assignments[i] = nearest_centroid(points[i], model.centroids);
      }
    }

    const bool converged = assignments == model.assignments;
    model.assignments = std::move(assignments);

    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> mean(points.front().size(), 0.0);
      std::size_t count = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (model.assignments[i] != static_cast<int>(c)) continue;
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += points[i][d];
        ++count;
      }
      if (count > 0) {
        for (double& v : mean) v /= static_cast<double>(count);
        model.centroids[c] = std::move(mean);
      }
    }

    model.objective_trace.push_back(objective_of(points, model.assignments, model.centroids));
    model.iterations = iter + 1;
    if (converged) break;
  }

  model.objective = objective_of(points, model.assignments, model.centroids);
  return model;
}

std::vector<NeighborHit> select_negatives(const TimeSeriesSample& query,
                                          const ClusterModel& model,
                                          const std::vector<TimeSeriesSample>& train,
                                          std::size_t n_neg) {
  if (n_neg == 0) return {};
  if (model.assignments.size() != train.size()) {
    throw Error("select_negatives: model was fit on a different training split");
  }

  const ChannelStats* stats = model.normalization ? &*model.normalization : nullptr;
  const std::vector<double> q = flatten_sample(query, stats);
  const int query_cluster = nearest_centroid(q, model.centroids);

  struct Candidate {
    int index;
    double centroid_dist;
  };
  std::vector<Candidate> pool;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const int c = model.assignments[i];
    if (c == query_cluster) continue;
    const std::vector<double> p = flatten_sample(train[i], stats);
    pool.push_back({static_cast<int>(i),
                    std::sqrt(sq_dist(p, model.centroids[static_cast<std::size_t>(c)]))});
  }
  if (pool.size() < n_neg) {
    throw Error("select_negatives: requested " + std::to_string(n_neg) +
                " negatives but only " + std::to_string(pool.size()) +
                " candidates lie outside the query's cluster");
  }

  std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.centroid_dist != b.centroid_dist) return a.centroid_dist < b.centroid_dist;
    return a.index < b.index;
  });

  std::vector<NeighborHit> out;
  out.reserve(n_neg);
  for (std::size_t i = 0; i < n_neg; ++i) {
    out.push_back({pool[i].index, pool[i].centroid_dist,
                   train[static_cast<std::size_t>(pool[i].index)].label});
  }
  return out;
}

}  // namespace ttc
