#include "ttc/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ttc/error.hpp"

namespace ttc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const Matrix& a, const Matrix& b, bool lockstep) {
  if (a.empty() || b.empty()) throw Error("distance: empty series");
  if (a.cols() != b.cols()) {
    throw Error("distance: channel mismatch (" + std::to_string(a.cols()) + " vs " +
                std::to_string(b.cols()) + ")");
  }
  if (lockstep && a.rows() != b.rows()) {
    throw Error("distance: length mismatch for lockstep metric (" +
                std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) + ")");
  }
}

double euclidean(const Matrix& a, const Matrix& b) {
  double sum = 0.0;
  const std::size_t n = a.rows() * a.cols();
  const double* x = a.data().data();
  const double* y = b.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double manhattan(const Matrix& a, const Matrix& b) {
  double sum = 0.0;
  const std::size_t n = a.rows() * a.cols();
  const double* x = a.data().data();
  const double* y = b.data().data();
  for (std::size_t i = 0; i < n; ++i) sum += std::abs(x[i] - y[i]);
  return sum;
}

double std_euclidean(const Matrix& a, const Matrix& b, const ChannelStats& stats) {
  if (stats.channels() != a.cols()) {
    throw Error("distance: stats cover " + std::to_string(stats.channels()) +
                " channels, series has " + std::to_string(a.cols()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = (a(i, j) - b(i, j)) / std::max(stats.stddev[j], kStdFloor);
      sum += d * d;
    }
  }
  return std::sqrt(sum);
}

double row_norm(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
  const double* x = a.row(i);
  const double* y = b.row(j);
  double sum = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    const double d = x[c] - y[c];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double dtw(const Matrix& a, const Matrix& b, const std::optional<std::size_t>& window) {
  const std::size_t ta = a.rows();
  const std::size_t tb = b.rows();

  // Rolling two-row accumulation over the tb axis.
  std::vector<double> prev(tb, kInf);
  std::vector<double> curr(tb, kInf);

  for (std::size_t i = 0; i < ta; ++i) {
    std::size_t lo = 0;
    std::size_t hi = tb;  // exclusive
    if (window) {
      lo = i > *window ? i - *window : 0;
      hi = std::min(tb, i + *window + 1);
    }
    std::fill(curr.begin(), curr.end(), kInf);
    for (std::size_t j = lo; j < hi; ++j) {
      const double cost = row_norm(a, i, b, j);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);  // match
        if (i > 0) best = std::min(best, prev[j]);               // insert
        if (j > 0) best = std::min(best, curr[j - 1]);           // delete
      }
      curr[j] = cost + best;
    }
    std::swap(prev, curr);
  }
  return prev[tb - 1];
}

}  // namespace

DistanceMetric DistanceMetric::euclidean() {
  return DistanceMetric(MetricKind::Euclidean, std::nullopt, nullptr);
}

DistanceMetric DistanceMetric::manhattan() {
  return DistanceMetric(MetricKind::Manhattan, std::nullopt, nullptr);
}

DistanceMetric DistanceMetric::std_euclidean(ChannelStats stats) {
  if (stats.channels() == 0) {
    throw Error("std_euclidean metric requires channel stats");
  }
  return DistanceMetric(MetricKind::StdEuclidean, std::nullopt,
                        std::make_shared<const ChannelStats>(std::move(stats)));
}

DistanceMetric DistanceMetric::dtw(std::optional<std::size_t> window) {
  return DistanceMetric(MetricKind::Dtw, window, nullptr);
}

std::string DistanceMetric::name() const { return metric_kind_name(kind_); }

MetricKind parse_metric_kind(const std::string& name) {
  if (name == "ed") return MetricKind::Euclidean;
  if (name == "sed") return MetricKind::StdEuclidean;
  if (name == "man") return MetricKind::Manhattan;
  if (name == "dtw") return MetricKind::Dtw;
  throw ConfigError("unknown metric '" + name + "' (expected ed, sed, man, or dtw)");
}

std::string metric_kind_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::Euclidean: return "ed";
    case MetricKind::StdEuclidean: return "sed";
    case MetricKind::Manhattan: return "man";
    case MetricKind::Dtw: return "dtw";
  }
  return "?";
}

double distance(const Matrix& a, const Matrix& b, const DistanceMetric& metric) {
  switch (metric.kind()) {
    case MetricKind::Euclidean:
      check_pair(a, b, true);
      return euclidean(a, b);
    case MetricKind::Manhattan:
      check_pair(a, b, true);
      return manhattan(a, b);
    case MetricKind::StdEuclidean:
      check_pair(a, b, true);
      return std_euclidean(a, b, metric.stats());
    case MetricKind::Dtw:
      check_pair(a, b, false);
      return dtw(a, b, metric.dtw_window());
  }
  throw Error("distance: unreachable");
}

std::vector<NeighborHit> retrieve_neighbors(const TimeSeriesSample& query,
                                            const std::vector<TimeSeriesSample>& train,
                                            const DistanceMetric& metric, std::size_t k) {
  if (k == 0) throw Error("retrieve_neighbors: k must be positive");
  if (k > train.size()) {
    throw Error("retrieve_neighbors: k=" + std::to_string(k) + " exceeds training size " +
                std::to_string(train.size()));
  }

  std::vector<NeighborHit> hits;
  hits.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    hits.push_back({static_cast<int>(i), distance(query.values, train[i].values, metric),
                    train[i].label});
  }
  std::sort(hits.begin(), hits.end(), [](const NeighborHit& x, const NeighborHit& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    return x.train_index < y.train_index;
  });
  hits.resize(k);
  return hits;
}

}  // namespace ttc
