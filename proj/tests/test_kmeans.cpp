#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "ttc/error.hpp"
#include "ttc/kmeans.hpp"
#include "ttc/rng.hpp"

using namespace ttc;
using namespace ttc::testing;

namespace {

std::vector<TimeSeriesSample> scalar_points(const std::vector<double>& values) {
  std::vector<TimeSeriesSample> samples;
  for (std::size_t i = 0; i < values.size(); ++i) {
    TimeSeriesSample s;
    s.id = static_cast<int>(i);
    s.values = Matrix::from_rows({{values[i]}});
    s.label = "x";
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace

TEST_SUITE("kmeans") {

TEST_CASE("flatten is channel-major") {
  TimeSeriesSample s;
  s.values = Matrix::from_rows({{1.0, 10.0}, {2.0, 20.0}, {3.0, 30.0}});
  CHECK(flatten_sample(s, nullptr) ==
        std::vector<double>{1.0, 2.0, 3.0, 10.0, 20.0, 30.0});
}

TEST_CASE("k equal to the sample count gives singleton clusters") {
  const auto train = scalar_points({0.0, 1.0, 5.0, 9.0});
  const auto model = kmeans_fit(train, 4, 3, 50, nullptr);
  CHECK(model.objective == 0.0);
  std::set<int> used(model.assignments.begin(), model.assignments.end());
  CHECK(used.size() == 4);
}

TEST_CASE("4-point fixture converges to the exhaustively optimal partition") {
  const auto train = scalar_points({0.0, 0.1, 10.0, 10.1});

  std::vector<int> optimal;
  const double best_sse = best_partition_sse({{0.0}, {0.1}, {10.0}, {10.1}}, 2, &optimal);
  CHECK(best_sse == doctest::Approx(0.01));
  CHECK(optimal[0] == optimal[1]);
  CHECK(optimal[2] == optimal[3]);
  CHECK(optimal[0] != optimal[2]);

  for (std::uint64_t seed : {0, 1, 2, 3, 4, 5, 6, 7}) {
    const auto model = kmeans_fit(train, 2, seed, 50, nullptr);
    CHECK(model.objective == doctest::Approx(best_sse));
    CHECK(model.assignments[0] == model.assignments[1]);
    CHECK(model.assignments[2] == model.assignments[3]);
    CHECK(model.assignments[0] != model.assignments[2]);
  }
}

TEST_CASE("objective trace is non-increasing") {
  Rng rng(21);
  for (int round = 0; round < 20; ++round) {
    std::vector<double> values;
    const std::size_t n = 6 + rng.uniform_index(20);
    for (std::size_t i = 0; i < n; ++i) values.push_back(rng.uniform(-10.0, 10.0));
    const auto train = scalar_points(values);
    const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(n, 5));

    const auto model = kmeans_fit(train, k, rng.next_u64(), 60, nullptr);
    REQUIRE(!model.objective_trace.empty());
    for (std::size_t i = 1; i < model.objective_trace.size(); ++i) {
      CHECK(model.objective_trace[i] <= model.objective_trace[i - 1] + 1e-12);
    }
    CHECK(model.objective == doctest::Approx(model.objective_trace.back()));
  }
}

TEST_CASE("at convergence every point sits with its nearest centroid") {
  const auto ds = make_synthetic_dataset({"km", 30, 1, 2, 10, 3}, 5);
  const auto stats = channel_stats(ds.train);
  const auto model = kmeans_fit(ds.train, 3, 9, 100, &stats);

  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    const auto point = flatten_sample(ds.train[i], &stats);
    double best = std::numeric_limits<double>::infinity();
    int best_c = -1;
    for (std::size_t c = 0; c < model.centroids.size(); ++c) {
      double sum = 0.0;
      for (std::size_t d = 0; d < point.size(); ++d) {
        const double diff = point[d] - model.centroids[c][d];
        sum += diff * diff;
      }
      if (sum < best) {
        best = sum;
        best_c = static_cast<int>(c);
      }
    }
    CHECK(model.assignments[i] == best_c);
  }
}

TEST_CASE("identical seeds reproduce identical models") {
  const auto ds = make_synthetic_dataset({"km", 25, 1, 2, 8, 4}, 8);
  const auto a = kmeans_fit(ds.train, 4, 1234, 100, nullptr);
  const auto b = kmeans_fit(ds.train, 4, 1234, 100, nullptr);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids == b.centroids);
  CHECK(a.objective == b.objective);

  const auto c = kmeans_fit(ds.train, 4, 1235, 100, nullptr);
  // Different seeds may coincide, but assignments must still be valid.
  CHECK(c.assignments.size() == ds.train.size());
}

TEST_CASE("argument validation") {
  const auto train = scalar_points({0.0, 1.0});
  CHECK_THROWS_AS(kmeans_fit(train, 0, 0, 10, nullptr), Error);
  CHECK_THROWS_AS(kmeans_fit(train, 3, 0, 10, nullptr), Error);
  CHECK_THROWS_AS(kmeans_fit(train, 1, 0, 0, nullptr), Error);
}

TEST_CASE("select_negatives on the 4-point fixture") {
  const auto train = scalar_points({0.0, 0.1, 10.0, 10.1});
  const auto model = kmeans_fit(train, 2, 0, 50, nullptr);

  TimeSeriesSample query;
  query.values = Matrix::from_rows({{0.05}});

  CHECK(select_negatives(query, model, train, 0).empty());

  // Hand enumeration over the two candidates in the far cluster: the winner
  // minimizes (distance to own centroid, index).
  const int far_cluster = model.assignments[2];
  REQUIRE(model.assignments[3] == far_cluster);
  const double centroid = model.centroids[static_cast<std::size_t>(far_cluster)][0];
  const double d2 = std::abs(10.0 - centroid);
  const double d3 = std::abs(10.1 - centroid);
  const int expected = d3 < d2 ? 3 : 2;

  const auto one = select_negatives(query, model, train, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].train_index == expected);
  CHECK(one[0].distance == doctest::Approx(0.05));

  const auto both = select_negatives(query, model, train, 2);
  REQUIRE(both.size() == 2);
  CHECK((both[0].train_index == 2 || both[0].train_index == 3));
  CHECK(both[0].train_index + both[1].train_index == 5);

  CHECK_THROWS_AS(select_negatives(query, model, train, 3), Error);
}

TEST_CASE("select_negatives breaks exact ties by train index") {
  // 0.5-spaced values are exactly representable, so the centroid distances of
  // the far pair are bit-equal and the lower index must win.
  const auto train = scalar_points({0.0, 0.5, 10.0, 10.5});
  const auto model = kmeans_fit(train, 2, 0, 50, nullptr);

  TimeSeriesSample query;
  query.values = Matrix::from_rows({{0.25}});
  const auto one = select_negatives(query, model, train, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].train_index == 2);
  CHECK(one[0].distance == 0.25);
}

TEST_CASE("negatives never come from the query's cluster") {
  const auto ds = make_synthetic_dataset({"neg", 24, 10, 2, 8, 3}, 77);
  const auto stats = channel_stats(ds.train);
  const auto model = kmeans_fit(ds.train, 3, 42, 100, &stats);

  for (const auto& query : ds.test) {
    const auto point = flatten_sample(query, &stats);
    double best = std::numeric_limits<double>::infinity();
    int query_cluster = -1;
    for (std::size_t c = 0; c < model.centroids.size(); ++c) {
      double sum = 0.0;
      for (std::size_t d = 0; d < point.size(); ++d) {
        const double diff = point[d] - model.centroids[c][d];
        sum += diff * diff;
      }
      if (sum < best) {
        best = sum;
        query_cluster = static_cast<int>(c);
      }
    }
    for (const auto& hit : select_negatives(query, model, ds.train, 3)) {
      CHECK(model.assignments[static_cast<std::size_t>(hit.train_index)] != query_cluster);
    }
  }
}

}  // TEST_SUITE
