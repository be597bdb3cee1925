#include <doctest.h>

#include <cmath>

#include "support/helpers.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "ttc/distance.hpp"
#include "ttc/error.hpp"
#include "ttc/rng.hpp"

using namespace ttc;
using namespace ttc::testing;

namespace {

Matrix random_series(Rng& rng, std::size_t t, std::size_t m) {
  Matrix values(t, m);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < m; ++j) values(i, j) = rng.uniform(-5.0, 5.0);
  }
  return values;
}

std::vector<DistanceMetric> all_metrics(const ChannelStats& stats) {
  return {DistanceMetric::euclidean(), DistanceMetric::manhattan(),
          DistanceMetric::std_euclidean(stats), DistanceMetric::dtw()};
}

}  // namespace

TEST_SUITE("distance") {

TEST_CASE("identity and symmetry for all four metrics") {
  Rng rng(7);
  ChannelStats stats;
  stats.mean = {0.0, 0.0};
  stats.stddev = {1.5, 0.5};

  for (int round = 0; round < 25; ++round) {
    const Matrix a = random_series(rng, 1 + rng.uniform_index(8), 2);
    const Matrix b = random_series(rng, a.rows(), 2);
    for (const auto& metric : all_metrics(stats)) {
      CHECK(distance(a, a, metric) == 0.0);
      const double ab = distance(a, b, metric);
      CHECK(ab >= 0.0);
      CHECK(ab == distance(b, a, metric));
    }
  }
}

TEST_CASE("manhattan forced arithmetic") {
  const Matrix a = Matrix::from_rows({{1.0}, {2.0}});
  const Matrix b = Matrix::from_rows({{3.0}, {5.0}});
  CHECK(distance(a, b, DistanceMetric::manhattan()) == 5.0);
  CHECK(distance(a, b, DistanceMetric::euclidean()) == doctest::Approx(std::sqrt(13.0)));
}

TEST_CASE("sed scales per channel with a std floor") {
  ChannelStats stats;
  stats.mean = {0.0, 0.0};
  stats.stddev = {2.0, 0.0};  // second channel exercises the 1e-8 floor
  const Matrix a = Matrix::from_rows({{0.0, 1.0}});
  const Matrix b = Matrix::from_rows({{4.0, 1.0}});
  CHECK(distance(a, b, DistanceMetric::std_euclidean(stats)) == doctest::Approx(2.0));

  const Matrix c = Matrix::from_rows({{0.0, 1.0 + 1e-8}});
  CHECK(distance(a, c, DistanceMetric::std_euclidean(stats)) == doctest::Approx(1.0));
}

TEST_CASE("sed without stats cannot be constructed") {
  CHECK_THROWS_AS(DistanceMetric::std_euclidean(ChannelStats{}), Error);
}

TEST_CASE("input validation") {
  const Matrix a = Matrix::from_rows({{1.0, 2.0}});
  const Matrix b = Matrix::from_rows({{1.0}});
  const Matrix c = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  CHECK_THROWS_AS(distance(a, b, DistanceMetric::euclidean()), Error);  // channels
  CHECK_THROWS_AS(distance(a, c, DistanceMetric::manhattan()), Error);  // lockstep length
  CHECK_THROWS_AS(distance(a, Matrix(), DistanceMetric::dtw()), Error); // empty
  CHECK_NOTHROW(distance(a, c, DistanceMetric::dtw()));                 // elastic
}

TEST_CASE("dtw matches the naive recursive definition on random pairs") {
  Rng rng(2024);
  for (int round = 0; round < 60; ++round) {
    const std::size_t m = 1 + rng.uniform_index(3);
    const Matrix a = random_series(rng, 1 + rng.uniform_index(9), m);
    const Matrix b = random_series(rng, 1 + rng.uniform_index(9), m);
    const double got = distance(a, b, DistanceMetric::dtw());
    CHECK(near(got, naive_recursive_dtw(a, b), 1e-9));
  }
}

TEST_CASE("dtw window semantics") {
  Rng rng(5);
  for (int round = 0; round < 30; ++round) {
    const Matrix a = random_series(rng, 4 + rng.uniform_index(6), 2);
    const Matrix b = random_series(rng, 4 + rng.uniform_index(6), 2);
    const std::size_t tmax = std::max(a.rows(), b.rows());

    // A window at least max(t, t') is unconstrained.
    CHECK(distance(a, b, DistanceMetric::dtw(tmax)) == distance(a, b, DistanceMetric::dtw()));

    // Windowed values match the full-table oracle, including tight windows.
    for (std::size_t w : {std::size_t{0}, std::size_t{1}, std::size_t{3}}) {
      const double got = distance(a, b, DistanceMetric::dtw(w));
      const double want = oracle_dtw(a, b, w);
      if (std::isinf(want)) {
        CHECK(std::isinf(got));
      } else {
        CHECK(near(got, want, 1e-9));
      }
    }
  }
}

TEST_CASE("dtw is bounded by the lockstep alignment when lengths match") {
  Rng rng(13);
  for (int round = 0; round < 40; ++round) {
    const std::size_t t = 2 + rng.uniform_index(9);
    const Matrix a = random_series(rng, t, 2);
    const Matrix b = random_series(rng, t, 2);
    double lockstep = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        const double d = a(i, j) - b(i, j);
        sum += d * d;
      }
      lockstep += std::sqrt(sum);
    }
    CHECK(distance(a, b, DistanceMetric::dtw()) <= lockstep + 1e-12);
  }
}

TEST_CASE("retrieve_neighbors: toy example") {
  std::vector<TimeSeriesSample> train(3);
  train[0].values = Matrix::from_rows({{0.0}});
  train[0].label = "a";
  train[1].values = Matrix::from_rows({{10.0}});
  train[1].label = "b";
  train[2].values = Matrix::from_rows({{1.0}});
  train[2].label = "a";

  TimeSeriesSample query;
  query.values = Matrix::from_rows({{0.4}});

  const auto hits = retrieve_neighbors(query, train, DistanceMetric::euclidean(), 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].train_index == 0);
  CHECK(hits[1].train_index == 2);
  CHECK(hits[0].distance == doctest::Approx(0.4));
  CHECK(hits[0].label == "a");
}

TEST_CASE("retrieve_neighbors: k = train size returns the full sorted order") {
  const auto ds = make_synthetic_dataset({"r", 12, 2, 2, 8, 3}, 99);
  const auto hits =
      retrieve_neighbors(ds.test[0], ds.train, DistanceMetric::manhattan(), ds.train.size());
  REQUIRE(hits.size() == ds.train.size());
  for (std::size_t i = 1; i < hits.size(); ++i) {
    CHECK(hits[i - 1].distance <= hits[i].distance);
  }
}

TEST_CASE("retrieve_neighbors: k bounds") {
  const auto ds = make_synthetic_dataset({"r", 4, 1, 1, 5, 2}, 1);
  CHECK_THROWS_AS(retrieve_neighbors(ds.test[0], ds.train, DistanceMetric::euclidean(), 0),
                  Error);
  CHECK_THROWS_AS(retrieve_neighbors(ds.test[0], ds.train, DistanceMetric::euclidean(), 5),
                  Error);
}

TEST_CASE("retrieval is a prefix of the brute-force order for every metric") {
  const auto ds = make_synthetic_dataset({"bf", 40, 30, 3, 12, 4}, 17);
  const auto stats = channel_stats(ds.train);

  struct Case {
    MetricKind kind;
    DistanceMetric metric;
  };
  const std::vector<Case> cases = {
      {MetricKind::Euclidean, DistanceMetric::euclidean()},
      {MetricKind::Manhattan, DistanceMetric::manhattan()},
      {MetricKind::StdEuclidean, DistanceMetric::std_euclidean(stats)},
      {MetricKind::Dtw, DistanceMetric::dtw()},
  };

  for (const auto& test_case : cases) {
    for (const auto& query : ds.test) {
      const auto order =
          brute_force_order(query.values, ds.train, test_case.kind, &stats);
      for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{5}}) {
        const auto hits = retrieve_neighbors(query, ds.train, test_case.metric, k);
        REQUIRE(hits.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
          CHECK(hits[i].train_index == order[i].second);
          CHECK(hits[i].distance == order[i].first);
        }
      }
    }
  }
}

TEST_CASE("metric names round-trip") {
  for (const auto name : {"ed", "sed", "man", "dtw"}) {
    CHECK(metric_kind_name(parse_metric_kind(name)) == name);
  }
  CHECK_THROWS_AS(parse_metric_kind("cosine"), ConfigError);
}

}  // TEST_SUITE
