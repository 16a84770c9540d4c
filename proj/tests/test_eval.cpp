#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "gamtl/data.hpp"
#include "gamtl/errors.hpp"
#include "gamtl/eval.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace gamtl;

namespace {

TaskDataset with_targets(int id, const Vector& y) {
  return TaskDataset{id, Matrix::Zero(1, y.size()), y};
}

Matrix uniform_complete(Index T) {
  Matrix a = Matrix::Ones(T, T);
  a.diagonal().setZero();
  return a;
}

// Independent count for the lexicographic tie rule: the first k pairs in
// (i, j) order, counted against the partition.
double lexicographic_score(Index T, const std::vector<int>& label) {
  int k = 0;
  for (Index i = 0; i < T; ++i)
    for (Index j = i + 1; j < T; ++j) k += label[static_cast<std::size_t>(i)] == label[static_cast<std::size_t>(j)];
  int hits = 0, taken = 0;
  for (Index i = 0; i < T && taken < k; ++i)
    for (Index j = i + 1; j < T && taken < k; ++j, ++taken)
      hits += label[static_cast<std::size_t>(i)] == label[static_cast<std::size_t>(j)];
  return static_cast<double>(hits) / k;
}

std::vector<std::vector<int>> groups_from(const std::vector<int>& label, int count) {
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < label.size(); ++i) groups[static_cast<std::size_t>(label[i])].push_back(static_cast<int>(i));
  return groups;
}

}  // namespace

TEST_CASE("rmse") {
  const std::vector<TaskDataset> tasks{with_targets(0, Vector::LinSpaced(3, 1, 3)), with_targets(1, Vector::Ones(2))};
  CHECK(rmse_from_predictions({tasks[0].y, tasks[1].y}, tasks).pooled == 0.0);

  const auto off = rmse_from_predictions({tasks[0].y.array() + 1.0, tasks[1].y.array() - 1.0}, tasks);
  CHECK(off.pooled == doctest::Approx(1.0));
  CHECK(off.per_task[0] == doctest::Approx(1.0));

  const std::vector<TaskDataset> one{with_targets(0, Vector::Zero(3))};
  CHECK(rmse_from_predictions({(Vector(3) << 1, 2, 2).finished()}, one).pooled == doctest::Approx(std::sqrt(3.0)));

  SUBCASE("pooled versus mean of tasks and reordering") {
    std::mt19937_64 rng(101);
    std::vector<TaskDataset> test;
    WeightMatrix W = oracle::random_matrix(rng, 3, 4);
    for (int t = 0; t < 4; ++t) {
      TaskDataset task{t, oracle::random_matrix(rng, 3, 5 + t), Vector()};
      task.y = oracle::random_matrix(rng, 5 + t, 1).col(0);
      test.push_back(task);
    }
    const std::vector<int> ids{0, 1, 2, 3};
    const auto base = rmse(W, ids, test);
    double sse = 0.0, n = 0.0;
    for (int t = 0; t < 4; ++t) {
      const Vector r = test[static_cast<std::size_t>(t)].X.transpose() * W.col(t) - test[static_cast<std::size_t>(t)].y;
      sse += r.squaredNorm();
      n += static_cast<double>(r.size());
      CHECK(base.per_task[t] == doctest::Approx(std::sqrt(r.squaredNorm() / r.size())));
    }
    CHECK(base.pooled == doctest::Approx(std::sqrt(sse / n)));
    CHECK(base.mean_of_tasks == doctest::Approx(base.per_task.mean()));

    std::vector<TaskDataset> reversed(test.rbegin(), test.rend());
    CHECK(rmse(W, ids, reversed).pooled == doctest::Approx(base.pooled).epsilon(1e-14));

    std::vector<TaskDataset> unknown = test;
    unknown[2].task_id = 42;
    CHECK_THROWS_AS(rmse(W, ids, unknown), InvalidInput);
  }
}

TEST_CASE("benchmark") {
  const DatasetFactory factory = [](std::uint64_t seed) {
    SynSpec s;
    s.seed = seed;
    s.n_train = 15;
    s.n_test = 10;
    const auto ds = gen_syn1(s);
    return TrainTest{ds.train, ds.test};
  };
  BenchmarkMethod ridge{"ridge", MethodKind::kRidge, GamtlConfig{}, RbfOptions{}};

  const auto single = benchmark(factory, ridge, 1, 5);
  CHECK(single.std == 0.0);
  CHECK(single.seeds.size() == single.runs.size());

  const auto three = benchmark(factory, ridge, 3, 5);
  CHECK(three.rmse_values.size() == 3);
  CHECK(three.std >= 0.0);
  const auto again = benchmark(factory, ridge, 3, 5);
  CHECK(again.rmse_values == three.rmse_values);

  const DatasetFactory flaky = [&](std::uint64_t seed) {
    if (seed == 6) throw std::runtime_error("broken replicate");
    return factory(seed);
  };
  const auto partial = benchmark(flaky, ridge, 3, 5);
  CHECK(partial.failures == 1);
  CHECK(partial.flagged);
  CHECK(partial.rmse_values.size() == 2);
  CHECK(partial.runs[1].error == "broken replicate");

  CHECK_THROWS_AS(benchmark(factory, ridge, 0, 0), InvalidInput);
}

TEST_CASE("graph export") {
  Matrix a(3, 3);
  a << 0, 0.5, 0.25, 0.5, 0, 1e-9, 0.25, 1e-9, 0;
  const AdjacencyMatrix A(a);

  SUBCASE("threshold above every weight") {
    const auto doc = nlohmann::json::parse(export_graph(A, 1.0, GraphFormat::kJson));
    CHECK(doc["edges"].empty());
    CHECK(doc["isolated"] == nlohmann::json({0, 1, 2}));
    CHECK(doc["n"] == 3);
  }

  SUBCASE("uniform triangle has three edges") {
    const AdjacencyMatrix U(uniform_complete(3));
    const auto doc = nlohmann::json::parse(export_graph(U, 0.0, GraphFormat::kJson));
    CHECK(doc["edges"].size() == 3);
    CHECK(doc["isolated"].empty());
  }

  SUBCASE("edge-csv round trip") {
    std::mt19937_64 rng(103);
    const AdjacencyMatrix R(oracle::random_symmetric(rng, 6));
    const double threshold = 0.3;
    const std::string csv = export_graph(R, threshold, GraphFormat::kEdgeCsv);
    CHECK(csv.rfind("source,target,weight\n", 0) == 0);
    CHECK(import_edge_csv(csv, 6).weights() == threshold_graph(R, threshold).weights());
  }

  SUBCASE("dot output") {
    Matrix pair(2, 2);
    pair << 0, 2, 2, 0;
    const std::string dot = export_graph(AdjacencyMatrix(pair), 0.0, GraphFormat::kDot);
    CHECK(std::count(dot.begin(), dot.end(), '-') == 2);  // one "--"
    CHECK(dot.find("0 -- 1") != std::string::npos);

    const std::string with_outlier = export_graph(A, 1e-6, GraphFormat::kDot);
    CHECK(with_outlier.find("outlier=true") == std::string::npos);
    Matrix b = a;
    b(1, 2) = b(2, 1) = 0.0;
    b(0, 1) = b(1, 0) = 0.0;
    const std::string isolated = export_graph(AdjacencyMatrix(b), 1e-6, GraphFormat::kDot);
    CHECK(isolated.find("1 [outlier=true];") != std::string::npos);
  }

  SUBCASE("outlier candidates") {
    Matrix w = uniform_complete(5);
    w.row(4).setConstant(0.01);
    w.col(4).setConstant(0.01);
    w(4, 4) = 0.0;
    CHECK(outlier_candidates(AdjacencyMatrix(w), 0.0) == std::vector<int>{4});
    CHECK(isolated_nodes(AdjacencyMatrix(w), 0.0).empty());
    CHECK(isolated_nodes(AdjacencyMatrix(w), 0.05) == std::vector<int>{4});
  }

  CHECK_THROWS_AS(graph_format_from_string("svg"), InvalidInput);
  CHECK(default_export_threshold(A) == doctest::Approx(0.5e-4));
}

TEST_CASE("graph recovery score") {
  SUBCASE("block diagonal is perfect") {
    Matrix a = Matrix::Zero(5, 5);
    a(0, 1) = a(1, 0) = a(0, 2) = a(2, 0) = a(1, 2) = a(2, 1) = 1.0;
    a(3, 4) = a(4, 3) = 1.0;
    CHECK(graph_recovery_score(AdjacencyMatrix(a), {{0, 1, 2}, {3, 4}}) == 1.0);
  }

  SUBCASE("one cross edge") {
    Matrix a = Matrix::Zero(4, 4);
    a(1, 2) = a(2, 1) = 1.0;
    CHECK(graph_recovery_score(AdjacencyMatrix(a), {{0, 1}, {2}, {3}}) == 0.0);
  }

  SUBCASE("uniform graph follows the tie rule") {
    for (int m : {2, 3}) {
      const Index T = 2 * m;
      std::vector<int> perm(static_cast<std::size_t>(T));
      std::iota(perm.begin(), perm.end(), 0);
      double total = 0.0;
      int count = 0;
      do {
        std::vector<int> label(static_cast<std::size_t>(T));
        for (Index i = 0; i < T; ++i) label[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(i)] < m ? 0 : 1;
        const double got = graph_recovery_score(AdjacencyMatrix(uniform_complete(T)), groups_from(label, 2));
        CHECK(got == doctest::Approx(lexicographic_score(T, label)));
        total += got;
        ++count;
      } while (std::next_permutation(perm.begin(), perm.end()));
      // Averaged over every labelling, the tie rule is unbiased.
      CHECK(total / count == doctest::Approx((m - 1.0) / (2.0 * m - 1.0)));
    }
  }

  SUBCASE("malformed partitions") {
    const AdjacencyMatrix U(uniform_complete(4));
    CHECK_THROWS_AS(graph_recovery_score(U, {{0, 1}, {1, 2, 3}}), InvalidInput);
    CHECK_THROWS_AS(graph_recovery_score(U, {{0, 1}, {2}}), InvalidInput);
    CHECK_THROWS_AS(graph_recovery_score(U, {{0, 1}, {2, 7}}), InvalidInput);
  }

  SUBCASE("ring neighbours") {
    Matrix a = Matrix::Zero(4, 4);
    for (Index i = 0; i < 4; ++i) a(i, (i + 1) % 4) = a((i + 1) % 4, i) = 1.0;
    const std::vector<std::vector<int>> ring{{1, 3}, {0, 2}, {1, 3}, {0, 2}};
    CHECK(neighbor_recovery_fraction(AdjacencyMatrix(a), ring, 2) == 1.0);
    const std::vector<std::vector<int>> wrong{{2}, {3}, {0}, {1}};
    CHECK(neighbor_recovery_fraction(AdjacencyMatrix(a), wrong, 2) == 0.0);
  }
}
