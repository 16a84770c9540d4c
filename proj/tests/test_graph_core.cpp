#include <cmath>
#include <random>

#include "doctest.h"
#include "gamtl/errors.hpp"
#include "gamtl/graph_core.hpp"
#include "oracles.hpp"

using namespace gamtl;

namespace {

AdjacencyMatrix random_graph(std::mt19937_64& rng, Index T) {
  return AdjacencyMatrix(oracle::random_symmetric(rng, T, 0.0, 2.0));
}

}  // namespace

TEST_CASE("adjacency construction enforces the invariants") {
  Matrix asym = Matrix::Zero(3, 3);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(AdjacencyMatrix{asym}, InvalidInput);

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 0.5;
  CHECK_THROWS_AS(AdjacencyMatrix{diag}, InvalidInput);

  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 1) = neg(1, 0) = -1.0;
  CHECK_THROWS_AS(AdjacencyMatrix{neg}, InvalidInput);

  Matrix nan = Matrix::Zero(2, 2);
  nan(0, 1) = nan(1, 0) = std::nan("");
  CHECK_THROWS_AS(AdjacencyMatrix{nan}, InvalidInput);

  CHECK_THROWS_AS(AdjacencyMatrix{Matrix::Zero(2, 3)}, InvalidInput);
}

TEST_CASE("pairwise squared distances") {
  SUBCASE("identical columns give zeros") {
    Matrix W(3, 4);
    W.colwise() = Vector::LinSpaced(3, -1.0, 2.0);
    CHECK(pairwise_sq_distances(W).entries().isZero(0.0));
  }
  SUBCASE("unit distance") {
    Matrix W(2, 2);
    W << 0, 1, 0, 0;
    CHECK(pairwise_sq_distances(W)(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("matches a double loop") {
    std::mt19937_64 rng(11);
    const Matrix W = oracle::random_matrix(rng, 3, 5);
    const Matrix Z = pairwise_sq_distances(W).entries();
    const Matrix ref = oracle::sq_distances(W);
    CHECK((Z - ref).cwiseAbs().maxCoeff() < 1e-12);
    for (Index i = 0; i < 5; ++i) {
      for (Index j = 0; j < 5; ++j) {
        CHECK(Z(i, j) <= 2.0 * (W.col(i).squaredNorm() + W.col(j).squaredNorm()) + 1e-12);
      }
    }
  }
  SUBCASE("non-finite input is rejected") {
    Matrix W = Matrix::Zero(2, 3);
    W(1, 2) = INFINITY;
    CHECK_THROWS_AS(pairwise_sq_distances(W), InvalidInput);
  }
}

TEST_CASE("laplacian") {
  CHECK(laplacian(AdjacencyMatrix::zeros(4)).entries().isZero(0.0));

  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK(laplacian(AdjacencyMatrix(a)).entries() == expected);

  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const AdjacencyMatrix A = random_graph(rng, 6);
    const Matrix L = laplacian(A).entries();
    CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j)
        if (i != j) CHECK(L(i, j) <= 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(L);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("smoothness forms agree") {
  Matrix W(1, 2);
  W << 0, 1;
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  const AdjacencyMatrix A(a);
  CHECK(smoothness_hadamard(W, A) == doctest::Approx(2.0));
  CHECK(smoothness_trace(W, A) == doctest::Approx(2.0));
  CHECK(smoothness_double_sum(W, A) == doctest::Approx(2.0));
  CHECK(smoothness(W, AdjacencyMatrix::zeros(2)) == 0.0);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const Matrix Wr = oracle::random_matrix(rng, 4, 5);
    const AdjacencyMatrix Ar = random_graph(rng, 5);
    const double h = smoothness_hadamard(Wr, Ar);
    CHECK(std::abs(smoothness_trace(Wr, Ar) - h) <= 1e-10 * std::abs(h));
    CHECK(std::abs(smoothness_double_sum(Wr, Ar) - h) <= 1e-10 * std::abs(h));
  }

  CHECK_THROWS_AS(smoothness(Matrix::Zero(2, 3), AdjacencyMatrix::zeros(4)), InvalidInput);
}

TEST_CASE("edge vector bijection and degree operator") {
  std::mt19937_64 rng(9);
  const AdjacencyMatrix A = random_graph(rng, 7);
  CHECK(matrixform(vectorform(A)).weights() == A.weights());

  const EdgeVector zero{4, Vector::Zero(6)};
  CHECK(apply_degree_operator(zero).isZero(0.0));

  const EdgeVector w{4, (Vector::Random(6).array() + 1.0).matrix()};
  const Vector rows = matrixform(w).weights().rowwise().sum();
  CHECK((apply_degree_operator(w) - rows).cwiseAbs().maxCoeff() < 1e-14);

  // Row-major upper triangle: (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
  Index e = 0;
  for (Index i = 0; i < 4; ++i)
    for (Index j = i + 1; j < 4; ++j) CHECK(edge_position(4, i, j) == e++);

  // Linearity of S and the adjoint identity <S w, v> = <w, S^T v>.
  const EdgeVector w2{4, Vector::Random(6)};
  const EdgeVector combo{4, 2.0 * w.values - 3.0 * w2.values};
  CHECK((apply_degree_operator(combo) -
         (2.0 * apply_degree_operator(w) - 3.0 * apply_degree_operator(w2)))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  const Vector v = Vector::Random(4);
  CHECK(apply_degree_operator(w2).dot(v) ==
        doctest::Approx(w2.values.dot(apply_degree_adjoint(4, v))).epsilon(1e-12));

  CHECK_THROWS_AS(matrixform(EdgeVector{4, Vector::Zero(5)}), InvalidInput);
}
