#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "dyadlab/matrix.hpp"

using namespace dyadlab;

namespace {

SparseMatrix<double> randomSparse(int rows, int cols, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1), v(-2, 2);
  std::vector<Triplet<double>> t;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (u(rng) < density) t.push_back({r, c, v(rng)});
  return SparseMatrix<double>::fromTriplets(rows, cols, std::move(t));
}

Eigen::MatrixXd dense(const SparseMatrix<double>& A) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  for (const auto& t : A.triplets()) M(t.row, t.col) = t.value;
  return M;
}

}  // namespace

TEST_CASE("triplets with repeated entries are summed and zeros dropped") {
  auto A = SparseMatrix<Surd>::fromTriplets(2, 2, {{0, 1, Surd(1)}, {0, 1, Surd(-1)}, {1, 0, Surd(2)}, {1, 0, Surd(3)}});
  CHECK(A.nonZeros() == 1);
  CHECK(A.at(1, 0) == Surd(5));
  CHECK(A.at(0, 1) == Surd(0));
  CHECK_THROWS_AS(SparseMatrix<Surd>::fromTriplets(2, 2, {{0, 2, Surd(1)}}), Error);
}

TEST_CASE("products, sums and transposes agree with dense Eigen arithmetic") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto A = randomSparse(23, 17, 0.2, rng), B = randomSparse(17, 29, 0.2, rng), C = randomSparse(23, 17, 0.3, rng);
    CHECK((dense(A * B) - dense(A) * dense(B)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((dense(A + C) - (dense(A) + dense(C))).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((dense(A - C) - (dense(A) - dense(C))).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((dense(A.transpose()) - dense(A).transpose()).cwiseAbs().maxCoeff() == 0.0);
    std::vector<double> x(17);
    for (auto& v : x) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    auto y = dyadlab::apply(A, x);
    Eigen::VectorXd ye = dense(A) * Eigen::Map<Eigen::VectorXd>(x.data(), 17);
    for (int i = 0; i < 23; ++i) CHECK(y[i] == doctest::Approx(ye(i)).epsilon(1e-12));
  }
}

TEST_CASE("parallel kernels equal their serial references") {
  std::mt19937_64 rng(12);
  auto A = randomSparse(200, 150, 0.05, rng), B = randomSparse(150, 180, 0.05, rng);
  auto P = multiply(A, B), Q = multiplySerial(A, B);
  CHECK(P.triplets().size() == Q.triplets().size());
  CHECK((dense(P) - dense(Q)).cwiseAbs().maxCoeff() == 0.0);
  std::vector<double> x(150, 0.5);
  x[3] = -1.25;
  CHECK(dyadlab::apply(A, x) == applySerial(A, x));

  auto E = SparseMatrix<Surd>::fromTriplets(3, 3, {{0, 0, Surd::sqrt2()}, {1, 2, Surd::fraction(1, 3)}, {2, 1, Surd(4)}});
  CHECK(multiply(E, E) == multiplySerial(E, E));
}

TEST_CASE("Kronecker products agree with Eigen") {
  std::mt19937_64 rng(13);
  auto A = randomSparse(4, 3, 0.5, rng), B = randomSparse(5, 6, 0.4, rng);
  Eigen::MatrixXd DA = dense(A), DB = dense(B), K(20, 18);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) K.block(i * 5, j * 6, 5, 6) = DA(i, j) * DB;
  CHECK((dense(kron(A, B)) - K).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("exact arithmetic in Q(sqrt 2)") {
  Surd r2 = Surd::sqrt2();
  CHECK(r2 * r2 == Surd(2));
  CHECK(Surd(1) / r2 == r2 * Surd::fraction(1, 2));
  CHECK((Surd(3) - r2 * Surd(2)).sign() > 0);  // 3 > 2 sqrt 2
  CHECK((Surd(2) * r2 - Surd::fraction(283, 100)).sign() < 0);
  CHECK(ScalarTraits<Surd>::sqrt2Pow(3) == Surd(2) * r2);
  CHECK(ScalarTraits<Surd>::sqrt2Pow(-2) == Surd::fraction(1, 2));
  CHECK_THROWS_AS(Surd(1) / Surd(0), std::domain_error);
}

TEST_CASE("coordinate-list export") {
  auto E = SparseMatrix<Surd>::fromTriplets(4, 4, {{0, 1, Surd::fraction(1, 2)}, {3, 2, Surd(0, 1)}});
  std::ostringstream os;
  exportCoordinateList(E, 1, os);
  const std::string s = os.str();
  CHECK(s.find("0 1 1 2\n") != std::string::npos);
  CHECK(s.find("3 2 0 1 1 1\n") != std::string::npos);
}
