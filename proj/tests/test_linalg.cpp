#include <doctest.h>

#include <random>

#include "cmar/linalg.hpp"
#include "oracles.hpp"

using namespace cmar;

TEST_CASE("kron identity and scalar cases") {
  CHECK((kron(MatrixXd::Identity(2, 2), MatrixXd::Identity(3, 3)) - MatrixXd::Identity(6, 6))
            .norm() == 0.0);

  std::mt19937_64 rng(1);
  const MatrixXd b = oracles::randn(3, 4, rng);
  MatrixXd two(1, 1);
  two << 2.0;
  CHECK((kron(two, b) - 2.0 * b).norm() == 0.0);
}

TEST_CASE("kron matches brute-force index expansion and the vec identity") {
  std::mt19937_64 rng(2);
  const MatrixXd a1 = oracles::randn(3, 2, rng);
  const MatrixXd a2 = oracles::randn(2, 3, rng);
  const MatrixXd x = oracles::randn(2, 2, rng);

  CHECK((kron(a2, a1) - oracles::kron_bruteforce(a2, a1)).norm() == 0.0);

  // Shapes: A1 (3x2) X (2x2) A2' (3x2)' -> 3x2; kron(A2,A1) is 6x4.
  const VectorXd lhs = kron(a2, a1) * oracles::vec_bruteforce(x);
  const VectorXd rhs = oracles::vec_bruteforce(a1 * x * a2.transpose());
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("kron mixed-product and associativity properties") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd a = oracles::randn(2, 3, rng);
    const MatrixXd b = oracles::randn(3, 2, rng);
    const MatrixXd c = oracles::randn(3, 2, rng);
    const MatrixXd d = oracles::randn(2, 4, rng);
    CHECK((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm() < 1e-10);
    CHECK((kron(kron(a, b), c) - kron(a, kron(b, c))).norm() < 1e-10);
  }
}

TEST_CASE("vec is column-major and vec_inverse round-trips") {
  MatrixXd x(2, 2);
  x << 1, 3, 2, 4;
  const VectorXd v = vec(x);
  CHECK(v(0) == 1);
  CHECK(v(1) == 2);
  CHECK(v(2) == 3);
  CHECK(v(3) == 4);

  std::mt19937_64 rng(4);
  const MatrixXd y = oracles::randn(4, 3, rng);
  CHECK((vec_inverse(vec(y), 4, 3) - y).norm() == 0.0);

  CHECK_THROWS_AS(vec_inverse(v, 3, 3), std::invalid_argument);
}

TEST_CASE("vec(A X B') equals kron(B, A) vec(X)") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd a = oracles::randn(2, 2, rng);
    const MatrixXd b = oracles::randn(2, 2, rng);
    const MatrixXd x = oracles::randn(2, 2, rng);
    const VectorXd lhs = vec(a * x * b.transpose());
    const VectorXd rhs = oracles::kron_bruteforce(b, a) * oracles::vec_bruteforce(x);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("projection of a unit vector and of orthonormal columns") {
  MatrixXd e1 = MatrixXd::Zero(3, 1);
  e1(0, 0) = 1.0;
  MatrixXd expected = MatrixXd::Zero(3, 3);
  expected(0, 0) = 1.0;
  CHECK((projection(e1) - expected).norm() < 1e-15);

  std::mt19937_64 rng(6);
  const Eigen::HouseholderQR<MatrixXd> qr(oracles::randn(5, 2, rng));
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(5, 2);
  CHECK((projection(q) - q * q.transpose()).norm() < 1e-12);
}

TEST_CASE("projection agrees with the normal-equations least-squares oracle") {
  std::mt19937_64 rng(7);
  const MatrixXd beta = oracles::randn(4, 2, rng);
  const MatrixXd p = projection(beta);

  // Fit each standard basis vector onto col(beta) by the normal equations.
  const MatrixXd gram_inv = (beta.transpose() * beta).inverse();
  for (int i = 0; i < 4; ++i) {
    VectorXd e = VectorXd::Zero(4);
    e(i) = 1.0;
    const VectorXd fitted = beta * (gram_inv * (beta.transpose() * e));
    CHECK((p.col(i) - fitted).norm() < 1e-12);
  }

  // Symmetric, idempotent, trace = r.
  CHECK((p - p.transpose()).norm() < 1e-12);
  CHECK((p * p - p).norm() < 1e-10);
  CHECK(p.trace() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("projection rejects rank-deficient input") {
  MatrixXd beta(3, 2);
  beta << 1, 2, 1, 2, 1, 2;
  CHECK_THROWS_AS(projection(beta), std::runtime_error);
}

TEST_CASE("spectral radius basics") {
  CHECK(spectral_radius(MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = -0.9;
  CHECK(spectral_radius(d) == doctest::Approx(0.9));
}

TEST_CASE("spectral radius agrees with the characteristic-polynomial root oracle") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd m = oracles::randn(5, 5, rng);
    const double direct = spectral_radius(m);
    const double via_poly = oracles::max_abs_root(oracles::char_poly(m));
    CHECK(direct == doctest::Approx(via_poly).epsilon(1e-8));
  }
}

TEST_CASE("solve_spd falls back to ridge on singular input") {
  MatrixXd s(2, 2);
  s << 1, 1, 1, 1;
  bool ridged = false;
  const MatrixXd x = solve_spd(s, MatrixXd::Identity(2, 2), &ridged);
  CHECK(ridged);
  CHECK(x.allFinite());
}
