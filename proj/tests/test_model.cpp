#include <doctest.h>

#include <random>

#include "cmar/model.hpp"
#include "oracles.hpp"

using namespace cmar;

namespace {

CmarModel random_model(std::mt19937_64& rng, Dims dims) {
  const MatrixXd a1 = oracles::randn(dims.d1, dims.r1, rng) *
                      oracles::randn(dims.r1, dims.d1, rng);
  const MatrixXd a2 = oracles::randn(dims.d2, dims.r2, rng) *
                      oracles::randn(dims.r2, dims.d2, rng);
  std::vector<std::pair<MatrixXd, MatrixXd>> b;
  for (int i = 0; i < dims.k; ++i)
    b.emplace_back(oracles::randn(dims.d1, dims.d1, rng), oracles::randn(dims.d2, dims.d2, rng));
  const MatrixXd d = oracles::randn(dims.d1, dims.d2, rng);
  return model_from_coefficients(dims, a1, a2, b, d, ErrorCovSpec::identity());
}

}  // namespace

TEST_CASE("normalization produces the canonical certificate") {
  std::mt19937_64 rng(11);
  const Dims dims{4, 3, 2, 2, 1};
  const CmarModel m = random_model(rng, dims);

  CHECK((m.beta1.transpose() * m.beta1 - MatrixXd::Identity(2, 2)).norm() < 1e-10);
  CHECK((m.beta2.transpose() * m.beta2 - MatrixXd::Identity(1, 1)).norm() < 1e-10);
  CHECK(m.a1().norm() == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& [b1, b2] : m.B) CHECK(b1.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Largest-magnitude entry of each beta column positive.
  for (int j = 0; j < 2; ++j) {
    Eigen::Index imax = 0;
    m.beta1.col(j).cwiseAbs().maxCoeff(&imax);
    CHECK(m.beta1(imax, j) > 0.0);
  }

  // Ranks are exact.
  Eigen::JacobiSVD<MatrixXd> s1(m.a1());
  CHECK(s1.singularValues()(1) > 1e-10);
  CHECK(m.validate() == doctest::Approx(0.0).epsilon(1.0));  // validate() returns void; no throw
}

TEST_CASE("normalization preserves the Kronecker coefficients") {
  std::mt19937_64 rng(12);
  const Dims dims{3, 3, 1, 2, 2};

  const MatrixXd a1 = oracles::randn(3, 2, rng) * oracles::randn(2, 3, rng);
  const MatrixXd a2 = oracles::randn(3, 2, rng) * oracles::randn(2, 3, rng);
  std::vector<std::pair<MatrixXd, MatrixXd>> b;
  b.emplace_back(oracles::randn(3, 3, rng), oracles::randn(3, 3, rng));
  const MatrixXd d = oracles::randn(3, 3, rng);

  const CmarModel m = model_from_coefficients(dims, a1, a2, b, d, ErrorCovSpec::identity());
  CHECK((m.pi() - oracles::kron_bruteforce(a2, a1)).norm() < 1e-10);
  CHECK((m.gamma(0) - oracles::kron_bruteforce(b[0].second, b[0].first)).norm() < 1e-10);
  CHECK((m.D - d).norm() == 0.0);
}

TEST_CASE("normalize is idempotent") {
  std::mt19937_64 rng(13);
  const Dims dims{4, 4, 1, 2, 3};
  const CmarModel m = random_model(rng, dims);
  const CmarModel m2 = normalize(m);

  CHECK((m.alpha1 - m2.alpha1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.beta1 - m2.beta1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.alpha2 - m2.alpha2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.beta2 - m2.beta2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.B[0].first - m2.B[0].first).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.B[0].second - m2.B[0].second).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.D - m2.D).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rank-deficient A1 is rejected") {
  const Dims dims{3, 3, 0, 2, 1};
  MatrixXd a1 = MatrixXd::Zero(3, 3);
  a1(0, 0) = 1.0;  // rank 1 < r1 = 2
  const MatrixXd a2 = MatrixXd::Identity(3, 3).topLeftCorner(3, 3);
  CHECK_THROWS(model_from_coefficients(dims, a1, a2, {}, MatrixXd::Zero(3, 3),
                                       ErrorCovSpec::identity()));
}

TEST_CASE("error covariance specs validate shapes and definiteness") {
  ErrorCovSpec id = ErrorCovSpec::identity();
  id.validate(2, 3);
  CHECK((id.dense(2, 3) - MatrixXd::Identity(6, 6)).norm() == 0.0);

  MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
  CHECK_THROWS(ErrorCovSpec::setting_ii(bad, MatrixXd::Identity(3, 3)).validate(2, 3));

  MatrixXd s1(2, 2), s2(2, 2);
  s1 << 2.0, 0.5, 0.5, 1.0;
  s2 << 1.5, -0.2, -0.2, 0.8;
  const ErrorCovSpec sep = ErrorCovSpec::setting_ii(s1, s2);
  sep.validate(2, 2);
  CHECK((sep.dense(2, 2) - oracles::kron_bruteforce(s2, s1)).norm() < 1e-14);
}

TEST_CASE("matrix series shape checks and helpers") {
  MatrixSeries s;
  s.d1 = 2;
  s.d2 = 3;
  std::mt19937_64 rng(14);
  for (int t = 0; t < 5; ++t) s.values.push_back(oracles::randn(2, 3, rng));
  s.validate();

  CHECK(s.vectorized().rows() == 6);
  CHECK(s.vectorized().cols() == 5);
  CHECK((s.transposed().values[2] - s.values[2].transpose()).norm() == 0.0);
  CHECK(s.slice(1, 3).length() == 3);
  CHECK((s.slice(1, 3).values[0] - s.values[1]).norm() == 0.0);
  CHECK_THROWS_AS(s.slice(3, 4), std::out_of_range);

  s.values.push_back(oracles::randn(3, 2, rng));
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
