#include <doctest.h>

#include <set>

#include <sensorsel/bases.hpp>
#include <sensorsel/errors.hpp>

#include "oracles.hpp"

using namespace sensorsel;

namespace {

// U diag(s) V^T with random orthonormal factors.
Eigen::MatrixXd with_spectrum(Index n, Index m, const Eigen::VectorXd& s, std::uint64_t seed) {
  const Eigen::MatrixXd u = oracle::random_matrix(n, s.size(), seed).householderQr().householderQ() *
                            Eigen::MatrixXd::Identity(n, s.size());
  const Eigen::MatrixXd v = oracle::random_matrix(m, s.size(), seed + 1).householderQr().householderQ() *
                            Eigen::MatrixXd::Identity(m, s.size());
  return u * s.asDiagonal() * v.transpose();
}

double projection_residual(const Eigen::MatrixXd& x, const Eigen::MatrixXd& q) {
  return (x - q * (q.transpose() * x)).norm();
}

}  // namespace

TEST_SUITE("bases") {
  TEST_CASE("rank-1 data gives its left factor") {
    const Eigen::VectorXd u = oracle::random_matrix(12, 1, 1);
    const Eigen::VectorXd v = oracle::random_matrix(5, 1, 2);
    const Basis b = svd_basis(u * v.transpose(), 1);
    const Eigen::VectorXd mode = b.real_modes().col(0);
    CHECK(std::abs(std::abs(mode.dot(u.normalized())) - 1.0) < 1e-12);
    Index arg = 0;
    mode.cwiseAbs().maxCoeff(&arg);
    CHECK(mode(arg) > 0.0);
  }

  TEST_CASE("orthogonal columns 3,2,1 truncated to two modes") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 3);
    x(0, 0) = 3.0;
    x(2, 1) = 2.0;
    x(4, 2) = 1.0;
    const Eigen::MatrixXd psi = svd_basis(x, 2).real_modes();
    const double err = fractional_error(x, psi * (psi.transpose() * x));
    CHECK(err == doctest::Approx(1.0 / std::sqrt(14.0)).epsilon(1e-12));
  }

  TEST_CASE("orthonormal columns and Eckart-Young") {
    Eigen::VectorXd s(6);
    s << 10, 5, 2, 1, 0.5, 0.1;
    const Eigen::MatrixXd x = with_spectrum(40, 15, s, 3);
    for (Index r = 1; r <= 5; ++r) {
      const auto f = truncated_svd(x, r);
      CHECK((f.u.transpose() * f.u - Eigen::MatrixXd::Identity(r, r)).norm() < 1e-10);
      CHECK((f.v.transpose() * f.v - Eigen::MatrixXd::Identity(r, r)).norm() < 1e-10);
      for (Index i = 0; i < r; ++i) CHECK(f.sigma(i) == doctest::Approx(s(i)).epsilon(1e-10));
      const double tail = s.tail(6 - r).squaredNorm() / s.squaredNorm();
      const double err = fractional_error(x, f.u * (f.u.transpose() * x));
      CHECK(err * err == doctest::Approx(tail).epsilon(1e-8));
    }
    CHECK_THROWS_AS(svd_basis(x, 0), InvalidArgument);
    CHECK_THROWS_AS(svd_basis(x, 16), InvalidArgument);
  }

  TEST_CASE("randomized range finder") {
    const Eigen::MatrixXd x2 = oracle::random_matrix(50, 2, 4) * oracle::random_matrix(2, 30, 5);
    const Basis b2 = randomized_basis(x2, 2, {.oversample = 5, .power_iterations = 1, .seed = 1});
    CHECK(projection_residual(x2, b2.real_modes()) < 1e-10 * x2.norm());
    CHECK(b2.kind() == BasisKind::randomized);

    Eigen::VectorXd s(25);
    for (Index i = 0; i < 25; ++i) s(i) = std::pow(0.5, static_cast<double>(i));
    const Eigen::MatrixXd x = with_spectrum(80, 40, s, 6);
    const Index r = 5;
    const double full = projection_residual(x, svd_basis(x, r).real_modes());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const double r0 = projection_residual(
          x, randomized_basis(x, r, {.oversample = 0, .power_iterations = 0, .seed = seed}).real_modes());
      const double r10 = projection_residual(
          x, randomized_basis(x, r, {.oversample = 10, .power_iterations = 0, .seed = seed}).real_modes());
      CHECK(r10 <= r0 * (1.0 + 1e-12));
      CHECK(r10 <= 10.0 * full);
      const Eigen::MatrixXd q =
          randomized_basis(x, r, {.oversample = 10, .power_iterations = 1, .seed = seed}).real_modes();
      CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(r, r)).norm() < 1e-10);
    }
    const auto a = randomized_basis(x, r, {.seed = 3}).real_modes();
    const auto b = randomized_basis(x, r, {.seed = 3}).real_modes();
    CHECK(a == b);
    CHECK_THROWS_AS(randomized_basis(x, 35, {.oversample = 10}), InvalidArgument);
    CHECK_THROWS_AS(randomized_basis(x, 3, {.power_iterations = 4}), InvalidArgument);
  }

  TEST_CASE("hybrid selection") {
    const Eigen::MatrixXd x = oracle::random_matrix(60, 20, 8);
    const Selection two = hybrid_select(x, 2, CostField{}, 1);
    REQUIRE(two.size() == 2);
    CHECK(two.hybrid);
    CHECK(two.indices[0] == select_on_basis(svd_basis(x, 1), CostField{}, 1).indices[0]);

    for (Index p = 1; p <= 15; ++p) {
      const Selection s = hybrid_select(x, p, CostField{}, 5);
      CHECK(s.size() == p);
      CHECK(std::set<Index>(s.indices.begin(), s.indices.end()).size() == static_cast<std::size_t>(p));
      const Selection qr = select_on_basis(svd_basis(x, (p + 1) / 2), CostField{}, (p + 1) / 2);
      CHECK(std::equal(qr.indices.begin(), qr.indices.end(), s.indices.begin()));
    }
    CHECK(hybrid_select(x, 9, CostField{}, 5).indices == hybrid_select(x, 9, CostField{}, 5).indices);
    CHECK_THROWS_AS(hybrid_select(x, 61, CostField{}, 0), InvalidArgument);
  }
}
