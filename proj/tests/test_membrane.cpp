#include <doctest.h>

#include <cmath>
#include <numbers>

#include <sensorsel/bessel.hpp>
#include <sensorsel/errors.hpp>
#include <sensorsel/membrane.hpp>
#include <sensorsel/reconstruction.hpp>

#include "oracles.hpp"

using namespace sensorsel;

TEST_SUITE("membrane") {
  TEST_CASE("Bessel function values") {
    for (int m = 0; m <= 8; ++m) {
      for (double x : {0.0, 0.3, 1.7, 5.0, 7.9, 8.1, 12.5, 24.0, 37.3, 60.0}) {
        CHECK(std::abs(bessel_j(m, x) - oracle::bessel_integral(m, x)) < 1e-12);
      }
    }
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(3, 0.0) == 0.0);
    CHECK(bessel_j(1, -2.0) == doctest::Approx(-bessel_j(1, 2.0)));
    CHECK(std::abs(bessel_j(0, 2000.0) - oracle::bessel_integral(0, 2000.0, 8192)) < 1e-10);
    const double h = 1e-5;
    CHECK(bessel_j_derivative(2, 3.0) ==
          doctest::Approx((bessel_j(2, 3.0 + h) - bessel_j(2, 3.0 - h)) / (2 * h)).epsilon(1e-8));
  }

  TEST_CASE("Bessel zeros") {
    CHECK(bessel_zero(0, 1) == doctest::Approx(2.4048255577).epsilon(1e-10));
    CHECK(std::abs(bessel_zero(1, 1) - 3.8317059702) < 1e-9);
    CHECK(std::abs(bessel_zero(0, 1) - 2.4048255577) < 1e-9);
    for (int m = 0; m <= 6; ++m) {
      for (int n = 1; n <= 5; ++n) {
        const double z = bessel_zero(m, n);
        CHECK(std::abs(oracle::bessel_integral(m, z)) < 1e-9);
        const double ref = oracle::bessel_root(m, z - 0.05, z + 0.05);
        CHECK(std::abs(z - ref) < 1e-9);
        if (n > 1) CHECK(bessel_zero(m, n - 1) < z);
        // interlacing: z_{m,n} < z_{m+1,n} < z_{m,n+1}
        CHECK(z < bessel_zero(m + 1, n));
        CHECK(bessel_zero(m + 1, n) < bessel_zero(m, n + 1));
      }
    }
    CHECK_THROWS_AS(bessel_zero(0, 0), InvalidArgument);
    CHECK_THROWS_AS(bessel_zero(-1, 1), InvalidArgument);
  }

  TEST_CASE("grid and basis layout") {
    const MembraneModel model;
    CHECK(model.grid_size() == 10201);
    CHECK(model.coefficient_count() == 55);
    CHECK(model.r_grid()(0) == 0.0);
    CHECK(model.r_grid()(100) == 10.0);
    CHECK(model.theta_grid()(100) == doctest::Approx(std::numbers::pi));
    CHECK(model.theta_grid()(0) > -std::numbers::pi);
    CHECK(model.lambda(0, 1) == doctest::Approx(std::pow(bessel_zero(0, 1) / 10.0, 2)));

    const MembraneModel small(3, 3, 10.0, 1.0, 21, 17);
    const Eigen::MatrixXd psi = membrane_modes(small);
    REQUIRE(psi.rows() == 21 * 17);
    REQUIRE(psi.cols() == 21);
    for (Index row = 0; row < psi.rows(); ++row) {
      if (row % 21 == 20) CHECK(psi.row(row).norm() == 0.0);
    }
    // m = 0 columns do not depend on theta
    for (Index col = 0; col < 3; ++col) {
      for (Index it = 1; it < 17; ++it) {
        CHECK(psi.col(col).segment(it * 21, 21) == psi.col(col).segment(0, 21));
      }
    }
    // column 3 is cos(theta) J_1(z_11 r / a), column 4 its sine partner
    const Index row = 5 * 21 + 7;
    const double r = small.row_radius(row), th = small.row_theta(row);
    const double radial = bessel_j(1, bessel_zero(1, 1) * r / 10.0);
    CHECK(psi(row, 3) == doctest::Approx(std::cos(th) * radial).epsilon(1e-12));
    CHECK(psi(row, 4) == doctest::Approx(std::sin(th) * radial).epsilon(1e-12));
    CHECK(membrane_basis(small).kind() == BasisKind::analytic);
  }

  TEST_CASE("time evolution") {
    const MembraneModel small(2, 2, 10.0, 1.0, 15, 13);
    const Eigen::MatrixXd psi = membrane_modes(small);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(small.coefficient_count());
    b(0) = 1.0;
    const double period = 2.0 * std::numbers::pi / small.column_frequencies()(0);
    CHECK((evolve(small, psi, b, 0.0) - psi.col(0)).norm() < 1e-14);
    CHECK((evolve(small, psi, b, period / 2) + psi.col(0)).norm() < 1e-12 * psi.col(0).norm());
    CHECK((evolve(small, psi, b, period) - psi.col(0)).norm() < 1e-12 * psi.col(0).norm());

    const auto times = time_grid(0.1, 1.0);
    CHECK(times.size() == 11);
    CHECK(times.back() == doctest::Approx(1.0));
    const Eigen::VectorXd coeffs = sample_coefficients(small, 4);
    const Eigen::MatrixXd snaps = membrane_snapshots(small, psi, coeffs, times);
    CHECK((snaps.col(3) - evolve(small, psi, coeffs, times[3])).norm() < 1e-13);
  }

  TEST_CASE("coefficient statistics") {
    const MembraneModel model(6, 5, 10.0, 1.0, 5, 5);
    const Eigen::VectorXd env = model.coefficient_envelope();
    CHECK(env(0) == doctest::Approx(1.5));
    CHECK(env(1) == doctest::Approx(0.75));
    CHECK(env(5) == doctest::Approx(0.75));   // m = 1, n = 1, cosine
    CHECK(env(6) == doctest::Approx(0.75));   // m = 1, n = 1, sine
    Eigen::VectorXd second = Eigen::VectorXd::Zero(env.size());
    const int draws = 20000;
    for (int d = 0; d < draws; ++d) second += sample_coefficients(model, 11, static_cast<std::uint64_t>(d)).cwiseAbs2();
    second /= draws;
    for (Index i = 0; i < env.size(); ++i) {
      CHECK(std::sqrt(second(i)) == doctest::Approx(env(i)).epsilon(0.05));
    }
    CHECK(sample_coefficients(model, 11, 3) == sample_coefficients(model, 11, 3));
    CHECK(sample_coefficients(model, 11, 3) != sample_coefficients(model, 11, 4));
  }

  TEST_CASE("radial cost") {
    CHECK(radial_cost_at(0.0) == doctest::Approx(1.1));
    CHECK(radial_cost_at(6.5) == doctest::Approx(0.1));
    const MembraneModel model(2, 2, 10.0, 1.0, 11, 7);
    const Eigen::VectorXd c = radial_cost(model);
    CHECK(c.size() == model.grid_size());
    for (Index row = 0; row < c.size(); ++row) CHECK(c(row) == radial_cost_at(model.row_radius(row)));
  }

  TEST_CASE("sensors recover the coefficients") {
    const MembraneModel model(3, 3, 10.0, 1.0, 41, 37);
    const Basis basis = membrane_basis(model);
    const Eigen::VectorXd b = sample_coefficients(model, 7);
    const Eigen::VectorXd u = basis.real_modes() * b;
    const Selection sel = select_on_basis(basis, CostField::uniform(model.grid_size()), 21);
    const Reconstructor rec(basis, sel);
    const Eigen::VectorXd a = rec.coefficients(measure(u, sel)).col(0).real();
    CHECK((a - b).norm() < 1e-8 * b.norm());
  }

  TEST_CASE("fast error evaluator matches explicit reconstruction") {
    const MembraneModel model(2, 3, 10.0, 1.0, 31, 29);
    const Basis basis = membrane_basis(model);
    const Eigen::MatrixXd& psi = basis.real_modes();
    const auto times = time_grid(0.5, 20.0);
    std::vector<Eigen::VectorXd> ics{sample_coefficients(model, 5, 0), sample_coefficients(model, 5, 1)};
    const MembraneErrorEvaluator fast(model, psi, ics, times);
    const CostField cost(radial_cost(model), 50.0);
    for (Index p : {4, 8, 12}) {
      const Selection sel = select_on_basis(basis, cost, p);
      const auto errs = fast.errors(sel);
      for (std::size_t i = 0; i < ics.size(); ++i) {
        const Eigen::MatrixXd x = membrane_snapshots(model, psi, ics[i], times);
        const double direct = fractional_error(x, reconstruct(measure(x, sel), basis, sel));
        CHECK(errs[i] == doctest::Approx(direct).epsilon(1e-8));
      }
    }
    const auto full = select_on_basis(basis, CostField::uniform(model.grid_size()), 15);
    CHECK(fast.mean_error(full) < 1e-10);
  }

  TEST_CASE("benchmark sweep") {
    const MembraneModel model(2, 2, 10.0, 1.0, 21, 21);
    const auto pts = membrane_benchmark(model, 6, {0.0, 10.0, 100.0}, 2, time_grid(1.0, 10.0), 9);
    REQUIRE(pts.size() == 3);
    for (const auto& pt : pts) {
      CHECK(pt.metric_name == "fractional_error");
      CHECK(pt.selection.size() == 6);
    }
    CHECK(pts[2].total_cost <= pts[0].total_cost + 1e-12);
  }
}
