#include <doctest.h>

#include <cmath>
#include <numeric>

#include <sensorsel/errors.hpp>
#include <sensorsel/pivoting.hpp>

#include "oracles.hpp"

using namespace sensorsel;

namespace {

std::vector<Index> idx(std::initializer_list<Index> l) { return std::vector<Index>(l); }

Eigen::MatrixXd example_2x3() {
  Eigen::MatrixXd v(2, 3);
  v << 1, 0, 3, 0, 2, 0;
  return v;
}

}  // namespace

TEST_SUITE("pivoting") {
  TEST_CASE("identity ties go to the lowest index") {
    const auto sel = qr_pivot_select(RealCandidates(Eigen::MatrixXd::Identity(3, 3)), 2);
    CHECK(sel.indices == idx({0, 1}));
    CHECK_FALSE(sel.rank_deficient);
  }

  TEST_CASE("2x3 example maximizes |det|") {
    const Eigen::MatrixXd v = example_2x3();
    const auto sel = qr_pivot_select(RealCandidates(v), 2);
    CHECK(sel.indices == idx({2, 1}));
    double best = 0.0;
    oracle::subsets(3, 2, [&](const std::vector<Index>& s) {
      Eigen::Matrix2d m;
      m << v.col(s[0]), v.col(s[1]);
      best = std::max(best, std::abs(m.determinant()));
    });
    CHECK(best == doctest::Approx(6.0));
    CHECK(sel.pivot_norms[0] * sel.pivot_norms[1] == doctest::Approx(best));
  }

  TEST_CASE("cost example traces the penalized greedy") {
    Eigen::VectorXd eta(3);
    eta << 0, 0, 10;
    const auto sel = qr_pivot_select_cost(RealCandidates(example_2x3()), CostField(eta, 1.0), 2);
    CHECK(sel.indices == idx({1, 0}));
    CHECK(sel.costs == std::vector<double>{0.0, 0.0});
    CHECK(sel.total_cost == 0.0);
    CHECK(sel.gamma_used == 1.0);
    CHECK(sel.indices == oracle::greedy_pivots(example_2x3(), 2, eta, 1.0));
  }

  TEST_CASE("seeded random 4x10 matches the Gram-Schmidt oracle") {
    const Eigen::MatrixXd v = oracle::random_matrix(4, 10, 4242);
    CHECK(qr_pivot_select(RealCandidates(v), 4).indices == oracle::greedy_pivots(v, 4));
  }

  TEST_CASE("oracle equivalence on random matrices, with and without cost") {
    std::mt19937_64 g(99);
    for (int trial = 0; trial < 100; ++trial) {
      const Index r = 1 + static_cast<Index>(g() % 8);
      const Index n = r + static_cast<Index>(g() % (21 - r));
      const Index p = 1 + static_cast<Index>(g() % r);
      const Eigen::MatrixXd v = oracle::random_matrix(r, n, g());
      const Eigen::VectorXd eta = oracle::random_matrix(n, 1, g()).cwiseAbs();
      const double gamma = 0.3 * static_cast<double>(g() % 5);
      const auto plain = qr_pivot_select(RealCandidates(v), p);
      const auto cost = qr_pivot_select_cost(RealCandidates(v), CostField(eta, gamma), p);
      const auto zero = qr_pivot_select_cost(RealCandidates(v), CostField(eta, 0.0), p);
      CHECK(plain.indices == oracle::greedy_pivots(v, p));
      CHECK(cost.indices == oracle::greedy_pivots(v, p, eta, gamma));
      CHECK(zero.indices == plain.indices);
    }
  }

  TEST_CASE("pivot magnitudes multiply to |det Theta|") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Eigen::MatrixXd v = oracle::random_matrix(5, 12, seed);
      const auto sel = qr_pivot_select(RealCandidates(v), 5);
      Eigen::MatrixXd theta(5, 5);
      for (Index k = 0; k < 5; ++k) theta.col(k) = v.col(sel.indices[static_cast<std::size_t>(k)]);
      double prod = 1.0;
      for (double x : sel.pivot_norms) prod *= x;
      CHECK(std::abs(prod - std::abs(theta.determinant())) <= 1e-10 * prod);
    }
  }

  TEST_CASE("costs follow their locations") {
    const Eigen::MatrixXd v = oracle::random_matrix(3, 8, 5);
    Eigen::VectorXd eta(8);
    eta << 0.5, 1, 2, 3, 4, 5, 6, 7;
    const auto sel = qr_pivot_select_cost(RealCandidates(v), CostField(eta, 0.1), 3);
    double total = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(sel.costs[k] == eta(sel.indices[k]));
      total += sel.costs[k];
    }
    CHECK(sel.total_cost == doctest::Approx(total));
  }

  TEST_CASE("complex candidates: row-unitary invariance and oracle match") {
    std::mt19937_64 g(3);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXcd v(4, 9);
      for (Index i = 0; i < v.size(); ++i) v(i) = Complex(d(g), d(g));
      Eigen::MatrixXcd z(4, 4);
      for (Index i = 0; i < z.size(); ++i) z(i) = Complex(d(g), d(g));
      const Eigen::MatrixXcd u = z.householderQr().householderQ();
      const auto a = qr_pivot_select(ComplexCandidates(v), 4);
      const auto b = qr_pivot_select(ComplexCandidates(u * v), 4);
      CHECK(a.indices == b.indices);
      CHECK(a.indices == oracle::greedy_pivots(v, 4));
    }
  }

  TEST_CASE("zero matrix still selects, flagged rank deficient") {
    const auto sel = qr_pivot_select(RealCandidates(Eigen::MatrixXd::Zero(2, 4)), 2);
    CHECK(sel.indices == idx({0, 1}));
    CHECK(sel.rank_deficient);
  }

  TEST_CASE("constant cost does not change the pivots") {
    const Eigen::MatrixXd v = oracle::random_matrix(4, 15, 8);
    const auto base = qr_pivot_select(RealCandidates(v), 4);
    for (double gamma : {0.5, 2.0, 50.0}) {
      const auto sel = qr_pivot_select_cost(RealCandidates(v), CostField::uniform(15, 1.0, gamma), 4);
      CHECK(sel.indices == base.indices);
    }
  }

  TEST_CASE("restriction") {
    const RealCandidates v(example_2x3());
    const std::vector<Index> all{0, 1, 2};
    const auto same = restrict_candidates(v, all);
    CHECK(same.to_original == all);
    CHECK(same.matrix.entries() == v.entries());
    const std::vector<Index> only{2};
    const auto forced = restrict_candidates(v, only);
    const auto sel = forced.to_original_selection(qr_pivot_select(forced.matrix, 1));
    CHECK(sel.indices == idx({2}));
    const std::vector<Index> none;
    CHECK_THROWS_AS(restrict_candidates(v, none), InvalidArgument);
    const std::vector<Index> bad{5};
    CHECK_THROWS_AS(restrict_candidates(v, bad), InvalidArgument);
  }

  TEST_CASE("validation") {
    const RealCandidates v(example_2x3());
    CHECK_THROWS_AS(qr_pivot_select(v, 0), InvalidArgument);
    CHECK_THROWS_AS(qr_pivot_select(v, 3), InvalidArgument);
    CHECK_THROWS_AS(qr_pivot_select_cost(v, CostField(Eigen::VectorXd::Zero(2), 0.0), 1), InvalidArgument);
    Eigen::VectorXd neg(3);
    neg << 0, -1, 0;
    CHECK_THROWS_AS(qr_pivot_select_cost(v, CostField(neg, 1.0), 1), InvalidArgument);
    CHECK_THROWS_AS(qr_pivot_select_cost(v, CostField(Eigen::VectorXd::Zero(3), -1.0), 1), InvalidArgument);
    Eigen::MatrixXd nan = example_2x3();
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(RealCandidates{nan}, InvalidArgument);
    CHECK_THROWS_AS(Selection::from_indices({0, 0}, 3), InvalidArgument);
    CHECK_THROWS_AS(Selection::from_indices({3}, 3), InvalidArgument);
  }
}
