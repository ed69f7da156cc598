#include <doctest.h>

#include "fixtures.hpp"
#include "pilotforge/error.hpp"
#include "pilotforge/model.hpp"

using namespace pilotforge;

TEST_CASE("flat_index uses cell-major order") {
  const auto config = NetworkConfig::uniform(2, 4, 3);
  CHECK(flat_index({1, 1}, config) == 1);
  CHECK(flat_index({2, 1}, config) == 5);
  CHECK(flat_index({2, 4}, config) == 8);
  CHECK_THROWS_AS(flat_index({3, 1}, config), ArgumentError);
  CHECK_THROWS_AS(flat_index({1, 0}, config), ArgumentError);
  CHECK_THROWS_AS(unflatten(9, config), ArgumentError);
}

TEST_CASE("unflatten inverts flat_index") {
  const auto config = NetworkConfig::uniform(3, 5, 2);
  for (int l = 1; l <= 3; ++l) {
    for (int k = 1; k <= 5; ++k) {
      CHECK(unflatten(flat_index({l, k}, config), config) == UserIndex{l, k});
    }
  }
}

TEST_CASE("uniform config fills same-cell and cross-cell entries") {
  const auto c = NetworkConfig::uniform(2, 4, 3, 1.0, 2.0, 0.8, 0.7);
  CHECK(c.total_users() == 8);
  CHECK(c.sigma_w2() == 2.0);
  CHECK(c.xi2(0, 2, 0) == 1.0);
  CHECK(c.xi2(0, 2, 1) == 0.8);
  CHECK(c.beta(1, 3, 1) == 1.0);
  CHECK(c.beta(1, 3, 0) == 0.7);
  CHECK(c.column(1, 2) == 6);
}

TEST_CASE("config rejects invariant violations") {
  std::vector<double> ones(2 * 2 * 2, 1.0);
  CHECK_NOTHROW(NetworkConfig(2, 2, 1, 1.0, 1.0, ones, ones));

  auto bad_self = ones;
  bad_self[0] = 0.5;  // xi2(0, 0, 0)
  CHECK_THROWS_AS(NetworkConfig(2, 2, 1, 1.0, 1.0, bad_self, ones), ArgumentError);

  auto too_big = ones;
  too_big[1] = 1.2;  // xi2(0, 0, 1)
  CHECK_THROWS_AS(NetworkConfig(2, 2, 1, 1.0, 1.0, too_big, ones), ArgumentError);

  auto zero_beta = ones;
  zero_beta[1] = 0.0;
  CHECK_THROWS_AS(NetworkConfig(2, 2, 1, 1.0, 1.0, ones, zero_beta), ArgumentError);

  CHECK_THROWS_AS(NetworkConfig(2, 2, 1, 1.0, 1.0, std::vector<double>(5, 1.0), ones),
                  ArgumentError);
  CHECK_THROWS_AS(NetworkConfig(2, 2, 1, 0.0, 1.0, ones, ones), ArgumentError);
  CHECK_THROWS_AS(NetworkConfig(2, 2, 1, 1.0, -1.0, ones, ones), ArgumentError);
}

TEST_CASE("targets are sorted per row with the input order kept") {
  Eigen::MatrixXd g(2, 3);
  g << 0.2, 0.9, 0.5, 0.3, 0.3, 0.7;
  const SinrTargets t(g);
  CHECK(t.gamma()(0, 0) == 0.9);
  CHECK(t.gamma()(0, 1) == 0.5);
  CHECK(t.gamma()(0, 2) == 0.2);
  CHECK(t.permutation()[0] == std::vector<int>{1, 2, 0});
  // Stable: the two 0.3 entries keep their relative order.
  CHECK(t.permutation()[1] == std::vector<int>{2, 0, 1});
  CHECK(t.gamma_input_order().isApprox(g));
  CHECK(t.to_input_order(t.gamma()).isApprox(g));
}

TEST_CASE("targets reject nonpositive entries") {
  Eigen::MatrixXd g(1, 2);
  g << 0.5, 0.0;
  CHECK_THROWS_AS(SinrTargets{g}, ArgumentError);
}

TEST_CASE("gamma_hat override is validated") {
  const SinrTargets t(fixtures::table1_gamma());
  CHECK_NOTHROW(t.with_gamma_hat(fixtures::table1_gamma_hat()));

  Eigen::MatrixXd below = fixtures::table1_gamma_hat();
  below(0, 0) = 0.90;
  CHECK_THROWS_AS(t.with_gamma_hat(below), FeasibilityError);

  Eigen::MatrixXd above_cap = fixtures::table1_gamma_hat();
  above_cap(1, 0) = 1.2;  // cap is 1/(L-1) = 1
  CHECK_THROWS_AS(t.with_gamma_hat(above_cap), FeasibilityError);

  Eigen::MatrixXd unsorted = fixtures::table1_gamma_hat();
  unsorted(0, 3) = 0.70;
  CHECK_THROWS(t.with_gamma_hat(unsorted));
}

TEST_CASE("gamma_hat given in input order follows the sort permutation") {
  Eigen::MatrixXd g(1, 3);
  g << 0.2, 0.9, 0.5;
  Eigen::MatrixXd h(1, 3);
  h << 0.25, 0.95, 0.55;
  const SinrTargets t = SinrTargets(g).with_gamma_hat(h);
  CHECK((*t.gamma_hat())(0, 0) == 0.95);
  CHECK((*t.gamma_hat())(0, 2) == 0.25);
}

TEST_CASE("pilot book checks unit norm and caches the Gram") {
  Eigen::MatrixXd s(2, 3);
  s << 1, 0, std::sqrt(0.5), 0, 1, std::sqrt(0.5);
  const PilotBook book(s);
  CHECK(book.gram().isApprox(s.transpose() * s, 1e-12));
  CHECK(book.correlation(0, 2) == doctest::Approx(std::sqrt(0.5)));
  CHECK(book.gram().diagonal().isOnes(1e-12));
  s(0, 0) = 0.9;
  CHECK_THROWS_AS(PilotBook{s}, ArgumentError);
}

TEST_CASE("power allocation invariants") {
  const auto config = NetworkConfig::uniform(1, 2, 1);
  PowerAllocation ok{Eigen::MatrixXd::Constant(1, 2, 1.0), Eigen::MatrixXd::Constant(1, 2, 3.0)};
  CHECK_NOTHROW(validate(ok, config));
  PowerAllocation low_alpha{Eigen::MatrixXd::Constant(1, 2, 0.5),
                            Eigen::MatrixXd::Constant(1, 2, 1.5)};
  CHECK_THROWS_AS(validate(low_alpha, config), ArgumentError);
  PowerAllocation too_much{Eigen::MatrixXd::Constant(1, 2, 3.0),
                           Eigen::MatrixXd::Constant(1, 2, 3.0)};
  CHECK_THROWS_AS(validate(too_much, config), ArgumentError);
}

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::kGwbe, Scheme::kWbe, Scheme::kFos}) {
    CHECK(parse_scheme(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_scheme("zf"), ArgumentError);
}
