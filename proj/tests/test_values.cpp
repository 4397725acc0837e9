#include <random>

#include "doctest.h"
#include "longrun/plays.hpp"
#include "longrun/values.hpp"
#include "test_util.hpp"

using namespace longrun;
namespace tu = longrun::testutil;

TEST_CASE("n-stage values on hand instances") {
  Model one = tu::absorbing_model(1.0);
  const auto tables = v_n_table(one, 6);
  for (const auto& t : tables) CHECK(t.at(0) == 1.0);

  Model jump = tu::jump_model();
  const auto jt = v_n_table(jump, 6);
  for (const auto& t : jt) CHECK(t.at(0) == 1.0);
}

TEST_CASE("n-stage and shifted values match exhaustive enumeration") {
  std::mt19937 rng(101);
  for (int i = 0; i < 25; ++i) {
    Model m = tu::random_model(rng);
    const auto tables = v_n_table(m, 6);
    for (int n = 1; n <= 6; ++n) {
      for (int mm = 0; mm <= 2; ++mm) {
        const auto brute = brute_force_values(m, m.initial, mm, n);
        CHECK(v_mn(m, m.initial, mm, n, tables) ==
              doctest::Approx(brute.v).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("shifted value with m=0 is the plain value") {
  std::mt19937 rng(5);
  Model m = tu::random_model(rng);
  const auto tables = v_n_table(m, 4);
  for (int n = 1; n <= 4; ++n) {
    CHECK(v_mn(m, m.initial, 0, n, tables) == tables[n - 1].at(m.initial));
  }
}

TEST_CASE("discounted values: constants, jumps, certified iteration") {
  Model c = tu::absorbing_model(0.3);
  DiscountParams params;
  params.lambda = 0.25;
  const auto table = v_lambda_table(c, params);
  CHECK(table.at(0) == doctest::Approx(0.3).epsilon(1e-9));

  Model jump = tu::jump_model();
  params.lambda = 0.5;
  CHECK(v_lambda_table(jump, params).at(0) == doctest::Approx(1.0).epsilon(1e-9));

  params.max_iterations = 1;
  params.lambda = 0.01;
  CHECK_THROWS_AS(v_lambda_table(jump, params), BudgetError);
}

TEST_CASE("discounted values match policy enumeration") {
  std::mt19937 rng(303);
  for (int i = 0; i < 12; ++i) {
    Model m = tu::random_model(rng, 6, 3);
    for (double lambda : {0.5, 0.1, 0.01}) {
      const double expected = tu::policy_enum_discounted(m, m.initial, lambda);
      DiscountParams params;
      params.lambda = lambda;
      params.tolerance = 1e-10;
      CHECK(v_lambda_table(m, params).at(m.initial) ==
            doctest::Approx(expected).epsilon(1e-8));
      CHECK(v_lambda_exact(m, lambda)[static_cast<size_t>(m.initial)] ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("iteration brackets tighten as the tolerance shrinks") {
  std::mt19937 rng(17);
  Model m = tu::random_model(rng);
  const double exact = v_lambda_exact(m, 0.125)[static_cast<size_t>(m.initial)];
  double prev_err = 1.0;
  for (double tol : {1e-3, 1e-6, 1e-9}) {
    DiscountParams params;
    params.lambda = 0.125;
    params.tolerance = tol;
    const double err =
        std::abs(v_lambda_table(m, params).at(m.initial) - exact);
    CHECK(err <= tol);
    CHECK(err <= prev_err + 1e-15);
    prev_err = err;
  }
}

TEST_CASE("lasso discounted payoff matches the raw series") {
  Model m = tu::two_branch_model();
  Play p;
  p.origin = 0;
  p.steps = {1, 2};
  p.cycle_start = 1;
  const double lambda = 0.3;
  const auto stream = payoff_stream(m, p, 4000);
  CHECK(discounted_payoff(m, p, lambda) ==
        doctest::Approx(tu::abel_mean_ld(stream, lambda)).epsilon(1e-12));
}

TEST_CASE("truncated Abel means carry the geometric tail bracket") {
  std::vector<double> ones(200, 1.0);
  double tail = 0.0;
  const double sum = abel_mean(ones, 0.1, &tail);
  CHECK(sum + tail == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tail == doctest::Approx(std::pow(0.9, 200)).epsilon(1e-9));

  std::vector<double> spike = {1.0, 0.0, 0.0, 0.0};
  const double s = abel_mean(spike, 0.5, &tail);
  CHECK(s == doctest::Approx(0.5).epsilon(1e-15));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> noise(100000);
  for (double& x : noise) x = unit(rng);
  for (double lambda : {0.01, 0.001}) {
    const double got = abel_mean(noise, lambda, &tail);
    CHECK(got == doctest::Approx(tu::abel_mean_ld(noise, lambda)).epsilon(1e-11));
  }
}

TEST_CASE("horizon-splitting sandwich holds, and injected faults are caught") {
  std::mt19937 rng(77);
  for (int i = 0; i < 25; ++i) {
    Model m = tu::random_model(rng);
    auto tables = v_n_table(m, 8);
    CHECK(check_eq1(m, tables).empty());
    tables[2].values[0] += 0.1;  // corrupt one entry
    CHECK(!check_eq1(m, tables).empty());
  }
}

TEST_CASE("discount-grid certificate for a constant-payoff lasso") {
  Model one = tu::absorbing_model(1.0);
  Play stay;
  stay.origin = 0;
  stay.steps = {0};
  stay.cycle_start = 0;
  const auto result = blackwell_check(one, stay, 0.0, default_lambda_grid());
  CHECK(result.ok);
  CHECK(result.lambda0 == 0.5);
}

TEST_CASE("brute force enumeration: trivia and the budget") {
  Model self = tu::absorbing_model(0.7);
  const auto r = brute_force_values(self, 0, 0, 3);
  CHECK(r.v == doctest::Approx(0.7));
  CHECK(r.w == doctest::Approx(0.7));

  Model branch = tu::two_branch_model();
  const auto b = brute_force_values(branch, 0, 0, 2);
  CHECK(b.v == doctest::Approx(0.5));   // front-loaded branch wins the average
  CHECK(b.w == doctest::Approx(0.4));   // flat branch wins the floor

  Model chain = tu::chain_model({0.0, 1.0, 1.0});
  const auto c = brute_force_values(chain, 0, 1, 1);
  CHECK(c.v == doctest::Approx(1.0));

  std::mt19937 rng(2);
  Model m = tu::random_model(rng);
  CHECK_THROWS_AS(brute_force_values(m, 0, 3, 6, 5), BudgetError);
}

TEST_CASE("running minimum re-computation matches the direct loop") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> stream(15);
    for (double& x : stream) x = unit(rng);
    for (int m = 0; m <= 3; ++m) {
      double naive = 2.0;
      for (int t = 1; m + t <= 15; ++t) {
        naive = std::min(naive, average_payoff(stream, m, t));
        CHECK(min_average_payoff(stream, m, t) == doctest::Approx(naive).epsilon(1e-15));
      }
    }
  }
}
