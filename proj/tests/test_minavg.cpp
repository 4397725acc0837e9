#include <random>

#include "doctest.h"
#include "longrun/gallery.hpp"
#include "longrun/minavg.hpp"
#include "longrun/values.hpp"
#include "test_util.hpp"

using namespace longrun;
namespace tu = longrun::testutil;

TEST_CASE("threshold feasibility on a constant-reward loop") {
  Model c = tu::absorbing_model(0.6);
  CHECK(feasible(c, 0, 5, 0.6));
  CHECK(!feasible(c, 0, 5, 0.61));
  Play witness;
  CHECK(feasible(c, 0, 3, 0.5, &witness));
  CHECK(witness.steps == std::vector<StateId>{0, 0, 0});
}

TEST_CASE("feasibility agrees with thresholded enumeration") {
  std::mt19937 rng(404);
  for (int i = 0; i < 20; ++i) {
    Model m = tu::random_model(rng, 6);
    for (int n = 1; n <= 5; ++n) {
      const double exact = brute_force_values(m, m.initial, 0, n).w;
      for (double c : {0.15, 0.35, 0.55, 0.75}) {
        CHECK(feasible(m, m.initial, n, c) == (exact >= c - kFeasibleTie));
      }
    }
  }
}

TEST_CASE("min-average value on hand instances") {
  Model one = tu::absorbing_model(1.0);
  CHECK(w_n(one, 0, 4).value == 1.0);

  Model branch = tu::two_branch_model();
  const auto r = w_n(branch, 0, 2, 1e-9);
  CHECK(r.value == doctest::Approx(0.4).epsilon(1e-8));
  // The witness must actually achieve the value.
  const auto stream = payoff_stream(branch, r.witness, 2);
  CHECK(min_average_payoff(stream, 0, 2) >= r.value - 2e-9);
}

TEST_CASE("block-pattern model: the floor from a block start is one half") {
  BlocksInstance inst = blocks_model(6);
  for (int k = 1; k <= 6; ++k) {
    const StateId start = inst.block_starts[static_cast<size_t>(k - 1)];
    // From the state before the block, the next 2k steps are the block.
    const auto r = w_n(inst.model, start - 1 == 0 ? 0 : start - 1, 2 * k);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-8));
  }
}

TEST_CASE("shifted min-average value: jumps and matches") {
  Model jump = tu::jump_model();
  for (int n = 1; n <= 5; ++n) {
    CHECK(w_mn(jump, 0, 1, n).value == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(w_mn(jump, 0, 0, 3).value == w_n(jump, 0, 3).value);

  std::mt19937 rng(505);
  for (int i = 0; i < 15; ++i) {
    Model m = tu::random_model(rng, 6);
    for (int mm = 0; mm <= 3; ++mm) {
      for (int n = 1; n <= 5; ++n) {
        const double exact = brute_force_values(m, m.initial, mm, n).w;
        const auto got = w_mn(m, m.initial, mm, n);
        CHECK(got.value == doctest::Approx(exact).epsilon(1e-6));
        // Witness validity: length m+n, re-evaluates to at least value-2tol.
        REQUIRE(static_cast<int>(got.witness.steps.size()) == mm + n);
        const auto stream = payoff_stream(m, got.witness, mm + n);
        CHECK(min_average_payoff(stream, mm, n) >= got.value - 2e-9);
      }
    }
  }
}

TEST_CASE("monotonicity in horizon and domination by shifted values") {
  std::mt19937 rng(606);
  for (int i = 0; i < 15; ++i) {
    Model m = tu::random_model(rng);
    const auto tables = v_n_table(m, 6);
    for (int mm = 0; mm <= 2; ++mm) {
      double prev = 2.0;
      for (int n = 1; n <= 6; ++n) {
        const double w = w_mn(m, m.initial, mm, n).value;
        CHECK(w <= prev + 2e-9);
        CHECK(w <= v_mn(m, m.initial, mm, n, tables) + 2e-9);
        prev = w;
      }
    }
  }
}

TEST_CASE("exact-length paths respect parity") {
  Model m;
  m.rewards = {0.0, 0.0};
  m.successors = {{1}, {0}};  // two-cycle
  m.initial = 0;
  validate_model(m);
  CHECK(exact_length_path(m, 0, 1, 1) == std::vector<StateId>{1});
  CHECK(exact_length_path(m, 0, 0, 2) == std::vector<StateId>{1, 0});
  CHECK_THROWS_AS(exact_length_path(m, 0, 0, 1), ModelError);
}

TEST_CASE("batch queries agree with per-state queries") {
  std::mt19937 rng(707);
  for (int i = 0; i < 10; ++i) {
    Model m = tu::random_model(rng);
    std::vector<StateId> all(static_cast<size_t>(m.size()));
    for (int z = 0; z < m.size(); ++z) all[static_cast<size_t>(z)] = z;
    for (int n : {1, 3, 5}) {
      double best = -1.0;
      for (StateId z : all) best = std::max(best, w_n(m, z, n).value);
      StateId arg = -1;
      const auto batch = w_n_over(m, all, n, 1e-9, &arg);
      CHECK(batch.value == doctest::Approx(best).epsilon(1e-8));
      CHECK(arg >= 0);
    }
  }
}
