#include <random>

#include "doctest.h"
#include "longrun/minavg.hpp"
#include "longrun/oracles.hpp"
#include "longrun/plays.hpp"
#include "test_util.hpp"

using namespace longrun;
namespace tu = longrun::testutil;

namespace {

// Direct simulation of running averages, the soundness reference for the
// closed-form verifier.
double simulated_min_average(const Model& m, const Play& lasso, int horizon) {
  const auto stream = payoff_stream(m, lasso, horizon);
  double sum = 0.0;
  double lowest = 2.0;
  for (int t = 1; t <= horizon; ++t) {
    sum += stream[static_cast<size_t>(t - 1)];
    lowest = std::min(lowest, sum / t);
  }
  return lowest;
}

}  // namespace

TEST_CASE("lasso statistics: cycle means and exact floors") {
  Model m = tu::two_branch_model();
  Play p;
  p.origin = 0;
  p.steps = {1, 2};
  p.cycle_start = 1;  // 0 -> 1 -> 2 -> 2 -> ...
  const auto stats = lasso_stats(m, p);
  CHECK(stats.cycle_mean == 1.0);
  CHECK(stats.min_average == 0.0);  // gamma_1 = 0
  CHECK(stats.max_average == 1.0);
}

TEST_CASE("guarantee verification: constant-one lasso") {
  Model one = tu::absorbing_model(1.0);
  Play stay;
  stay.origin = 0;
  stay.steps = {0};
  stay.cycle_start = 0;
  const auto report = verify_guarantee(one, stay, 1.0, 0.0);
  CHECK(report.pass);
}

TEST_CASE("guarantee verification: alternating cycle with and without slack") {
  Model m;
  m.rewards = {1.0, 0.0};
  m.successors = {{1}, {0}};
  m.initial = 0;
  validate_model(m);
  Play p;
  p.origin = 1;  // first step enters state 0 (reward 1)
  p.steps = {0, 1};
  p.cycle_start = 0;
  CHECK(verify_guarantee(m, p, 0.5, 0.01).pass);
  CHECK(verify_guarantee(m, p, 0.5, 0.0).pass);  // averages never dip below 1/2

  Play q;
  q.origin = 0;  // first step enters state 1 (reward 0)
  q.steps = {1, 0};
  q.cycle_start = 0;
  const auto fail = verify_guarantee(m, q, 0.5, 0.0);
  CHECK(!fail.pass);
  CHECK(fail.failing_T == 1);
  CHECK(verify_guarantee(m, q, 0.5, 0.5).pass);
}

TEST_CASE("guarantee verification is sound against long simulation") {
  std::mt19937 rng(808);
  for (int i = 0; i < 15; ++i) {
    Model m = tu::random_model(rng);
    const auto cl = best_certified_lasso(m, m.initial, 48);
    const auto report =
        verify_guarantee(m, cl.lasso, cl.min_average, 0.0);
    CHECK(report.pass);
    CHECK(simulated_min_average(m, cl.lasso, 100000) >=
          cl.min_average - 1e-9);
  }
}

TEST_CASE("failing horizon is located even past the first period") {
  // Prefix of ones, then a zero cycle: averages sink slowly.
  Model m = tu::chain_model({1.0, 1.0, 1.0, 0.0});
  Play p;
  p.origin = 0;
  p.steps = {1, 2, 3};
  p.cycle_start = 2;
  const auto report = verify_guarantee(m, p, 0.5, 0.0);
  CHECK(!report.pass);
  // gamma_T = 2/T < 0.5 first at T = 5.
  CHECK(report.failing_T == 5);
}

TEST_CASE("block search meets its contract on easy instances") {
  Model one = tu::absorbing_model(1.0);
  std::vector<double> lb = {1.0};
  const auto cert = find_block(one, 0, 0.1, 2, 4, lb);
  CHECK(cert.m == 0);
  CHECK(cert.nu_value == doctest::Approx(1.0));

  Model jump = tu::jump_model();
  std::vector<double> lb2 = {1.0, 1.0};  // both states can secure 1
  const auto cert2 = find_block(jump, 0, 0.1, 3, 4, lb2);
  CHECK(cert2.nu_value >= 1.0 - 0.1 / 2 - 1e-9);
  CHECK(cert2.terminal == 1);
}

TEST_CASE("block certificates re-verify on random models") {
  std::mt19937 rng(909);
  for (int i = 0; i < 10; ++i) {
    Model m = tu::random_model(rng, 6);
    std::vector<double> lb(static_cast<size_t>(m.size()));
    for (int z = 0; z < m.size(); ++z) {
      lb[static_cast<size_t>(z)] = best_certified_lasso(m, z, 32).level;
    }
    BlockCertificate cert;
    try {
      cert = find_block(m, m.initial, 0.1, 2 * m.size(), 16, lb);
    } catch (const BudgetError&) {
      continue;  // bound too small for this instance; other tests cover growth
    }
    Play block;
    block.origin = m.initial;
    block.steps = cert.prefix;
    const auto stream = payoff_stream(m, block, cert.m + cert.n);
    CHECK(min_average_payoff(stream, cert.m, cert.n) >=
          cert.nu_value - 2e-9);
    CHECK(cert.target_value ==
          lb[static_cast<size_t>(cert.terminal)]);
  }
}

TEST_CASE("synthesis on trivial and random models meets the stopping bound") {
  Model one = tu::absorbing_model(1.0);
  const auto easy = synthesize(one, 0, 0.1);
  CHECK(easy.report.pass);
  CHECK(easy.report.level == doctest::Approx(1.0));

  std::mt19937 rng(1010);
  for (int i = 0; i < 10; ++i) {
    Model m = tu::random_model(rng);
    const auto result = synthesize(m, m.initial, 0.1);
    CHECK(result.report.pass);
    const double oracle = max_mean_cycle(m, m.initial).mean;
    CHECK(result.report.level >=
          (oracle - 0.1) / 1.1 - 1e-6);
    // The certificate itself re-verifies.
    const auto again = verify_guarantee(m, result.lasso, result.report.level,
                                        result.report.epsilon);
    CHECK(again.pass);
  }
}

TEST_CASE("shorten: already-cyclic segment is returned as the cycle") {
  Model m;
  m.rewards = {0.9, 0.9, 0.1};
  m.successors = {{1}, {0, 2}, {2}};
  m.initial = 0;
  validate_model(m);
  Play p;
  p.origin = 0;
  p.steps = {1, 0, 1, 0, 1};
  const Play s = shorten(m, p, 0.05, 0.9);
  REQUIRE(s.is_lasso());
  const auto stats = lasso_stats(m, s);
  CHECK(stats.cycle_mean >= 0.9 - 2 * 0.05 - 1e-12);
}

TEST_CASE("shorten: acyclic compression keeps distinct states") {
  Model m = tu::chain_model({0.2, 0.4, 0.6, 0.8});
  Play p;
  p.origin = 0;
  p.steps = {1, 2, 3};
  const Play s = shorten(m, p, 0.01, 0.9);  // no repeated pair can qualify
  CHECK(!s.is_lasso());
  std::vector<StateId> seen = s.steps;
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("shorten on random prefixes: lasso case re-verifies, acyclic case is duplicate-free") {
  std::mt19937 rng(1111);
  for (int i = 0; i < 15; ++i) {
    Model m = tu::random_model(rng);
    const auto wr = w_n(m, m.initial, 24);
    const double level = wr.value;
    const Play s = shorten(m, wr.witness, 0.05, level);
    if (s.is_lasso()) {
      const auto stats = lasso_stats(m, s);
      CHECK(stats.cycle_mean >= level - 2 * 0.05 - 1e-9);
    } else {
      std::vector<StateId> seen = s.steps;
      std::sort(seen.begin(), seen.end());
      CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    }
  }
}
