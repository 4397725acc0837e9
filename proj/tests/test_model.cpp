#include <random>

#include "doctest.h"
#include "longrun/model.hpp"
#include "test_util.hpp"

using namespace longrun;
namespace tu = longrun::testutil;

TEST_CASE("minimal model loads and round-trips") {
  const std::string text = R"({
    "states": [{"id": 0, "reward": 1.0, "successors": [0]}],
    "initial": 0
  })";
  Model m = load_model(text);
  CHECK(m.size() == 1);
  CHECK(m.reward(0) == 1.0);
  Model again = load_model(serialize_model(m));
  CHECK(again.rewards == m.rewards);
  CHECK(again.successors == m.successors);
  CHECK(again.initial == m.initial);
}

TEST_CASE("empty successor set is rejected") {
  const std::string text = R"({
    "states": [{"id": 0, "reward": 0.5, "successors": []}],
    "initial": 0
  })";
  CHECK_THROWS_WITH_AS(load_model(text),
                       doctest::Contains("empty successor set"), ModelError);
}

TEST_CASE("reward outside [0,1] is rejected") {
  const std::string text = R"({
    "states": [{"id": 0, "reward": 1.5, "successors": [0]}],
    "initial": 0
  })";
  CHECK_THROWS_WITH_AS(load_model(text), doctest::Contains("reward out of"),
                       ModelError);
}

TEST_CASE("metric axioms are checked with the violating triple named") {
  Model m = tu::chain_model({0.0, 1.0});
  Metric metric;
  metric.discrete = false;
  metric.d = {{0.0, 3.0}, {3.0, 0.0}};
  m.metric = metric;
  validate_model(m);  // fine: only two states, triangle trivial
  Model m3 = tu::chain_model({0.0, 1.0, 0.5});
  Metric bad;
  bad.discrete = false;
  bad.d = {{0.0, 1.0, 5.0}, {1.0, 0.0, 1.0}, {5.0, 1.0, 0.0}};
  m3.metric = bad;
  CHECK_THROWS_WITH_AS(validate_model(m3), doctest::Contains("triangle"),
                       ModelError);
}

TEST_CASE("round-trip across random models is the identity") {
  std::mt19937 rng(7);
  for (int i = 0; i < 25; ++i) {
    Model m = tu::random_model(rng);
    if (i % 3 == 0) m.metric = Metric{};  // discrete
    Model back = load_model(serialize_model(m));
    CHECK(back.rewards == m.rewards);
    CHECK(back.successors == m.successors);
    CHECK(back.initial == m.initial);
    CHECK(back.metric.has_value() == m.metric.has_value());
  }
}

TEST_CASE("reach: fixed points and chains") {
  Model self = tu::absorbing_model(1.0);
  CHECK(reach(self, 0, 5) == std::vector<StateId>{0});
  Model chain = tu::chain_model({0.0, 0.0, 1.0});
  CHECK(reach(chain, 0, 2) == std::vector<StateId>{2});
}

TEST_CASE("reach agrees with path enumeration on random models") {
  std::mt19937 rng(21);
  for (int i = 0; i < 20; ++i) {
    Model m = tu::random_model(rng, 6);
    for (int depth = 0; depth <= 3; ++depth) {
      CHECK(reach(m, m.initial, depth) ==
            tu::reach_by_paths(m, m.initial, depth));
    }
  }
}

TEST_CASE("reach_union chain is monotone and stabilizes at the fixpoint") {
  std::mt19937 rng(22);
  for (int i = 0; i < 20; ++i) {
    Model m = tu::random_model(rng);
    const auto full_set = reach_union(m, m.initial, kInfinity);
    std::vector<StateId> prev = reach_union(m, m.initial, 0);
    for (int depth = 1; depth <= m.size(); ++depth) {
      const auto cur = reach_union(m, m.initial, depth);
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
    CHECK(prev == full_set);
  }
}

TEST_CASE("averages and their running minimum") {
  const std::vector<double> s1 = {1, 0, 1, 0};
  CHECK(average_payoff(s1, 0, 2) == 0.5);
  CHECK(average_payoff(s1, 1, 2) == 0.5);
  const std::vector<double> s2 = {1, 0, 1};
  CHECK(min_average_payoff(s2, 0, 3) == 0.5);
  const std::vector<double> c = {0.3, 0.3, 0.3};
  CHECK(average_payoff(c, 0, 3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(min_average_payoff(c, 0, 3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(average_payoff(s2, 2, 2), ModelError);
}

TEST_CASE("running minimum never exceeds the plain average") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> stream(12);
    for (double& x : stream) x = unit(rng);
    for (int m = 0; m < 4; ++m) {
      for (int n = 1; m + n <= 12; ++n) {
        CHECK(min_average_payoff(stream, m, n) <=
              average_payoff(stream, m, n) + 1e-12);
      }
    }
  }
}

TEST_CASE("play validation and lasso streams") {
  Model m = tu::jump_model();
  Play p;
  p.origin = 0;
  p.steps = {0, 1, 1};
  validate_play(m, p);
  p.cycle_start = 2;
  validate_play(m, p);
  const auto stream = payoff_stream(m, p, 6);
  CHECK(stream == std::vector<double>{0, 1, 1, 1, 1, 1});

  Play bad;
  bad.origin = 1;
  bad.steps = {0};
  CHECK_THROWS_AS(validate_play(m, bad), ModelError);

  Play open_cycle;
  open_cycle.origin = 0;
  open_cycle.steps = {0, 1};
  open_cycle.cycle_start = 0;  // state 1 cannot return to state 0
  CHECK_THROWS_WITH_AS(validate_play(m, open_cycle),
                       doctest::Contains("cycle does not close"), ModelError);
}

TEST_CASE("play text form round-trips") {
  Play p;
  p.origin = 3;
  p.steps = {4, 5, 4};
  p.cycle_start = 1;
  Play q = parse_play(serialize_play(p));
  CHECK(q.origin == p.origin);
  CHECK(q.steps == p.steps);
  CHECK(q.cycle_start == p.cycle_start);
}

TEST_CASE("non-expansiveness: identity map and discrete metric pass") {
  Model m = tu::chain_model({0.2, 0.8});
  m.successors = {{0}, {1}};  // identity correspondence
  Metric metric;
  metric.discrete = false;
  metric.d = {{0.0, 0.7}, {0.7, 0.0}};
  m.metric = metric;
  validate_model(m);
  CHECK(!check_nonexpansive(m).has_value());

  std::mt19937 rng(9);
  Model r = tu::random_model(rng);
  r.metric = Metric{};  // discrete metric, arbitrary finite model
  CHECK(!check_nonexpansive(r).has_value());
}

TEST_CASE("non-expansiveness: a stretched map is caught") {
  // Two parallel chains at vertical distance h whose horizontal positions
  // separate at double speed.
  Model m;
  m.rewards = {0.0, 0.0, 0.0, 0.0};
  m.successors = {{1}, {1}, {3}, {3}};
  m.initial = 0;
  Metric metric;
  metric.discrete = false;
  // coords: 0 -> (0,0), 1 -> (1,0), 2 -> (0,1), 3 -> (2,1)
  auto l1 = [](double x1, double y1, double x2, double y2) {
    return std::abs(x1 - x2) + std::abs(y1 - y2);
  };
  const double xs[4] = {0, 1, 0, 2};
  const double ys[4] = {0, 0, 1, 1};
  metric.d.assign(4, std::vector<double>(4, 0.0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      metric.d[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          l1(xs[i], ys[i], xs[j], ys[j]);
    }
  }
  m.metric = metric;
  validate_model(m);
  const auto witness = check_nonexpansive(m);
  REQUIRE(witness.has_value());
  CHECK(witness->deficit > 0.0);
}
