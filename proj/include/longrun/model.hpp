#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace longrun {

using StateId = int;

/// Marker for "iterate until the reachable union stabilizes".
inline constexpr int kInfinity = -1;

/// Raised on malformed inputs: parse failures, invariant violations,
/// invalid plays. Maps to exit code 2 in the CLI.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a configured budget (node count, iteration cap, state cap)
/// is exhausted. Maps to exit code 3 in the CLI.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Optional pseudometric on states: either the discrete metric
/// (1 off-diagonal) or an explicit symmetric matrix. Distinct states at
/// distance zero are allowed.
struct Metric {
  bool discrete = true;
  std::vector<std::vector<double>> d;  // used when !discrete

  double operator()(StateId a, StateId b) const {
    if (discrete) return a == b ? 0.0 : 1.0;
    return d[static_cast<size_t>(a)][static_cast<size_t>(b)];
  }
};

/// A deterministic dynamic programming problem on a finite state set:
/// per-state reward in [0,1], a non-empty successor list per state, an
/// initial state and an optional pseudometric. Immutable after load;
/// successor lists are sorted and deduplicated so every computation
/// iterates in a fixed order.
struct Model {
  std::vector<double> rewards;
  std::vector<std::vector<StateId>> successors;
  StateId initial = 0;
  std::optional<Metric> metric;

  int size() const { return static_cast<int>(rewards.size()); }
  double reward(StateId z) const { return rewards[static_cast<size_t>(z)]; }
  const std::vector<StateId>& next(StateId z) const {
    return successors[static_cast<size_t>(z)];
  }
};

/// Checks all Model invariants; throws ModelError naming the violation
/// (including the violating triple for metric axioms).
void validate_model(const Model& model);

/// Parses the JSON model format. Keys: "states" (array of
/// {"id","reward","successors"}), "initial", optional "metric"
/// ({"type":"discrete"} or {"type":"matrix","d":[[...]]}).
Model load_model(const std::string& text);
Model load_model_file(const std::string& path);

/// Serializes in the same key order load_model accepts, numbers at full
/// round-trip precision; load_model(serialize_model(m)) == m.
std::string serialize_model(const Model& model);

/// A finite play fragment: origin plus the visited states z_1, z_2, ...
/// If cycle_start is set, steps[cycle_start..] repeats forever (a lasso),
/// which requires steps[cycle_start] to be a successor of the last step.
struct Play {
  StateId origin = 0;
  std::vector<StateId> steps;
  std::optional<int> cycle_start;

  bool is_lasso() const { return cycle_start.has_value(); }
  int prefix_length() const { return cycle_start.value_or(0); }
  int cycle_length() const {
    return cycle_start ? static_cast<int>(steps.size()) - *cycle_start : 0;
  }
};

/// Throws ModelError if the steps do not follow the successor relation or
/// the cycle suffix does not close.
void validate_play(const Model& model, const Play& play);

/// Rewards r(z_1), ..., r(z_len) along the play, unrolling the cycle when
/// len exceeds the stored steps (requires a lasso in that case).
std::vector<double> payoff_stream(const Model& model, const Play& play, int len);

/// Text form used by the CLI: "origin:", "steps:", optional "cycle_start:".
std::string serialize_play(const Play& play);
Play parse_play(const std::string& text);

/// Average of stream entries m+1..m+n (1-based); requires m+n entries.
double average_payoff(const std::vector<double>& stream, int m, int n);

/// Minimum over t=1..n of average_payoff(stream, m, t).
double min_average_payoff(const std::vector<double>& stream, int m, int n);

/// States reachable in exactly m steps from z. Sorted.
std::vector<StateId> reach(const Model& model, StateId z, int m);

/// Union of reach(z, i) for i = 0..m; m = kInfinity iterates to the fixed
/// point (at most |Z| rounds). Sorted.
std::vector<StateId> reach_union(const Model& model, StateId z, int m);

/// Shortest-path (in steps) tree from z; parent[z] = z. Unreachable
/// states get parent -1 and distance -1.
struct ReachTree {
  std::vector<StateId> parent;
  std::vector<int> distance;
};
ReachTree reach_tree(const Model& model, StateId z);

/// Walks the tree back from y to the root, returning the path z_1..y
/// (excluding the root itself).
std::vector<StateId> path_from_tree(const ReachTree& tree, StateId y);

struct NonExpansiveWitness {
  StateId z = 0;
  StateId z_other = 0;
  StateId z_succ = 0;  // successor of z with no counterpart within d(z, z_other)
  double deficit = 0.0;
};

/// Verifies that from any successor of z there is a successor of z' no
/// farther away than d(z, z'). Returns the first violating triple, or
/// nullopt if the correspondence is non-expansive. Requires a metric.
std::optional<NonExpansiveWitness> check_nonexpansive(const Model& model);

}  // namespace longrun
