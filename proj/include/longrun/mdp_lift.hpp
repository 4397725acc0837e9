#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longrun/model.hpp"
#include "longrun/uniform.hpp"

namespace longrun {

/// A finite Markov decision process with observed states: transition
/// kernel q[k][a] (a probability vector over next states), rewards
/// g[k][a] in [0,1], initial distribution p0.
struct MDPSpec {
  int num_states = 0;
  int num_actions = 0;
  std::vector<std::vector<std::vector<double>>> q;
  std::vector<std::vector<double>> g;
  std::vector<double> p0;
};

void validate_mdp(const MDPSpec& spec);
MDPSpec load_mdp(const std::string& text);
MDPSpec load_mdp_file(const std::string& path);
std::string serialize_mdp(const MDPSpec& spec);

/// State of the deterministic rewrite: the distribution over hidden
/// states plus the one-stage expected payoff just collected.
struct LiftedState {
  std::vector<double> p;
  double y = 0.0;
};

/// max of the L1 distance between distributions and the payoff gap.
double lifted_distance(const LiftedState& a, const LiftedState& b);

/// All successors of (p, y): one per assignment of an action to each
/// hidden state in the support of p, deduplicated under exact equality.
/// Successor sets do not depend on y. Throws BudgetError when the
/// assignment count exceeds combo_cap.
std::vector<LiftedState> lift_successors(const MDPSpec& spec,
                                         const LiftedState& state,
                                         std::int64_t combo_cap = 1 << 20);

struct MergeRecord {
  int depth = 0;
  int kept_index = 0;
  double distance = 0.0;
};

struct LiftOptions {
  int state_cap = 200000;
  std::int64_t combo_cap = 1 << 20;
  int metric_cap = 400;  // attach the pairwise metric when small enough
};

struct LiftResult {
  Model model;
  std::vector<LiftedState> states;  // retained representatives, model order
  std::vector<MergeRecord> merges;
  int boundary_redirects = 0;       // closure arcs farther than delta
  double max_boundary_distance = 0.0;
};

/// Breadth-first expansion of the lift from (p0, 0) to the given depth.
/// A discovered state within delta of a retained one is merged into the
/// first such representative (insertion order), which keeps every
/// representative genuinely reachable. Each merge moves any n-stage value
/// by at most delta (values are 1-Lipschitz), so horizons up to the depth
/// carry at most depth*delta error. States first seen on the final layer
/// get their successors mapped to the nearest retained state; arcs beyond
/// delta are counted in boundary_redirects and only matter past the depth.
LiftResult explore(const MDPSpec& spec, int depth, double delta,
                   const LiftOptions& options = {});

/// Finite-horizon dynamic programming on the observed-state process:
/// result[n-1][k] is the n-stage average value from hidden state k.
/// Independent of the lift machinery; used to cross-check it.
std::vector<std::vector<double>> direct_mdp_values(const MDPSpec& spec,
                                                   int n_max);

/// sum_k p0^k * (n-stage value from k).
double mdp_mixture_value(const MDPSpec& spec,
                         const std::vector<std::vector<double>>& tables, int n);

/// n-stage value of the exact (delta = 0) lift at (p0, 0), computed by
/// depth-first recursion over assignment sequences without materializing
/// the lifted model. Node-budgeted.
double lift_value_dfs(const MDPSpec& spec, int n,
                      std::int64_t node_budget = 200'000'000);

struct MdpUniformOptions {
  int depth = 8;
  double delta = 1e-3;
  LiftOptions lift;
  VstarBudget vstar;
};

/// Long-run value interval for the MDP via the pruned lift, widened by
/// the depth*delta pruning slack.
ValueInterval mdp_uniform(const MDPSpec& spec, double target_gap,
                          const MdpUniformOptions& options = {});

}  // namespace longrun
