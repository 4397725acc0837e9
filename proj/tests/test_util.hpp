#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "longrun/mdp_lift.hpp"
#include "longrun/model.hpp"
#include "longrun/pomdp_lift.hpp"

namespace longrun::testutil {

// Random finite model: up to max_states states, out-degree up to
// max_degree, rewards on the 0.1 lattice.
inline Model random_model(std::mt19937& rng, int max_states = 8,
                          int max_degree = 3) {
  std::uniform_int_distribution<int> size_dist(2, max_states);
  const int n = size_dist(rng);
  std::uniform_int_distribution<int> reward_dist(0, 10);
  std::uniform_int_distribution<int> deg_dist(1, max_degree);
  std::uniform_int_distribution<int> state_dist(0, n - 1);
  Model m;
  m.rewards.resize(static_cast<size_t>(n));
  m.successors.resize(static_cast<size_t>(n));
  for (int z = 0; z < n; ++z) {
    m.rewards[static_cast<size_t>(z)] = reward_dist(rng) / 10.0;
    const int deg = deg_dist(rng);
    std::vector<StateId> succ;
    for (int e = 0; e < deg; ++e) succ.push_back(state_dist(rng));
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    m.successors[static_cast<size_t>(z)] = std::move(succ);
  }
  m.initial = 0;
  validate_model(m);
  return m;
}

inline Model absorbing_model(double reward) {
  Model m;
  m.rewards = {reward};
  m.successors = {{0}};
  m.initial = 0;
  validate_model(m);
  return m;
}

// z0 can stay (reward 0) or jump to an absorbing reward-1 state.
inline Model jump_model() {
  Model m;
  m.rewards = {0.0, 1.0};
  m.successors = {{0, 1}, {1}};
  m.initial = 0;
  validate_model(m);
  return m;
}

// Branch a: reward 0 then 1 forever; branch b: constant 0.4.
inline Model two_branch_model() {
  Model m;
  m.rewards = {0.0, 0.0, 1.0, 0.4};
  m.successors = {{1, 3}, {2}, {2}, {3}};
  m.initial = 0;
  validate_model(m);
  return m;
}

inline Model chain_model(const std::vector<double>& rewards) {
  Model m;
  m.rewards = rewards;
  const int n = static_cast<int>(rewards.size());
  m.successors.resize(static_cast<size_t>(n));
  for (int i = 0; i + 1 < n; ++i) m.successors[static_cast<size_t>(i)] = {i + 1};
  m.successors[static_cast<size_t>(n - 1)] = {n - 1};
  m.initial = 0;
  validate_model(m);
  return m;
}

// Endpoints of all length-m paths, by explicit path enumeration.
inline std::vector<StateId> reach_by_paths(const Model& m, StateId z, int depth) {
  std::vector<StateId> frontier{z};
  for (int d = 0; d < depth; ++d) {
    std::vector<StateId> next;
    for (StateId y : frontier) {
      for (StateId s : m.next(y)) next.push_back(s);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  return frontier;
}

// Exact discounted value by enumerating every positional policy and
// evaluating its eventually-periodic reward stream in extended precision.
inline double policy_enum_discounted(const Model& m, StateId z0, double lambda) {
  const int n = m.size();
  std::vector<int> choice(static_cast<size_t>(n), 0);
  double best = -1.0;
  while (true) {
    // Walk the policy from z0 until a state repeats.
    std::vector<int> seen(static_cast<size_t>(n), -1);
    std::vector<StateId> visits;
    StateId cur = z0;
    while (seen[static_cast<size_t>(cur)] == -1) {
      seen[static_cast<size_t>(cur)] = static_cast<int>(visits.size());
      visits.push_back(cur);
      cur = m.next(cur)[static_cast<size_t>(choice[static_cast<size_t>(cur)])];
    }
    const int cycle_at = seen[static_cast<size_t>(cur)];
    long double value = 0.0L;
    long double weight = static_cast<long double>(lambda);
    // Prefix rewards (r collected on entry).
    for (size_t t = 1; t < visits.size(); ++t) {
      value += weight * static_cast<long double>(m.reward(visits[t]));
      weight *= (1.0L - static_cast<long double>(lambda));
    }
    // Cycle: stage |visits| re-enters visits[cycle_at], then walks on.
    const int cyc_len = static_cast<int>(visits.size()) - cycle_at;
    long double cyc = 0.0L;
    long double w = 1.0L;
    for (int i = 0; i < cyc_len; ++i) {
      const StateId entered = visits[static_cast<size_t>(cycle_at + i)];
      cyc += w * static_cast<long double>(m.reward(entered));
      w *= (1.0L - static_cast<long double>(lambda));
    }
    const long double denom =
        1.0L - std::pow(1.0L - static_cast<long double>(lambda),
                        static_cast<long double>(cyc_len));
    value += weight * cyc / denom;
    best = std::max(best, static_cast<double>(value));
    // Next policy.
    int pos = 0;
    while (pos < n &&
           ++choice[static_cast<size_t>(pos)] ==
               static_cast<int>(m.next(pos).size())) {
      choice[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return best;
}

// Extended-precision truncated Abel mean.
inline double abel_mean_ld(const std::vector<double>& stream, double lambda) {
  long double sum = 0.0L;
  long double weight = static_cast<long double>(lambda);
  for (double a : stream) {
    sum += weight * static_cast<long double>(a);
    weight *= (1.0L - static_cast<long double>(lambda));
  }
  return static_cast<double>(sum);
}

inline MDPSpec random_mdp(std::mt19937& rng, int num_states, int num_actions) {
  MDPSpec spec;
  spec.num_states = num_states;
  spec.num_actions = num_actions;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  spec.q.resize(static_cast<size_t>(num_states));
  spec.g.resize(static_cast<size_t>(num_states));
  for (int k = 0; k < num_states; ++k) {
    spec.q[static_cast<size_t>(k)].resize(static_cast<size_t>(num_actions));
    spec.g[static_cast<size_t>(k)].resize(static_cast<size_t>(num_actions));
    for (int a = 0; a < num_actions; ++a) {
      std::vector<double> row(static_cast<size_t>(num_states));
      double sum = 0.0;
      for (double& x : row) {
        x = unit(rng) + 1e-3;
        sum += x;
      }
      for (double& x : row) x /= sum;
      spec.q[static_cast<size_t>(k)][static_cast<size_t>(a)] = std::move(row);
      spec.g[static_cast<size_t>(k)][static_cast<size_t>(a)] =
          std::round(unit(rng) * 10.0) / 10.0;
    }
  }
  std::vector<double> p0(static_cast<size_t>(num_states));
  double sum = 0.0;
  for (double& x : p0) {
    x = unit(rng) + 1e-3;
    sum += x;
  }
  for (double& x : p0) x /= sum;
  spec.p0 = std::move(p0);
  validate_mdp(spec);
  return spec;
}

inline POMDPSpec random_pomdp(std::mt19937& rng, int num_states, int num_actions,
                              int num_signals) {
  POMDPSpec spec;
  spec.num_states = num_states;
  spec.num_actions = num_actions;
  spec.num_signals = num_signals;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  spec.q.resize(static_cast<size_t>(num_states));
  spec.g.resize(static_cast<size_t>(num_states));
  for (int k = 0; k < num_states; ++k) {
    spec.q[static_cast<size_t>(k)].resize(static_cast<size_t>(num_actions));
    spec.g[static_cast<size_t>(k)].resize(static_cast<size_t>(num_actions));
    for (int a = 0; a < num_actions; ++a) {
      std::vector<double> row(static_cast<size_t>(num_signals * num_states));
      double sum = 0.0;
      for (double& x : row) {
        x = unit(rng) + 1e-3;
        sum += x;
      }
      for (double& x : row) x /= sum;
      spec.q[static_cast<size_t>(k)][static_cast<size_t>(a)] = std::move(row);
      spec.g[static_cast<size_t>(k)][static_cast<size_t>(a)] =
          std::round(unit(rng) * 10.0) / 10.0;
    }
  }
  std::vector<double> p0(static_cast<size_t>(num_states));
  double sum = 0.0;
  for (double& x : p0) {
    x = unit(rng) + 1e-3;
    sum += x;
  }
  for (double& x : p0) x /= sum;
  spec.p0 = std::move(p0);
  validate_pomdp(spec);
  return spec;
}

// Expected n-stage average of the POMDP under the best depth-n
// action/signal tree, by exhaustive enumeration over trees and exact
// expectation over joint (state, signal) paths. Stays on raw arrays.
inline double pomdp_policy_tree_value(const POMDPSpec& spec, int n) {
  const int A = spec.num_actions;
  const int S = spec.num_signals;
  const int K = spec.num_states;
  // Tree nodes indexed breadth-first: node 0 root; children of node v are
  // v*S+1+s. Total nodes = (S^n - 1)/(S - 1) for S > 1, else n.
  int nodes = 0;
  {
    int level = 1;
    for (int d = 0; d < n; ++d) {
      nodes += level;
      level *= S;
    }
  }
  std::vector<int> tree(static_cast<size_t>(nodes), 0);
  double best = -1.0;
  while (true) {
    // Expected total reward: joint distribution over hidden states per
    // node, times the node's action reward.
    double total = 0.0;
    // (node, depth, unnormalized dist) stack.
    struct Item {
      int node;
      int depth;
      std::vector<double> dist;
    };
    std::vector<Item> stack;
    stack.push_back({0, 0, spec.p0});
    while (!stack.empty()) {
      Item it = std::move(stack.back());
      stack.pop_back();
      const int a = tree[static_cast<size_t>(it.node)];
      for (int k = 0; k < K; ++k) {
        total += it.dist[static_cast<size_t>(k)] *
                 spec.g[static_cast<size_t>(k)][static_cast<size_t>(a)];
      }
      if (it.depth + 1 >= n) continue;
      for (int s = 0; s < S; ++s) {
        std::vector<double> next(static_cast<size_t>(K), 0.0);
        double wsum = 0.0;
        for (int k = 0; k < K; ++k) {
          const double pk = it.dist[static_cast<size_t>(k)];
          if (pk <= 0.0) continue;
          for (int k2 = 0; k2 < K; ++k2) {
            const double w = pk * spec.q_at(k, a, s, k2);
            next[static_cast<size_t>(k2)] += w;
            wsum += w;
          }
        }
        if (wsum <= 0.0) continue;
        stack.push_back({it.node * S + 1 + s, it.depth + 1, std::move(next)});
      }
    }
    best = std::max(best, total / n);
    int pos = 0;
    while (pos < nodes && ++tree[static_cast<size_t>(pos)] == A) {
      tree[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == nodes) break;
  }
  return best;
}

}  // namespace longrun::testutil
