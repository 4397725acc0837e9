#include "longrun/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace longrun {

namespace {

// Enumerates every simple cycle whose smallest state is the DFS root,
// taking the best mean. Exponential in the worst case, which is why the
// caller gates it on the state count.
struct CycleEnumerator {
  const Model& model;
  const std::vector<char>& allowed;
  std::vector<char> on_path;
  std::vector<StateId> path;
  StateId root = 0;
  double best_mean = -1.0;
  std::vector<StateId> best_cycle;

  explicit CycleEnumerator(const Model& m, const std::vector<char>& a)
      : model(m), allowed(a), on_path(static_cast<size_t>(m.size()), 0) {}

  void dfs(StateId u, double sum) {
    for (StateId v : model.next(u)) {
      if (v < root || !allowed[static_cast<size_t>(v)]) continue;
      if (v == root) {
        const double mean =
            (sum + model.reward(root)) / static_cast<double>(path.size() + 1);
        if (mean > best_mean) {
          best_mean = mean;
          best_cycle.assign(path.begin(), path.end());
          best_cycle.push_back(root);
        }
        continue;
      }
      if (on_path[static_cast<size_t>(v)]) continue;
      on_path[static_cast<size_t>(v)] = 1;
      path.push_back(v);
      dfs(v, sum + model.reward(v));
      path.pop_back();
      on_path[static_cast<size_t>(v)] = 0;
    }
  }
};

MeanCycle enumerate_cycles(const Model& model, const std::vector<char>& allowed) {
  MeanCycle best;
  best.mean = -1.0;
  CycleEnumerator en(model, allowed);
  for (StateId root = 0; root < model.size(); ++root) {
    if (!allowed[static_cast<size_t>(root)]) continue;
    en.root = root;
    en.dfs(root, 0.0);
  }
  best.mean = en.best_mean;
  // Rotate so the cycle is listed from its entry state in visiting order.
  best.cycle = en.best_cycle;
  return best;
}

struct GainBias {
  std::vector<double> gain;
  std::vector<double> bias;
};

GainBias evaluate(const Model& model, const std::vector<char>& allowed,
                  const std::vector<StateId>& policy) {
  const int size = model.size();
  GainBias gb;
  gb.gain.assign(static_cast<size_t>(size),
                 -std::numeric_limits<double>::infinity());
  gb.bias.assign(static_cast<size_t>(size), 0.0);
  std::vector<int> mark(static_cast<size_t>(size), -1);
  std::vector<char> done(static_cast<size_t>(size), 0);
  for (int start = 0; start < size; ++start) {
    if (!allowed[static_cast<size_t>(start)] || done[static_cast<size_t>(start)])
      continue;
    std::vector<StateId> stack;
    StateId cur = start;
    while (!done[static_cast<size_t>(cur)] && mark[static_cast<size_t>(cur)] == -1) {
      mark[static_cast<size_t>(cur)] = static_cast<int>(stack.size());
      stack.push_back(cur);
      cur = policy[static_cast<size_t>(cur)];
    }
    if (!done[static_cast<size_t>(cur)]) {
      // Fresh cycle stack[c0..]; gain = mean of entered rewards, bias
      // fixed to zero at the cycle head and propagated backwards.
      const int c0 = mark[static_cast<size_t>(cur)];
      const int len = static_cast<int>(stack.size()) - c0;
      double sum = 0.0;
      for (int i = 0; i < len; ++i) {
        sum += model.reward(stack[static_cast<size_t>(c0 + i)]);
      }
      const double g = sum / len;
      gb.gain[static_cast<size_t>(cur)] = g;
      gb.bias[static_cast<size_t>(cur)] = 0.0;
      done[static_cast<size_t>(cur)] = 1;
      for (int i = len - 1; i >= 1; --i) {
        const StateId s = stack[static_cast<size_t>(c0 + i)];
        const StateId t = stack[static_cast<size_t>(c0 + (i + 1) % len)];
        gb.gain[static_cast<size_t>(s)] = g;
        gb.bias[static_cast<size_t>(s)] =
            model.reward(t) - g + gb.bias[static_cast<size_t>(t)];
        done[static_cast<size_t>(s)] = 1;
      }
    }
    for (int i = static_cast<int>(stack.size()) - 1; i >= 0; --i) {
      const StateId s = stack[static_cast<size_t>(i)];
      if (done[static_cast<size_t>(s)]) continue;
      const StateId t = policy[static_cast<size_t>(s)];
      gb.gain[static_cast<size_t>(s)] = gb.gain[static_cast<size_t>(t)];
      gb.bias[static_cast<size_t>(s)] = model.reward(t) -
                                        gb.gain[static_cast<size_t>(t)] +
                                        gb.bias[static_cast<size_t>(t)];
      done[static_cast<size_t>(s)] = 1;
    }
    for (StateId s : stack) mark[static_cast<size_t>(s)] = -1;
  }
  return gb;
}

MeanCycle howard(const Model& model, const std::vector<char>& allowed) {
  const int size = model.size();
  constexpr double kEps = 1e-12;
  std::vector<StateId> policy(static_cast<size_t>(size), -1);
  for (int z = 0; z < size; ++z) {
    if (!allowed[static_cast<size_t>(z)]) continue;
    policy[static_cast<size_t>(z)] = model.next(z)[0];
  }
  GainBias gb;
  for (int round = 0; round < 100000; ++round) {
    gb = evaluate(model, allowed, policy);
    bool changed = false;
    for (int z = 0; z < size; ++z) {
      if (!allowed[static_cast<size_t>(z)]) continue;
      StateId cur = policy[static_cast<size_t>(z)];
      double best_gain = gb.gain[static_cast<size_t>(cur)];
      double best_bias = model.reward(cur) - best_gain +
                         gb.bias[static_cast<size_t>(cur)];
      StateId best = cur;
      for (StateId y : model.next(z)) {
        const double g = gb.gain[static_cast<size_t>(y)];
        const double b =
            model.reward(y) - g + gb.bias[static_cast<size_t>(y)];
        if (g > best_gain + kEps ||
            (g > best_gain - kEps && b > best_bias + kEps)) {
          best_gain = g;
          best_bias = b;
          best = y;
        }
      }
      if (best != cur) {
        policy[static_cast<size_t>(z)] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  // Best gain state and its policy cycle.
  StateId argmax = -1;
  double best = -1.0;
  for (int z = 0; z < size; ++z) {
    if (!allowed[static_cast<size_t>(z)]) continue;
    if (gb.gain[static_cast<size_t>(z)] > best) {
      best = gb.gain[static_cast<size_t>(z)];
      argmax = z;
    }
  }
  MeanCycle out;
  out.mean = best;
  std::vector<int> seen(static_cast<size_t>(size), -1);
  StateId cur = argmax;
  std::vector<StateId> walk;
  while (seen[static_cast<size_t>(cur)] == -1) {
    seen[static_cast<size_t>(cur)] = static_cast<int>(walk.size());
    walk.push_back(cur);
    cur = policy[static_cast<size_t>(cur)];
  }
  out.cycle.assign(walk.begin() + seen[static_cast<size_t>(cur)], walk.end());
  return out;
}

}  // namespace

MeanCycle max_mean_cycle(const Model& model, StateId z, int enumeration_limit) {
  const std::vector<StateId> reachable = reach_union(model, z, kInfinity);
  std::vector<char> allowed(static_cast<size_t>(model.size()), 0);
  for (StateId y : reachable) allowed[static_cast<size_t>(y)] = 1;
  if (static_cast<int>(reachable.size()) <= enumeration_limit) {
    return enumerate_cycles(model, allowed);
  }
  return howard(model, allowed);
}

}  // namespace longrun
