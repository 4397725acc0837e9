#include "longrun/minavg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace longrun {

namespace {

constexpr std::int64_t kChoiceCellCap = 50'000'000;

}  // namespace

ThresholdDp threshold_dp(const Model& model, int n, double c, bool with_choices) {
  if (n < 1) throw ModelError("threshold_dp requires n >= 1");
  const int size = model.size();
  if (with_choices &&
      static_cast<std::int64_t>(n) * size > kChoiceCellCap) {
    throw BudgetError("threshold_dp: witness table would exceed " +
                      std::to_string(kChoiceCellCap) + " cells");
  }
  ThresholdDp dp;
  dp.n = n;
  dp.threshold = c;
  if (with_choices) {
    dp.choices.assign(static_cast<size_t>(n),
                      std::vector<StateId>(static_cast<size_t>(size), -1));
  }
  // slack_t(y) = max over t-step plays from y of
  //   min_{tau<=t} (reward sum of first tau steps - c*tau).
  // Splitting off the first step gives
  //   slack_t(y) = max over successors y1 of (r(y1)-c) + min(0, slack_{t-1}(y1)),
  // and a larger tail slack never hurts, so keeping only the per-state
  // maximum is lossless.
  std::vector<double> prev(static_cast<size_t>(size), 0.0);  // slack_0 has no constraint
  std::vector<double> cur(static_cast<size_t>(size), 0.0);
  constexpr double kNoConstraint = 1e18;
  std::fill(prev.begin(), prev.end(), kNoConstraint);
  for (int t = 1; t <= n; ++t) {
    StateId* choice_row =
        with_choices ? dp.choices[static_cast<size_t>(t - 1)].data() : nullptr;
    for (int y = 0; y < size; ++y) {
      double best = ThresholdDp::kInfeasible;
      StateId best_succ = -1;
      for (StateId y1 : model.next(y)) {
        const double tail = prev[static_cast<size_t>(y1)];
        const double candidate =
            (model.reward(y1) - c) + std::min(0.0, tail);
        if (candidate > best) {
          best = candidate;
          best_succ = y1;
        }
      }
      cur[static_cast<size_t>(y)] = best;
      if (choice_row) choice_row[y] = best_succ;
    }
    prev.swap(cur);
  }
  dp.final_slack = std::move(prev);
  return dp;
}

namespace {

// Follows the stored argmax successors from z: the choice for the first
// step sits in the last layer.
Play extract_witness(const ThresholdDp& dp, StateId z) {
  Play play;
  play.origin = z;
  StateId cur = z;
  for (int t = dp.n; t >= 1; --t) {
    cur = dp.choices[static_cast<size_t>(t - 1)][static_cast<size_t>(cur)];
    play.steps.push_back(cur);
  }
  return play;
}

}  // namespace

bool feasible(const Model& model, StateId z, int n, double c, Play* witness) {
  if (c < 0.0 || c > 1.0) throw ModelError("threshold must lie in [0,1]");
  ThresholdDp dp = threshold_dp(model, n, c, witness != nullptr);
  const bool ok = dp.final_slack[static_cast<size_t>(z)] >= -kFeasibleTie;
  if (ok && witness) *witness = extract_witness(dp, z);
  return ok;
}

WitnessValue w_n_over(const Model& model, const std::vector<StateId>& candidates,
                      int n, double tol, StateId* best_start) {
  if (candidates.empty()) throw ModelError("w_n_over: empty candidate set");
  if (!(tol > 0.0)) throw ModelError("w_n_over requires tol > 0");
  auto any_feasible = [&](const ThresholdDp& dp) {
    for (StateId y : candidates) {
      if (dp.final_slack[static_cast<size_t>(y)] >= -kFeasibleTie) return true;
    }
    return false;
  };
  double lo = 0.0;
  double hi = 1.0;
  if (any_feasible(threshold_dp(model, n, 1.0, false))) {
    lo = 1.0;
  } else {
    const int iterations =
        static_cast<int>(std::ceil(std::log2(1.0 / tol)));
    for (int it = 0; it < iterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (any_feasible(threshold_dp(model, n, mid, false))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  ThresholdDp dp = threshold_dp(model, n, lo, true);
  StateId best = -1;
  double best_slack = ThresholdDp::kInfeasible;
  for (StateId y : candidates) {
    const double s = dp.final_slack[static_cast<size_t>(y)];
    if (s >= -kFeasibleTie && s > best_slack) {
      best_slack = s;
      best = y;
    }
  }
  if (best < 0) throw ModelError("w_n_over: no feasible candidate at c=0");
  if (best_start) *best_start = best;
  return {lo, extract_witness(dp, best)};
}

WitnessValue w_n(const Model& model, StateId z, int n, double tol) {
  return w_n_over(model, {z}, n, tol);
}

std::vector<StateId> exact_length_path(const Model& model, StateId z, StateId y,
                                       int m) {
  if (m < 0) throw ModelError("exact_length_path requires m >= 0");
  if (m == 0) {
    if (z != y) throw ModelError("no 0-step path between distinct states");
    return {};
  }
  const int size = model.size();
  // parents[t][s]: a predecessor of s on some t-step path from z.
  std::vector<std::vector<StateId>> parents(
      static_cast<size_t>(m), std::vector<StateId>(static_cast<size_t>(size), -1));
  std::vector<char> cur(static_cast<size_t>(size), 0);
  cur[static_cast<size_t>(z)] = 1;
  for (int t = 0; t < m; ++t) {
    std::vector<char> nxt(static_cast<size_t>(size), 0);
    auto& par = parents[static_cast<size_t>(t)];
    for (int s = 0; s < size; ++s) {
      if (!cur[static_cast<size_t>(s)]) continue;
      for (StateId s1 : model.next(s)) {
        if (par[static_cast<size_t>(s1)] == -1) par[static_cast<size_t>(s1)] = s;
        nxt[static_cast<size_t>(s1)] = 1;
      }
    }
    cur.swap(nxt);
  }
  if (!cur[static_cast<size_t>(y)]) {
    throw ModelError("state " + std::to_string(y) + " not reachable in exactly " +
                     std::to_string(m) + " steps");
  }
  std::vector<StateId> path(static_cast<size_t>(m));
  StateId at = y;
  for (int t = m - 1; t >= 0; --t) {
    path[static_cast<size_t>(t)] = at;
    at = parents[static_cast<size_t>(t)][static_cast<size_t>(at)];
  }
  return path;
}

WitnessValue w_mn(const Model& model, StateId z, int m, int n, double tol) {
  if (m == 0) return w_n(model, z, n, tol);
  const std::vector<StateId> frontier = reach(model, z, m);
  StateId best = -1;
  WitnessValue inner = w_n_over(model, frontier, n, tol, &best);
  std::vector<StateId> prefix = exact_length_path(model, z, best, m);
  Play play;
  play.origin = z;
  play.steps = std::move(prefix);
  play.steps.insert(play.steps.end(), inner.witness.steps.begin(),
                    inner.witness.steps.end());
  return {inner.value, std::move(play)};
}

}  // namespace longrun
