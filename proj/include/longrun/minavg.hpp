#pragma once

#include <vector>

#include "longrun/model.hpp"

namespace longrun {

/// Layered feasibility table for the threshold question "is there a play
/// whose running average stays at or above c for n steps". slack[t][y] is
/// the best achievable value of min over tau<=t of (prefix sum - c*tau)
/// over all t-step plays from y; a play meeting the threshold exists from
/// y iff slack[n][y] >= 0 (up to the feasibility tie slack). Infeasible
/// combinations hold the finite sentinel kInfeasible, never NaN.
struct ThresholdDp {
  int n = 0;
  double threshold = 0.0;
  std::vector<double> final_slack;             // layer n only
  std::vector<std::vector<StateId>> choices;   // choices[t][y], filled on request

  static constexpr double kInfeasible = -1e18;
};

/// Runs the threshold DP for horizon n at threshold c. With
/// with_choices the per-layer argmax successors are kept so witnesses can
/// be reconstructed (memory n*|Z|).
ThresholdDp threshold_dp(const Model& model, int n, double c, bool with_choices);

/// Comparisons resolve toward "feasible" by this slack, so binary-search
/// witnesses remain extractable at the returned value.
inline constexpr double kFeasibleTie = 1e-12;

/// True iff some play from z keeps every running average of its first n
/// steps at or above c. Fills *witness with such a play when given.
bool feasible(const Model& model, StateId z, int n, double c,
              Play* witness = nullptr);

struct WitnessValue {
  double value = 0.0;
  Play witness;
};

/// Best threshold over a candidate set of start states: binary search on
/// c, sharing one DP per probe across all candidates. Returns the value,
/// the witness play from the best start, and (optionally) that start.
WitnessValue w_n_over(const Model& model, const std::vector<StateId>& candidates,
                      int n, double tol, StateId* best_start = nullptr);

/// w_n(z): supremum over plays from z of the minimum running average over
/// the first n horizons, within tol, plus a play achieving it.
WitnessValue w_n(const Model& model, StateId z, int n, double tol = 1e-9);

/// w_{m,n}(z): best w_n over the states reachable in exactly m steps; the
/// witness is prefixed with a length-m path to the argmax.
WitnessValue w_mn(const Model& model, StateId z, int m, int n,
                  double tol = 1e-9);

/// A path of exactly m steps from z to y (parity matters, so this is not
/// the BFS shortest path). Throws if none exists.
std::vector<StateId> exact_length_path(const Model& model, StateId z, StateId y,
                                       int m);

}  // namespace longrun
