#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longrun/measures.hpp"
#include "longrun/model.hpp"

namespace longrun {

/// Partially observed MDP: after playing a in hidden state k, a pair
/// (signal, next state) is drawn from q[k][a], stored signal-major
/// (index s*K + k'). Only the signal is revealed.
struct POMDPSpec {
  int num_states = 0;   // K
  int num_actions = 0;  // A
  int num_signals = 0;  // S
  std::vector<std::vector<std::vector<double>>> q;  // [k][a] -> flat S*K
  std::vector<std::vector<double>> g;
  std::vector<double> p0;

  double q_at(int k, int a, int s, int k2) const {
    return q[static_cast<size_t>(k)][static_cast<size_t>(a)]
            [static_cast<size_t>(s * num_states + k2)];
  }
};

void validate_pomdp(const POMDPSpec& spec);
POMDPSpec load_pomdp(const std::string& text);
POMDPSpec load_pomdp_file(const std::string& path);
std::string serialize_pomdp(const POMDPSpec& spec);

/// Distribution over next-stage beliefs after playing a at belief p: one
/// atom per signal with positive probability, weighted by the signal
/// probability, each carrying the Bayes posterior.
SupportedMeasure bayes_update(const POMDPSpec& spec, const Belief& p, int a);

/// One-stage expected payoff of playing a at belief p.
double stage_payoff(const POMDPSpec& spec, const Belief& p, int a);

struct HRResult {
  SupportedMeasure h;
  double r = 0.0;
};

/// Measure transition and expected payoff for a deterministic action
/// choice per atom.
HRResult transition_hr(const POMDPSpec& spec, const SupportedMeasure& u,
                       const std::vector<int>& actions);

/// Behavioral variant: a probability over actions per atom.
HRResult transition_hr_behavioral(
    const POMDPSpec& spec, const SupportedMeasure& u,
    const std::vector<std::vector<double>>& mixed_actions);

struct LiftedPState {
  SupportedMeasure u;
  double y = 0.0;
};

double lifted_p_distance(const LiftedPState& a, const LiftedPState& b);

struct PMergeRecord {
  int depth = 0;
  int kept_index = 0;
  double distance = 0.0;
};

struct PLiftOptions {
  int state_cap = 20000;
  std::int64_t combo_cap = 1 << 16;
  int max_atoms = 512;
};

struct PLiftResult {
  Model model;
  std::vector<LiftedPState> states;
  std::vector<PMergeRecord> merges;
  int boundary_redirects = 0;
  double max_boundary_distance = 0.0;
};

/// Breadth-first lift from (dirac(p0), 0), enumerating deterministic
/// action choices per atom; candidate states within Wasserstein distance
/// delta (and payoff gap delta) of a retained state merge into it.
PLiftResult explore_p(const POMDPSpec& spec, int depth, double delta,
                      const PLiftOptions& options = {});

/// Value of the stage-weight profile theta (theta[t] is the weight of
/// stage t+1) at belief p, by exact recursion over the signal tree:
///   v(p, theta) = max_a [ theta_1 * payoff(p,a)
///                         + (1-theta_1) * E_signals v(posterior, theta^+) ].
double value_theta(const POMDPSpec& spec, const Belief& p,
                   const std::vector<double>& theta,
                   std::int64_t node_budget = 50'000'000);

}  // namespace longrun
