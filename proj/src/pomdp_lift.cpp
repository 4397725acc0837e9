#include "longrun/pomdp_lift.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace longrun {

namespace {

constexpr double kProbTol = 1e-12;

}  // namespace

void validate_pomdp(const POMDPSpec& spec) {
  if (spec.num_states < 1 || spec.num_actions < 1 || spec.num_signals < 1) {
    throw ModelError("POMDP needs at least one state, action and signal");
  }
  const size_t K = static_cast<size_t>(spec.num_states);
  const size_t A = static_cast<size_t>(spec.num_actions);
  const size_t SK = static_cast<size_t>(spec.num_signals) * K;
  if (spec.q.size() != K || spec.g.size() != K) {
    throw ModelError("POMDP q/g tables do not match the state count");
  }
  for (size_t k = 0; k < K; ++k) {
    if (spec.q[k].size() != A || spec.g[k].size() != A) {
      throw ModelError("POMDP q/g tables do not match the action count");
    }
    for (size_t a = 0; a < A; ++a) {
      if (spec.q[k][a].size() != SK) {
        throw ModelError("POMDP transition row must have S*K entries");
      }
      double sum = 0.0;
      for (double x : spec.q[k][a]) {
        if (x < -kProbTol) throw ModelError("POMDP transition entry negative");
        sum += x;
      }
      if (std::abs(sum - 1.0) > kProbTol) {
        throw ModelError("POMDP transition row does not sum to 1");
      }
      if (spec.g[k][a] < 0.0 || spec.g[k][a] > 1.0) {
        throw ModelError("POMDP reward outside [0,1]");
      }
    }
  }
  if (spec.p0.size() != K) throw ModelError("p0 has wrong length");
  validate_belief(spec.p0);
}

POMDPSpec load_pomdp(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("POMDP parse error: ") + e.what());
  }
  POMDPSpec spec;
  try {
    spec.num_states = j.at("K").get<int>();
    spec.num_actions = j.at("A").get<int>();
    spec.num_signals = j.at("S").get<int>();
    spec.q = j.at("q").get<std::vector<std::vector<std::vector<double>>>>();
    spec.g = j.at("g").get<std::vector<std::vector<double>>>();
    spec.p0 = j.at("p0").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("POMDP parse error: ") + e.what());
  }
  validate_pomdp(spec);
  return spec;
}

POMDPSpec load_pomdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open POMDP file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_pomdp(buf.str());
}

std::string serialize_pomdp(const POMDPSpec& spec) {
  nlohmann::ordered_json j;
  j["K"] = spec.num_states;
  j["A"] = spec.num_actions;
  j["S"] = spec.num_signals;
  j["q"] = spec.q;
  j["g"] = spec.g;
  j["p0"] = spec.p0;
  return j.dump(2) + "\n";
}

SupportedMeasure bayes_update(const POMDPSpec& spec, const Belief& p, int a) {
  validate_belief(p);
  const int K = spec.num_states;
  const int S = spec.num_signals;
  std::vector<WeightedBelief> atoms;
  for (int s = 0; s < S; ++s) {
    double ps = 0.0;
    Belief posterior(static_cast<size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
      const double pk = p[static_cast<size_t>(k)];
      if (pk <= 0.0) continue;
      for (int k2 = 0; k2 < K; ++k2) {
        const double mass = pk * spec.q_at(k, a, s, k2);
        posterior[static_cast<size_t>(k2)] += mass;
        ps += mass;
      }
    }
    if (ps <= 0.0) continue;  // zero-probability signals emit nothing
    for (double& x : posterior) x /= ps;
    atoms.push_back({std::move(posterior), ps});
  }
  return canonicalize(std::move(atoms));
}

double stage_payoff(const POMDPSpec& spec, const Belief& p, int a) {
  double out = 0.0;
  for (int k = 0; k < spec.num_states; ++k) {
    out += p[static_cast<size_t>(k)] *
           spec.g[static_cast<size_t>(k)][static_cast<size_t>(a)];
  }
  return out;
}

HRResult transition_hr(const POMDPSpec& spec, const SupportedMeasure& u,
                       const std::vector<int>& actions) {
  if (actions.size() != u.atoms.size()) {
    throw ModelError("transition_hr: one action per atom required");
  }
  std::vector<WeightedBelief> mixture;
  double payoff = 0.0;
  for (size_t i = 0; i < u.atoms.size(); ++i) {
    const auto& atom = u.atoms[i];
    const int a = actions[i];
    if (a < 0 || a >= spec.num_actions) throw ModelError("action out of range");
    const SupportedMeasure push = bayes_update(spec, atom.belief, a);
    for (const auto& pa : push.atoms) {
      mixture.push_back({pa.belief, atom.weight * pa.weight});
    }
    payoff += atom.weight * stage_payoff(spec, atom.belief, a);
  }
  return {canonicalize(std::move(mixture)), payoff};
}

HRResult transition_hr_behavioral(
    const POMDPSpec& spec, const SupportedMeasure& u,
    const std::vector<std::vector<double>>& mixed_actions) {
  if (mixed_actions.size() != u.atoms.size()) {
    throw ModelError("transition_hr_behavioral: one mixture per atom required");
  }
  std::vector<WeightedBelief> mixture;
  double payoff = 0.0;
  for (size_t i = 0; i < u.atoms.size(); ++i) {
    const auto& atom = u.atoms[i];
    const auto& dist = mixed_actions[i];
    if (static_cast<int>(dist.size()) != spec.num_actions) {
      throw ModelError("action mixture has wrong length");
    }
    double total = 0.0;
    for (int a = 0; a < spec.num_actions; ++a) {
      const double fa = dist[static_cast<size_t>(a)];
      if (fa < -kProbTol) throw ModelError("action mixture entry negative");
      total += fa;
      if (fa <= 0.0) continue;
      const SupportedMeasure push = bayes_update(spec, atom.belief, a);
      for (const auto& pa : push.atoms) {
        mixture.push_back({pa.belief, atom.weight * fa * pa.weight});
      }
      payoff += atom.weight * fa * stage_payoff(spec, atom.belief, a);
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ModelError("action mixture does not sum to 1");
    }
  }
  return {canonicalize(std::move(mixture)), payoff};
}

double lifted_p_distance(const LiftedPState& a, const LiftedPState& b) {
  return std::max(wasserstein1(a.u, b.u), std::abs(a.y - b.y));
}

PLiftResult explore_p(const POMDPSpec& spec, int depth, double delta,
                      const PLiftOptions& options) {
  validate_pomdp(spec);
  if (depth < 1) throw ModelError("explore_p requires depth >= 1");
  if (delta < 0.0) throw ModelError("explore_p requires delta >= 0");

  PLiftResult result;
  auto measures_equal = [](const SupportedMeasure& a, const SupportedMeasure& b) {
    if (a.atoms.size() != b.atoms.size()) return false;
    for (size_t i = 0; i < a.atoms.size(); ++i) {
      if (a.atoms[i].belief != b.atoms[i].belief) return false;
      if (std::abs(a.atoms[i].weight - b.atoms[i].weight) > kProbTol) return false;
    }
    return true;
  };
  auto find_or_insert = [&](const LiftedPState& cand, int at_depth,
                            bool allow_insert) {
    for (size_t i = 0; i < result.states.size(); ++i) {
      if (delta == 0.0) {
        if (std::abs(result.states[i].y - cand.y) <= kProbTol &&
            measures_equal(result.states[i].u, cand.u)) {
          return static_cast<int>(i);
        }
      } else {
        const double d = lifted_p_distance(result.states[i], cand);
        if (d <= delta) {
          if (d > 0.0) {
            result.merges.push_back({at_depth, static_cast<int>(i), d});
          }
          return static_cast<int>(i);
        }
      }
    }
    if (!allow_insert) return -1;
    if (static_cast<int>(result.states.size()) >= options.state_cap) {
      throw BudgetError("explore_p: state cap exceeded");
    }
    result.states.push_back(cand);
    return static_cast<int>(result.states.size() - 1);
  };

  LiftedPState start{dirac(spec.p0), 0.0};
  find_or_insert(start, 0, true);
  std::vector<std::vector<StateId>> successors;

  auto expand = [&](const LiftedPState& state) {
    const int atom_count = state.u.support_size();
    if (atom_count > options.max_atoms) {
      throw BudgetError("explore_p: measure support exceeds max_atoms");
    }
    const double combos = std::pow(static_cast<double>(spec.num_actions),
                                   static_cast<double>(atom_count));
    if (combos > static_cast<double>(options.combo_cap)) {
      throw BudgetError("explore_p: action assignment count exceeds the cap");
    }
    std::vector<LiftedPState> out;
    std::vector<int> assign(static_cast<size_t>(atom_count), 0);
    while (true) {
      HRResult hr = transition_hr(spec, state.u, assign);
      out.push_back({std::move(hr.h), hr.r});
      size_t pos = 0;
      while (pos < assign.size() && ++assign[pos] == spec.num_actions) {
        assign[pos] = 0;
        ++pos;
      }
      if (pos == assign.size()) break;
    }
    return out;
  };

  size_t expanded = 0;
  for (int layer = 0; layer < depth; ++layer) {
    const size_t layer_end = result.states.size();
    for (; expanded < layer_end; ++expanded) {
      const LiftedPState state = result.states[expanded];
      std::vector<StateId> ids;
      for (LiftedPState& s : expand(state)) {
        ids.push_back(find_or_insert(s, layer + 1, true));
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      successors.push_back(std::move(ids));
    }
  }
  for (; expanded < result.states.size(); ++expanded) {
    const LiftedPState state = result.states[expanded];
    std::vector<StateId> ids;
    for (LiftedPState& s : expand(state)) {
      int id = find_or_insert(s, depth, false);
      if (id < 0) {
        double best_d = std::numeric_limits<double>::infinity();
        int best = -1;
        for (size_t i = 0; i < result.states.size(); ++i) {
          const double d = lifted_p_distance(result.states[i], s);
          if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
          }
        }
        id = best;
        ++result.boundary_redirects;
        result.max_boundary_distance =
            std::max(result.max_boundary_distance, best_d);
      }
      ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    successors.push_back(std::move(ids));
  }

  Model& model = result.model;
  model.successors = std::move(successors);
  for (const LiftedPState& s : result.states) model.rewards.push_back(s.y);
  model.initial = 0;
  validate_model(model);
  return result;
}

namespace {

double value_theta_rec(const POMDPSpec& spec, const Belief& p,
                       const std::vector<double>& theta, size_t offset,
                       double renorm, std::int64_t& nodes, std::int64_t budget) {
  if (++nodes > budget) throw BudgetError("value_theta: node budget exceeded");
  // Weight of the current stage under the shifted profile.
  const double theta1 = theta[offset] / renorm;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < spec.num_actions; ++a) {
    double val = theta1 * stage_payoff(spec, p, a);
    const double rest = 1.0 - theta1;
    if (rest > kProbTol && offset + 1 < theta.size()) {
      const SupportedMeasure push = bayes_update(spec, p, a);
      double cont = 0.0;
      for (const auto& atom : push.atoms) {
        cont += atom.weight * value_theta_rec(spec, atom.belief, theta,
                                              offset + 1, renorm - theta[offset],
                                              nodes, budget);
      }
      val += rest * cont;
    }
    best = std::max(best, val);
  }
  return best;
}

}  // namespace

double value_theta(const POMDPSpec& spec, const Belief& p,
                   const std::vector<double>& theta, std::int64_t node_budget) {
  validate_pomdp(spec);
  validate_belief(p);
  if (theta.empty()) throw ModelError("value_theta: empty stage profile");
  double sum = 0.0;
  for (double t : theta) {
    if (t < -kProbTol) throw ModelError("value_theta: negative stage weight");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ModelError("value_theta: stage weights must sum to 1");
  }
  std::int64_t nodes = 0;
  return value_theta_rec(spec, p, theta, 0, 1.0, nodes, node_budget);
}

}  // namespace longrun
