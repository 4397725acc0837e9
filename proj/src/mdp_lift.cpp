#include "longrun/mdp_lift.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace longrun {

namespace {

constexpr double kProbTol = 1e-12;

void check_prob_vector(const std::vector<double>& p, const std::string& what) {
  double sum = 0.0;
  for (double x : p) {
    if (x < -kProbTol) throw ModelError(what + " has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbTol) {
    throw ModelError(what + " does not sum to 1 (sum=" + std::to_string(sum) + ")");
  }
}

}  // namespace

void validate_mdp(const MDPSpec& spec) {
  if (spec.num_states < 1 || spec.num_actions < 1) {
    throw ModelError("MDP needs at least one state and one action");
  }
  const size_t K = static_cast<size_t>(spec.num_states);
  const size_t A = static_cast<size_t>(spec.num_actions);
  if (spec.q.size() != K || spec.g.size() != K) {
    throw ModelError("MDP q/g tables do not match the state count");
  }
  for (size_t k = 0; k < K; ++k) {
    if (spec.q[k].size() != A || spec.g[k].size() != A) {
      throw ModelError("MDP q/g tables do not match the action count");
    }
    for (size_t a = 0; a < A; ++a) {
      if (spec.q[k][a].size() != K) {
        throw ModelError("MDP transition row has wrong length");
      }
      check_prob_vector(spec.q[k][a], "q[" + std::to_string(k) + "][" +
                                          std::to_string(a) + "]");
      if (spec.g[k][a] < 0.0 || spec.g[k][a] > 1.0) {
        throw ModelError("MDP reward outside [0,1]");
      }
    }
  }
  if (spec.p0.size() != K) throw ModelError("p0 has wrong length");
  check_prob_vector(spec.p0, "p0");
}

MDPSpec load_mdp(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("MDP parse error: ") + e.what());
  }
  MDPSpec spec;
  try {
    spec.num_states = j.at("K").get<int>();
    spec.num_actions = j.at("A").get<int>();
    spec.q = j.at("q").get<std::vector<std::vector<std::vector<double>>>>();
    spec.g = j.at("g").get<std::vector<std::vector<double>>>();
    spec.p0 = j.at("p0").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("MDP parse error: ") + e.what());
  }
  validate_mdp(spec);
  return spec;
}

MDPSpec load_mdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open MDP file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_mdp(buf.str());
}

std::string serialize_mdp(const MDPSpec& spec) {
  nlohmann::ordered_json j;
  j["K"] = spec.num_states;
  j["A"] = spec.num_actions;
  j["q"] = spec.q;
  j["g"] = spec.g;
  j["p0"] = spec.p0;
  return j.dump(2) + "\n";
}

double lifted_distance(const LiftedState& a, const LiftedState& b) {
  double l1 = 0.0;
  for (size_t k = 0; k < a.p.size(); ++k) l1 += std::abs(a.p[k] - b.p[k]);
  return std::max(l1, std::abs(a.y - b.y));
}

std::vector<LiftedState> lift_successors(const MDPSpec& spec,
                                         const LiftedState& state,
                                         std::int64_t combo_cap) {
  const int K = spec.num_states;
  const int A = spec.num_actions;
  std::vector<int> support;
  for (int k = 0; k < K; ++k) {
    if (state.p[static_cast<size_t>(k)] > 0.0) support.push_back(k);
  }
  double combos = std::pow(static_cast<double>(A),
                           static_cast<double>(support.size()));
  if (combos > static_cast<double>(combo_cap)) {
    throw BudgetError("lift_successors: " + std::to_string(combos) +
                      " action assignments exceed the cap");
  }
  std::vector<LiftedState> out;
  std::vector<int> assign(support.size(), 0);
  while (true) {
    LiftedState succ;
    succ.p.assign(static_cast<size_t>(K), 0.0);
    succ.y = 0.0;
    for (size_t idx = 0; idx < support.size(); ++idx) {
      const int k = support[idx];
      const int a = assign[idx];
      const double pk = state.p[static_cast<size_t>(k)];
      const auto& row = spec.q[static_cast<size_t>(k)][static_cast<size_t>(a)];
      for (int k2 = 0; k2 < K; ++k2) {
        succ.p[static_cast<size_t>(k2)] += pk * row[static_cast<size_t>(k2)];
      }
      succ.y += pk * spec.g[static_cast<size_t>(k)][static_cast<size_t>(a)];
    }
    out.push_back(std::move(succ));
    // Next assignment, lexicographic.
    size_t pos = 0;
    while (pos < assign.size() && ++assign[pos] == A) {
      assign[pos] = 0;
      ++pos;
    }
    if (pos == assign.size()) break;
    if (support.empty()) break;
  }
  std::sort(out.begin(), out.end(), [](const LiftedState& a, const LiftedState& b) {
    if (a.p != b.p) return a.p < b.p;
    return a.y < b.y;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const LiftedState& a, const LiftedState& b) {
                          return a.p == b.p && a.y == b.y;
                        }),
            out.end());
  return out;
}

namespace {

// Exact-equality key for delta = 0 dedup.
std::string exact_key(const LiftedState& s) {
  std::string key;
  key.resize((s.p.size() + 1) * sizeof(double));
  std::memcpy(key.data(), s.p.data(), s.p.size() * sizeof(double));
  std::memcpy(key.data() + s.p.size() * sizeof(double), &s.y, sizeof(double));
  return key;
}

}  // namespace

LiftResult explore(const MDPSpec& spec, int depth, double delta,
                   const LiftOptions& options) {
  validate_mdp(spec);
  if (depth < 1) throw ModelError("explore requires depth >= 1");
  if (delta < 0.0) throw ModelError("explore requires delta >= 0");

  LiftResult result;
  std::map<std::string, int> exact_index;
  auto find_or_insert = [&](const LiftedState& cand, int at_depth,
                            bool allow_insert) {
    if (delta == 0.0) {
      auto it = exact_index.find(exact_key(cand));
      if (it != exact_index.end()) return it->second;
    } else {
      for (size_t i = 0; i < result.states.size(); ++i) {
        const double d = lifted_distance(result.states[i], cand);
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
      throw BudgetError("explore: state cap " + std::to_string(options.state_cap) +
                        " exceeded");
    }
    result.states.push_back(cand);
    if (delta == 0.0) {
      exact_index.emplace(exact_key(cand),
                          static_cast<int>(result.states.size() - 1));
    }
    return static_cast<int>(result.states.size() - 1);
  };

  LiftedState start{spec.p0, 0.0};
  find_or_insert(start, 0, true);
  std::vector<std::vector<StateId>> successors;

  size_t expanded = 0;
  for (int layer = 0; layer < depth; ++layer) {
    const size_t layer_end = result.states.size();
    for (; expanded < layer_end; ++expanded) {
      const std::vector<LiftedState> succ =
          lift_successors(spec, result.states[expanded], options.combo_cap);
      std::vector<StateId> ids;
      ids.reserve(succ.size());
      for (const LiftedState& s : succ) {
        ids.push_back(find_or_insert(s, layer + 1, true));
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      successors.push_back(std::move(ids));
    }
  }
  // Closure: states first seen on the final layer still need successor
  // lists; map their successors onto the nearest retained state.
  for (; expanded < result.states.size(); ++expanded) {
    const std::vector<LiftedState> succ =
        lift_successors(spec, result.states[expanded], options.combo_cap);
    std::vector<StateId> ids;
    for (const LiftedState& s : succ) {
      int id = find_or_insert(s, depth, false);
      if (id < 0) {
        double best_d = std::numeric_limits<double>::infinity();
        int best = -1;
        for (size_t i = 0; i < result.states.size(); ++i) {
          const double d = lifted_distance(result.states[i], s);
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
  model.rewards.reserve(result.states.size());
  for (const LiftedState& s : result.states) model.rewards.push_back(s.y);
  model.initial = 0;
  if (static_cast<int>(result.states.size()) <= options.metric_cap) {
    Metric metric;
    metric.discrete = false;
    const size_t n = result.states.size();
    metric.d.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        const double d = lifted_distance(result.states[i], result.states[j]);
        metric.d[i][j] = d;
        metric.d[j][i] = d;
      }
    }
    model.metric = std::move(metric);
  }
  validate_model(model);
  return result;
}

std::vector<std::vector<double>> direct_mdp_values(const MDPSpec& spec,
                                                   int n_max) {
  validate_mdp(spec);
  if (n_max < 1) throw ModelError("direct_mdp_values requires n_max >= 1");
  const int K = spec.num_states;
  const int A = spec.num_actions;
  std::vector<std::vector<double>> tables;
  std::vector<double> prev(static_cast<size_t>(K), 0.0);  // best total over n steps
  std::vector<double> cur(static_cast<size_t>(K), 0.0);
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k < K; ++k) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        double val = spec.g[static_cast<size_t>(k)][static_cast<size_t>(a)];
        const auto& row = spec.q[static_cast<size_t>(k)][static_cast<size_t>(a)];
        for (int k2 = 0; k2 < K; ++k2) {
          val += row[static_cast<size_t>(k2)] * prev[static_cast<size_t>(k2)];
        }
        best = std::max(best, val);
      }
      cur[static_cast<size_t>(k)] = best;
    }
    std::vector<double> avg(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) avg[static_cast<size_t>(k)] = cur[static_cast<size_t>(k)] / n;
    tables.push_back(std::move(avg));
    prev.swap(cur);
  }
  return tables;
}

double mdp_mixture_value(const MDPSpec& spec,
                         const std::vector<std::vector<double>>& tables, int n) {
  if (n < 1 || n > static_cast<int>(tables.size())) {
    throw ModelError("mdp_mixture_value: horizon not covered");
  }
  double out = 0.0;
  for (int k = 0; k < spec.num_states; ++k) {
    out += spec.p0[static_cast<size_t>(k)] *
           tables[static_cast<size_t>(n - 1)][static_cast<size_t>(k)];
  }
  return out;
}

namespace {

double lift_dfs(const MDPSpec& spec, const LiftedState& state, int remaining,
                std::int64_t& nodes, std::int64_t budget) {
  if (remaining == 0) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const LiftedState& succ : lift_successors(spec, state)) {
    if (++nodes > budget) {
      throw BudgetError("lift_value_dfs: node budget exceeded");
    }
    best = std::max(best,
                    succ.y + lift_dfs(spec, succ, remaining - 1, nodes, budget));
  }
  return best;
}

}  // namespace

double lift_value_dfs(const MDPSpec& spec, int n, std::int64_t node_budget) {
  validate_mdp(spec);
  if (n < 1) throw ModelError("lift_value_dfs requires n >= 1");
  std::int64_t nodes = 0;
  LiftedState start{spec.p0, 0.0};
  return lift_dfs(spec, start, n, nodes, node_budget) / n;
}

ValueInterval mdp_uniform(const MDPSpec& spec, double target_gap,
                          const MdpUniformOptions& options) {
  LiftResult lift = explore(spec, options.depth, options.delta, options.lift);
  ValueInterval interval =
      estimate_vstar(lift.model, lift.model.initial, target_gap, options.vstar);
  const double slack = options.depth * options.delta;
  interval.lower = std::max(0.0, interval.lower - slack);
  interval.upper = std::min(1.0, interval.upper + slack);
  return interval;
}

}  // namespace longrun
