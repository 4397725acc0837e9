#include "longrun/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace longrun {

namespace {

constexpr double kMetricTol = 1e-12;

void check_state_index(const Model& model, StateId z, const char* what) {
  if (z < 0 || z >= model.size()) {
    throw ModelError(std::string(what) + ": state index " + std::to_string(z) +
                     " out of range [0," + std::to_string(model.size()) + ")");
  }
}

}  // namespace

void validate_model(const Model& model) {
  const int n = model.size();
  if (n == 0) throw ModelError("model has no states");
  if (static_cast<int>(model.successors.size()) != n) {
    throw ModelError("successor table size does not match state count");
  }
  check_state_index(model, model.initial, "initial");
  for (int z = 0; z < n; ++z) {
    const double r = model.rewards[static_cast<size_t>(z)];
    if (!(r >= 0.0 && r <= 1.0)) {
      throw ModelError("reward out of [0,1] at state " + std::to_string(z) +
                       ": " + std::to_string(r));
    }
    const auto& succ = model.successors[static_cast<size_t>(z)];
    if (succ.empty()) {
      throw ModelError("empty successor set at state " + std::to_string(z));
    }
    for (StateId y : succ) check_state_index(model, y, "successor");
    if (!std::is_sorted(succ.begin(), succ.end()) ||
        std::adjacent_find(succ.begin(), succ.end()) != succ.end()) {
      throw ModelError("successor list not sorted/deduplicated at state " +
                       std::to_string(z));
    }
  }
  if (model.metric && !model.metric->discrete) {
    const auto& d = model.metric->d;
    if (static_cast<int>(d.size()) != n) {
      throw ModelError("metric matrix size does not match state count");
    }
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(d[static_cast<size_t>(i)].size()) != n) {
        throw ModelError("metric matrix row " + std::to_string(i) +
                         " has wrong length");
      }
    }
    auto dist = [&](int i, int j) {
      return d[static_cast<size_t>(i)][static_cast<size_t>(j)];
    };
    for (int i = 0; i < n; ++i) {
      if (std::abs(dist(i, i)) > kMetricTol) {
        throw ModelError("metric violates d(z,z)=0 at state " + std::to_string(i));
      }
      for (int j = 0; j < n; ++j) {
        if (dist(i, j) < -kMetricTol) {
          throw ModelError("negative metric entry at (" + std::to_string(i) +
                           "," + std::to_string(j) + ")");
        }
        if (std::abs(dist(i, j) - dist(j, i)) > kMetricTol) {
          throw ModelError("metric not symmetric at (" + std::to_string(i) +
                           "," + std::to_string(j) + ")");
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          if (dist(i, k) > dist(i, j) + dist(j, k) + kMetricTol) {
            throw ModelError("metric violates triangle inequality at (" +
                             std::to_string(i) + "," + std::to_string(j) + "," +
                             std::to_string(k) + ")");
          }
        }
      }
    }
  }
}

Model load_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("model parse error: ") + e.what());
  }
  Model model;
  try {
    const auto& states = j.at("states");
    if (!states.is_array() || states.empty()) {
      throw ModelError("model parse error: \"states\" must be a non-empty array");
    }
    const int n = static_cast<int>(states.size());
    model.rewards.assign(static_cast<size_t>(n), 0.0);
    model.successors.assign(static_cast<size_t>(n), {});
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (const auto& s : states) {
      const int id = s.at("id").get<int>();
      if (id < 0 || id >= n) {
        throw ModelError("model parse error: state id " + std::to_string(id) +
                         " outside dense range [0," + std::to_string(n) + ")");
      }
      if (seen[static_cast<size_t>(id)]) {
        throw ModelError("model parse error: duplicate state id " +
                         std::to_string(id));
      }
      seen[static_cast<size_t>(id)] = true;
      model.rewards[static_cast<size_t>(id)] = s.at("reward").get<double>();
      auto succ = s.at("successors").get<std::vector<StateId>>();
      std::sort(succ.begin(), succ.end());
      succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
      model.successors[static_cast<size_t>(id)] = std::move(succ);
    }
    model.initial = j.at("initial").get<StateId>();
    if (j.contains("metric")) {
      const auto& m = j.at("metric");
      const std::string type = m.at("type").get<std::string>();
      Metric metric;
      if (type == "discrete") {
        metric.discrete = true;
      } else if (type == "matrix") {
        metric.discrete = false;
        metric.d = m.at("d").get<std::vector<std::vector<double>>>();
      } else {
        throw ModelError("model parse error: unknown metric type \"" + type + "\"");
      }
      model.metric = std::move(metric);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model parse error: ") + e.what());
  }
  validate_model(model);
  return model;
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

std::string serialize_model(const Model& model) {
  nlohmann::ordered_json j;
  auto& states = j["states"];
  states = nlohmann::ordered_json::array();
  for (int z = 0; z < model.size(); ++z) {
    nlohmann::ordered_json s;
    s["id"] = z;
    s["reward"] = model.rewards[static_cast<size_t>(z)];
    s["successors"] = model.successors[static_cast<size_t>(z)];
    states.push_back(std::move(s));
  }
  j["initial"] = model.initial;
  if (model.metric) {
    nlohmann::ordered_json m;
    m["type"] = model.metric->discrete ? "discrete" : "matrix";
    if (!model.metric->discrete) m["d"] = model.metric->d;
    j["metric"] = std::move(m);
  }
  return j.dump(2) + "\n";
}

void validate_play(const Model& model, const Play& play) {
  check_state_index(model, play.origin, "play origin");
  if (play.steps.empty()) throw ModelError("play has no steps");
  StateId prev = play.origin;
  for (size_t t = 0; t < play.steps.size(); ++t) {
    const StateId z = play.steps[t];
    check_state_index(model, z, "play step");
    const auto& succ = model.next(prev);
    if (!std::binary_search(succ.begin(), succ.end(), z)) {
      throw ModelError("play step " + std::to_string(t + 1) + " (state " +
                       std::to_string(z) + ") is not a successor of state " +
                       std::to_string(prev));
    }
    prev = z;
  }
  if (play.cycle_start) {
    const int c = *play.cycle_start;
    if (c < 0 || c >= static_cast<int>(play.steps.size())) {
      throw ModelError("cycle_start out of range");
    }
    const StateId back = play.steps[static_cast<size_t>(c)];
    const auto& succ = model.next(play.steps.back());
    if (!std::binary_search(succ.begin(), succ.end(), back)) {
      throw ModelError("cycle does not close: state " +
                       std::to_string(play.steps.back()) +
                       " cannot return to state " + std::to_string(back));
    }
  }
}

std::vector<double> payoff_stream(const Model& model, const Play& play, int len) {
  if (len < 0) throw ModelError("negative stream length");
  const int stored = static_cast<int>(play.steps.size());
  if (len > stored && !play.is_lasso()) {
    throw ModelError("stream length exceeds play length and play is not a lasso");
  }
  std::vector<double> stream;
  stream.reserve(static_cast<size_t>(len));
  const int c = play.prefix_length();
  const int cyc = play.cycle_length();
  for (int t = 0; t < len; ++t) {
    int idx = t;
    if (idx >= stored) idx = c + (idx - c) % cyc;
    stream.push_back(model.reward(play.steps[static_cast<size_t>(idx)]));
  }
  return stream;
}

std::string serialize_play(const Play& play) {
  std::ostringstream out;
  out << "origin: " << play.origin << "\n";
  out << "steps:";
  for (StateId z : play.steps) out << " " << z;
  out << "\n";
  if (play.cycle_start) out << "cycle_start: " << *play.cycle_start << "\n";
  return out.str();
}

Play parse_play(const std::string& text) {
  Play play;
  bool have_origin = false;
  bool have_steps = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "origin:") {
      if (!(ls >> play.origin)) throw ModelError("play parse error: bad origin");
      have_origin = true;
    } else if (key == "steps:") {
      StateId z;
      while (ls >> z) play.steps.push_back(z);
      have_steps = true;
    } else if (key == "cycle_start:") {
      int c;
      if (!(ls >> c)) throw ModelError("play parse error: bad cycle_start");
      play.cycle_start = c;
    } else {
      throw ModelError("play parse error: unknown line \"" + line + "\"");
    }
  }
  if (!have_origin || !have_steps || play.steps.empty()) {
    throw ModelError("play parse error: origin and non-empty steps required");
  }
  return play;
}

double average_payoff(const std::vector<double>& stream, int m, int n) {
  if (n < 1) throw ModelError("average requires n >= 1");
  if (m < 0 || static_cast<int>(stream.size()) < m + n) {
    throw ModelError("stream too short: need " + std::to_string(m + n) +
                     " entries, have " + std::to_string(stream.size()));
  }
  double sum = 0.0;
  for (int t = 0; t < n; ++t) sum += stream[static_cast<size_t>(m + t)];
  return sum / n;
}

double min_average_payoff(const std::vector<double>& stream, int m, int n) {
  if (n < 1) throw ModelError("min average requires n >= 1");
  if (m < 0 || static_cast<int>(stream.size()) < m + n) {
    throw ModelError("stream too short: need " + std::to_string(m + n) +
                     " entries, have " + std::to_string(stream.size()));
  }
  double sum = 0.0;
  double best = 2.0;
  for (int t = 1; t <= n; ++t) {
    sum += stream[static_cast<size_t>(m + t - 1)];
    best = std::min(best, sum / t);
  }
  return best;
}

std::vector<StateId> reach(const Model& model, StateId z, int m) {
  if (m < 0) throw ModelError("reach requires m >= 0");
  std::vector<char> cur(static_cast<size_t>(model.size()), 0);
  cur[static_cast<size_t>(z)] = 1;
  for (int step = 0; step < m; ++step) {
    std::vector<char> nxt(static_cast<size_t>(model.size()), 0);
    for (int y = 0; y < model.size(); ++y) {
      if (!cur[static_cast<size_t>(y)]) continue;
      for (StateId s : model.next(y)) nxt[static_cast<size_t>(s)] = 1;
    }
    cur.swap(nxt);
  }
  std::vector<StateId> out;
  for (int y = 0; y < model.size(); ++y) {
    if (cur[static_cast<size_t>(y)]) out.push_back(y);
  }
  return out;
}

std::vector<StateId> reach_union(const Model& model, StateId z, int m) {
  if (m < 0 && m != kInfinity) throw ModelError("reach_union requires m >= 0");
  std::vector<char> seen(static_cast<size_t>(model.size()), 0);
  seen[static_cast<size_t>(z)] = 1;
  std::vector<StateId> frontier{z};
  // G^{m+1} = G^m plus F applied to it; on a finite model the chain is
  // stable after at most |Z| rounds, so kInfinity loops until no growth.
  int rounds = (m == kInfinity) ? model.size() : m;
  for (int step = 0; step < rounds && !frontier.empty(); ++step) {
    std::vector<StateId> next_frontier;
    for (StateId y : frontier) {
      for (StateId s : model.next(y)) {
        if (!seen[static_cast<size_t>(s)]) {
          seen[static_cast<size_t>(s)] = 1;
          next_frontier.push_back(s);
        }
      }
    }
    frontier.swap(next_frontier);
  }
  std::vector<StateId> out;
  for (int y = 0; y < model.size(); ++y) {
    if (seen[static_cast<size_t>(y)]) out.push_back(y);
  }
  return out;
}

ReachTree reach_tree(const Model& model, StateId z) {
  ReachTree tree;
  tree.parent.assign(static_cast<size_t>(model.size()), -1);
  tree.distance.assign(static_cast<size_t>(model.size()), -1);
  tree.parent[static_cast<size_t>(z)] = z;
  tree.distance[static_cast<size_t>(z)] = 0;
  std::vector<StateId> frontier{z};
  while (!frontier.empty()) {
    std::vector<StateId> next_frontier;
    for (StateId y : frontier) {
      for (StateId s : model.next(y)) {
        if (tree.parent[static_cast<size_t>(s)] == -1) {
          tree.parent[static_cast<size_t>(s)] = y;
          tree.distance[static_cast<size_t>(s)] =
              tree.distance[static_cast<size_t>(y)] + 1;
          next_frontier.push_back(s);
        }
      }
    }
    frontier.swap(next_frontier);
  }
  return tree;
}

std::vector<StateId> path_from_tree(const ReachTree& tree, StateId y) {
  if (tree.parent[static_cast<size_t>(y)] == -1) {
    throw ModelError("state " + std::to_string(y) + " unreachable");
  }
  std::vector<StateId> rev;
  StateId cur = y;
  while (tree.parent[static_cast<size_t>(cur)] != cur) {
    rev.push_back(cur);
    cur = tree.parent[static_cast<size_t>(cur)];
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

std::optional<NonExpansiveWitness> check_nonexpansive(const Model& model) {
  if (!model.metric) throw ModelError("check_nonexpansive requires a metric");
  const Metric& d = *model.metric;
  for (int z = 0; z < model.size(); ++z) {
    for (int zp = 0; zp < model.size(); ++zp) {
      const double dz = d(z, zp);
      for (StateId z1 : model.next(z)) {
        double best = std::numeric_limits<double>::infinity();
        for (StateId z1p : model.next(zp)) {
          best = std::min(best, d(z1, z1p));
        }
        if (best > dz + kMetricTol) {
          return NonExpansiveWitness{z, zp, z1, best - dz};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace longrun
