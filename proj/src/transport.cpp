#include "longrun/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace longrun {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kResidualFloor = 1e-15;

double round12(double x) { return std::nearbyint(x * 1e12) / 1e12; }

}  // namespace

double belief_l1(const Belief& a, const Belief& b) {
  if (a.size() != b.size()) throw ModelError("belief dimensions differ");
  double d = 0.0;
  for (size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
  return d;
}

void validate_belief(const Belief& p) {
  if (p.empty()) throw ModelError("empty belief");
  double sum = 0.0;
  for (double x : p) {
    if (x < -kWeightTol) throw ModelError("belief has a negative coordinate");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kWeightTol) {
    throw ModelError("belief does not sum to 1 (sum=" + std::to_string(sum) + ")");
  }
}

SupportedMeasure canonicalize(std::vector<WeightedBelief> atoms) {
  for (auto& a : atoms) {
    for (double& x : a.belief) x = round12(x);
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const WeightedBelief& a, const WeightedBelief& b) {
              return a.belief < b.belief;
            });
  SupportedMeasure out;
  for (auto& a : atoms) {
    if (!out.atoms.empty() && out.atoms.back().belief == a.belief) {
      out.atoms.back().weight += a.weight;
    } else {
      out.atoms.push_back(std::move(a));
    }
  }
  out.atoms.erase(std::remove_if(out.atoms.begin(), out.atoms.end(),
                                 [](const WeightedBelief& a) {
                                   return a.weight <= kWeightTol;
                                 }),
                  out.atoms.end());
  return out;
}

void validate_measure(const SupportedMeasure& u) {
  if (u.atoms.empty()) throw ModelError("measure has no atoms");
  double sum = 0.0;
  const size_t dim = u.atoms.front().belief.size();
  for (const auto& a : u.atoms) {
    if (a.weight <= 0.0) throw ModelError("measure atom with non-positive weight");
    if (a.belief.size() != dim) throw ModelError("measure atoms of mixed dimension");
    validate_belief(a.belief);
    sum += a.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ModelError("measure weights do not sum to 1 (sum=" +
                     std::to_string(sum) + ")");
  }
}

SupportedMeasure dirac(const Belief& p) {
  validate_belief(p);
  return canonicalize({{p, 1.0}});
}

SupportedMeasure mix(const SupportedMeasure& u, const SupportedMeasure& v,
                     double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw ModelError("mix weight outside [0,1]");
  std::vector<WeightedBelief> atoms;
  for (const auto& a : u.atoms) atoms.push_back({a.belief, lambda * a.weight});
  for (const auto& a : v.atoms) {
    atoms.push_back({a.belief, (1.0 - lambda) * a.weight});
  }
  return canonicalize(std::move(atoms));
}

double wasserstein1(const SupportedMeasure& u, const SupportedMeasure& v,
                    TransportStats* stats) {
  validate_measure(u);
  validate_measure(v);
  const int n = u.support_size();
  const int m = v.support_size();
  const int total = n + m;

  std::vector<double> cost(static_cast<size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      cost[static_cast<size_t>(i) * m + j] =
          belief_l1(u.atoms[static_cast<size_t>(i)].belief,
                    v.atoms[static_cast<size_t>(j)].belief);
    }
  }
  std::vector<double> supply(static_cast<size_t>(n));
  std::vector<double> demand(static_cast<size_t>(m));
  for (int i = 0; i < n; ++i) supply[static_cast<size_t>(i)] = u.atoms[static_cast<size_t>(i)].weight;
  for (int j = 0; j < m; ++j) demand[static_cast<size_t>(j)] = v.atoms[static_cast<size_t>(j)].weight;
  std::vector<double> flow(static_cast<size_t>(n) * m, 0.0);
  std::vector<double> potential(static_cast<size_t>(total), 0.0);

  // Successive shortest augmenting paths with potentials. Nodes 0..n-1
  // are supply atoms, n..n+m-1 demand atoms; forward arcs i->j always
  // exist, backward arcs j->i exist while flow is positive. Every
  // augmentation saturates a supply or a demand, so at most n+m rounds.
  const int max_aug = 4 * (n + m) + 16;
  int aug = 0;
  const double inf = std::numeric_limits<double>::infinity();
  while (true) {
    double remaining = 0.0;
    for (double s : supply) remaining += s;
    if (remaining <= kResidualFloor) break;
    if (++aug > max_aug) {
      throw BudgetError("wasserstein1: augmentation cap exceeded");
    }
    std::vector<double> dist(static_cast<size_t>(total), inf);
    std::vector<int> parent(static_cast<size_t>(total), -1);
    std::vector<char> done(static_cast<size_t>(total), 0);
    for (int i = 0; i < n; ++i) {
      if (supply[static_cast<size_t>(i)] > kResidualFloor) {
        dist[static_cast<size_t>(i)] = 0.0;
      }
    }
    for (int round = 0; round < total; ++round) {
      int best = -1;
      double best_d = inf;
      for (int x = 0; x < total; ++x) {
        if (!done[static_cast<size_t>(x)] && dist[static_cast<size_t>(x)] < best_d) {
          best_d = dist[static_cast<size_t>(x)];
          best = x;
        }
      }
      if (best < 0) break;
      done[static_cast<size_t>(best)] = 1;
      if (best < n) {
        const int i = best;
        for (int j = 0; j < m; ++j) {
          const double rc = std::max(0.0, cost[static_cast<size_t>(i) * m + j] +
                                              potential[static_cast<size_t>(i)] -
                                              potential[static_cast<size_t>(n + j)]);
          if (dist[static_cast<size_t>(i)] + rc <
              dist[static_cast<size_t>(n + j)] - 1e-18) {
            dist[static_cast<size_t>(n + j)] = dist[static_cast<size_t>(i)] + rc;
            parent[static_cast<size_t>(n + j)] = i;
          }
        }
      } else {
        const int j = best - n;
        for (int i = 0; i < n; ++i) {
          if (flow[static_cast<size_t>(i) * m + j] <= kResidualFloor) continue;
          const double rc = std::max(0.0, -cost[static_cast<size_t>(i) * m + j] +
                                              potential[static_cast<size_t>(n + j)] -
                                              potential[static_cast<size_t>(i)]);
          if (dist[static_cast<size_t>(n + j)] + rc <
              dist[static_cast<size_t>(i)] - 1e-18) {
            dist[static_cast<size_t>(i)] = dist[static_cast<size_t>(n + j)] + rc;
            parent[static_cast<size_t>(i)] = n + j;
          }
        }
      }
    }
    // Closest demand atom that still needs mass.
    int target = -1;
    double target_d = inf;
    for (int j = 0; j < m; ++j) {
      if (demand[static_cast<size_t>(j)] > kResidualFloor &&
          dist[static_cast<size_t>(n + j)] < target_d) {
        target_d = dist[static_cast<size_t>(n + j)];
        target = n + j;
      }
    }
    if (target < 0) {
      throw BudgetError("wasserstein1: no augmenting path (unbalanced?)");
    }
    // Bottleneck along the path.
    double bottleneck = demand[static_cast<size_t>(target - n)];
    int node = target;
    while (parent[static_cast<size_t>(node)] != -1) {
      const int prev = parent[static_cast<size_t>(node)];
      if (prev >= n) {
        // Backward arc (demand prev-n) -> (supply node).
        bottleneck = std::min(
            bottleneck, flow[static_cast<size_t>(node) * m + (prev - n)]);
      }
      node = prev;
    }
    bottleneck = std::min(bottleneck, supply[static_cast<size_t>(node)]);
    // Apply.
    int cur = target;
    while (parent[static_cast<size_t>(cur)] != -1) {
      const int prev = parent[static_cast<size_t>(cur)];
      if (prev < n) {
        flow[static_cast<size_t>(prev) * m + (cur - n)] += bottleneck;
      } else {
        flow[static_cast<size_t>(cur) * m + (prev - n)] -= bottleneck;
      }
      cur = prev;
    }
    supply[static_cast<size_t>(cur)] -= bottleneck;
    demand[static_cast<size_t>(target - n)] -= bottleneck;
    for (int x = 0; x < total; ++x) {
      if (dist[static_cast<size_t>(x)] < inf) {
        potential[static_cast<size_t>(x)] +=
            std::min(dist[static_cast<size_t>(x)], target_d);
      } else {
        potential[static_cast<size_t>(x)] += target_d;
      }
    }
  }

  double total_cost = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      total_cost += flow[static_cast<size_t>(i) * m + j] *
                    cost[static_cast<size_t>(i) * m + j];
    }
  }
  if (stats) {
    stats->cost = total_cost;
    stats->augmentations = aug;
    // Dual feasibility (p_j - p_i <= c_ij) and complementary slackness on
    // carried arcs.
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const double c = cost[static_cast<size_t>(i) * m + j];
        const double gap = (potential[static_cast<size_t>(n + j)] -
                            potential[static_cast<size_t>(i)]) - c;
        residual = std::max(residual, gap);
        if (flow[static_cast<size_t>(i) * m + j] > 1e-9) {
          residual = std::max(residual, std::abs(gap));
        }
      }
    }
    stats->dual_residual = residual;
  }
  return total_cost;
}

}  // namespace longrun
