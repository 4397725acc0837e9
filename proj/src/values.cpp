#include "longrun/values.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace longrun {

namespace {

constexpr double kCmpTol = 1e-9;

// (1-lambda)^n without cancellation for small lambda.
double decay_pow(double lambda, double n) {
  return std::exp(n * std::log1p(-lambda));
}

}  // namespace

std::string family_name(Family family) {
  switch (family) {
    case Family::vn: return "vn";
    case Family::vmn: return "vmn";
    case Family::wn: return "wn";
    case Family::wmn: return "wmn";
    case Family::vlambda: return "vlambda";
  }
  return "?";
}

std::vector<ValueTable> v_n_table(const Model& model, int n_max) {
  if (n_max < 1) throw ModelError("v_n_table requires n_max >= 1");
  const int size = model.size();
  std::vector<ValueTable> tables;
  tables.reserve(static_cast<size_t>(n_max));
  // U_n(z) = best sum of n rewards from z; averages are formed once at the
  // end of each horizon so the recursion adds exactly the path sums.
  std::vector<double> prev(static_cast<size_t>(size), 0.0);
  std::vector<double> cur(static_cast<size_t>(size), 0.0);
  for (int n = 1; n <= n_max; ++n) {
    for (int z = 0; z < size; ++z) {
      double best = -1.0;
      for (StateId y : model.next(z)) {
        best = std::max(best, model.reward(y) + prev[static_cast<size_t>(y)]);
      }
      cur[static_cast<size_t>(z)] = best;
    }
    ValueTable table;
    table.family = Family::vn;
    table.n = n;
    table.values.resize(static_cast<size_t>(size));
    for (int z = 0; z < size; ++z) {
      table.values[static_cast<size_t>(z)] = cur[static_cast<size_t>(z)] / n;
    }
    tables.push_back(std::move(table));
    prev.swap(cur);
  }
  return tables;
}

double v_mn(const Model& model, StateId z, int m, int n,
            const std::vector<ValueTable>& vn_tables) {
  if (n < 1 || n > static_cast<int>(vn_tables.size())) {
    throw ModelError("v_mn: tables do not cover horizon " + std::to_string(n));
  }
  const ValueTable& table = vn_tables[static_cast<size_t>(n - 1)];
  double best = -1.0;
  for (StateId y : reach(model, z, m)) best = std::max(best, table.at(y));
  return best;
}

ValueTable v_lambda_table(const Model& model, const DiscountParams& params) {
  if (!(params.lambda > 0.0 && params.lambda <= 1.0)) {
    throw ModelError("lambda must lie in (0,1]");
  }
  if (!(params.tolerance > 0.0)) throw ModelError("tolerance must be positive");
  const int size = model.size();
  const double lambda = params.lambda;
  std::vector<double> v(static_cast<size_t>(size), 0.0);
  std::vector<double> nv(static_cast<size_t>(size), 0.0);
  double step = 0.0;
  for (int it = 0; it < params.max_iterations; ++it) {
    step = 0.0;
    for (int z = 0; z < size; ++z) {
      double best = -1.0;
      for (StateId y : model.next(z)) {
        best = std::max(best, lambda * model.reward(y) +
                                  (1.0 - lambda) * v[static_cast<size_t>(y)]);
      }
      nv[static_cast<size_t>(z)] = best;
      step = std::max(step, std::abs(best - v[static_cast<size_t>(z)]));
    }
    v.swap(nv);
    if (step <= params.tolerance * lambda) {
      ValueTable table;
      table.family = Family::vlambda;
      table.lambda = lambda;
      table.values = std::move(v);
      return table;
    }
  }
  throw BudgetError("v_lambda_table: max_iterations exceeded, residual " +
                    std::to_string(step));
}

namespace {

// Exact evaluation of a positional policy: resolve each functional-graph
// cycle in closed form, then back-substitute along the in-trees.
std::vector<double> evaluate_policy(const Model& model,
                                    const std::vector<StateId>& policy,
                                    double lambda) {
  const int size = model.size();
  const double keep = 1.0 - lambda;
  std::vector<double> v(static_cast<size_t>(size),
                        std::numeric_limits<double>::quiet_NaN());
  std::vector<int> mark(static_cast<size_t>(size), -1);
  for (int start = 0; start < size; ++start) {
    if (!std::isnan(v[static_cast<size_t>(start)])) continue;
    std::vector<StateId> stack;
    StateId cur = start;
    while (std::isnan(v[static_cast<size_t>(cur)]) &&
           mark[static_cast<size_t>(cur)] == -1) {
      mark[static_cast<size_t>(cur)] = static_cast<int>(stack.size());
      stack.push_back(cur);
      cur = policy[static_cast<size_t>(cur)];
    }
    if (std::isnan(v[static_cast<size_t>(cur)])) {
      // Found a fresh cycle: stack[c0..] with policy(stack.back()) == cur.
      // Rewards are collected on entry, so from stack[c0] the discounted
      // stream is r(stack[c0+1]), ..., r(stack.back()), r(stack[c0]), ...
      const int c0 = mark[static_cast<size_t>(cur)];
      const int cyc_len = static_cast<int>(stack.size()) - c0;
      double weighted = 0.0;
      double weight = 1.0;
      for (int i = 1; i <= cyc_len; ++i) {
        const StateId entered = stack[static_cast<size_t>(c0 + (i % cyc_len))];
        weighted += weight * model.reward(entered);
        weight *= keep;
      }
      const double denom = -std::expm1(cyc_len * std::log1p(-lambda));
      v[static_cast<size_t>(cur)] = lambda * weighted / denom;
      for (int i = cyc_len - 1; i >= 1; --i) {
        const StateId s = stack[static_cast<size_t>(c0 + i)];
        const StateId t = stack[static_cast<size_t>(c0 + (i + 1) % cyc_len)];
        v[static_cast<size_t>(s)] =
            lambda * model.reward(t) + keep * v[static_cast<size_t>(t)];
      }
    }
    // Back-substitute the tree part of the stack.
    for (int i = static_cast<int>(stack.size()) - 1; i >= 0; --i) {
      const StateId s = stack[static_cast<size_t>(i)];
      if (!std::isnan(v[static_cast<size_t>(s)])) continue;
      const StateId t = policy[static_cast<size_t>(s)];
      v[static_cast<size_t>(s)] =
          lambda * model.reward(t) + keep * v[static_cast<size_t>(t)];
    }
    for (StateId s : stack) mark[static_cast<size_t>(s)] = -1;
  }
  return v;
}

}  // namespace

std::vector<double> v_lambda_exact(const Model& model, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ModelError("lambda must lie in (0,1]");
  }
  const int size = model.size();
  std::vector<StateId> policy(static_cast<size_t>(size));
  for (int z = 0; z < size; ++z) policy[static_cast<size_t>(z)] = model.next(z)[0];
  const int max_rounds = 100000;
  std::vector<double> v;
  for (int round = 0; round < max_rounds; ++round) {
    v = evaluate_policy(model, policy, lambda);
    bool changed = false;
    for (int z = 0; z < size; ++z) {
      StateId best = policy[static_cast<size_t>(z)];
      double best_val = lambda * model.reward(best) +
                        (1.0 - lambda) * v[static_cast<size_t>(best)];
      for (StateId y : model.next(z)) {
        const double val =
            lambda * model.reward(y) + (1.0 - lambda) * v[static_cast<size_t>(y)];
        if (val > best_val + 1e-15) {
          best_val = val;
          best = y;
        }
      }
      if (best != policy[static_cast<size_t>(z)]) {
        policy[static_cast<size_t>(z)] = best;
        changed = true;
      }
    }
    if (!changed) return v;
  }
  throw BudgetError("v_lambda_exact: policy iteration did not settle");
}

double discounted_payoff(const Model& model, const Play& play, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ModelError("lambda must lie in (0,1]");
  }
  if (!play.is_lasso()) throw ModelError("discounted_payoff requires a lasso");
  const double keep = 1.0 - lambda;
  const int prefix = play.prefix_length();
  const int cyc = play.cycle_length();
  double sum = 0.0;
  double weight = 1.0;
  for (int t = 0; t < prefix; ++t) {
    sum += weight * model.reward(play.steps[static_cast<size_t>(t)]);
    weight *= keep;
  }
  double cyc_sum = 0.0;
  double w = 1.0;
  for (int i = 0; i < cyc; ++i) {
    cyc_sum += w * model.reward(play.steps[static_cast<size_t>(prefix + i)]);
    w *= keep;
  }
  const double denom = -std::expm1(cyc * std::log1p(-lambda));
  return lambda * (sum + weight * cyc_sum / denom);
}

double abel_mean(const std::vector<double>& stream, double lambda,
                 double* tail_bound) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ModelError("lambda must lie in (0,1]");
  }
  // Kahan summation: streams can be long and the weights span many scales.
  double sum = 0.0;
  double carry = 0.0;
  double weight = lambda;
  for (double a : stream) {
    const double term = weight * a - carry;
    const double t = sum + term;
    carry = (t - sum) - term;
    sum = t;
    weight *= (1.0 - lambda);
  }
  if (tail_bound) {
    *tail_bound = decay_pow(lambda, static_cast<double>(stream.size()));
  }
  return sum;
}

std::vector<Eq1Violation> check_eq1(const Model& model,
                                    const std::vector<ValueTable>& vn_tables) {
  std::vector<Eq1Violation> out;
  const int n_max = static_cast<int>(vn_tables.size());
  auto vn = [&](int n, StateId z) {
    return vn_tables[static_cast<size_t>(n - 1)].at(z);
  };
  for (StateId z = 0; z < model.size(); ++z) {
    for (int n = 1; n <= n_max; ++n) {
      for (int m = 0; m + n <= n_max; ++m) {
        const double split = n * vn(n, z);
        const double whole = (m + n) * vn(m + n, z);
        if (split > whole + kCmpTol) {
          out.push_back({z, m, n, "n*v_n <= (m+n)*v_{m+n}", split, whole});
        }
        if (whole > split + m + kCmpTol) {
          out.push_back({z, m, n, "(m+n)*v_{m+n} <= n*v_n + m", whole, split + m});
        }
        const double shifted = n * v_mn(model, z, m, n, vn_tables);
        if (shifted > whole + kCmpTol) {
          out.push_back({z, m, n, "n*v_{m,n} <= (m+n)*v_{m+n}", shifted, whole});
        }
        if (whole > shifted + m + kCmpTol) {
          out.push_back(
              {z, m, n, "(m+n)*v_{m+n} <= n*v_{m,n} + m", whole, shifted + m});
        }
      }
    }
  }
  return out;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(std::ldexp(1.0, -k));
  return grid;
}

BlackwellResult blackwell_check(const Model& model, const Play& play,
                                double epsilon,
                                const std::vector<double>& lambda_grid) {
  if (!play.is_lasso()) throw ModelError("blackwell_check requires a lasso play");
  validate_play(model, play);
  std::vector<double> grid = lambda_grid;
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw ModelError("blackwell_check: empty lambda grid");

  std::vector<bool> good(grid.size(), false);
  std::vector<double> margin(grid.size(), 0.0);
  for (size_t i = 0; i < grid.size(); ++i) {
    const double lambda = grid[i];
    const double payoff = discounted_payoff(model, play, lambda);
    const double value = v_lambda_exact(model, lambda)[static_cast<size_t>(
        play.origin)];
    margin[i] = payoff - (value - epsilon);
    good[i] = margin[i] >= -1e-12;
  }
  // Certified region: the longest suffix of the (decreasing) grid that is
  // entirely good.
  BlackwellResult result;
  size_t first_good = grid.size();
  for (size_t i = grid.size(); i-- > 0;) {
    if (!good[i]) break;
    first_good = i;
  }
  if (first_good == grid.size()) {
    result.ok = false;
    result.failing_lambda = grid.back();
    return result;
  }
  result.ok = true;
  result.lambda0 = grid[first_good];
  result.worst_margin = std::numeric_limits<double>::infinity();
  for (size_t i = first_good; i < grid.size(); ++i) {
    result.worst_margin = std::min(result.worst_margin, margin[i]);
  }
  return result;
}

namespace {

struct BruteState {
  const Model* model;
  int m;
  int n;
  std::int64_t budget;
  std::int64_t nodes = 0;
  double best_v = -1.0;
  double best_w = -1.0;
  std::vector<double> sums;  // sums[t] = reward sum of the first t steps

  void dfs(StateId z, int depth) {
    if (depth == m + n) {
      const double shifted = (sums[static_cast<size_t>(m + n)] -
                              sums[static_cast<size_t>(m)]) / n;
      best_v = std::max(best_v, shifted);
      double mins = 2.0;
      for (int t = 1; t <= n; ++t) {
        mins = std::min(mins, (sums[static_cast<size_t>(m + t)] -
                               sums[static_cast<size_t>(m)]) / t);
      }
      best_w = std::max(best_w, mins);
      return;
    }
    for (StateId y : model->next(z)) {
      if (++nodes > budget) {
        throw BudgetError("brute_force_values: node budget exceeded at " +
                          std::to_string(budget));
      }
      sums[static_cast<size_t>(depth + 1)] =
          sums[static_cast<size_t>(depth)] + model->reward(y);
      dfs(y, depth + 1);
    }
  }
};

}  // namespace

BruteForceResult brute_force_values(const Model& model, StateId z, int m, int n,
                                    std::int64_t node_budget) {
  if (m < 0 || n < 1) throw ModelError("brute_force_values requires m>=0, n>=1");
  BruteState state{&model, m, n, node_budget, 0, -1.0, -1.0, {}};
  state.sums.assign(static_cast<size_t>(m + n + 1), 0.0);
  state.dfs(z, 0);
  return {state.best_v, state.best_w, state.nodes};
}

}  // namespace longrun
