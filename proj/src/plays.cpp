#include "longrun/plays.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "longrun/minavg.hpp"

namespace longrun {

namespace {

constexpr double kTie = 1e-12;

struct ScanResult {
  std::vector<double> sums;    // sums[t] = reward of first t steps
  double min_gamma = 2.0;
  double max_gamma = -1.0;
  std::int64_t argmin_T = 0;
};

ScanResult scan_averages(const Model& model, const Play& play, int len) {
  ScanResult r;
  const std::vector<double> stream = payoff_stream(model, play, len);
  r.sums.assign(static_cast<size_t>(len) + 1, 0.0);
  for (int t = 1; t <= len; ++t) {
    r.sums[static_cast<size_t>(t)] =
        r.sums[static_cast<size_t>(t - 1)] + stream[static_cast<size_t>(t - 1)];
    const double g = r.sums[static_cast<size_t>(t)] / t;
    if (g < r.min_gamma) {
      r.min_gamma = g;
      r.argmin_T = t;
    }
    r.max_gamma = std::max(r.max_gamma, g);
  }
  return r;
}

}  // namespace

LassoStats lasso_stats(const Model& model, const Play& lasso) {
  if (!lasso.is_lasso()) throw ModelError("lasso_stats requires a lasso play");
  validate_play(model, lasso);
  const int prefix = lasso.prefix_length();
  const int cyc = lasso.cycle_length();
  const int period = prefix + cyc;
  ScanResult scan = scan_averages(model, lasso, period);
  const double mean = (scan.sums[static_cast<size_t>(period)] -
                       scan.sums[static_cast<size_t>(prefix)]) / cyc;
  LassoStats stats;
  stats.cycle_mean = mean;
  stats.min_average = std::min(scan.min_gamma, mean);
  stats.max_average = std::max(scan.max_gamma, mean);
  stats.argmin_T = scan.argmin_T;
  return stats;
}

GuaranteeReport verify_guarantee(const Model& model, const Play& lasso,
                                 double level, double epsilon) {
  if (!lasso.is_lasso()) throw ModelError("verify_guarantee requires a lasso play");
  if (epsilon < 0.0) throw ModelError("verify_guarantee requires epsilon >= 0");
  const int prefix = lasso.prefix_length();
  const int cyc = lasso.cycle_length();
  const int period = prefix + cyc;
  ScanResult scan = scan_averages(model, lasso, period);
  const double mean = (scan.sums[static_cast<size_t>(period)] -
                       scan.sums[static_cast<size_t>(prefix)]) / cyc;
  const double target = level - epsilon;

  GuaranteeReport report;
  report.play = lasso;
  report.level = level;
  report.epsilon = epsilon;
  report.checked_horizon = period;
  report.tail_bound_slack = mean - target;

  // First-period violations are found by the scan itself.
  for (int t = 1; t <= period; ++t) {
    const double g = scan.sums[static_cast<size_t>(t)] / t;
    if (g < target - kTie) {
      report.pass = false;
      report.failing_T = t;
      return report;
    }
  }
  if (mean >= target - kTie) {
    // Along residue T0 + k*cyc the averages move monotonically from
    // gamma_{T0} toward the cycle mean, so no later horizon can dip
    // below both the scanned minimum and the mean.
    report.pass = true;
    return report;
  }
  // Cycle mean below target: averages eventually sink. Locate the first
  // horizon that crosses, checking each residue class in closed form.
  std::int64_t first_bad = std::numeric_limits<std::int64_t>::max();
  const double cycle_sum = scan.sums[static_cast<size_t>(period)] -
                           scan.sums[static_cast<size_t>(prefix)];
  for (int t0 = prefix + 1; t0 <= period; ++t0) {
    const double s0 = scan.sums[static_cast<size_t>(t0)];
    // gamma at T = t0 + k*cyc is (s0 + k*cycle_sum) / T; solve for the
    // smallest k with gamma < target.
    const double denom = target * cyc - cycle_sum;  // > 0 since mean < target
    double k_real = (s0 - target * t0) / denom;
    std::int64_t k = std::max<std::int64_t>(0, static_cast<std::int64_t>(
                                                   std::floor(k_real)) - 2);
    while (true) {
      const double g =
          (s0 + static_cast<double>(k) * cycle_sum) / (t0 + k * static_cast<std::int64_t>(cyc));
      if (k > 0 && g < target - kTie) break;
      if (k == 0 && g < target - kTie) break;
      ++k;
    }
    first_bad = std::min(first_bad, t0 + k * static_cast<std::int64_t>(cyc));
  }
  report.pass = false;
  report.failing_T = first_bad;
  return report;
}

BlockCertificate find_block(const Model& model, StateId z, double epsilon,
                            int m_bound, int n_request,
                            const std::vector<double>& lower_bounds,
                            double tol) {
  if (!(epsilon > 0.0)) throw ModelError("find_block requires epsilon > 0");
  if (n_request < 1) throw ModelError("find_block requires n_request >= 1");
  if (static_cast<int>(lower_bounds.size()) != model.size()) {
    throw ModelError("find_block: lower_bounds must cover every state");
  }
  const double base = lower_bounds[static_cast<size_t>(z)];
  for (int m = 0; m <= m_bound; ++m) {
    WitnessValue wide = w_mn(model, z, m, 2 * n_request, tol);
    Play block;
    block.origin = z;
    block.steps.assign(wide.witness.steps.begin(),
                       wide.witness.steps.begin() + (m + n_request));
    const std::vector<double> stream = payoff_stream(model, block, m + n_request);
    const double nu = min_average_payoff(stream, m, n_request);
    const StateId terminal = block.steps.back();
    if (nu >= base - epsilon / 2 - tol &&
        lower_bounds[static_cast<size_t>(terminal)] >= base - epsilon - tol) {
      BlockCertificate cert;
      cert.m = m;
      cert.n = n_request;
      cert.prefix = std::move(block.steps);
      cert.nu_value = nu;
      cert.target_value = lower_bounds[static_cast<size_t>(terminal)];
      cert.terminal = terminal;
      return cert;
    }
  }
  throw BudgetError("find_block: no block within m_bound=" +
                    std::to_string(m_bound) + ", n_request=" +
                    std::to_string(n_request) + "; grow the bounds");
}

namespace {

struct PairChoice {
  int i = -1;
  int j = -1;
  double score = -2.0;
};

Play close_pair(const Play& witness, StateId origin, int i, int j) {
  Play lasso;
  lasso.origin = origin;
  lasso.steps.assign(witness.steps.begin(), witness.steps.begin() + j);
  lasso.cycle_start = i;
  return lasso;
}

}  // namespace

CertifiedLasso best_certified_lasso(const Model& model, StateId z, int n_probe,
                                    double tol, bool prefer_floor) {
  const int n = std::max(n_probe, model.size());
  WitnessValue wr = w_n(model, z, n, tol);
  // seq[0] = z, seq[t] = t-th visited state.
  std::vector<StateId> seq;
  seq.reserve(static_cast<size_t>(n) + 1);
  seq.push_back(z);
  seq.insert(seq.end(), wr.witness.steps.begin(), wr.witness.steps.end());
  std::vector<double> sums(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> min_gamma(static_cast<size_t>(n) + 1, 2.0);
  for (int t = 1; t <= n; ++t) {
    sums[static_cast<size_t>(t)] =
        sums[static_cast<size_t>(t - 1)] + model.reward(seq[static_cast<size_t>(t)]);
    min_gamma[static_cast<size_t>(t)] =
        std::min(min_gamma[static_cast<size_t>(t - 1)],
                 sums[static_cast<size_t>(t)] / t);
  }
  // Closing the pair (i, j) repeats the segment; horizons up to j replay
  // the witness, so the lasso's exact floor is min(min_gamma[j], mean).
  PairChoice by_level;
  PairChoice by_floor;
  std::vector<std::vector<int>> occurrences(static_cast<size_t>(model.size()));
  for (int t = 0; t <= n; ++t) {
    occurrences[static_cast<size_t>(seq[static_cast<size_t>(t)])].push_back(t);
  }
  for (const auto& occ : occurrences) {
    for (size_t a = 0; a < occ.size(); ++a) {
      for (size_t b = a + 1; b < occ.size(); ++b) {
        const int i = occ[a];
        const int j = occ[b];
        const double mean = (sums[static_cast<size_t>(j)] -
                             sums[static_cast<size_t>(i)]) / (j - i);
        if (mean > by_level.score + kTie) by_level = {i, j, mean};
        const double floor_val =
            std::min(min_gamma[static_cast<size_t>(j)], mean);
        if (floor_val > by_floor.score + kTie) by_floor = {i, j, floor_val};
      }
    }
  }
  if (by_level.i < 0) {
    throw ModelError("best_certified_lasso: no repeated state in witness");
  }
  CertifiedLasso out;
  Play cand_level = close_pair(wr.witness, z, by_level.i, by_level.j);
  LassoStats stats_level = lasso_stats(model, cand_level);
  Play cand_floor = close_pair(wr.witness, z, by_floor.i, by_floor.j);
  LassoStats stats_floor = lasso_stats(model, cand_floor);
  const bool take_floor =
      prefer_floor ? (stats_floor.min_average >= stats_level.min_average - kTie)
                   : (stats_floor.cycle_mean >= stats_level.cycle_mean - kTie &&
                      stats_floor.min_average > stats_level.min_average + kTie);
  if (take_floor) {
    out.level = stats_floor.cycle_mean;
    out.min_average = stats_floor.min_average;
    out.lasso = std::move(cand_floor);
  } else {
    out.level = stats_level.cycle_mean;
    out.min_average = stats_level.min_average;
    out.lasso = std::move(cand_level);
  }
  return out;
}

SynthesisResult synthesize(const Model& model, StateId z, double alpha,
                           const SynthesisOptions& options) {
  if (!(alpha > 0.0)) throw ModelError("synthesize requires alpha > 0");
  const int size = model.size();
  const double tol = options.tol;

  // Certified per-state floor values; these seed both the block targets
  // and the initial candidate at z.
  std::vector<double> lb(static_cast<size_t>(size), 0.0);
  std::vector<CertifiedLasso> boot(static_cast<size_t>(size));
  const int n_boot = std::max(options.base_horizon, 2 * size);
  for (StateId y = 0; y < size; ++y) {
    boot[static_cast<size_t>(y)] = best_certified_lasso(model, y, n_boot, tol);
    lb[static_cast<size_t>(y)] = boot[static_cast<size_t>(y)].level;
  }

  const std::vector<StateId> horizon_set = reach_union(model, z, kInfinity);
  double upper = 1.0;
  int upper_n = std::min(256, options.upper_horizon);
  upper = std::min(upper, w_n_over(model, horizon_set, upper_n, tol).value);
  auto target = [&]() { return (upper - alpha) / (1.0 + alpha) - 1e-9; };

  Play best_lasso = boot[static_cast<size_t>(z)].lasso;
  double best_level = boot[static_cast<size_t>(z)].level;
  int blocks_used = 0;

  auto finish = [&](bool met) {
    SynthesisResult result;
    LassoStats stats = lasso_stats(model, best_lasso);
    const double eps = std::max(0.0, stats.cycle_mean - stats.min_average) + kTie;
    result.report = verify_guarantee(model, best_lasso, stats.cycle_mean, eps);
    result.lasso = std::move(best_lasso);
    result.upper_bound = upper;
    result.blocks_used = blocks_used;
    result.target_met = met;
    return result;
  };

  if (best_level >= target()) return finish(true);

  const int m_bound = 2 * size;
  for (int round = 0; round < options.max_rounds; ++round) {
    const int n_base = options.base_horizon << round;
    // Block construction: epsilon_i halves while the horizon grows, and
    // the terminal states must repeat on a finite model; every repeat
    // closes a candidate lasso.
    StateId cur = z;
    std::vector<StateId> steps;
    std::vector<std::pair<StateId, int>> boundaries{{z, 0}};
    for (int i = 1; i <= options.max_blocks; ++i) {
      const double eps_i = alpha / std::pow(2.0, i);
      const int n_i = std::min(n_base << (i - 1), 1 << 14);
      BlockCertificate cert;
      try {
        cert = find_block(model, cur, eps_i, m_bound, n_i, lb, tol);
      } catch (const BudgetError&) {
        break;
      }
      steps.insert(steps.end(), cert.prefix.begin(), cert.prefix.end());
      ++blocks_used;
      cur = cert.terminal;
      const int pos = static_cast<int>(steps.size());
      for (const auto& [state, at] : boundaries) {
        if (state != cur) continue;
        Play cand;
        cand.origin = z;
        cand.steps.assign(steps.begin(), steps.begin() + pos);
        cand.cycle_start = at;
        LassoStats stats = lasso_stats(model, cand);
        if (stats.cycle_mean > best_level + kTie) {
          best_level = stats.cycle_mean;
          best_lasso = std::move(cand);
        }
        break;
      }
      boundaries.emplace_back(cur, pos);
      if (best_level >= target()) return finish(true);
    }
    if (upper_n < options.upper_horizon) {
      upper_n = std::min(2 * upper_n, options.upper_horizon);
      upper = std::min(upper, w_n_over(model, horizon_set, upper_n, tol).value);
      if (best_level >= target()) return finish(true);
    }
  }
  return finish(best_level >= target());
}

Play shorten(const Model& model, const Play& prefix_play, double epsilon,
             double level) {
  validate_play(model, prefix_play);
  const int n = static_cast<int>(prefix_play.steps.size());
  if (n < 1) throw ModelError("shorten: empty play");
  std::vector<StateId> seq;
  seq.reserve(static_cast<size_t>(n) + 1);
  seq.push_back(prefix_play.origin);
  seq.insert(seq.end(), prefix_play.steps.begin(), prefix_play.steps.end());
  std::vector<double> sums(static_cast<size_t>(n) + 1, 0.0);
  for (int t = 1; t <= n; ++t) {
    sums[static_cast<size_t>(t)] =
        sums[static_cast<size_t>(t - 1)] + model.reward(seq[static_cast<size_t>(t)]);
  }
  // Repeatable segment with a good average: close it into a cycle.
  PairChoice best;
  std::vector<std::vector<int>> occurrences(static_cast<size_t>(model.size()));
  for (int t = 0; t <= n; ++t) {
    occurrences[static_cast<size_t>(seq[static_cast<size_t>(t)])].push_back(t);
  }
  for (const auto& occ : occurrences) {
    for (size_t a = 0; a < occ.size(); ++a) {
      for (size_t b = a + 1; b < occ.size(); ++b) {
        const int i = occ[a];
        const int j = occ[b];
        const double mean = (sums[static_cast<size_t>(j)] -
                             sums[static_cast<size_t>(i)]) / (j - i);
        if (mean > best.score + kTie) best = {i, j, mean};
      }
    }
  }
  if (best.i >= 0 && best.score >= level - 2 * epsilon - kTie) {
    Play lasso;
    lasso.origin = prefix_play.origin;
    lasso.steps.assign(seq.begin() + 1, seq.begin() + 1 + best.j);
    lasso.cycle_start = best.i;
    return lasso;
  }
  // No good cycle: compress by always re-entering each state at its last
  // visit. Every removed segment had a below-target average, so the
  // surviving averages only improved.
  std::vector<int> last_occurrence(static_cast<size_t>(model.size()), -1);
  for (int t = 0; t <= n; ++t) {
    last_occurrence[static_cast<size_t>(seq[static_cast<size_t>(t)])] = t;
  }
  Play out;
  out.origin = prefix_play.origin;
  int pos = last_occurrence[static_cast<size_t>(prefix_play.origin)];
  while (pos < n) {
    const StateId next = seq[static_cast<size_t>(pos + 1)];
    out.steps.push_back(next);
    pos = last_occurrence[static_cast<size_t>(next)];
  }
  if (out.steps.empty()) {
    throw ModelError("shorten: window too short to decide");
  }
  return out;
}

}  // namespace longrun
