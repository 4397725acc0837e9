#include "longrun/gallery.hpp"

#include <algorithm>
#include <cmath>

#include "longrun/minavg.hpp"
#include "longrun/plays.hpp"
#include "longrun/uniform.hpp"
#include "longrun/values.hpp"

namespace longrun {

namespace {

double ramp_reward(double x) {
  if (x < 0.25 || x > 0.75) return 0.0;
  if (x >= 1.0 / 3.0 && x <= 2.0 / 3.0) return 1.0;
  if (x < 1.0 / 3.0) return (x - 0.25) * 12.0;
  return (0.75 - x) * 12.0;
}

double chain_term(const ChainReport& report, const std::string& name) {
  for (const auto& t : report.terms) {
    if (t.name == name) return t.value;
  }
  throw ModelError("chain term not found: " + name);
}

}  // namespace

SquareInstance square_model(int grid_y) {
  if (grid_y < 4) throw ModelError("square_model requires grid_y >= 4");
  SquareInstance inst;
  Model& model = inst.model;
  std::vector<std::pair<double, double>> coords;  // (x, y), index 1.. ; 0 is hub
  model.rewards.push_back(0.0);                   // the initial choice point
  coords.push_back({-1.0, -1.0});
  model.successors.emplace_back();
  for (int j = 1; j <= grid_y; ++j) {
    const double y = static_cast<double>(j) / grid_y;
    inst.speeds.push_back(y);
    const int steps_to_wall =
        static_cast<int>(std::ceil(static_cast<double>(grid_y) / j));
    StateId prev = -1;
    for (int k = 0; k <= steps_to_wall; ++k) {
      const double x = std::min(1.0, k * y);
      const StateId id = static_cast<StateId>(model.rewards.size());
      model.rewards.push_back(ramp_reward(x));
      coords.push_back({x, y});
      model.successors.emplace_back();
      if (k == 0) {
        inst.entries.push_back(id);
        model.successors[0].push_back(id);
      } else {
        model.successors[static_cast<size_t>(prev)].push_back(id);
      }
      prev = id;
    }
    model.successors[static_cast<size_t>(prev)].push_back(prev);  // wall
  }
  model.initial = 0;
  const int n = model.size();
  if (n <= 2000) {
    Metric metric;
    metric.discrete = false;
    metric.d.assign(static_cast<size_t>(n),
                    std::vector<double>(static_cast<size_t>(n), 0.0));
    for (int i = 1; i < n; ++i) {
      metric.d[0][static_cast<size_t>(i)] = 1.0;
      metric.d[static_cast<size_t>(i)][0] = 1.0;
      for (int j = i + 1; j < n; ++j) {
        const double d =
            std::abs(coords[static_cast<size_t>(i)].first -
                     coords[static_cast<size_t>(j)].first) +
            std::abs(coords[static_cast<size_t>(i)].second -
                     coords[static_cast<size_t>(j)].second);
        metric.d[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
        metric.d[static_cast<size_t>(j)][static_cast<size_t>(i)] = d;
      }
    }
    model.metric = std::move(metric);
  }
  validate_model(model);
  return inst;
}

GalleryReport square_diagnostics(int grid_y) {
  SquareInstance inst = square_model(grid_y);
  const Model& model = inst.model;
  GalleryReport report;
  report.instance = "square";

  const std::vector<ValueTable> vn = v_n_table(model, 2);
  const double v2 = vn[1].at(model.initial);
  report.checks.push_back({"v2_at_least_half", v2 >= 0.5 - 1e-12, v2,
                           "two-step value via a mid-strip speed"});

  // Every play is fixed by its speed; its lifetime reward is bounded by
  // the strip width over the speed, so averages decay like 1/T.
  const int bound = grid_y;  // ceil(1/y_min)
  bool decay_ok = true;
  double worst = 0.0;
  for (size_t idx = 0; idx < inst.entries.size(); ++idx) {
    double total = 0.0;
    StateId cur = inst.entries[idx];
    for (int guard = 0; guard < 4 * grid_y + 8; ++guard) {
      total += model.reward(cur);
      const StateId nxt = model.next(cur)[0];
      if (nxt == cur) break;
      cur = nxt;
    }
    const int t0 = 10 * bound;
    const double gamma_t0 = total / t0;  // play is absorbed well before t0
    worst = std::max(worst, gamma_t0 - static_cast<double>(bound) / t0);
    if (gamma_t0 > static_cast<double>(bound) / t0 + 1e-12) decay_ok = false;
  }
  report.checks.push_back({"play_average_decay", decay_ok, worst,
                           "gamma_T <= ceil(1/y_min)/T for T = 10*ceil(1/y_min)"});

  const int m_probe = grid_y / 3 + 2;
  const int n_long = std::min(100 * grid_y, 20000);
  ChainReport chain_w = check_chain(model, model.initial, m_probe, n_long);
  const double supinf_w = chain_term(chain_w, "sup_inf_w.upper");
  report.checks.push_back({"sup_inf_w_small", supinf_w <= 0.01, supinf_w,
                           "min-average surrogate at the long probe horizon"});

  const int n_short = std::max(4, grid_y / 4);
  ChainReport chain_v = check_chain(model, model.initial, m_probe, n_short);
  const double supinf_v = chain_term(chain_v, "sup_inf_v.upper");
  report.checks.push_back({"sup_inf_v_large", supinf_v >= 0.45, supinf_v,
                           "shifted-average surrogate at the grid-faithful "
                           "horizon"});
  report.checks.push_back({"chain_sound", chain_w.ok() && chain_v.ok(),
                           0.0, "sound chain comparisons hold"});

  if (model.metric) {
    const auto witness = check_nonexpansive(model);
    report.checks.push_back({"expansive_witness_found", witness.has_value(),
                             witness ? witness->deficit : 0.0,
                             "vertical neighbours drift apart horizontally"});
  }
  return report;
}

SimplexInstance simplex_model(const std::vector<double>& alpha_grid,
                              double mass_threshold) {
  if (alpha_grid.empty()) throw ModelError("simplex_model requires a grid");
  if (!(mass_threshold > 0.0 && mass_threshold < 0.1)) {
    throw ModelError("simplex_model: mass threshold outside (0, 0.1)");
  }
  std::vector<double> alphas = alpha_grid;
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  for (double a : alphas) {
    if (a < 0.0 || a > 0.5) throw ModelError("simplex alphas must lie in [0, 1/2]");
  }
  SimplexInstance inst;
  inst.alphas = alphas;
  inst.mass_threshold = mass_threshold;
  Model& model = inst.model;
  model.rewards.push_back(0.0);  // (1,0,0)
  model.successors.emplace_back();
  model.initial = 0;
  bool has_zero = false;
  for (double alpha : alphas) {
    if (alpha == 0.0) {
      has_zero = true;
      continue;
    }
    // Committed-alpha trajectory, truncated into an absorbing tail once
    // the draining mass falls under the threshold.
    double pa = 1.0;
    double pb = 0.0;
    double pc = 0.0;
    StateId prev = 0;
    bool first = true;
    while (true) {
      pb += alpha * pa;
      pc += alpha * alpha * pa;
      pa *= (1.0 - alpha - alpha * alpha);
      const StateId id = static_cast<StateId>(model.rewards.size());
      model.rewards.push_back(pb - pc);
      model.successors.emplace_back();
      if (first) {
        inst.entries.push_back(id);
        model.successors[0].push_back(id);
        first = false;
      } else {
        model.successors[static_cast<size_t>(prev)].push_back(id);
      }
      prev = id;
      if (pa <= mass_threshold) {
        model.successors[static_cast<size_t>(prev)].push_back(prev);
        inst.absorbers.push_back(prev);
        break;
      }
    }
  }
  if (has_zero) model.successors[0].push_back(0);
  if (model.successors[0].empty()) {
    // Grid was {0} only; the initial state just freezes.
    model.successors[0].push_back(0);
  }
  std::sort(model.successors[0].begin(), model.successors[0].end());
  validate_model(model);
  return inst;
}

GalleryReport simplex_diagnostics(const std::vector<double>& alpha_grid,
                                  double mass_threshold) {
  SimplexInstance inst = simplex_model(alpha_grid, mass_threshold);
  const Model& model = inst.model;
  GalleryReport report;
  report.instance = "simplex";

  bool has_zero = false;
  for (double a : inst.alphas) has_zero |= (a == 0.0);
  if (has_zero) {
    Play frozen;
    frozen.origin = 0;
    frozen.steps = {0};
    frozen.cycle_start = 0;
    const LassoStats stats = lasso_stats(model, frozen);
    report.checks.push_back({"alpha0_frozen", std::abs(stats.cycle_mean) < 1e-15,
                             stats.cycle_mean, "zero alpha pays zero forever"});
  }

  size_t traj = 0;
  bool level_ok = true;
  double worst_gap = 0.0;
  for (double alpha : inst.alphas) {
    if (alpha == 0.0) continue;
    // The committed play: follow the trajectory, then loop the absorber.
    Play play;
    play.origin = 0;
    StateId cur = inst.entries[traj];
    while (true) {
      play.steps.push_back(cur);
      if (cur == inst.absorbers[traj]) break;
      cur = model.next(cur)[0];
    }
    play.cycle_start = static_cast<int>(play.steps.size()) - 1;
    const LassoStats stats = lasso_stats(model, play);
    const double expected = (1.0 - alpha) / (1.0 + alpha);
    const double gap = std::abs(stats.cycle_mean - expected);
    worst_gap = std::max(worst_gap, gap);
    if (gap > 2 * mass_threshold + 1e-9) level_ok = false;
    GuaranteeReport g = verify_guarantee(model, play, stats.cycle_mean,
                                         stats.cycle_mean - stats.min_average +
                                             1e-12);
    if (!g.pass) level_ok = false;
    ++traj;
  }
  report.checks.push_back({"constant_alpha_levels", level_ok, worst_gap,
                           "certified level of each committed play within "
                           "the truncation slack of (1-a)/(1+a)"});
  return report;
}

BlocksInstance blocks_model(int k_blocks) {
  if (k_blocks < 1) throw ModelError("blocks_model requires k_blocks >= 1");
  BlocksInstance inst;
  inst.block_count = k_blocks;
  Model& model = inst.model;
  const int total = k_blocks * (k_blocks + 1);
  model.rewards.assign(static_cast<size_t>(total) + 1, 0.0);
  model.successors.assign(static_cast<size_t>(total) + 1, {});
  model.initial = 0;
  int pos = 1;
  for (int k = 1; k <= k_blocks; ++k) {
    inst.block_starts.push_back(pos);
    for (int i = 0; i < 2 * k; ++i) {
      model.rewards[static_cast<size_t>(pos + i)] = i < k ? 1.0 : 0.0;
    }
    pos += 2 * k;
  }
  for (int i = 0; i < total; ++i) {
    model.successors[static_cast<size_t>(i)].push_back(i + 1);
  }
  // The chain truncates by looping the final block forever.
  model.successors[static_cast<size_t>(total)].push_back(
      inst.block_starts.back());
  validate_model(model);
  return inst;
}

GalleryReport blocks_diagnostics(int k_blocks) {
  BlocksInstance inst = blocks_model(k_blocks);
  const Model& model = inst.model;
  GalleryReport report;
  report.instance = "blocks";
  const int total = k_blocks * (k_blocks + 1);

  Play chain;
  chain.origin = 0;
  for (int i = 1; i <= total; ++i) chain.steps.push_back(i);
  chain.cycle_start = inst.block_starts.back() - 1;  // final block repeats
  const std::vector<double> stream =
      payoff_stream(model, chain, 4 * total);

  if (k_blocks >= 3) {
    const std::vector<double> expect = {1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 0};
    bool ok = true;
    for (size_t i = 0; i < expect.size(); ++i) ok &= stream[i] == expect[i];
    report.checks.push_back({"stream_prefix", ok, 0.0,
                             "pattern starts 1,0,1,1,0,0,1,1,1,0,0,0"});
  }

  bool cesaro_ok = true;
  double sum = 0.0;
  int end_of_blocks = 0;
  for (int j = 1; j <= k_blocks; ++j) end_of_blocks = j * (j + 1);
  int upto = 0;
  for (int j = 1; j <= k_blocks; ++j) {
    const int end = j * (j + 1);
    for (; upto < end; ++upto) sum += stream[static_cast<size_t>(upto)];
    cesaro_ok &= (sum / end == 0.5);
  }
  (void)end_of_blocks;
  report.checks.push_back({"cesaro_exact_half_at_block_ends", cesaro_ok, 0.5,
                           "complete blocks balance ones and zeros exactly"});

  bool f_ok = true;
  double worst_f = 1.0;
  for (int n = 1; n <= k_blocks; ++n) {
    const double f = f_n(model, model.initial, n);
    worst_f = std::min(worst_f, f);
    if (f < 1.0 - 1e-9) f_ok = false;
  }
  report.checks.push_back({"f_n_stays_one", f_ok, worst_f,
                           "a long-enough run of ones is always reachable"});

  bool nu_ok = true;
  for (int k = 1; k <= k_blocks; ++k) {
    const int m = inst.block_starts[static_cast<size_t>(k - 1)] - 1;
    double s = 0.0;
    double lowest = 2.0;
    const int probe = std::min(4 * total - m, 4 * k * k + 8 * k);
    for (int t = 1; t <= probe; ++t) {
      s += stream[static_cast<size_t>(m + t - 1)];
      lowest = std::min(lowest, s / t);
    }
    if (std::abs(lowest - 0.5) > 1e-12) nu_ok = false;
  }
  report.checks.push_back({"block_start_floor_half", nu_ok, 0.5,
                           "running averages from a block start floor at 1/2"});

  VminusReport vm = check_vminus(model, model.initial,
                                 std::max(8, total));
  const bool near_half = std::abs(vm.liminf_probe - 0.5) <=
                         0.05 + 2.0 * k_blocks / std::max(8, total);
  report.checks.push_back({"limit_surrogate_half", near_half, vm.liminf_probe,
                           "windowed v_n surrogate near 1/2"});
  return report;
}

AbelGapInstance abelgap_model(std::int64_t horizon, int base) {
  if (horizon < 16) throw ModelError("abelgap_model requires horizon >= 16");
  if (base < 2) throw ModelError("abelgap_model requires base >= 2");
  AbelGapInstance inst;
  // Alternating runs of ones and zeros with lengths base^1, base^2, ...
  inst.stream.reserve(static_cast<size_t>(horizon));
  std::int64_t run_len = base;
  bool ones = true;
  while (static_cast<std::int64_t>(inst.stream.size()) < horizon) {
    for (std::int64_t i = 0;
         i < run_len &&
         static_cast<std::int64_t>(inst.stream.size()) < horizon;
         ++i) {
      inst.stream.push_back(ones ? 1.0 : 0.0);
    }
    run_len *= base;
    ones = !ones;
  }
  double cesaro_max = 0.0;
  double sum = 0.0;
  for (std::int64_t t = 0; t < horizon; ++t) {
    sum += inst.stream[static_cast<size_t>(t)];
    cesaro_max = std::max(cesaro_max, sum / static_cast<double>(t + 1));
  }
  inst.cesaro_max = cesaro_max;
  double abel_max = 0.0;
  for (double lambda : default_lambda_grid()) {
    double tail = 0.0;
    const double partial = abel_mean(inst.stream, lambda, &tail);
    abel_max = std::max(abel_max, partial + tail);
  }
  inst.abel_grid_max = abel_max;
  inst.margin = inst.cesaro_max - inst.abel_grid_max;
  inst.hub_reward = std::min(1.0, std::max(0.0, abel_max));

  Model& model = inst.model;
  const std::int64_t n_states = horizon + 1;
  model.rewards.assign(static_cast<size_t>(n_states), 0.0);
  model.successors.assign(static_cast<size_t>(n_states), {});
  model.rewards[0] = inst.hub_reward;
  model.successors[0] = {0, 1};
  for (std::int64_t t = 1; t < horizon; ++t) {
    model.rewards[static_cast<size_t>(t)] = inst.stream[static_cast<size_t>(t - 1)];
    model.successors[static_cast<size_t>(t)] = {static_cast<StateId>(t + 1)};
  }
  model.rewards[static_cast<size_t>(horizon)] =
      inst.stream[static_cast<size_t>(horizon - 1)];
  model.successors[static_cast<size_t>(horizon)] = {
      static_cast<StateId>(horizon)};
  model.initial = 0;
  validate_model(model);
  return inst;
}

GalleryReport abelgap_diagnostics(std::int64_t horizon, int base) {
  AbelGapInstance inst = abelgap_model(horizon, base);
  GalleryReport report;
  report.instance = "abelgap";

  report.checks.push_back({"cesaro_beats_abel_grid", inst.margin > 0.0,
                           inst.margin,
                           "sampled Cesaro max minus Abel-grid max; finite "
                           "horizon report, not a limit claim"});

  bool structural_ok = true;
  double worst = 0.0;
  for (double lambda : default_lambda_grid()) {
    if (lambda < 1e-6) break;  // brackets widen beyond usefulness
    double tail = 0.0;
    const double partial = abel_mean(inst.stream, lambda, &tail);
    const double expected = std::max(inst.hub_reward, partial);
    const double actual = v_lambda_exact(inst.model, lambda)[0];
    const double gap = std::abs(actual - expected);
    worst = std::max(worst, gap - tail);
    if (gap > tail + 1e-9) structural_ok = false;
  }
  report.checks.push_back({"discounted_value_is_max_of_hub_and_abel",
                           structural_ok, worst,
                           "v_lambda at the hub equals max(hub, Abel mean) "
                           "within the truncation bracket"});

  Play stay;
  stay.origin = 0;
  stay.steps = {0};
  stay.cycle_start = 0;
  const GuaranteeReport g =
      verify_guarantee(inst.model, stay, inst.hub_reward, 1e-12);
  report.checks.push_back({"hub_play_secures_abel_level", g.pass,
                           inst.hub_reward,
                           "staying at the hub guarantees its reward at "
                           "every horizon"});
  return report;
}

IntervalInstance interval_model(int grid_per_unit) {
  if (grid_per_unit < 4 || grid_per_unit % 2 != 0) {
    throw ModelError("interval_model requires an even grid >= 4 per unit");
  }
  IntervalInstance inst;
  Model& model = inst.model;
  const int g = grid_per_unit;
  // Left segment [-1, 1]: indices 0..2g; right segment [2, 3]: 2g+1..3g+1.
  for (int i = 0; i <= 2 * g; ++i) {
    inst.coords.push_back(-1.0 + static_cast<double>(i) / g);
  }
  for (int i = 0; i <= g; ++i) {
    inst.coords.push_back(2.0 + static_cast<double>(i) / g);
  }
  const int n = static_cast<int>(inst.coords.size());
  const int right0 = 2 * g + 1;
  model.rewards.resize(static_cast<size_t>(n));
  model.successors.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double z = inst.coords[static_cast<size_t>(i)];
    model.rewards[static_cast<size_t>(i)] = std::min(1.0, std::abs(z - 2.5));
    if (i < right0) {
      inst.left_states.push_back(i);
      // Reachable window of the absorbing segment.
      const double lo = z <= 0.0 ? 2.0 : z + 2.0;
      const double hi = z <= 0.0 ? z + 3.0 : 3.0;
      for (int r = 0; r <= g; ++r) {
        const double x = 2.0 + static_cast<double>(r) / g;
        if (x >= lo - 1e-12 && x <= hi + 1e-12) {
          model.successors[static_cast<size_t>(i)].push_back(right0 + r);
        }
      }
    } else {
      inst.right_states.push_back(i);
      model.successors[static_cast<size_t>(i)].push_back(i);
    }
  }
  model.initial = 0;
  Metric metric;
  metric.discrete = false;
  metric.d.assign(static_cast<size_t>(n),
                  std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = std::abs(inst.coords[static_cast<size_t>(i)] -
                                inst.coords[static_cast<size_t>(j)]);
      metric.d[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
      metric.d[static_cast<size_t>(j)][static_cast<size_t>(i)] = d;
    }
  }
  model.metric = std::move(metric);
  validate_model(model);
  return inst;
}

GalleryReport interval_diagnostics(int grid_per_unit) {
  IntervalInstance inst = interval_model(grid_per_unit);
  const Model& model = inst.model;
  GalleryReport report;
  report.instance = "interval";

  bool right_ok = true;
  double worst = 0.0;
  for (StateId z : inst.right_states) {
    ValueInterval vi = estimate_vstar(model, z, 0.001);
    const double expect =
        std::abs(inst.coords[static_cast<size_t>(z)] - 2.5);
    worst = std::max({worst, std::abs(vi.lower - expect),
                      std::abs(vi.upper - expect)});
    if (std::abs(vi.lower - expect) > 1e-9 || std::abs(vi.upper - expect) > 1e-9) {
      right_ok = false;
    }
  }
  report.checks.push_back({"absorbing_value_is_distance", right_ok, worst,
                           "long-run value on [2,3] equals |z-5/2|"});

  bool left_ok = true;
  worst = 0.0;
  for (StateId z : inst.left_states) {
    ValueInterval vi = estimate_vstar(model, z, 0.001);
    worst = std::max({worst, std::abs(vi.lower - 0.5),
                      std::abs(vi.upper - 0.5)});
    if (std::abs(vi.lower - 0.5) > 1e-9 || std::abs(vi.upper - 0.5) > 1e-9) {
      left_ok = false;
    }
  }
  report.checks.push_back({"left_segment_value_half", left_ok, worst,
                           "an endpoint of [2,3] is always reachable"});

  const auto witness = check_nonexpansive(model);
  report.checks.push_back({"nonexpansive_ok", !witness.has_value(),
                           witness ? witness->deficit : 0.0,
                           "matched successors never drift apart"});
  return report;
}

}  // namespace longrun
