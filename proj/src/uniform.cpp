#include "longrun/uniform.hpp"

#include <algorithm>
#include <cmath>

#include "longrun/minavg.hpp"
#include "longrun/values.hpp"

namespace longrun {

double f_n(const Model& model, StateId z, int n, double tol) {
  const std::vector<StateId> horizon_set = reach_union(model, z, kInfinity);
  return w_n_over(model, horizon_set, n, tol).value;
}

GmResult g_m(const Model& model, StateId z, int m, int n_probe, double tol) {
  if (m < 0) throw ModelError("g_m requires m >= 0");
  const std::vector<StateId> within = reach_union(model, z, m);
  const ReachTree tree = reach_tree(model, z);
  GmResult best;
  best.value = -1.0;
  for (StateId y : within) {
    CertifiedLasso cl = best_certified_lasso(model, y, n_probe, tol,
                                             /*prefer_floor=*/true);
    if (cl.min_average > best.value) {
      best.value = cl.min_average;
      best.lasso = std::move(cl.lasso);
      best.best_m = tree.distance[static_cast<size_t>(y)];
      best.certified = true;
    }
  }
  return best;
}

ValueInterval estimate_vstar(const Model& model, StateId z, double target_gap,
                             const VstarBudget& budget) {
  if (!(target_gap > 0.0)) throw ModelError("estimate_vstar requires target_gap > 0");
  const double tol = budget.tol;
  ValueInterval interval;
  interval.state = z;

  // Upper bounds: the reachable-set min-average value at growing horizons.
  int n_up = 256;
  interval.upper = f_n(model, z, std::min(n_up, budget.max_upper_horizon), tol);
  interval.upper_horizon = std::min(n_up, budget.max_upper_horizon);

  // Lower bound round 0: full synthesis (blocks included when needed).
  SynthesisOptions synth_opts;
  synth_opts.tol = tol;
  synth_opts.upper_horizon = budget.max_upper_horizon;
  SynthesisResult synth = synthesize(model, z, target_gap / 2, synth_opts);
  interval.lower = synth.report.level;
  interval.lower_certificate = synth.lasso;

  for (int round = 1; round <= budget.synth_rounds; ++round) {
    if (interval.upper - interval.lower <= target_gap) {
      interval.budget_exhausted = false;
      return interval;
    }
    // Deepen both sides: the witness-closure floor climbs toward the best
    // long-run level at rate ~1/n while f_n descends toward it.
    const int probe = std::min(256 << round, budget.max_upper_horizon);
    if (probe > interval.upper_horizon) {
      const double up = f_n(model, z, probe, tol);
      interval.upper = std::min(interval.upper, up);
      interval.upper_horizon = probe;
    }
    CertifiedLasso deeper = best_certified_lasso(model, z, probe, tol);
    if (deeper.level > interval.lower) {
      interval.lower = deeper.level;
      interval.lower_certificate = std::move(deeper.lasso);
    }
  }
  interval.budget_exhausted = interval.upper - interval.lower > target_gap;
  return interval;
}

ChainReport check_chain(const Model& model, StateId z, int m_probe, int n_probe,
                        double tol) {
  if (m_probe < 0 || n_probe < 2) {
    throw ModelError("check_chain requires m_probe >= 0 and n_probe >= 2");
  }
  ChainReport report;

  const int lasso_probe =
      std::min({n_probe, std::max(64, 2 * model.size()), 256});
  GmResult cert = g_m(model, z, m_probe, lasso_probe, tol);
  report.terms.push_back({"sup_inf_w.lower", cert.value,
                          "certified lasso floor; never overestimates"});

  double supinf_w_upper = -1.0;
  for (int m = 0; m <= m_probe; ++m) {
    supinf_w_upper = std::max(supinf_w_upper, w_mn(model, z, m, n_probe, tol).value);
  }
  report.terms.push_back({"sup_inf_w.upper", supinf_w_upper,
                          "horizon-truncated infimum; overestimates the true "
                          "term, probed m only"});

  const std::vector<ValueTable> vn = v_n_table(model, n_probe);
  double supinf_v_upper = -1.0;
  for (int m = 0; m <= m_probe; ++m) {
    double inner = 2.0;
    for (int n = 1; n <= n_probe; ++n) {
      inner = std::min(inner, v_mn(model, z, m, n, vn));
    }
    supinf_v_upper = std::max(supinf_v_upper, inner);
  }
  report.terms.push_back({"sup_inf_v.upper", supinf_v_upper,
                          "horizon-truncated infimum; overestimates the true "
                          "term, probed m only"});

  double window_min = 2.0;
  double window_max = -1.0;
  for (int n = n_probe / 2; n <= n_probe; ++n) {
    const double v = vn[static_cast<size_t>(n - 1)].at(z);
    window_min = std::min(window_min, v);
    window_max = std::max(window_max, v);
  }
  report.terms.push_back({"v_minus.window", window_min,
                          "windowed liminf surrogate; no certified direction"});
  report.terms.push_back({"v_plus.window", window_max,
                          "windowed limsup surrogate; no certified direction"});

  const double vstar_upper = f_n(model, z, n_probe, tol);
  report.terms.push_back({"inf_sup_w.upper", vstar_upper,
                          "single-horizon reachable-set bound; upper bound of "
                          "the candidate value"});

  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) report.violations.push_back(what);
  };
  expect(cert.value <= vstar_upper + 2 * tol,
         "certified floor exceeds the candidate-value upper bound");
  expect(supinf_w_upper <= supinf_v_upper + 2 * tol,
         "min-average surrogate exceeds the shifted-average surrogate");
  expect(window_min <= window_max + tol, "window min above window max");
  const int k = std::min(8, n_probe);
  const double fk = f_n(model, z, k, tol);
  const double correction = static_cast<double>(k - 1) / (n_probe / 2);
  expect(window_max <= fk + correction + 2 * tol,
         "window max exceeds the horizon-k bound plus (k-1)/n correction");
  return report;
}

VminusReport check_vminus(const Model& model, StateId z, int n_probe,
                          double tol) {
  if (n_probe < 4) throw ModelError("check_vminus requires n_probe >= 4");
  const std::vector<ValueTable> vn = v_n_table(model, n_probe);
  VminusReport report;
  double window_min = 2.0;
  double window_max = -1.0;
  for (int n = n_probe / 2; n <= n_probe; ++n) {
    const double v = vn[static_cast<size_t>(n - 1)].at(z);
    window_min = std::min(window_min, v);
    window_max = std::max(window_max, v);
  }
  report.liminf_probe = window_min;
  report.oscillation = window_max - window_min;

  const int m_probe = std::max(1, n_probe / 100);
  double supinf = -1.0;
  for (int m = 0; m <= m_probe; ++m) {
    double inner = 2.0;
    for (int n = n_probe / 2; n <= n_probe - m; ++n) {
      inner = std::min(inner, v_mn(model, z, m, n, vn));
    }
    supinf = std::max(supinf, inner);
  }
  report.supinf_probe = supinf;
  report.slack = report.oscillation + 2.0 * m_probe / n_probe + 2 * tol;
  report.conclusive = report.oscillation <= 0.01;
  report.agree =
      std::abs(report.liminf_probe - report.supinf_probe) <= report.slack;
  return report;
}

}  // namespace longrun
