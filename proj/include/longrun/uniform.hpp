#pragma once

#include <string>
#include <vector>

#include "longrun/model.hpp"
#include "longrun/plays.hpp"

namespace longrun {

/// f_n(z): the best min-average value at horizon n over every state
/// reachable from z in any number of steps. Nonincreasing in n (within
/// tolerance) and an upper bound for the long-run candidate value at z.
double f_n(const Model& model, StateId z, int n, double tol = 1e-9);

struct GmResult {
  double value = 0.0;
  bool certified = true;  // a lasso witness backs the bound
  Play lasso;             // witness at the best repositioning target
  int best_m = 0;
};

/// g_m(z): the best certified floor over states reachable within m steps;
/// every reported value is backed by a lasso whose worst running average
/// is at least it. Finite-horizon min-average values alone over-estimate
/// the infimum over horizons, so they are never used here.
GmResult g_m(const Model& model, StateId z, int m, int n_probe,
             double tol = 1e-9);

struct ValueInterval {
  StateId state = 0;
  double lower = 0.0;
  double upper = 1.0;
  Play lower_certificate;
  int upper_horizon = 0;
  bool budget_exhausted = false;
};

struct VstarBudget {
  int max_upper_horizon = 4096;
  int synth_rounds = 6;
  double tol = 1e-9;
};

/// Two-sided bounds on the candidate value inf_n sup_m w_{m,n}(z): the
/// upper side from f_n at growing horizons, the lower side from certified
/// lasso synthesis. Widens effort until the gap closes or the budget runs
/// out (then the best interval is returned, flagged).
ValueInterval estimate_vstar(const Model& model, StateId z, double target_gap,
                             const VstarBudget& budget = {});

struct ChainTerm {
  std::string name;
  double value = 0.0;
  std::string direction;  // how truncation biases the surrogate
};

struct ChainReport {
  std::vector<ChainTerm> terms;
  std::vector<std::string> violations;  // empty when all sound checks hold
  bool ok() const { return violations.empty(); }
};

/// Finite surrogates for the chain of long-run quantities ordered
///   sup-inf-w <= sup-inf-v (= liminf value) <= limsup value <= inf-sup,
/// with each term's truncation direction reported, and the soundly
/// comparable pairs asserted.
ChainReport check_chain(const Model& model, StateId z, int m_probe, int n_probe,
                        double tol = 1e-9);

struct VminusReport {
  double liminf_probe = 0.0;   // min of v_n over the window [N/2, N]
  double supinf_probe = 0.0;   // max over m of windowed min of v_{m,n}
  double oscillation = 0.0;    // spread of v_n over the window
  double slack = 0.0;
  bool conclusive = false;
  bool agree = false;
};

/// Compares the liminf surrogate of v_n against the sup-inf surrogate on
/// a window where v_n visibly stabilizes; inconclusive otherwise.
VminusReport check_vminus(const Model& model, StateId z, int n_probe,
                          double tol = 1e-9);

}  // namespace longrun
