#pragma once

#include <cstdint>
#include <vector>

#include "longrun/model.hpp"

namespace longrun {

/// Exact long-run behaviour of a lasso's running averages. Along each
/// residue class modulo the cycle length, gamma_{T+C} lies between
/// gamma_T and the cycle mean, so the first prefix+cycle horizons
/// determine the infimum and supremum over all T.
struct LassoStats {
  double cycle_mean = 0.0;
  double min_average = 0.0;   // inf over all T >= 1 of gamma_T
  double max_average = 0.0;   // sup over all T >= 1 of gamma_T
  std::int64_t argmin_T = 0;  // horizon attaining the scanned minimum
};

LassoStats lasso_stats(const Model& model, const Play& lasso);

struct GuaranteeReport {
  Play play;
  double level = 0.0;
  double epsilon = 0.0;
  std::int64_t checked_horizon = 0;  // horizons scanned exhaustively
  double tail_bound_slack = 0.0;     // cycle_mean - (level - epsilon)
  bool pass = false;
  std::int64_t failing_T = -1;       // first violating horizon when !pass
};

/// Certifies gamma_T(play) >= level - epsilon for every T >= 1. Horizons
/// 1..prefix+cycle are checked exhaustively; beyond them the running
/// averages move monotonically toward the cycle mean within each residue
/// class, which closes the argument when the cycle mean itself clears the
/// target. Fails fast when it does not.
GuaranteeReport verify_guarantee(const Model& model, const Play& lasso,
                                 double level, double epsilon);

/// One block of the synthesis loop: after m repositioning steps the next
/// n steps keep all running averages near the target, and the block ends
/// in a state whose own certified value is nearly as good.
struct BlockCertificate {
  int m = 0;
  int n = 0;
  std::vector<StateId> prefix;  // the m+n visited states
  double nu_value = 0.0;        // re-evaluated min running average after the shift
  double target_value = 0.0;    // certified lower bound at the terminal state
  StateId terminal = 0;
};

/// Searches m = 0..m_bound for a block at z meeting
///   nu >= lower_bounds[z] - epsilon/2   and
///   lower_bounds[terminal] >= lower_bounds[z] - epsilon.
/// The play is extracted from the min-average optimum at horizon 2n and
/// truncated to m+n steps. Throws BudgetError when no m qualifies.
BlockCertificate find_block(const Model& model, StateId z, double epsilon,
                            int m_bound, int n_request,
                            const std::vector<double>& lower_bounds,
                            double tol = 1e-9);

/// A certified lasso at one state, found by closing a repeated-state
/// segment of a min-average-optimal play. level is the cycle mean (the
/// payoff the lasso secures in the long run); min_average is the exact
/// worst running average over all horizons.
struct CertifiedLasso {
  double level = 0.0;
  double min_average = 0.0;
  Play lasso;
};

/// prefer_floor picks the closure maximizing the all-horizon floor
/// instead of the long-run level.
CertifiedLasso best_certified_lasso(const Model& model, StateId z, int n_probe,
                                    double tol = 1e-9,
                                    bool prefer_floor = false);

struct SynthesisOptions {
  int base_horizon = 32;     // first block's n before the schedule scales it
  int max_blocks = 64;
  int max_rounds = 8;        // effort-doubling rounds
  int upper_horizon = 4096;  // cap for the stopping-rule upper bound
  double tol = 1e-9;
};

struct SynthesisResult {
  Play lasso;
  GuaranteeReport report;
  double upper_bound = 1.0;  // the bound the stopping rule compared against
  int blocks_used = 0;
  bool target_met = false;   // level >= (upper - alpha)/(1 + alpha)
};

/// Builds an alpha-good play by blocks with epsilon_i = alpha/2^i and a
/// doubling horizon schedule; on a finite model the block terminals must
/// repeat, at which point the construction closes into a lasso. Candidate
/// closures are kept and the search widens until the certified level
/// reaches (U - alpha)/(1 + alpha) for a computed upper bound U, so a
/// result with target_met always clears the guarantee it reports.
SynthesisResult synthesize(const Model& model, StateId z, double alpha,
                           const SynthesisOptions& options = {});

/// Shortens a finite play that held level within epsilon on its window:
/// either a repeated state pair with segment average >= level - 2*epsilon
/// is closed into a cyclic lasso, or the play is compressed (always
/// re-entering each state at its last visit) into one with all-distinct
/// states and weakly improved averages.
Play shorten(const Model& model, const Play& prefix_play, double epsilon,
             double level);

}  // namespace longrun
