#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longrun/model.hpp"

namespace longrun {

enum class Family { vn, vmn, wn, wmn, vlambda };

std::string family_name(Family family);

/// Per-state values for one member of a value family. For vn/wn only n is
/// meaningful; vmn/wmn also carry m; vlambda carries lambda.
struct ValueTable {
  Family family = Family::vn;
  int n = 0;
  int m = 0;
  double lambda = 0.0;
  std::vector<double> values;

  double at(StateId z) const { return values[static_cast<size_t>(z)]; }
};

/// n-stage average values for n = 1..n_max, all states. Uses the sum-value
/// recursion U_n(z) = max over successors z' of r(z') + U_{n-1}(z'), with
/// ascending state order so results are bit-reproducible.
std::vector<ValueTable> v_n_table(const Model& model, int n_max);

/// Shifted value: best v_n over the states reachable in exactly m steps.
/// vn_tables must cover horizon n.
double v_mn(const Model& model, StateId z, int m, int n,
            const std::vector<ValueTable>& vn_tables);

struct DiscountParams {
  double lambda = 0.5;
  double tolerance = 1e-9;
  int max_iterations = 1 << 26;
};

/// Discounted values by fixed-point iteration of
/// v(z) = max over z' of lambda*r(z') + (1-lambda)*v(z'). Stops when the
/// sup-norm step is at most tolerance*lambda, which certifies a final
/// error of at most tolerance; throws BudgetError (reporting the
/// residual) past max_iterations.
ValueTable v_lambda_table(const Model& model, const DiscountParams& params);

/// Exact discounted values via policy iteration over positional choices;
/// each evaluation follows the policy's lasso and uses the closed-form
/// geometric sums, so small lambdas cost the same as large ones.
std::vector<double> v_lambda_exact(const Model& model, double lambda);

/// Discounted payoff of a lasso play, exact in lambda: prefix sum plus
/// geometrically weighted cycle mean.
double discounted_payoff(const Model& model, const Play& play, double lambda);

/// Truncated Abel mean of a finite stream. The omitted tail has total
/// weight (1-lambda)^len, returned in tail_bound; the exact Abel mean of
/// any [0,1]-extension lies in [sum, sum + tail_bound].
double abel_mean(const std::vector<double>& stream, double lambda,
                 double* tail_bound);

struct Eq1Violation {
  StateId state = 0;
  int m = 0;
  int n = 0;
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Checks the horizon-splitting sandwich n*v_n <= (m+n)*v_{m+n} <= n*v_n + m
/// and its shifted variant on every state and every m+n covered by the
/// tables. Empty result means no violation beyond 1e-9.
std::vector<Eq1Violation> check_eq1(const Model& model,
                                    const std::vector<ValueTable>& vn_tables);

struct BlackwellResult {
  bool ok = false;
  double lambda0 = 0.0;        // largest grid point from which the play stays good
  double failing_lambda = -1;  // set when !ok
  double worst_margin = 0.0;   // min over certified grid of payoff - (v_lambda - eps)
};

/// Checks a lasso play against the discounted values on a decreasing
/// lambda grid: ok if gamma_lambda(play) >= v_lambda(origin) - epsilon for
/// every grid point at or below some lambda0. Grid-relative certificate,
/// not a proof for all lambda.
BlackwellResult blackwell_check(const Model& model, const Play& play,
                                double epsilon,
                                const std::vector<double>& lambda_grid);

/// Default lambda grid 2^-1 .. 2^-20.
std::vector<double> default_lambda_grid();

struct BruteForceResult {
  double v = 0.0;  // best shifted average over all length-(m+n) paths
  double w = 0.0;  // best shifted minimum running average
  std::int64_t nodes = 0;
};

/// Exhaustive depth-first enumeration of every path of length m+n from z.
/// The reference oracle for the value families; throws BudgetError once
/// more than node_budget path nodes are visited, never approximates.
BruteForceResult brute_force_values(const Model& model, StateId z, int m, int n,
                                    std::int64_t node_budget = 10'000'000);

}  // namespace longrun
