#pragma once

#include <vector>

#include "longrun/model.hpp"

namespace longrun {

struct MeanCycle {
  double mean = 0.0;
  std::vector<StateId> cycle;  // states in visiting order
};

/// Maximum mean cycle among the states reachable from z. Reference
/// implementation kept independent of the value/synthesis code paths:
/// exhaustive simple-cycle enumeration up to enumeration_limit states,
/// policy-improvement (Howard) iteration above it.
MeanCycle max_mean_cycle(const Model& model, StateId z,
                         int enumeration_limit = 12);

}  // namespace longrun
