#pragma once

#include <vector>

#include "longrun/model.hpp"

namespace longrun {

/// A probability vector over a finite hidden-state set.
using Belief = std::vector<double>;

struct WeightedBelief {
  Belief belief;
  double weight = 0.0;
};

/// Finitely supported probability measure over beliefs. Canonical form:
/// beliefs rounded to 12 decimal digits, atoms sorted lexicographically,
/// equal beliefs merged with weights accumulated in sorted order, zero
/// weights dropped.
struct SupportedMeasure {
  std::vector<WeightedBelief> atoms;

  int support_size() const { return static_cast<int>(atoms.size()); }
};

/// L1 distance between beliefs (the ground metric).
double belief_l1(const Belief& a, const Belief& b);

void validate_belief(const Belief& p);

SupportedMeasure canonicalize(std::vector<WeightedBelief> atoms);
void validate_measure(const SupportedMeasure& u);

/// Dirac measure at one belief.
SupportedMeasure dirac(const Belief& p);

/// Convex combination lambda*u + (1-lambda)*v, canonical.
SupportedMeasure mix(const SupportedMeasure& u, const SupportedMeasure& v,
                     double lambda);

struct TransportStats {
  double cost = 0.0;
  double dual_residual = 0.0;  // worst dual-feasibility violation
  int augmentations = 0;
};

/// Wasserstein-1 distance between finitely supported measures, solved as
/// an exact transportation problem (successive shortest paths with
/// potentials) under the L1 ground metric. Throws BudgetError if the
/// augmentation cap is hit.
double wasserstein1(const SupportedMeasure& u, const SupportedMeasure& v,
                    TransportStats* stats = nullptr);

}  // namespace longrun
