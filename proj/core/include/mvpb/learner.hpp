#pragma once

#include <cstdint>
#include <vector>

#include "mvpb/bounds.hpp"
#include "mvpb/domain.hpp"
#include "mvpb/ensemble.hpp"

namespace mvpb {

struct LearnStep {
  std::size_t iter = 0;
  double objective = 0.0;
  double eta = 0.0;
  bool accepted = false;
};

/// Optimization record. steps[0] is the starting objective; iterations
/// follow, every accepted row's objective nonincreasing. final_ensemble
/// carries the weights of the last accepted step.
struct LearnTrace {
  std::vector<LearnStep> steps;
  PosteriorEnsemble final_ensemble;
};

/// Minimizes the empirical adaptation bound (the da_catoni rhs with the
/// unobservable lambda term dropped) over all posterior weight vectors
/// ({Q_v} and rho jointly) by exponentiated gradient: multiplicative-weights
/// steps along a central finite-difference gradient projected to each
/// simplex's tangent, with backtracking (eta halved up to 20 times) so the
/// accepted objective sequence never increases. Priors and the divergence
/// penalties they define stay fixed. Stops at max_iters or when the relative
/// improvement drops below 1e-9. Deterministic; seed is recorded for config
/// plumbing but the descent draws no randomness.
LearnTrace minimize_da_bound(const PosteriorEnsemble& E0, const SampleSet& S,
                             const SampleSet& T_X, const BoundParams& p,
                             std::size_t max_iters, double eta0,
                             std::uint64_t seed);

}  // namespace mvpb
