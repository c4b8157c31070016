#pragma once

#include <cstdint>
#include <vector>

#include "mvpb/domain.hpp"
#include "mvpb/measures.hpp"
#include "mvpb/rng.hpp"

namespace mvpb {

/// Decision stump on one feature of one view.
struct Voter {
  int view = 0;
  int feature = 0;
  double threshold = 0.0;
  int polarity = +1;  // in {-1, +1}

  bool operator==(const Voter&) const = default;
};

/// polarity if x.views[view][feature] >= threshold, else -polarity.
/// Throws std::out_of_range when the indices fall outside the point's shape.
int voter_predict(const Voter& h, const MultiViewPoint& x);

/// Finite voter pool, one list per view. views[v][k].view == v for all k.
struct ViewHypothesisSet {
  std::vector<std::vector<Voter>> views;

  int view_count() const noexcept { return static_cast<int>(views.size()); }
};

/// The weighted ensemble: per-view posteriors Q_v over the voter pools, a
/// hyper-posterior rho over views, and the reference priors P_v, pi the
/// divergence terms are measured against. Immutable once built.
struct PosteriorEnsemble {
  ViewHypothesisSet hypotheses;
  std::vector<Categorical> posteriors;
  Categorical hyper_posterior;
  std::vector<Categorical> priors;
  Categorical hyper_prior;
};

/// Validates support sizes and the voter/view slot correspondence.
PosteriorEnsemble make_ensemble(ViewHypothesisSet hypotheses,
                                std::vector<Categorical> posteriors,
                                Categorical hyper_posterior,
                                std::vector<Categorical> priors,
                                Categorical hyper_prior);

/// Uniform posteriors and priors everywhere.
PosteriorEnsemble uniform_ensemble(ViewHypothesisSet hypotheses);

/// Multiplies every posterior weight (and the hyper-posterior) by
/// exp(tilt * g) with g drawn uniformly from (-1, 1), then renormalizes.
/// Priors are untouched, so the divergence terms become nonzero. tilt == 0
/// returns weights bitwise equal to E's.
PosteriorEnsemble tilt_posteriors(const PosteriorEnsemble& E, double tilt,
                                  std::uint64_t seed);

/// Posterior-average prediction of view v at x: sum_h Q_v(h) h(x^v).
double view_vote_margin(const PosteriorEnsemble& E, int v,
                        const MultiViewPoint& x);

/// Double expectation sum_v rho(v) * view_vote_margin(v).
double mv_vote_margin(const PosteriorEnsemble& E, const MultiViewPoint& x);

/// Sign of mv_vote_margin; an exactly zero vote returns +1.
int mv_majority_vote(const PosteriorEnsemble& E, const MultiViewPoint& x);

/// Draws v from rho, then h from Q_v, and returns h's prediction.
int gibbs_predict(const PosteriorEnsemble& E, const MultiViewPoint& x,
                  RngStream& rng);

/// Stumps at midpoints between consecutive sorted distinct values of each
/// feature. A feature with one distinct value gets a single threshold at that
/// value. When a feature has more than per_feature candidate midpoints, an
/// evenly spaced index subset of exactly per_feature of them is kept:
/// index_j = floor((2j(M-1) + (T-1)) / (2(T-1))) over M candidates,
/// T == 1 taking the middle index M/2. Both polarities per threshold,
/// ordered: views, then features, then ascending thresholds, +1 before -1.
ViewHypothesisSet build_stump_grid(const FiniteDomain& domain, int per_feature);
ViewHypothesisSet build_stump_grid(const SampleSet& sample, int per_feature);

/// sum_v rho(v) * KL(Q_v || P_v).
double expected_view_kl(const PosteriorEnsemble& E);

/// KL(rho || pi).
double hyper_kl(const PosteriorEnsemble& E);

/// hyper_kl + expected_view_kl: the divergence of the flattened joint
/// (view, voter) posterior rho (x) Q from the flattened prior pi (x) P.
double flattened_kl(const PosteriorEnsemble& E);

}  // namespace mvpb
