#pragma once

#include <cstdint>
#include <optional>

#include "mvpb/domain.hpp"
#include "mvpb/ensemble.hpp"

namespace mvpb {

/// How the voter pair behind disagreement / joint error is drawn. The default
/// draws the view pair (v, v') from rho^2, then both voters from Q_v, and
/// evaluates both at x^v, leaving v' inert. cross_view instead takes h from
/// Q_v at x^v and h' from Q_{v'} at x^{v'}.
enum class PairSemantics { first_view, cross_view };

/// Where a RiskProfile's numbers came from.
struct SourceTag {
  enum class Kind { exact, empirical, monte_carlo } kind = Kind::exact;
  std::size_t m = 0;        // source rows, when empirical
  std::size_t n = 0;        // target rows, when a target sample was given
  std::size_t n_draws = 0;  // draws, when monte carlo
  std::uint64_t seed = 0;   // draw seed, when monte carlo
};

/// The risk functionals of one ensemble on one domain or sample. Entries a
/// given evaluation cannot produce (label-dependent values of an unlabeled
/// sample) stay empty.
struct RiskProfile {
  std::optional<double> gibbs_risk;
  std::optional<double> mv_disagreement;
  std::optional<double> mv_joint_error;
  std::optional<double> majority_vote_risk;
  std::optional<double> domain_disagreement;  // set when a target sample is given
  SourceTag source;
};

/// Expected 0-1 risk of the Gibbs classifier, exact over the atoms.
double gibbs_risk(const PosteriorEnsemble& E, const FiniteDomain& D);

/// Expected disagreement over the domain's marginal (labels ignored).
double mv_disagreement(const PosteriorEnsemble& E, const FiniteDomain& M,
                       PairSemantics semantics = PairSemantics::first_view);

/// Expected joint error of a voter pair.
double mv_joint_error(const PosteriorEnsemble& E, const FiniteDomain& D,
                      PairSemantics semantics = PairSemantics::first_view);

/// Atom-weighted 0-1 risk of the deterministic majority vote.
double majority_vote_risk(const PosteriorEnsemble& E, const FiniteDomain& D);

/// 1 - (1 - 2 gibbs)^2 / (1 - 2 disagreement), clamped to [0, 1].
/// Requires gibbs < 1/2 and disagreement < 1/2.
double c_bound(double gibbs, double disagreement);

/// |joint_error(target) - joint_error(source)|, the incontrollable term of
/// the adaptation bounds. Needs labels on both domains.
double lambda_rho(const PosteriorEnsemble& E, const FiniteDomain& source,
                  const FiniteDomain& target,
                  PairSemantics semantics = PairSemantics::first_view);

/// |mv_disagreement(tgt) - mv_disagreement(src)|: the domain disagreement
/// pseudometric between two marginals.
double mv_domain_disagreement(const PosteriorEnsemble& E,
                              const FiniteDomain& src_marginal,
                              const FiniteDomain& tgt_marginal,
                              PairSemantics semantics = PairSemantics::first_view);

/// All four functionals over the atoms, from one pass of view margins.
RiskProfile exact_profile(const PosteriorEnsemble& E, const FiniteDomain& D,
                          PairSemantics semantics = PairSemantics::first_view);

/// Sample analogue with row weight 1/m. Label-dependent entries are present
/// iff S is labeled. The overload taking an unlabeled target sample also
/// fills domain_disagreement over (S_X, T_X).
RiskProfile empirical_profile(const PosteriorEnsemble& E, const SampleSet& S,
                              PairSemantics semantics = PairSemantics::first_view);
RiskProfile empirical_profile(const PosteriorEnsemble& E, const SampleSet& S,
                              const SampleSet& T,
                              PairSemantics semantics = PairSemantics::first_view);

enum class Quantity { gibbs_risk, mv_disagreement, mv_joint_error };

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo over the weight indices only: each draw picks (v, h) or
/// (v, h, v', h') from the posterior weights and evaluates that voter's
/// contribution exactly over the atoms or rows. Deterministic in seed.
McResult mc_estimate(Quantity q, const PosteriorEnsemble& E,
                     const FiniteDomain& D, std::size_t n_draws,
                     std::uint64_t seed,
                     PairSemantics semantics = PairSemantics::first_view);
McResult mc_estimate(Quantity q, const PosteriorEnsemble& E, const SampleSet& S,
                     std::size_t n_draws, std::uint64_t seed,
                     PairSemantics semantics = PairSemantics::first_view);

}  // namespace mvpb
