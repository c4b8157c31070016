#pragma once

#include <cstdint>
#include <string>

#include "mvpb/bounds.hpp"
#include "mvpb/domain.hpp"
#include "mvpb/ensemble.hpp"
#include "mvpb/risks.hpp"

namespace mvpb {

/// Every population quantity of one (ensemble, source, target) triple,
/// computed by literal enumeration with no algebraic shortcuts. This is the
/// ground truth the statistical certification compares against.
struct ExactQuantities {
  double gibbs_src = 0.0;
  double gibbs_tgt = 0.0;
  double dis_src = 0.0;    // expected disagreement on each marginal
  double dis_tgt = 0.0;
  double joint_src = 0.0;  // expected joint error on each domain
  double joint_tgt = 0.0;
  double mv_risk_src = 0.0;
  double mv_risk_tgt = 0.0;
  double domain_dis = 0.0;  // |dis_tgt - dis_src|
  double lambda = 0.0;      // |joint_tgt - joint_src|
};

/// Full quadruple-loop enumeration over atoms x view pairs x voter pairs.
/// Throws when the evaluation count exceeds cap.
ExactQuantities exact_oracle(const PosteriorEnsemble& E, const FiniteDomain& src,
                             const FiniteDomain& tgt,
                             PairSemantics semantics = PairSemantics::first_view,
                             std::size_t cap = 10'000'000);

/// Quantities whose over-samples expectation can be estimated.
enum class SampleQuantity { gibbs, disagreement, joint_error, domain_disagreement };

/// Mean over `trials` of the empirical quantity on fresh size-m (and size-n)
/// i.i.d. samples, with the trial's draw seeds derived from (seed, trial).
/// domain_disagreement needs tgt; the others use src only.
McResult estimate_sample_expectation(SampleQuantity q, const PosteriorEnsemble& E,
                                     const FiniteDomain& src,
                                     const FiniteDomain* tgt, std::size_t m,
                                     std::size_t n, std::size_t trials,
                                     std::uint64_t seed,
                                     PairSemantics semantics = PairSemantics::first_view);

/// The two operational readings of "with probability at least 1 - delta":
/// per_sample tests the bound on each drawn sample; expectation replaces the
/// empirical inputs with their estimated expectations and tests once.
enum class Reading { per_sample, expectation };

struct CertificationResult {
  std::string bound_id;
  BoundParams params;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double rate = 0.0;
  Interval wilson_ci;
  std::uint64_t seed = 0;
  Reading reading = Reading::per_sample;
  bool pass = false;
};

/// Wilson 95% score interval for a violation count.
Interval wilson_interval(std::size_t violations, std::size_t trials);

/// Statistical certification of one bound on one instance. Per trial: draw
/// the samples the bound consumes, evaluate its rhs from their empirical
/// values, and compare against the exact population lhs; a violation is
/// lhs > rhs + 1e-12. Per-sample pass means rate <= delta and the Wilson
/// upper limit <= delta + 0.03; expectation reading passes iff its single
/// inequality holds. bound ids: mcallester, seeger, catoni, germain_dis
/// (these four consume the flattened divergence KL(rho (x) Q || pi (x) P)),
/// dis_mcallester, dis_catoni, dis_kl, dis_two_sample, mv_gibbs_catoni,
/// da_catoni. threads = 0 uses the hardware count.
CertificationResult certify_bound(const std::string& bound_id,
                                  const PosteriorEnsemble& E,
                                  const FiniteDomain& src,
                                  const FiniteDomain& tgt, const BoundParams& p,
                                  std::size_t trials, std::uint64_t seed,
                                  Reading reading = Reading::per_sample,
                                  PairSemantics semantics = PairSemantics::first_view,
                                  int threads = 1,
                                  std::size_t oracle_cap = 10'000'000);

struct MaurerCheck {
  double estimate = 0.0;   // of E[exp(m kl(mean of m Bernoulli(mu) || mu))]
  double std_error = 0.0;
  double band_lo = 0.0;    // sqrt(m)
  double band_hi = 0.0;    // 2 sqrt(m)
  bool pass = false;
  bool degenerate = false;  // mu in {0,1}: the lower inequality cannot hold
};

/// Checks the binomial exponential-moment band sqrt(m) <= E[e^{m kl}] <=
/// 2 sqrt(m) by importance sampling with a uniform proposal over the m+1
/// outcomes (a plain binomial draw concentrates on too few outcomes to see
/// the moment). pass iff estimate is inside the band within 3 std errors.
MaurerCheck maurer_check(std::size_t m, double mu, std::size_t trials,
                         std::uint64_t seed);

/// Synthetic test-bed: a shifted domain pair plus a stump ensemble built on
/// the source atoms, optionally tilted away from the uniform priors.
struct InstanceSpec {
  ShiftSpec shift;
  int thresholds_per_feature = 3;
  double tilt = 0.0;
  std::uint64_t tilt_seed = 0;
};

struct Instance {
  FiniteDomain source;
  FiniteDomain target;
  PosteriorEnsemble ensemble;
};

Instance make_instance(const InstanceSpec& spec);

/// The fixed certification instance: V=2 with two features per view, 20
/// atoms per domain, shift 0.3, seed 42, 3 thresholds per feature, posterior
/// tilt 0.3 with seed 1042.
Instance canonical_instance();

}  // namespace mvpb
