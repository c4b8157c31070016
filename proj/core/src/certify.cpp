#include "mvpb/certify.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mvpb/errors.hpp"
#include "mvpb/parallel.hpp"
#include "mvpb/rng.hpp"

namespace mvpb {

namespace {

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double t = x - comp;
    double s = sum + t;
    comp = (s - sum) - t;
    sum = s;
  }
};

constexpr double kViolationTol = 1e-12;
constexpr double kWilsonMargin = 0.03;
constexpr double kZ95 = 1.959963984540054;

int predict(const Voter& h, const MultiViewPoint& x) {
  return x.views[h.view][h.feature] >= h.threshold ? h.polarity : -h.polarity;
}

// Single-domain quantities by literal enumeration: no margin identities, no
// collapsed pair loops. Intentionally independent of the risks module so the
// two implementations check each other.
struct DomainExact {
  double gibbs = 0.0;
  double dis = 0.0;
  double joint = 0.0;
  double mv_risk = 0.0;
};

DomainExact enumerate_domain(const PosteriorEnsemble& E, const FiniteDomain& D,
                             PairSemantics sem) {
  const int V = E.hypotheses.view_count();
  Kahan gibbs, dis, joint, mv;
  for (std::size_t i = 0; i < D.size(); ++i) {
    const Atom& a = D.atom(i);
    const MultiViewPoint& x = a.point;
    const double w = a.probability;

    Kahan g;
    for (int v = 0; v < V; ++v) {
      const std::vector<Voter>& hv = E.hypotheses.views[v];
      for (std::size_t k = 0; k < hv.size(); ++k) {
        if (predict(hv[k], x) != a.label)
          g.add(E.hyper_posterior[v] * E.posteriors[v][k]);
      }
    }
    gibbs.add(w * g.sum);

    Kahan d, e;
    for (int v = 0; v < V; ++v) {
      for (int v2 = 0; v2 < V; ++v2) {
        double pair_w = E.hyper_posterior[v] * E.hyper_posterior[v2];
        // Under first_view semantics the second voter is drawn from Q_v and,
        // carrying view index v, evaluates at x^v; under cross_view it comes
        // from Q_{v2} and evaluates at x^{v2}.
        int vb = sem == PairSemantics::first_view ? v : v2;
        const std::vector<Voter>& first = E.hypotheses.views[v];
        const std::vector<Voter>& second = E.hypotheses.views[vb];
        for (std::size_t k = 0; k < first.size(); ++k) {
          int p1 = predict(first[k], x);
          bool e1 = p1 != a.label;
          for (std::size_t k2 = 0; k2 < second.size(); ++k2) {
            int p2 = predict(second[k2], x);
            double ww = pair_w * E.posteriors[v][k] * E.posteriors[vb][k2];
            if (p1 != p2) d.add(ww);
            if (e1 && p2 != a.label) e.add(ww);
          }
        }
      }
    }
    dis.add(w * d.sum);
    joint.add(w * e.sum);

    Kahan vote;
    for (int v = 0; v < V; ++v) {
      const std::vector<Voter>& hv = E.hypotheses.views[v];
      for (std::size_t k = 0; k < hv.size(); ++k)
        vote.add(E.hyper_posterior[v] * E.posteriors[v][k] *
                 static_cast<double>(predict(hv[k], x)));
    }
    int b = vote.sum < 0.0 ? -1 : +1;
    mv.add(w * (b == a.label ? 0.0 : 1.0));
  }
  return DomainExact{gibbs.sum, dis.sum, joint.sum, mv.sum};
}

std::size_t pair_evaluations(const PosteriorEnsemble& E, std::size_t atoms) {
  std::size_t per_point = 0;
  for (const auto& hv : E.hypotheses.views)
    for (const auto& hv2 : E.hypotheses.views)
      per_point += hv.size() * hv2.size();
  return atoms * per_point;
}

}  // namespace

ExactQuantities exact_oracle(const PosteriorEnsemble& E, const FiniteDomain& src,
                             const FiniteDomain& tgt, PairSemantics semantics,
                             std::size_t cap) {
  if (!(src.schema() == tgt.schema()))
    throw SchemaMismatch("source and target schemas differ");
  if (E.hypotheses.view_count() != src.schema().views())
    throw SchemaMismatch("ensemble view count does not match domains");
  std::size_t work = pair_evaluations(E, src.size() + tgt.size());
  if (work > cap)
    throw std::invalid_argument("enumeration size exceeds the oracle cap");

  DomainExact s = enumerate_domain(E, src, semantics);
  DomainExact t = enumerate_domain(E, tgt, semantics);
  ExactQuantities q;
  q.gibbs_src = s.gibbs;
  q.gibbs_tgt = t.gibbs;
  q.dis_src = s.dis;
  q.dis_tgt = t.dis;
  q.joint_src = s.joint;
  q.joint_tgt = t.joint;
  q.mv_risk_src = s.mv_risk;
  q.mv_risk_tgt = t.mv_risk;
  q.domain_dis = std::fabs(t.dis - s.dis);
  q.lambda = std::fabs(t.joint - s.joint);
  return q;
}

namespace {

double empirical_quantity(SampleQuantity q, const PosteriorEnsemble& E,
                          const FiniteDomain& src, const FiniteDomain* tgt,
                          std::size_t m, std::size_t n, std::uint64_t s_seed,
                          std::uint64_t t_seed, PairSemantics sem) {
  switch (q) {
    case SampleQuantity::gibbs: {
      SampleSet S = draw_sample(src, m, true, s_seed);
      return *empirical_profile(E, S, sem).gibbs_risk;
    }
    case SampleQuantity::disagreement: {
      SampleSet S = draw_sample(src, m, false, s_seed);
      return *empirical_profile(E, S, sem).mv_disagreement;
    }
    case SampleQuantity::joint_error: {
      SampleSet S = draw_sample(src, m, true, s_seed);
      return *empirical_profile(E, S, sem).mv_joint_error;
    }
    case SampleQuantity::domain_disagreement: {
      if (tgt == nullptr)
        throw std::invalid_argument("domain_disagreement needs a target domain");
      SampleSet S = draw_sample(src, m, false, s_seed);
      SampleSet T = draw_sample(*tgt, n, false, t_seed);
      return *empirical_profile(E, S, T, sem).domain_disagreement;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

McResult estimate_sample_expectation(SampleQuantity q, const PosteriorEnsemble& E,
                                     const FiniteDomain& src,
                                     const FiniteDomain* tgt, std::size_t m,
                                     std::size_t n, std::size_t trials,
                                     std::uint64_t seed,
                                     PairSemantics semantics) {
  if (trials < 2) throw std::invalid_argument("need trials >= 2");
  std::vector<double> vals(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    vals[t] = empirical_quantity(q, E, src, tgt, m, n,
                                 counter_bits(seed, 2 * t),
                                 counter_bits(seed, 2 * t + 1), semantics);
  }
  Kahan mean_acc;
  for (double v : vals) mean_acc.add(v);
  double mean = mean_acc.sum / static_cast<double>(trials);
  Kahan ss;
  for (double v : vals) ss.add((v - mean) * (v - mean));
  double var = ss.sum / static_cast<double>(trials - 1);
  return McResult{mean, std::sqrt(var / static_cast<double>(trials))};
}

Interval wilson_interval(std::size_t violations, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("need trials >= 1");
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(violations) / n;
  double z2 = kZ95 * kZ95;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = kZ95 *
                std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  double lo = center - half;
  double hi = center + half;
  // At the extremes center and half are equal in exact arithmetic; clear the
  // rounding residue so the endpoint is exact.
  if (violations == 0) lo = 0.0;
  if (violations == trials) hi = 1.0;
  if (lo < 0.0) lo = 0.0;
  if (hi > 1.0) hi = 1.0;
  return Interval{lo, hi};
}

namespace {

// What one bound consumes per trial and which exact quantity it must cover.
struct TrialPlan {
  bool needs_labeled_source = false;  // empirical Gibbs risk over S
  bool needs_source_marginal = false; // empirical disagreement over S_X
  bool needs_target_marginal = false; // empirical disagreement over T_X
  bool flattened = false;             // single-view reading of the divergences
  double lhs = 0.0;
};

TrialPlan plan_for(const std::string& id, const ExactQuantities& exact) {
  TrialPlan plan;
  if (id == "mcallester" || id == "seeger" || id == "catoni") {
    plan.needs_labeled_source = true;
    plan.flattened = true;
    plan.lhs = exact.gibbs_src;
  } else if (id == "germain_dis") {
    plan.needs_source_marginal = true;
    plan.flattened = true;
    plan.lhs = exact.dis_src;
  } else if (id == "dis_mcallester" || id == "dis_catoni" || id == "dis_kl" ||
             id == "dis_two_sample") {
    plan.needs_source_marginal = true;
    plan.needs_target_marginal = true;
    plan.lhs = exact.domain_dis;
  } else if (id == "mv_gibbs_catoni") {
    plan.needs_labeled_source = true;
    plan.lhs = exact.gibbs_src;
  } else if (id == "da_catoni") {
    plan.needs_labeled_source = true;
    plan.needs_target_marginal = true;
    plan.lhs = exact.gibbs_tgt;
  } else {
    throw std::invalid_argument("unknown bound id: " + id);
  }
  return plan;
}

double rhs_for(const std::string& id, double emp_primary, double emp_dis,
               double lambda, const BoundParams& p) {
  if (id == "mcallester") return mcallester_bound(emp_primary, p).rhs;
  if (id == "seeger") return seeger_bound(emp_primary, p).rhs;
  if (id == "catoni") return catoni_bound(emp_primary, p).rhs;
  if (id == "germain_dis") return germain_dis_bound(emp_primary, p).rhs;
  if (id == "dis_mcallester") return dis_mcallester_bound(emp_primary, p).rhs;
  if (id == "dis_catoni") return dis_catoni_bound(emp_primary, p).rhs;
  if (id == "dis_kl") return dis_kl_bound(emp_primary, p).rhs;
  if (id == "dis_two_sample") return dis_two_sample_bound(emp_primary, p).rhs;
  if (id == "mv_gibbs_catoni") return mv_gibbs_catoni_bound(emp_primary, p).rhs;
  if (id == "da_catoni")
    return da_catoni_bound(emp_primary, emp_dis, lambda, p).rhs;
  throw std::invalid_argument("unknown bound id: " + id);
}

}  // namespace

CertificationResult certify_bound(const std::string& bound_id,
                                  const PosteriorEnsemble& E,
                                  const FiniteDomain& src,
                                  const FiniteDomain& tgt, const BoundParams& p,
                                  std::size_t trials, std::uint64_t seed,
                                  Reading reading, PairSemantics semantics,
                                  int threads, std::size_t oracle_cap) {
  if (trials < 1) throw std::invalid_argument("need trials >= 1");
  ExactQuantities exact = exact_oracle(E, src, tgt, semantics, oracle_cap);
  TrialPlan plan = plan_for(bound_id, exact);

  BoundParams used = p;
  if (plan.flattened) {
    used.kl_posterior = flattened_kl(E);
    used.kl_hyper = 0.0;
  } else {
    used.kl_posterior = expected_view_kl(E);
    used.kl_hyper = hyper_kl(E);
  }

  CertificationResult result;
  result.bound_id = bound_id;
  result.params = used;
  result.trials = trials;
  result.seed = seed;
  result.reading = reading;

  const bool is_da = bound_id == "da_catoni";
  const double lambda = is_da ? exact.lambda : 0.0;

  if (reading == Reading::expectation) {
    double emp_primary = 0.0;
    double emp_dis = 0.0;
    if (plan.needs_labeled_source) {
      emp_primary = estimate_sample_expectation(SampleQuantity::gibbs, E, src,
                                                nullptr, used.m, used.n, trials,
                                                seed, semantics)
                        .estimate;
    } else {
      // Disagreement-type bounds: the primary input is over S_X alone or the
      // (S_X, T_X) pair.
      SampleQuantity q = plan.needs_target_marginal
                             ? SampleQuantity::domain_disagreement
                             : SampleQuantity::disagreement;
      emp_primary = estimate_sample_expectation(q, E, src,
                                                plan.needs_target_marginal
                                                    ? &tgt
                                                    : nullptr,
                                                used.m, used.n, trials, seed,
                                                semantics)
                        .estimate;
    }
    if (is_da) {
      emp_dis = estimate_sample_expectation(SampleQuantity::domain_disagreement,
                                            E, src, &tgt, used.m, used.n,
                                            trials, seed, semantics)
                    .estimate;
    }
    double rhs = rhs_for(bound_id, emp_primary, emp_dis, lambda, used);
    bool violated = plan.lhs > rhs + kViolationTol;
    result.violations = violated ? 1 : 0;
    result.rate = violated ? 1.0 : 0.0;
    result.wilson_ci = Interval{result.rate, result.rate};
    result.pass = !violated;
    return result;
  }

  std::vector<char> violated(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    std::uint64_t s_seed = counter_bits(seed, 2 * t);
    std::uint64_t t_seed = counter_bits(seed, 2 * t + 1);
    double emp_primary = 0.0;
    double emp_dis = 0.0;
    if (is_da) {
      SampleSet S = draw_sample(src, used.m, true, s_seed);
      SampleSet T = draw_sample(tgt, used.n, false, t_seed);
      RiskProfile prof = empirical_profile(E, S, T, semantics);
      emp_primary = *prof.gibbs_risk;
      emp_dis = *prof.domain_disagreement;
    } else if (plan.needs_labeled_source) {
      SampleSet S = draw_sample(src, used.m, true, s_seed);
      emp_primary = *empirical_profile(E, S, semantics).gibbs_risk;
    } else if (plan.needs_target_marginal) {
      SampleSet S = draw_sample(src, used.m, false, s_seed);
      SampleSet T = draw_sample(tgt, used.n, false, t_seed);
      emp_primary = *empirical_profile(E, S, T, semantics).domain_disagreement;
    } else {
      SampleSet S = draw_sample(src, used.m, false, s_seed);
      emp_primary = *empirical_profile(E, S, semantics).mv_disagreement;
    }
    double rhs = rhs_for(bound_id, emp_primary, emp_dis, lambda, used);
    violated[t] = plan.lhs > rhs + kViolationTol ? 1 : 0;
  });

  std::size_t count = 0;
  for (char v : violated) count += static_cast<std::size_t>(v);
  result.violations = count;
  result.rate = static_cast<double>(count) / static_cast<double>(trials);
  result.wilson_ci = wilson_interval(count, trials);
  result.pass = result.rate <= used.delta &&
                result.wilson_ci.hi <= used.delta + kWilsonMargin;
  return result;
}

MaurerCheck maurer_check(std::size_t m, double mu, std::size_t trials,
                         std::uint64_t seed) {
  if (m < 8) throw std::invalid_argument("need m >= 8");
  if (trials < 2) throw std::invalid_argument("need trials >= 2");
  MaurerCheck r;
  r.band_lo = std::sqrt(static_cast<double>(m));
  r.band_hi = 2.0 * r.band_lo;
  if (!(mu > 0.0 && mu < 1.0)) {
    // The sample mean is almost surely mu, the divergence is identically
    // zero, and the moment collapses to 1, below the band.
    r.estimate = 1.0;
    r.degenerate = true;
    r.pass = false;
    return r;
  }

  const double md = static_cast<double>(m);
  const double lgm = std::lgamma(md + 1.0);
  // Uniform proposal over the m+1 outcomes; the weight of outcome k is
  // (m+1) P[K=k] e^{m kl(k/m || mu)}, which stays bounded by m+1, so the
  // sample variance (and the reported standard error) is honest.
  std::vector<double> weights(trials);
  RngStream rng(seed);
  Kahan mean_acc;
  for (std::size_t t = 0; t < trials; ++t) {
    double u = rng.next_unit();
    std::size_t k = static_cast<std::size_t>(u * (md + 1.0));
    if (k > m) k = m;
    double kd = static_cast<double>(k);
    double ln_pmf = lgm - std::lgamma(kd + 1.0) - std::lgamma(md - kd + 1.0) +
                    kd * std::log(mu) + (md - kd) * std::log1p(-mu);
    double w = std::exp(std::log(md + 1.0) + ln_pmf +
                        md * kl_bernoulli(kd / md, mu));
    weights[t] = w;
    mean_acc.add(w);
  }
  double mean = mean_acc.sum / static_cast<double>(trials);
  Kahan ss;
  for (double w : weights) ss.add((w - mean) * (w - mean));
  double var = ss.sum / static_cast<double>(trials - 1);
  r.estimate = mean;
  r.std_error = std::sqrt(var / static_cast<double>(trials));
  r.pass = mean >= r.band_lo - 3.0 * r.std_error &&
           mean <= r.band_hi + 3.0 * r.std_error;
  return r;
}

Instance make_instance(const InstanceSpec& spec) {
  auto [src, tgt] = synth_shift_pair(spec.shift);
  ViewHypothesisSet grid = build_stump_grid(src, spec.thresholds_per_feature);
  PosteriorEnsemble E = uniform_ensemble(std::move(grid));
  if (spec.tilt != 0.0) E = tilt_posteriors(E, spec.tilt, spec.tilt_seed);
  return Instance{std::move(src), std::move(tgt), std::move(E)};
}

Instance canonical_instance() {
  InstanceSpec spec;
  spec.shift = ShiftSpec{{2, 2}, 20, 0.3, {}, 42};
  spec.thresholds_per_feature = 3;
  spec.tilt = 0.3;
  spec.tilt_seed = 1042;
  return make_instance(spec);
}

}  // namespace mvpb
