#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace mvpb {

/// Shared inputs of every bound evaluator. The divergence values are computed
/// elsewhere (ensemble / measures) and passed in; evaluators are pure
/// arithmetic in these numbers.
struct BoundParams {
  std::size_t m = 1;      // source sample size
  std::size_t n = 1;      // target sample size (two-sample bound only)
  double delta = 1.0;     // confidence, in (0, 1]
  double c = 1.0;         // Catoni trade-off, > 0
  double alpha = 1.0;     // disagreement trade-off, > 0
  double kl_posterior = 0.0;  // E_{v~rho} KL(Q_v || P_v)
  double kl_hyper = 0.0;      // KL(rho || pi)
  std::optional<double> renyi_alpha;       // order for the Renyi form, > 1
  std::optional<double> renyi_divergence;  // D_alpha value for the Renyi form
};

void validate_params(const BoundParams& p);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// One evaluated bound. rhs is reported as computed and may exceed 1;
/// rhs_clamped cuts it to [0, 1] and vacuous flags rhs >= 1 (or non-finite).
/// interval is the two-sided certainty range when the bound has one, else
/// [0, rhs_clamped].
struct BoundReport {
  std::string bound_id;
  std::string lhs;    // what quantity the rhs bounds
  double emp_value = 0.0;
  double lambda = 0.0;
  double rhs = 0.0;
  double rhs_clamped = 0.0;
  std::optional<double> deviation;  // for symmetric-deviation bounds
  Interval interval;
  bool vacuous = false;
  std::string note;
  BoundParams params;
};

/// c / (1 - e^{-c}); below 1e-8 the series limit 1 + c/2 avoids cancellation.
double catoni_coefficient(double c);

/// The exponential-moment cap 2*sqrt(m) used by the quadratic and kl forms.
inline double maurer_moment(std::size_t m) {
  return 2.0 * std::sqrt(static_cast<double>(m));
}

/// emp + sqrt((kl_posterior + ln(2 sqrt(m)/delta)) / (2m)).
BoundReport mcallester_bound(double emp, const BoundParams& p);

/// kl(emp || r) <= (kl_posterior + ln(2 sqrt(m)/delta)) / m, inverted to an
/// interval around emp.
BoundReport seeger_bound(double emp, const BoundParams& p);

/// c' * [emp + (kl_posterior + ln(1/delta)) / (m c)] with c' the Catoni
/// coefficient.
BoundReport catoni_bound(double emp, const BoundParams& p);

/// Single-view disagreement bound
/// a' * [emp + (2 kl_posterior + ln(2/delta)) / (m alpha) + 1] - 1 with
/// a' = catoni_coefficient(2 alpha).
BoundReport germain_dis_bound(double emp_dis, const BoundParams& p);

/// Population-level adaptation bound: gibbs_src + dis/2 + lambda.
BoundReport da_bound_population(double gibbs_src, double dis, double lambda);

/// Deviation shape a bound is inverted through.
enum class DeltaFn { quadratic, kl, catoni };

/// Change-of-measure form behind general_delta_bound. germain and goyal share
/// the KL budget (goyal is the expected-over-samples reading); begin spends a
/// Renyi divergence instead and needs renyi_alpha / renyi_divergence.
enum class BoundForm { germain, begin, goyal };

/// Which quantity the budget is built for: plain Gibbs risk, or the
/// multi-view disagreement whose budget doubles both KL terms.
enum class BoundInstance { gibbs, mv_disagreement };

/// Evaluates the general bound: budget
///   B = (KLs + ln(moment_bound/delta)) / m        (germain / goyal)
///   B = exp((D_a + ln(moment_bound/delta)) / a'), a' = a/(a-1)   (begin)
/// with KLs doubled under the mv_disagreement instance, then inverts the
/// chosen DeltaFn: quadratic 2(a-b)^2 gives a sqrt(B/2) deviation, kl gives a
/// kl-inverse interval, catoni gives c'(emp + B/c).
BoundReport general_delta_bound(double emp, DeltaFn delta_fn,
                                double moment_bound, const BoundParams& p,
                                BoundForm form,
                                BoundInstance instance = BoundInstance::gibbs);

/// Multi-view disagreement bounds, budgets doubling both KL terms.
/// Deviation sqrt((2 KLp + 2 KLh + ln(2 sqrt(m)/delta)) / (2m)).
BoundReport dis_mcallester_bound(double emp_dis, const BoundParams& p);

/// a' * [emp_dis + (KLp + KLh + ln(sqrt(1/delta))) / (m alpha)].
BoundReport dis_catoni_bound(double emp_dis, const BoundParams& p);

/// kl(emp_dis || d) <= (2 KLp + 2 KLh + ln(2 sqrt(m)/delta)) / m, inverted.
BoundReport dis_kl_bound(double emp_dis, const BoundParams& p);

/// Unequal sample sizes: the dis_mcallester radical at m plus the same
/// radical at n.
BoundReport dis_two_sample_bound(double emp_dis, const BoundParams& p);

/// c' * [emp_gibbs + (KLp + KLh + ln(1/delta)) / (m c)].
BoundReport mv_gibbs_catoni_bound(double emp_gibbs, const BoundParams& p);

/// Full empirical adaptation bound:
/// c' emp_gibbs + a' emp_dis/2 + (c'/c + a'/alpha)(KLp + KLh + ln(1/delta))/m
///   + lambda + (a' - 1)/2.
BoundReport da_catoni_bound(double emp_gibbs_src, double emp_dis, double lambda,
                            const BoundParams& p);

}  // namespace mvpb
