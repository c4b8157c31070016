#include "mvpb/bounds.hpp"

#include <stdexcept>

#include "mvpb/measures.hpp"

namespace mvpb {

void validate_params(const BoundParams& p) {
  if (p.m < 1 || p.n < 1) throw std::invalid_argument("sample sizes must be >= 1");
  if (!(p.delta > 0.0 && p.delta <= 1.0))
    throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(p.c > 0.0)) throw std::invalid_argument("c must be positive");
  if (!(p.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(p.kl_posterior >= 0.0) || !(p.kl_hyper >= 0.0))
    throw std::invalid_argument("divergences must be nonnegative");
  if (p.renyi_alpha && !(*p.renyi_alpha > 1.0))
    throw std::invalid_argument("renyi_alpha must exceed 1");
}

double catoni_coefficient(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (c < 1e-8) return 1.0 + c / 2.0;
  return c / (-std::expm1(-c));
}

namespace {

double clamp01(double x) {
  if (!(x > 0.0)) return 0.0;
  if (x > 1.0) return 1.0;
  return x;
}

BoundReport base_report(std::string id, std::string lhs, double emp,
                        const BoundParams& p) {
  BoundReport r;
  r.bound_id = std::move(id);
  r.lhs = std::move(lhs);
  r.emp_value = emp;
  r.params = p;
  return r;
}

// rhs may be +infinity when a divergence was; the report then carries it
// as-is and is flagged vacuous.
void finish_upper(BoundReport& r, double rhs) {
  r.rhs = rhs;
  r.rhs_clamped = clamp01(rhs);
  r.interval = Interval{0.0, r.rhs_clamped};
  r.vacuous = !(rhs < 1.0);
}

void finish_deviation(BoundReport& r, double emp, double dev) {
  r.deviation = dev;
  r.rhs = emp + dev;
  r.rhs_clamped = clamp01(r.rhs);
  r.interval = Interval{clamp01(emp - dev), r.rhs_clamped};
  r.vacuous = !(r.rhs < 1.0);
}

void finish_interval(BoundReport& r, const Interval& iv) {
  r.rhs = iv.hi;
  r.rhs_clamped = clamp01(iv.hi);
  r.interval = Interval{clamp01(iv.lo), r.rhs_clamped};
  r.vacuous = !(r.rhs < 1.0);
}

double ln_term(double moment, double delta) { return std::log(moment / delta); }

const char* kOmegaNote = "moment denominator read as m*c";

}  // namespace

BoundReport mcallester_bound(double emp, const BoundParams& p) {
  validate_params(p);
  BoundReport r = base_report("mcallester", "Gibbs risk", emp, p);
  double m = static_cast<double>(p.m);
  double dev =
      std::sqrt((p.kl_posterior + ln_term(maurer_moment(p.m), p.delta)) /
                (2.0 * m));
  finish_deviation(r, emp, dev);
  return r;
}

BoundReport seeger_bound(double emp, const BoundParams& p) {
  validate_params(p);
  BoundReport r = base_report("seeger", "Gibbs risk", emp, p);
  double eps = (p.kl_posterior + ln_term(maurer_moment(p.m), p.delta)) /
               static_cast<double>(p.m);
  finish_interval(r, Interval{kl_inverse_lower(emp, eps),
                              kl_inverse_upper(emp, eps)});
  return r;
}

BoundReport catoni_bound(double emp, const BoundParams& p) {
  validate_params(p);
  BoundReport r = base_report("catoni", "Gibbs risk", emp, p);
  r.note = kOmegaNote;
  double rhs = catoni_coefficient(p.c) *
               (emp + (p.kl_posterior + ln_term(1.0, p.delta)) /
                          (static_cast<double>(p.m) * p.c));
  finish_upper(r, rhs);
  return r;
}

BoundReport germain_dis_bound(double emp_dis, const BoundParams& p) {
  validate_params(p);
  BoundReport r = base_report("germain_dis", "expected disagreement", emp_dis, p);
  double ap = catoni_coefficient(2.0 * p.alpha);
  double rhs = ap * (emp_dis +
                     (2.0 * p.kl_posterior + ln_term(2.0, p.delta)) /
                         (static_cast<double>(p.m) * p.alpha) +
                     1.0) -
               1.0;
  finish_upper(r, rhs);
  return r;
}

BoundReport da_bound_population(double gibbs_src, double dis, double lambda) {
  for (double x : {gibbs_src, dis, lambda}) {
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("population quantities must lie in [0, 1]");
  }
  BoundReport r = base_report("da_population", "target Gibbs risk", gibbs_src,
                              BoundParams{});
  r.lambda = lambda;
  finish_upper(r, gibbs_src + dis / 2.0 + lambda);
  return r;
}

BoundReport general_delta_bound(double emp, DeltaFn delta_fn,
                                double moment_bound, const BoundParams& p,
                                BoundForm form, BoundInstance instance) {
  validate_params(p);
  if (!(moment_bound > 0.0))
    throw std::invalid_argument("moment bound must be positive");

  double budget = 0.0;
  std::string note;
  if (form == BoundForm::begin) {
    if (!p.renyi_alpha || !p.renyi_divergence)
      throw std::invalid_argument("Renyi form needs renyi_alpha and renyi_divergence");
    double ra = *p.renyi_alpha;
    double conj = ra / (ra - 1.0);
    budget = std::exp((*p.renyi_divergence + ln_term(moment_bound, p.delta)) /
                      conj);
    note = "Renyi-form budget, stated without a 1/m factor";
  } else {
    double kls = p.kl_posterior + p.kl_hyper;
    if (instance == BoundInstance::mv_disagreement) kls *= 2.0;
    budget = (kls + ln_term(moment_bound, p.delta)) / static_cast<double>(p.m);
    if (form == BoundForm::goyal)
      note = "bounds the expectation over samples of the posterior's risk";
  }

  BoundReport r = base_report("general_delta",
                              instance == BoundInstance::mv_disagreement
                                  ? "expected disagreement"
                                  : "Gibbs risk",
                              emp, p);
  r.note = std::move(note);
  switch (delta_fn) {
    case DeltaFn::quadratic:
      finish_deviation(r, emp, std::sqrt(budget / 2.0));
      break;
    case DeltaFn::kl:
      finish_interval(r, Interval{kl_inverse_lower(emp, budget),
                                  kl_inverse_upper(emp, budget)});
      break;
    case DeltaFn::catoni:
      finish_upper(r, catoni_coefficient(p.c) * (emp + budget / p.c));
      break;
  }
  return r;
}

namespace {

double dis_radical(const BoundParams& p, std::size_t size) {
  double m = static_cast<double>(size);
  return std::sqrt((2.0 * p.kl_posterior + 2.0 * p.kl_hyper +
                    std::log(maurer_moment(size) / p.delta)) /
                   (2.0 * m));
}

}  // namespace

BoundReport dis_mcallester_bound(double emp_dis, const BoundParams& p) {
  validate_params(p);
  BoundReport r =
      base_report("dis_mcallester", "domain disagreement", emp_dis, p);
  finish_deviation(r, emp_dis, dis_radical(p, p.m));
  return r;
}

BoundReport dis_catoni_bound(double emp_dis, const BoundParams& p) {
  validate_params(p);
  BoundReport r = base_report("dis_catoni", "domain disagreement", emp_dis, p);
  double ap = catoni_coefficient(2.0 * p.alpha);
  double rhs = ap * (emp_dis + (p.kl_posterior + p.kl_hyper +
                                std::log(std::sqrt(1.0 / p.delta))) /
                                   (static_cast<double>(p.m) * p.alpha));
  finish_upper(r, rhs);
  return r;
}

BoundReport dis_kl_bound(double emp_dis, const BoundParams& p) {
  validate_params(p);
  BoundReport r = base_report("dis_kl", "domain disagreement", emp_dis, p);
  double eps = (2.0 * p.kl_posterior + 2.0 * p.kl_hyper +
                ln_term(maurer_moment(p.m), p.delta)) /
               static_cast<double>(p.m);
  finish_interval(r, Interval{kl_inverse_lower(emp_dis, eps),
                              kl_inverse_upper(emp_dis, eps)});
  return r;
}

BoundReport dis_two_sample_bound(double emp_dis, const BoundParams& p) {
  validate_params(p);
  BoundReport r =
      base_report("dis_two_sample", "domain disagreement", emp_dis, p);
  finish_deviation(r, emp_dis, dis_radical(p, p.m) + dis_radical(p, p.n));
  return r;
}

BoundReport mv_gibbs_catoni_bound(double emp_gibbs, const BoundParams& p) {
  validate_params(p);
  BoundReport r = base_report("mv_gibbs_catoni", "Gibbs risk", emp_gibbs, p);
  r.note = kOmegaNote;
  double rhs = catoni_coefficient(p.c) *
               (emp_gibbs + (p.kl_posterior + p.kl_hyper +
                             ln_term(1.0, p.delta)) /
                                (static_cast<double>(p.m) * p.c));
  finish_upper(r, rhs);
  return r;
}

BoundReport da_catoni_bound(double emp_gibbs_src, double emp_dis, double lambda,
                            const BoundParams& p) {
  validate_params(p);
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("lambda must lie in [0, 1]");
  BoundReport r =
      base_report("da_catoni", "target Gibbs risk", emp_gibbs_src, p);
  r.lambda = lambda;
  r.note = kOmegaNote;
  double cp = catoni_coefficient(p.c);
  double ap = catoni_coefficient(2.0 * p.alpha);
  double kl_sum = p.kl_posterior + p.kl_hyper + ln_term(1.0, p.delta);
  double rhs = cp * emp_gibbs_src + ap * emp_dis / 2.0 +
               (cp / p.c + ap / p.alpha) * kl_sum / static_cast<double>(p.m) +
               lambda + (ap - 1.0) / 2.0;
  finish_upper(r, rhs);
  return r;
}

}  // namespace mvpb
