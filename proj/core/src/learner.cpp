#include "mvpb/learner.hpp"

#include <cmath>
#include <stdexcept>

#include "mvpb/errors.hpp"
#include "mvpb/risks.hpp"

namespace mvpb {

namespace {

constexpr double kStencil = 1e-6;
constexpr int kMaxHalvings = 20;
constexpr double kRelStop = 1e-9;

// Weight blocks under optimization: one simplex per view posterior plus one
// for the hyper-posterior. Kept as raw positive vectors; normalization
// happens inside the objective so finite-difference probes may step off the
// simplex without invalidating anything.
struct Blocks {
  std::vector<std::vector<double>> q;  // per view
  std::vector<double> rho;
};

Blocks from_ensemble(const PosteriorEnsemble& E) {
  Blocks b;
  b.q.reserve(E.posteriors.size());
  for (const Categorical& c : E.posteriors) b.q.push_back(c.weights());
  b.rho = E.hyper_posterior.weights();
  return b;
}

Categorical normalized(const std::vector<double>& w) {
  double total = 0.0, comp = 0.0;
  for (double x : w) {
    double t = x - comp;
    double s = total + t;
    comp = (s - total) - t;
    total = s;
  }
  if (!(total > 0.0)) throw std::runtime_error("weight block lost all mass");
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / total;
  return Categorical(std::move(out));
}

PosteriorEnsemble realize(const PosteriorEnsemble& E0, const Blocks& b) {
  std::vector<Categorical> post;
  post.reserve(b.q.size());
  for (const std::vector<double>& w : b.q) post.push_back(normalized(w));
  return make_ensemble(E0.hypotheses, std::move(post), normalized(b.rho),
                       E0.priors, E0.hyper_prior);
}

// The da_catoni rhs with lambda = 0, at the ensemble the blocks define.
double objective(const PosteriorEnsemble& E0, const Blocks& b,
                 const SampleSet& S, const SampleSet& T_X,
                 const BoundParams& p) {
  PosteriorEnsemble E = realize(E0, b);
  RiskProfile prof = empirical_profile(E, S, T_X);
  BoundParams q = p;
  q.kl_posterior = expected_view_kl(E);
  q.kl_hyper = hyper_kl(E);
  return da_catoni_bound(*prof.gibbs_risk, *prof.domain_disagreement, 0.0, q)
      .rhs;
}

// Central finite difference in one raw coordinate, clipped at zero and
// divided by the span actually probed.
double fd_partial(const PosteriorEnsemble& E0, Blocks& b, std::vector<double>& w,
                  std::size_t i, const SampleSet& S, const SampleSet& T_X,
                  const BoundParams& p) {
  double saved = w[i];
  double hi = saved + kStencil;
  double lo = saved - kStencil;
  if (lo < 0.0) lo = 0.0;
  w[i] = hi;
  double f_hi = objective(E0, b, S, T_X, p);
  w[i] = lo;
  double f_lo = objective(E0, b, S, T_X, p);
  w[i] = saved;
  return (f_hi - f_lo) / (hi - lo);
}

void tangent_project(std::vector<double>& g) {
  double mean = 0.0;
  for (double x : g) mean += x;
  mean /= static_cast<double>(g.size());
  for (double& x : g) x -= mean;
}

}  // namespace

LearnTrace minimize_da_bound(const PosteriorEnsemble& E0, const SampleSet& S,
                             const SampleSet& T_X, const BoundParams& p,
                             std::size_t max_iters, double eta0,
                             std::uint64_t seed) {
  (void)seed;
  if (!S.labeled()) throw std::invalid_argument("source sample must be labeled");
  if (S.size() == 0 || T_X.size() == 0)
    throw std::invalid_argument("empty sample");
  if (!(S.schema() == T_X.schema()))
    throw SchemaMismatch("source and target schemas differ");
  if (!(eta0 > 0.0)) throw std::invalid_argument("eta0 must be positive");
  validate_params(p);

  Blocks b = from_ensemble(E0);
  const Blocks b0 = b;
  double obj = objective(E0, b, S, T_X, p);
  if (!std::isfinite(obj))
    throw std::runtime_error(
        "initial objective is not finite (a posterior escapes its prior's "
        "support)");

  std::vector<LearnStep> steps;
  steps.push_back(LearnStep{0, obj, 0.0, true});

  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    // Subgradient estimate per block, projected so a uniform shift of a
    // block (which normalization cancels) contributes nothing.
    Blocks grad = b;
    for (std::size_t v = 0; v < b.q.size(); ++v) {
      for (std::size_t i = 0; i < b.q[v].size(); ++i)
        grad.q[v][i] = fd_partial(E0, b, b.q[v], i, S, T_X, p);
      tangent_project(grad.q[v]);
    }
    for (std::size_t i = 0; i < b.rho.size(); ++i)
      grad.rho[i] = fd_partial(E0, b, b.rho, i, S, T_X, p);
    tangent_project(grad.rho);

    double eta = eta0;
    bool accepted = false;
    double trial_obj = obj;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      Blocks trial = b;
      for (std::size_t v = 0; v < trial.q.size(); ++v)
        for (std::size_t i = 0; i < trial.q[v].size(); ++i)
          trial.q[v][i] = b.q[v][i] * std::exp(-eta * grad.q[v][i]);
      for (std::size_t i = 0; i < trial.rho.size(); ++i)
        trial.rho[i] = b.rho[i] * std::exp(-eta * grad.rho[i]);
      trial_obj = objective(E0, trial, S, T_X, p);
      if (std::isfinite(trial_obj) && trial_obj <= obj) {
        b = std::move(trial);
        accepted = true;
        break;
      }
      eta /= 2.0;
    }

    steps.push_back(LearnStep{iter, accepted ? trial_obj : obj, eta, accepted});
    if (!accepted) break;
    double improvement = obj - trial_obj;
    obj = trial_obj;
    if (improvement < kRelStop * std::max(std::fabs(obj), 1.0)) break;
  }

  // When no step was accepted the input ensemble comes back untouched, so a
  // zero-iteration run is exactly idempotent. Otherwise renormalizing the
  // blocks hands downstream consumers valid Categoricals regardless of how
  // far the raw weights drifted.
  if (b.q == b0.q && b.rho == b0.rho)
    return LearnTrace{std::move(steps), E0};
  return LearnTrace{std::move(steps), realize(E0, b)};
}

}  // namespace mvpb
