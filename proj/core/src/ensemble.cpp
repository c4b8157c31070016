#include "mvpb/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvpb {

int voter_predict(const Voter& h, const MultiViewPoint& x) {
  if (h.view < 0 || h.view >= static_cast<int>(x.views.size()))
    throw std::out_of_range("voter view index out of range");
  const std::vector<double>& fv = x.views[h.view];
  if (h.feature < 0 || h.feature >= static_cast<int>(fv.size()))
    throw std::out_of_range("voter feature index out of range");
  return fv[h.feature] >= h.threshold ? h.polarity : -h.polarity;
}

PosteriorEnsemble make_ensemble(ViewHypothesisSet hypotheses,
                                std::vector<Categorical> posteriors,
                                Categorical hyper_posterior,
                                std::vector<Categorical> priors,
                                Categorical hyper_prior) {
  const int V = hypotheses.view_count();
  if (V < 1) throw std::invalid_argument("ensemble needs >= 1 view");
  if (static_cast<int>(posteriors.size()) != V ||
      static_cast<int>(priors.size()) != V ||
      static_cast<int>(hyper_posterior.size()) != V ||
      static_cast<int>(hyper_prior.size()) != V)
    throw std::invalid_argument("weight vectors do not match view count");
  for (int v = 0; v < V; ++v) {
    const std::vector<Voter>& hv = hypotheses.views[v];
    if (hv.empty()) throw std::invalid_argument("empty voter pool");
    if (posteriors[v].size() != hv.size() || priors[v].size() != hv.size())
      throw std::invalid_argument("weight vector does not match voter count");
    for (const Voter& h : hv) {
      if (h.view != v)
        throw std::invalid_argument("voter filed under the wrong view");
      if (h.polarity != +1 && h.polarity != -1)
        throw std::invalid_argument("voter polarity must be +1 or -1");
      if (h.feature < 0) throw std::invalid_argument("negative feature index");
    }
  }
  return PosteriorEnsemble{std::move(hypotheses), std::move(posteriors),
                           std::move(hyper_posterior), std::move(priors),
                           std::move(hyper_prior)};
}

PosteriorEnsemble uniform_ensemble(ViewHypothesisSet hypotheses) {
  const int V = hypotheses.view_count();
  if (V < 1) throw std::invalid_argument("ensemble needs >= 1 view");
  std::vector<Categorical> post;
  std::vector<Categorical> prior;
  post.reserve(V);
  prior.reserve(V);
  for (int v = 0; v < V; ++v) {
    std::size_t k = hypotheses.views[v].size();
    post.push_back(Categorical::uniform(k));
    prior.push_back(Categorical::uniform(k));
  }
  Categorical rho = Categorical::uniform(V);
  Categorical pi = Categorical::uniform(V);
  return make_ensemble(std::move(hypotheses), std::move(post), std::move(rho),
                       std::move(prior), std::move(pi));
}

namespace {

Categorical tilt_weights(const Categorical& base, double tilt, RngStream& rng) {
  std::vector<double> w(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    double g = 2.0 * rng.next_unit() - 1.0;
    w[k] = base[k] * std::exp(tilt * g);
  }
  double total = 0.0, comp = 0.0;
  for (double x : w) {
    double t = x - comp;
    double s = total + t;
    comp = (s - total) - t;
    total = s;
  }
  for (double& x : w) x /= total;
  return Categorical(std::move(w));
}

}  // namespace

PosteriorEnsemble tilt_posteriors(const PosteriorEnsemble& E, double tilt,
                                  std::uint64_t seed) {
  RngStream hyper_rng(seed, 0);
  Categorical rho = tilt_weights(E.hyper_posterior, tilt, hyper_rng);
  std::vector<Categorical> post;
  post.reserve(E.posteriors.size());
  for (std::size_t v = 0; v < E.posteriors.size(); ++v) {
    RngStream rng(seed, v + 1);
    post.push_back(tilt_weights(E.posteriors[v], tilt, rng));
  }
  return make_ensemble(E.hypotheses, std::move(post), std::move(rho), E.priors,
                       E.hyper_prior);
}

double view_vote_margin(const PosteriorEnsemble& E, int v,
                        const MultiViewPoint& x) {
  const std::vector<Voter>& hv = E.hypotheses.views.at(v);
  const Categorical& q = E.posteriors[v];
  double m = 0.0;
  for (std::size_t k = 0; k < hv.size(); ++k)
    m += q[k] * static_cast<double>(voter_predict(hv[k], x));
  return m;
}

double mv_vote_margin(const PosteriorEnsemble& E, const MultiViewPoint& x) {
  double m = 0.0;
  for (int v = 0; v < E.hypotheses.view_count(); ++v)
    m += E.hyper_posterior[v] * view_vote_margin(E, v, x);
  return m;
}

int mv_majority_vote(const PosteriorEnsemble& E, const MultiViewPoint& x) {
  return mv_vote_margin(E, x) < 0.0 ? -1 : +1;
}

int gibbs_predict(const PosteriorEnsemble& E, const MultiViewPoint& x,
                  RngStream& rng) {
  std::size_t v = E.hyper_posterior.sample(rng.next_unit());
  std::size_t k = E.posteriors[v].sample(rng.next_unit());
  return voter_predict(E.hypotheses.views[v][k], x);
}

namespace {

// Evenly spaced T-subset of {0..M-1} including both endpoints, computed in
// exact integer arithmetic (round half up) so every platform picks the same
// indices.
std::vector<std::size_t> pick_indices(std::size_t M, std::size_t T) {
  std::vector<std::size_t> idx;
  if (T >= M) {
    for (std::size_t i = 0; i < M; ++i) idx.push_back(i);
    return idx;
  }
  if (T == 1) {
    idx.push_back(M / 2);
    return idx;
  }
  for (std::size_t j = 0; j < T; ++j)
    idx.push_back((2 * j * (M - 1) + (T - 1)) / (2 * (T - 1)));
  return idx;
}

void append_feature_stumps(std::vector<Voter>& out, int v, int f,
                           std::vector<double> vals, std::size_t cap) {
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<double> thresholds;
  if (vals.size() == 1) {
    thresholds.push_back(vals[0]);
  } else {
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
      thresholds.push_back((vals[i] + vals[i + 1]) / 2.0);
  }
  for (std::size_t i : pick_indices(thresholds.size(), cap)) {
    out.push_back(Voter{v, f, thresholds[i], +1});
    out.push_back(Voter{v, f, thresholds[i], -1});
  }
}

template <typename PointAt>
ViewHypothesisSet stump_grid(const ViewSchema& schema, std::size_t n,
                             PointAt point_at, int per_feature) {
  if (per_feature < 1) throw std::invalid_argument("per_feature must be >= 1");
  if (n == 0) throw std::invalid_argument("cannot build stumps from no points");
  ViewHypothesisSet hs;
  hs.views.resize(schema.views());
  for (int v = 0; v < schema.views(); ++v) {
    for (int f = 0; f < schema.dims[v]; ++f) {
      std::vector<double> vals;
      vals.reserve(n);
      for (std::size_t i = 0; i < n; ++i)
        vals.push_back(point_at(i).views[v][f]);
      append_feature_stumps(hs.views[v], v, f, std::move(vals),
                            static_cast<std::size_t>(per_feature));
    }
  }
  return hs;
}

}  // namespace

ViewHypothesisSet build_stump_grid(const FiniteDomain& domain, int per_feature) {
  return stump_grid(
      domain.schema(), domain.size(),
      [&](std::size_t i) -> const MultiViewPoint& { return domain.atom(i).point; },
      per_feature);
}

ViewHypothesisSet build_stump_grid(const SampleSet& sample, int per_feature) {
  return stump_grid(
      sample.schema(), sample.size(),
      [&](std::size_t i) -> const MultiViewPoint& { return sample.point(i); },
      per_feature);
}

double expected_view_kl(const PosteriorEnsemble& E) {
  double s = 0.0;
  for (int v = 0; v < E.hypotheses.view_count(); ++v)
    s += E.hyper_posterior[v] * kl_categorical(E.posteriors[v], E.priors[v]);
  return s;
}

double hyper_kl(const PosteriorEnsemble& E) {
  return kl_categorical(E.hyper_posterior, E.hyper_prior);
}

double flattened_kl(const PosteriorEnsemble& E) {
  return hyper_kl(E) + expected_view_kl(E);
}

}  // namespace mvpb
