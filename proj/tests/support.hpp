#pragma once

// Randomized instance factory shared by the unit and acceptance suites.
// Everything is driven by an RngStream so any failure reproduces from the
// seed alone.

#include <cstdint>
#include <utility>
#include <vector>

#include "mvpb/domain.hpp"
#include "mvpb/ensemble.hpp"
#include "mvpb/measures.hpp"
#include "mvpb/rng.hpp"

namespace mvpbtest {

using namespace mvpb;

inline std::size_t pick(RngStream& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.next_unit() *
                                       static_cast<double>(hi - lo + 1));
}

// Weights bounded away from zero so KL terms stay finite.
inline Categorical random_categorical(RngStream& rng, std::size_t k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) {
    x = 0.05 + rng.next_unit();
    total += x;
  }
  for (double& x : w) x /= total;
  return Categorical(std::move(w));
}

inline ViewSchema random_schema(RngStream& rng, int min_views, int max_views,
                                int max_dims) {
  ViewSchema schema;
  std::size_t v = pick(rng, static_cast<std::size_t>(min_views),
                       static_cast<std::size_t>(max_views));
  for (std::size_t i = 0; i < v; ++i)
    schema.dims.push_back(static_cast<int>(pick(rng, 1, max_dims)));
  return schema;
}

inline FiniteDomain random_domain(RngStream& rng, const ViewSchema& schema,
                                  std::size_t atoms) {
  std::vector<Atom> list;
  list.reserve(atoms);
  for (std::size_t i = 0; i < atoms; ++i) {
    Atom a;
    for (int d : schema.dims) {
      std::vector<double> coords;
      coords.reserve(d);
      for (int j = 0; j < d; ++j) coords.push_back(2.0 * rng.next_unit() - 1.0);
      a.point.views.push_back(std::move(coords));
    }
    a.label = rng.next_unit() < 0.5 ? -1 : +1;
    a.probability = 0.0;
    list.push_back(std::move(a));
  }
  Categorical w = random_categorical(rng, atoms);
  for (std::size_t i = 0; i < atoms; ++i) list[i].probability = w[i];
  return FiniteDomain(schema, std::move(list));
}

inline ViewHypothesisSet random_voters(RngStream& rng, const ViewSchema& schema,
                                       int min_per_view, int max_per_view) {
  ViewHypothesisSet hs;
  for (int v = 0; v < schema.views(); ++v) {
    std::vector<Voter> hv;
    std::size_t k = pick(rng, static_cast<std::size_t>(min_per_view),
                         static_cast<std::size_t>(max_per_view));
    for (std::size_t i = 0; i < k; ++i) {
      Voter h;
      h.view = v;
      h.feature = static_cast<int>(pick(rng, 0, schema.dims[v] - 1));
      h.threshold = 2.0 * rng.next_unit() - 1.0;
      h.polarity = rng.next_unit() < 0.5 ? -1 : +1;
      hv.push_back(h);
    }
    hs.views.push_back(std::move(hv));
  }
  return hs;
}

inline PosteriorEnsemble random_ensemble(RngStream& rng,
                                         const ViewSchema& schema,
                                         int min_per_view, int max_per_view) {
  ViewHypothesisSet hs = random_voters(rng, schema, min_per_view, max_per_view);
  std::vector<Categorical> posteriors, priors;
  for (const std::vector<Voter>& hv : hs.views) {
    posteriors.push_back(random_categorical(rng, hv.size()));
    priors.push_back(random_categorical(rng, hv.size()));
  }
  std::size_t v = hs.views.size();
  Categorical hyper_post = random_categorical(rng, v);
  Categorical hyper_prior = random_categorical(rng, v);
  return make_ensemble(std::move(hs), std::move(posteriors),
                       std::move(hyper_post), std::move(priors),
                       std::move(hyper_prior));
}

struct RandomInstance {
  FiniteDomain source;
  FiniteDomain target;
  PosteriorEnsemble ensemble;
};

struct InstanceOptions {
  int min_views = 2;
  int max_views = 3;
  int max_dims = 3;
  std::size_t min_atoms = 4;
  std::size_t max_atoms = 30;
  int min_voters = 2;
  int max_voters = 12;
};

inline RandomInstance random_instance(RngStream& rng,
                                      const InstanceOptions& opt = {}) {
  ViewSchema schema =
      random_schema(rng, opt.min_views, opt.max_views, opt.max_dims);
  std::size_t atoms = pick(rng, opt.min_atoms, opt.max_atoms);
  FiniteDomain src = random_domain(rng, schema, atoms);
  FiniteDomain tgt = random_domain(rng, schema, pick(rng, opt.min_atoms,
                                                     opt.max_atoms));
  PosteriorEnsemble E =
      random_ensemble(rng, schema, opt.min_voters, opt.max_voters);
  return RandomInstance{std::move(src), std::move(tgt), std::move(E)};
}

// One perfect and one adversarial threshold voter on a single view; the
// bound minimizer must push all posterior mass onto the perfect one.
struct ToyProblem {
  SampleSet source;
  SampleSet target_marginal;
  PosteriorEnsemble ensemble;
};

inline ToyProblem make_toy(std::size_t m = 50) {
  ViewSchema schema;
  schema.dims = {1};
  std::vector<MultiViewPoint> points;
  std::vector<int> labels;
  for (std::size_t i = 0; i < m; ++i) {
    double x = i % 2 == 0 ? 1.0 : -1.0;
    points.push_back(MultiViewPoint{{{x}}});
    labels.push_back(x >= 0.0 ? +1 : -1);
  }
  SampleSet S(schema, points, labels, 0);
  SampleSet T_X(schema, points, {}, 0);

  ViewHypothesisSet hs;
  hs.views = {{Voter{0, 0, 0.0, +1}, Voter{0, 0, 0.0, -1}}};
  PosteriorEnsemble E = uniform_ensemble(std::move(hs));
  return ToyProblem{std::move(S), std::move(T_X), std::move(E)};
}

}  // namespace mvpbtest
