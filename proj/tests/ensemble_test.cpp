#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "mvpb/domain.hpp"
#include "mvpb/ensemble.hpp"
#include "mvpb/measures.hpp"
#include "support.hpp"

using namespace mvpb;

namespace {

std::vector<double> thresholds_of(const ViewHypothesisSet& hs, int view,
                                  int feature) {
  std::set<double> t;
  for (const Voter& h : hs.views[view])
    if (h.feature == feature) t.insert(h.threshold);
  return {t.begin(), t.end()};
}

FiniteDomain line_domain(const std::vector<double>& values) {
  ViewSchema schema;
  schema.dims = {1};
  std::vector<Atom> atoms;
  double w = 1.0 / static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    // The final atom absorbs rounding so the weights form an exact simplex.
    double p = i + 1 == values.size()
                   ? 1.0 - w * static_cast<double>(values.size() - 1)
                   : w;
    atoms.push_back(Atom{MultiViewPoint{{{values[i]}}}, +1, p});
  }
  return FiniteDomain(schema, std::move(atoms));
}

}  // namespace

TEST_CASE("voter prediction thresholds on >=") {
  Voter h{0, 1, 0.5, +1};
  MultiViewPoint x{{{0.0, 0.5}}};
  CHECK(voter_predict(h, x) == +1);
  x.views[0][1] = 0.49;
  CHECK(voter_predict(h, x) == -1);
  h.polarity = -1;
  CHECK(voter_predict(h, x) == +1);
  Voter bad{1, 0, 0.0, +1};
  CHECK_THROWS_AS(voter_predict(bad, x), std::out_of_range);
}

TEST_CASE("ensemble construction validates shapes") {
  ViewHypothesisSet hs;
  hs.views = {{Voter{0, 0, 0.0, +1}, Voter{0, 0, 0.0, -1}}};
  CHECK_NOTHROW(uniform_ensemble(hs));

  ViewHypothesisSet wrong_slot;
  wrong_slot.views = {{Voter{1, 0, 0.0, +1}}};
  CHECK_THROWS_AS(uniform_ensemble(wrong_slot), std::invalid_argument);

  ViewHypothesisSet bad_pol;
  bad_pol.views = {{Voter{0, 0, 0.0, 2}}};
  CHECK_THROWS_AS(uniform_ensemble(bad_pol), std::invalid_argument);

  CHECK_THROWS_AS(
      make_ensemble(hs, {Categorical({1.0})}, Categorical({1.0}),
                    {Categorical({0.5, 0.5})}, Categorical({1.0})),
      std::invalid_argument);
}

TEST_CASE("stump grid midpoints, dedup, and subsampling") {
  // Ten distinct values 0..9 capped at 3 thresholds: first, middle, last
  // midpoint.
  std::vector<double> vals;
  for (int i = 0; i < 10; ++i) vals.push_back(i);
  ViewHypothesisSet g3 = build_stump_grid(line_domain(vals), 3);
  CHECK(thresholds_of(g3, 0, 0) == std::vector<double>{0.5, 4.5, 8.5});
  CHECK(g3.views[0].size() == 6);
  CHECK(g3.views[0][0].polarity == +1);
  CHECK(g3.views[0][1].polarity == -1);
  CHECK(g3.views[0][0].threshold == g3.views[0][1].threshold);

  // Nine values 0..8 keep midpoints {0.5, 4.5, 7.5} under the cap.
  vals.pop_back();
  ViewHypothesisSet g9 = build_stump_grid(line_domain(vals), 3);
  CHECK(thresholds_of(g9, 0, 0) == std::vector<double>{0.5, 4.5, 7.5});

  // Cap of one keeps the middle midpoint.
  ViewHypothesisSet g1 = build_stump_grid(line_domain(vals), 1);
  CHECK(thresholds_of(g1, 0, 0) == std::vector<double>{4.5});

  // Duplicates collapse before midpoints are formed.
  ViewHypothesisSet gd =
      build_stump_grid(line_domain({1.0, 1.0, 2.0, 2.0, 5.0}), 10);
  CHECK(thresholds_of(gd, 0, 0) == std::vector<double>{1.5, 3.5});

  // A single distinct value yields one threshold at that value.
  ViewHypothesisSet gc = build_stump_grid(line_domain({3.0, 3.0}), 4);
  CHECK(thresholds_of(gc, 0, 0) == std::vector<double>{3.0});
}

TEST_CASE("stump grid covers every view and feature in order") {
  RngStream rng(55);
  ViewSchema schema = mvpbtest::random_schema(rng, 2, 3, 3);
  FiniteDomain d = mvpbtest::random_domain(rng, schema, 15);
  ViewHypothesisSet hs = build_stump_grid(d, 4);
  REQUIRE(static_cast<int>(hs.views.size()) == schema.views());
  for (int v = 0; v < schema.views(); ++v) {
    int prev_feature = -1;
    double prev_threshold = -1e300;
    for (std::size_t k = 0; k < hs.views[v].size(); ++k) {
      const Voter& h = hs.views[v][k];
      CHECK(h.view == v);
      CHECK(h.feature >= prev_feature);
      if (h.feature > prev_feature) prev_threshold = -1e300;
      if (k % 2 == 0) {
        CHECK(h.polarity == +1);
        CHECK(h.threshold >= prev_threshold);
        prev_threshold = h.threshold;
      } else {
        CHECK(h.polarity == -1);
      }
      prev_feature = h.feature;
    }
    // At most 4 thresholds x 2 polarities per feature.
    CHECK(hs.views[v].size() <= 8u * static_cast<std::size_t>(schema.dims[v]));
  }
}

TEST_CASE("margins, votes, and the gibbs sampler agree") {
  ViewHypothesisSet hs;
  hs.views = {{Voter{0, 0, 0.0, +1}, Voter{0, 0, 0.0, -1}},
              {Voter{1, 0, 0.5, +1}}};
  PosteriorEnsemble E = make_ensemble(
      hs, {Categorical({0.75, 0.25}), Categorical({1.0})},
      Categorical({0.5, 0.5}),
      {Categorical({0.5, 0.5}), Categorical({1.0})}, Categorical({0.5, 0.5}));

  MultiViewPoint x{{{1.0}, {0.0}}};
  // view 0 margin: 0.75*(+1) + 0.25*(-1) = 0.5; view 1: x < 0.5 -> -1.
  CHECK(view_vote_margin(E, 0, x) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(view_vote_margin(E, 1, x) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(mv_vote_margin(E, x) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(mv_majority_vote(E, x) == -1);

  // Margin exactly zero breaks toward +1.
  PosteriorEnsemble Eu = make_ensemble(
      hs, {Categorical({0.5, 0.5}), Categorical({1.0})},
      Categorical({1.0, 0.0}),
      {Categorical({0.5, 0.5}), Categorical({1.0})}, Categorical({0.5, 0.5}));
  MultiViewPoint hi{{{1.0}, {1.0}}};
  CHECK(mv_vote_margin(Eu, hi) == 0.0);
  CHECK(mv_majority_vote(Eu, hi) == +1);

  // The Gibbs draw averages to the margin.
  RngStream rng(99);
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += gibbs_predict(E, x, rng);
  CHECK(acc / n == doctest::Approx(-0.25).epsilon(0.05));
}

TEST_CASE("tilting keeps simplices valid and is seed-deterministic") {
  RngStream rng(56);
  ViewSchema schema = mvpbtest::random_schema(rng, 2, 3, 2);
  PosteriorEnsemble E =
      uniform_ensemble(mvpbtest::random_voters(rng, schema, 3, 6));
  PosteriorEnsemble t1 = tilt_posteriors(E, 0.3, 1042);
  PosteriorEnsemble t2 = tilt_posteriors(E, 0.3, 1042);
  PosteriorEnsemble t3 = tilt_posteriors(E, 0.3, 1043);

  bool same = true, other = false;
  for (std::size_t v = 0; v < t1.posteriors.size(); ++v)
    for (std::size_t k = 0; k < t1.posteriors[v].size(); ++k) {
      same = same && t1.posteriors[v][k] == t2.posteriors[v][k];
      other = other || t1.posteriors[v][k] != t3.posteriors[v][k];
    }
  CHECK(same);
  CHECK(other);
  CHECK(expected_view_kl(t1) > 0.0);
  CHECK(hyper_kl(t1) > 0.0);
  // Priors stay untouched.
  for (std::size_t v = 0; v < E.priors.size(); ++v)
    for (std::size_t k = 0; k < E.priors[v].size(); ++k)
      CHECK(t1.priors[v][k] == E.priors[v][k]);
}

TEST_CASE("divergence helpers match hand sums") {
  ViewHypothesisSet hs;
  hs.views = {{Voter{0, 0, 0.0, +1}, Voter{0, 0, 0.0, -1}},
              {Voter{1, 0, 0.0, +1}, Voter{1, 0, 0.0, -1}}};
  PosteriorEnsemble E = make_ensemble(
      hs, {Categorical({0.8, 0.2}), Categorical({0.5, 0.5})},
      Categorical({0.3, 0.7}),
      {Categorical({0.5, 0.5}), Categorical({0.5, 0.5})},
      Categorical({0.5, 0.5}));

  double kl0 = kl_categorical(Categorical({0.8, 0.2}), Categorical({0.5, 0.5}));
  double expected = 0.3 * kl0 + 0.7 * 0.0;
  CHECK(expected_view_kl(E) == doctest::Approx(expected).epsilon(1e-14));
  double kh =
      kl_categorical(Categorical({0.3, 0.7}), Categorical({0.5, 0.5}));
  CHECK(hyper_kl(E) == doctest::Approx(kh).epsilon(1e-14));
  CHECK(flattened_kl(E) == doctest::Approx(kh + expected).epsilon(1e-14));

  // Uniform everything has zero divergence.
  PosteriorEnsemble U = uniform_ensemble(hs);
  CHECK(expected_view_kl(U) == 0.0);
  CHECK(hyper_kl(U) == 0.0);
}
