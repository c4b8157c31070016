#include "mvpb/risks.hpp"

#include <cmath>
#include <stdexcept>

#include "mvpb/errors.hpp"
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

void ensure_compatible(const PosteriorEnsemble& E, const ViewSchema& schema) {
  if (E.hypotheses.view_count() != schema.views())
    throw SchemaMismatch("ensemble view count does not match data");
  for (int v = 0; v < schema.views(); ++v) {
    for (const Voter& h : E.hypotheses.views[v]) {
      if (h.feature >= schema.dims[v])
        throw SchemaMismatch("voter feature index exceeds view dimension");
    }
  }
}

inline int fast_predict(const Voter& h, const MultiViewPoint& x) {
  return x.views[h.view][h.feature] >= h.threshold ? h.polarity : -h.polarity;
}

// Posterior-average prediction of each view at x.
void margins_at(const PosteriorEnsemble& E, const MultiViewPoint& x,
                std::vector<double>& out) {
  const int V = E.hypotheses.view_count();
  out.assign(V, 0.0);
  for (int v = 0; v < V; ++v) {
    const std::vector<Voter>& hv = E.hypotheses.views[v];
    const Categorical& q = E.posteriors[v];
    double m = 0.0;
    for (std::size_t k = 0; k < hv.size(); ++k)
      m += q[k] * static_cast<double>(fast_predict(hv[k], x));
    out[v] = m;
  }
}

double rho_total(const PosteriorEnsemble& E) {
  Kahan t;
  for (std::size_t v = 0; v < E.hyper_posterior.size(); ++v)
    t.add(E.hyper_posterior[v]);
  return t.sum;
}

// One weighted pass over points computing every functional at once from the
// per-view margins: per point and view, err = (1 - y m)/2, pairwise
// disagreement (1 - m^2)/2 and joint error err^2 under first_view semantics;
// cross_view collapses the view pair onto the rho-average margin instead.
struct Accumulator {
  Kahan gibbs, dis, joint, mv, dis_b;
  bool want_labels;
  PairSemantics semantics;
  double rho2;  // (sum_v rho_v), the weight of the inert pair index
  std::vector<double> margins;

  void add_point(const PosteriorEnsemble& E, const MultiViewPoint& x, int y,
                 double w, bool target_side) {
    margins_at(E, x, margins);
    const int V = E.hypotheses.view_count();
    double vote = 0.0;
    double g = 0.0, d = 0.0, e = 0.0;
    for (int v = 0; v < V; ++v) {
      double rv = E.hyper_posterior[v];
      double m = margins[v];
      vote += rv * m;
      if (want_labels) {
        double err = (1.0 - static_cast<double>(y) * m) / 2.0;
        g += rv * err;
        if (semantics == PairSemantics::first_view) e += rv * err * err;
      }
      if (semantics == PairSemantics::first_view)
        d += rv * (1.0 - m * m) / 2.0;
    }
    if (semantics == PairSemantics::cross_view) {
      d = (1.0 - vote * vote) / 2.0;
      if (want_labels) {
        double ge = 0.0;
        for (int v = 0; v < V; ++v)
          ge += E.hyper_posterior[v] *
                (1.0 - static_cast<double>(y) * margins[v]) / 2.0;
        e = ge * ge;
      }
    } else {
      d *= rho2;
      e *= rho2;
    }
    (target_side ? dis_b : dis).add(w * d);
    if (target_side) return;
    if (want_labels) {
      gibbs.add(w * g);
      joint.add(w * e);
      int b = vote < 0.0 ? -1 : +1;
      mv.add(w * (b == y ? 0.0 : 1.0));
    }
  }
};

}  // namespace

double gibbs_risk(const PosteriorEnsemble& E, const FiniteDomain& D) {
  return *exact_profile(E, D).gibbs_risk;
}

double mv_disagreement(const PosteriorEnsemble& E, const FiniteDomain& M,
                       PairSemantics semantics) {
  ensure_compatible(E, M.schema());
  Accumulator acc{.want_labels = false, .semantics = semantics,
                  .rho2 = rho_total(E)};
  for (std::size_t i = 0; i < M.size(); ++i)
    acc.add_point(E, M.atom(i).point, 0, M.atom(i).probability, false);
  return acc.dis.sum;
}

double mv_joint_error(const PosteriorEnsemble& E, const FiniteDomain& D,
                      PairSemantics semantics) {
  return *exact_profile(E, D, semantics).mv_joint_error;
}

double majority_vote_risk(const PosteriorEnsemble& E, const FiniteDomain& D) {
  return *exact_profile(E, D).majority_vote_risk;
}

double c_bound(double gibbs, double disagreement) {
  if (!(gibbs >= 0.0 && gibbs < 0.5))
    throw std::domain_error("c_bound needs gibbs risk in [0, 1/2)");
  if (!(disagreement >= 0.0 && disagreement < 0.5))
    throw std::domain_error("c_bound needs disagreement in [0, 1/2)");
  double num = 1.0 - 2.0 * gibbs;
  double val = 1.0 - num * num / (1.0 - 2.0 * disagreement);
  if (val < 0.0) return 0.0;
  if (val > 1.0) return 1.0;
  return val;
}

double lambda_rho(const PosteriorEnsemble& E, const FiniteDomain& source,
                  const FiniteDomain& target, PairSemantics semantics) {
  if (!(source.schema() == target.schema()))
    throw SchemaMismatch("source and target schemas differ");
  return std::fabs(mv_joint_error(E, target, semantics) -
                   mv_joint_error(E, source, semantics));
}

double mv_domain_disagreement(const PosteriorEnsemble& E,
                              const FiniteDomain& src_marginal,
                              const FiniteDomain& tgt_marginal,
                              PairSemantics semantics) {
  if (!(src_marginal.schema() == tgt_marginal.schema()))
    throw SchemaMismatch("source and target schemas differ");
  return std::fabs(mv_disagreement(E, tgt_marginal, semantics) -
                   mv_disagreement(E, src_marginal, semantics));
}

RiskProfile exact_profile(const PosteriorEnsemble& E, const FiniteDomain& D,
                          PairSemantics semantics) {
  ensure_compatible(E, D.schema());
  Accumulator acc{.want_labels = true, .semantics = semantics,
                  .rho2 = rho_total(E)};
  for (std::size_t i = 0; i < D.size(); ++i) {
    const Atom& a = D.atom(i);
    acc.add_point(E, a.point, a.label, a.probability, false);
  }
  RiskProfile p;
  p.gibbs_risk = acc.gibbs.sum;
  p.mv_disagreement = acc.dis.sum;
  p.mv_joint_error = acc.joint.sum;
  p.majority_vote_risk = acc.mv.sum;
  p.source.kind = SourceTag::Kind::exact;
  return p;
}

namespace {

RiskProfile empirical_impl(const PosteriorEnsemble& E, const SampleSet& S,
                           const SampleSet* T, PairSemantics semantics) {
  ensure_compatible(E, S.schema());
  if (S.size() == 0) throw std::invalid_argument("empty sample");
  Accumulator acc{.want_labels = S.labeled(), .semantics = semantics,
                  .rho2 = rho_total(E)};
  const double w = 1.0 / static_cast<double>(S.size());
  for (std::size_t i = 0; i < S.size(); ++i)
    acc.add_point(E, S.point(i), S.labeled() ? S.label(i) : 0, w, false);

  RiskProfile p;
  if (S.labeled()) {
    p.gibbs_risk = acc.gibbs.sum;
    p.mv_joint_error = acc.joint.sum;
    p.majority_vote_risk = acc.mv.sum;
  }
  p.mv_disagreement = acc.dis.sum;
  p.source.kind = SourceTag::Kind::empirical;
  p.source.m = S.size();

  if (T != nullptr) {
    if (!(T->schema() == S.schema()))
      throw SchemaMismatch("source and target schemas differ");
    if (T->size() == 0) throw std::invalid_argument("empty sample");
    const double wt = 1.0 / static_cast<double>(T->size());
    for (std::size_t i = 0; i < T->size(); ++i)
      acc.add_point(E, T->point(i), 0, wt, true);
    p.domain_disagreement = std::fabs(acc.dis_b.sum - acc.dis.sum);
    p.source.n = T->size();
  }
  return p;
}

}  // namespace

RiskProfile empirical_profile(const PosteriorEnsemble& E, const SampleSet& S,
                              PairSemantics semantics) {
  return empirical_impl(E, S, nullptr, semantics);
}

RiskProfile empirical_profile(const PosteriorEnsemble& E, const SampleSet& S,
                              const SampleSet& T, PairSemantics semantics) {
  return empirical_impl(E, S, &T, semantics);
}

namespace {

// Exact data expectation of the 0-1 quantity for one drawn voter (pair).
template <typename ForEach>
double drawn_value(Quantity q, const PosteriorEnsemble& E, PairSemantics sem,
                   RngStream& rng, ForEach for_each_point) {
  std::size_t v = E.hyper_posterior.sample(rng.next_unit());
  std::size_t h = E.posteriors[v].sample(rng.next_unit());
  const Voter& first = E.hypotheses.views[v][h];
  const Voter* second = nullptr;
  Voter second_storage;
  if (q != Quantity::gibbs_risk) {
    std::size_t v2 = E.hyper_posterior.sample(rng.next_unit());
    std::size_t src = sem == PairSemantics::first_view ? v : v2;
    std::size_t h2 = E.posteriors[src].sample(rng.next_unit());
    second_storage = E.hypotheses.views[src][h2];
    second = &second_storage;
  }
  Kahan val;
  for_each_point([&](const MultiViewPoint& x, int y, double w) {
    double loss = 0.0;
    switch (q) {
      case Quantity::gibbs_risk:
        loss = fast_predict(first, x) == y ? 0.0 : 1.0;
        break;
      case Quantity::mv_disagreement:
        loss = fast_predict(first, x) == fast_predict(*second, x) ? 0.0 : 1.0;
        break;
      case Quantity::mv_joint_error:
        loss = (fast_predict(first, x) != y && fast_predict(*second, x) != y)
                   ? 1.0
                   : 0.0;
        break;
    }
    val.add(w * loss);
  });
  return val.sum;
}

template <typename ForEach>
McResult mc_impl(Quantity q, const PosteriorEnsemble& E, PairSemantics sem,
                 std::size_t n_draws, std::uint64_t seed,
                 ForEach for_each_point) {
  if (n_draws < 1) throw std::invalid_argument("need n_draws >= 1");
  RngStream rng(seed);
  Kahan mean_acc;
  std::vector<double> vals(n_draws);
  for (std::size_t i = 0; i < n_draws; ++i) {
    vals[i] = drawn_value(q, E, sem, rng, for_each_point);
    mean_acc.add(vals[i]);
  }
  double mean = mean_acc.sum / static_cast<double>(n_draws);
  double se = 0.0;
  if (n_draws >= 2) {
    Kahan ss;
    for (double v : vals) ss.add((v - mean) * (v - mean));
    double var = ss.sum / static_cast<double>(n_draws - 1);
    se = std::sqrt(var / static_cast<double>(n_draws));
  }
  return McResult{mean, se};
}

}  // namespace

McResult mc_estimate(Quantity q, const PosteriorEnsemble& E,
                     const FiniteDomain& D, std::size_t n_draws,
                     std::uint64_t seed, PairSemantics semantics) {
  ensure_compatible(E, D.schema());
  return mc_impl(q, E, semantics, n_draws, seed, [&](auto&& fn) {
    for (std::size_t i = 0; i < D.size(); ++i)
      fn(D.atom(i).point, D.atom(i).label, D.atom(i).probability);
  });
}

McResult mc_estimate(Quantity q, const PosteriorEnsemble& E, const SampleSet& S,
                     std::size_t n_draws, std::uint64_t seed,
                     PairSemantics semantics) {
  ensure_compatible(E, S.schema());
  if (S.size() == 0) throw std::invalid_argument("empty sample");
  if (q != Quantity::mv_disagreement && !S.labeled())
    throw std::logic_error("label-dependent quantity over unlabeled sample");
  const double w = 1.0 / static_cast<double>(S.size());
  return mc_impl(q, E, semantics, n_draws, seed, [&](auto&& fn) {
    for (std::size_t i = 0; i < S.size(); ++i)
      fn(S.point(i), S.labeled() ? S.label(i) : 0, w);
  });
}

}  // namespace mvpb
