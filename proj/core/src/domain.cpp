#include "mvpb/domain.hpp"

#include <cmath>
#include <stdexcept>

#include "mvpb/rng.hpp"

namespace mvpb {

bool conforms(const MultiViewPoint& x, const ViewSchema& schema) noexcept {
  if (static_cast<int>(x.views.size()) != schema.views()) return false;
  for (int v = 0; v < schema.views(); ++v) {
    if (static_cast<int>(x.views[v].size()) != schema.dims[v]) return false;
  }
  return true;
}

namespace {

Categorical atom_weights(const std::vector<Atom>& atoms) {
  std::vector<double> w;
  w.reserve(atoms.size());
  for (const Atom& a : atoms) w.push_back(a.probability);
  return Categorical(std::move(w));
}

}  // namespace

FiniteDomain::FiniteDomain(ViewSchema schema, std::vector<Atom> atoms)
    : schema_(std::move(schema)),
      atoms_(std::move(atoms)),
      weights_(atom_weights(atoms_)) {
  if (schema_.views() < 1) throw std::invalid_argument("domain needs >= 1 view");
  for (int d : schema_.dims) {
    if (d < 1) throw std::invalid_argument("view dimension must be >= 1");
  }
  for (const Atom& a : atoms_) {
    if (a.label != +1 && a.label != -1)
      throw std::invalid_argument("atom label must be +1 or -1");
    if (!conforms(a.point, schema_))
      throw std::invalid_argument("atom point does not match schema");
  }
}

SampleSet::SampleSet(ViewSchema schema, std::vector<MultiViewPoint> points,
                     std::vector<int> labels, std::uint64_t origin_seed)
    : schema_(std::move(schema)),
      points_(std::move(points)),
      labels_(std::move(labels)),
      origin_seed_(origin_seed) {
  if (!labels_.empty() && labels_.size() != points_.size())
    throw std::invalid_argument("label count must match point count");
  for (int y : labels_) {
    if (y != +1 && y != -1) throw std::invalid_argument("label must be +1 or -1");
  }
  for (const MultiViewPoint& x : points_) {
    if (!conforms(x, schema_))
      throw std::invalid_argument("sample point does not match schema");
  }
}

int SampleSet::label(std::size_t i) const {
  if (labels_.empty()) throw std::logic_error("sample set is unlabeled");
  return labels_[i];
}

SampleSet draw_sample(const FiniteDomain& domain, std::size_t m, bool labeled,
                      std::uint64_t seed) {
  std::vector<MultiViewPoint> points;
  std::vector<int> labels;
  points.reserve(m);
  if (labeled) labels.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    double u = unit_from_bits(counter_bits(seed, i));
    std::size_t k = domain.weights().sample(u);
    points.push_back(domain.atom(k).point);
    if (labeled) labels.push_back(domain.atom(k).label);
  }
  return SampleSet(domain.schema(), std::move(points), std::move(labels), seed);
}

SampleSet strip_labels(const SampleSet& s) {
  return SampleSet(s.schema(), s.points(), {}, s.origin_seed());
}

namespace {

bool is_noisy(const ShiftSpec& spec, int v) {
  for (int nv : spec.noisy_views)
    if (nv == v) return true;
  return false;
}

// Stable stream ids for the independent randomness consumed per atom. Using
// distinct task keys per role keeps every coordinate a pure function of
// (seed, atom, view, feature) so shift only ever scales fixed offsets.
enum : std::uint64_t {
  kTaskLabel = 1,
  kTaskCoord = 2,
  kTaskDelta = 3,
  kTaskSourceWeight = 4,
  kTaskTilt = 5,
};

}  // namespace

std::pair<FiniteDomain, FiniteDomain> synth_shift_pair(const ShiftSpec& spec) {
  if (spec.atoms < 2) throw std::invalid_argument("need >= 2 atoms");
  if (!(spec.shift >= 0.0 && spec.shift <= 1.0))
    throw std::invalid_argument("shift must lie in [0, 1]");
  ViewSchema schema{spec.dims};
  if (schema.views() < 1) throw std::invalid_argument("need >= 1 view");
  for (int d : schema.dims) {
    if (d < 1) throw std::invalid_argument("view dimension must be >= 1");
  }
  for (int nv : spec.noisy_views) {
    if (nv < 0 || nv >= schema.views())
      throw std::invalid_argument("noisy view index out of range");
  }

  RngStream labels(spec.seed, kTaskLabel);
  RngStream coords(spec.seed, kTaskCoord);
  RngStream deltas(spec.seed, kTaskDelta);
  RngStream src_w(spec.seed, kTaskSourceWeight);
  RngStream tilt(spec.seed, kTaskTilt);

  std::vector<Atom> src_atoms(spec.atoms);
  std::vector<Atom> tgt_atoms(spec.atoms);
  std::vector<double> sw(spec.atoms);
  std::vector<double> tw(spec.atoms);

  for (std::size_t a = 0; a < spec.atoms; ++a) {
    int y = labels.next_unit() < 0.5 ? -1 : +1;
    MultiViewPoint src_pt;
    MultiViewPoint tgt_pt;
    src_pt.views.resize(schema.views());
    tgt_pt.views.resize(schema.views());
    for (int v = 0; v < schema.views(); ++v) {
      bool noisy = is_noisy(spec, v);
      src_pt.views[v].resize(spec.dims[v]);
      tgt_pt.views[v].resize(spec.dims[v]);
      for (int f = 0; f < spec.dims[v]; ++f) {
        double u = coords.next_unit();
        double base = noisy ? (2.0 * u - 1.0)
                            : 0.8 * static_cast<double>(y) + (2.0 * u - 1.0) * 0.75;
        double delta = 2.0 * deltas.next_unit() - 1.0;
        src_pt.views[v][f] = base;
        tgt_pt.views[v][f] = base + spec.shift * 0.9 * delta;
      }
    }
    src_atoms[a].point = std::move(src_pt);
    src_atoms[a].label = y;
    tgt_atoms[a].point = std::move(tgt_pt);
    tgt_atoms[a].label = y;

    sw[a] = 0.5 + src_w.next_unit();
    double g = 2.0 * tilt.next_unit() - 1.0;
    tw[a] = sw[a] * std::exp(spec.shift * g);
  }

  // Kahan totals keep the normalized weights within the simplex tolerance.
  auto normalize = [](std::vector<double>& w) {
    double total = 0.0, comp = 0.0;
    for (double x : w) {
      double t = x - comp;
      double s = total + t;
      comp = (s - total) - t;
      total = s;
    }
    for (double& x : w) x /= total;
  };
  normalize(sw);
  normalize(tw);
  for (std::size_t a = 0; a < spec.atoms; ++a) {
    src_atoms[a].probability = sw[a];
    tgt_atoms[a].probability = tw[a];
  }

  return {FiniteDomain(schema, std::move(src_atoms)),
          FiniteDomain(schema, std::move(tgt_atoms))};
}

}  // namespace mvpb
