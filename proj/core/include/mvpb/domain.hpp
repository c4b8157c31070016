#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mvpb/measures.hpp"

namespace mvpb {

/// Per-view feature dimensions. views() == dims.size() >= 1.
struct ViewSchema {
  std::vector<int> dims;

  int views() const noexcept { return static_cast<int>(dims.size()); }
  bool operator==(const ViewSchema&) const = default;
};

/// One observation: V feature vectors, view v of dimension dims[v].
struct MultiViewPoint {
  std::vector<std::vector<double>> views;
};

/// Whether a point's shape matches a schema.
bool conforms(const MultiViewPoint& x, const ViewSchema& schema) noexcept;

struct Atom {
  MultiViewPoint point;
  int label = +1;  // in {-1, +1}
  double probability = 0.0;
};

/// A finite distribution over labeled multi-view points. Every population
/// quantity downstream is an exact weighted sum over these atoms. Marginals
/// (label dropped) are represented by the same object; marginal consumers
/// simply never read labels.
class FiniteDomain {
 public:
  FiniteDomain(ViewSchema schema, std::vector<Atom> atoms);

  const ViewSchema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const Atom& atom(std::size_t i) const noexcept { return atoms_[i]; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const Categorical& weights() const noexcept { return weights_; }

 private:
  ViewSchema schema_;
  std::vector<Atom> atoms_;
  Categorical weights_;
};

/// An i.i.d. sample. Either every row is labeled or none is.
class SampleSet {
 public:
  SampleSet(ViewSchema schema, std::vector<MultiViewPoint> points,
            std::vector<int> labels, std::uint64_t origin_seed);

  const ViewSchema& schema() const noexcept { return schema_; }
  bool labeled() const noexcept { return !labels_.empty(); }
  std::size_t size() const noexcept { return points_.size(); }
  const MultiViewPoint& point(std::size_t i) const noexcept { return points_[i]; }
  int label(std::size_t i) const;  // throws if unlabeled
  const std::vector<MultiViewPoint>& points() const noexcept { return points_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  std::uint64_t origin_seed() const noexcept { return origin_seed_; }

 private:
  ViewSchema schema_;
  std::vector<MultiViewPoint> points_;
  std::vector<int> labels_;  // empty when unlabeled
  std::uint64_t origin_seed_;
};

/// m i.i.d. draws from the domain's atom distribution. Each draw is a pure
/// function of (seed, draw index), so equal seeds reproduce bitwise-identical
/// samples regardless of evaluation order.
SampleSet draw_sample(const FiniteDomain& domain, std::size_t m, bool labeled,
                      std::uint64_t seed);

/// Same points in the same order, labels removed.
SampleSet strip_labels(const SampleSet& s);

/// Recipe for a synthetic source/target pair under controlled shift.
struct ShiftSpec {
  std::vector<int> dims;            // per-view feature dimensions
  std::size_t atoms = 2;            // atoms per domain, >= 2
  double shift = 0.0;               // in [0, 1]
  std::vector<int> noisy_views;     // views whose features ignore the label
  std::uint64_t seed = 0;
};

/// Builds a source/target domain pair sharing a schema. shift == 0 yields
/// bitwise-identical atom lists; growing shift moves target coordinates and
/// tilts target probabilities by magnitudes monotone in shift. Views listed
/// in noisy_views get label-independent features in both domains.
std::pair<FiniteDomain, FiniteDomain> synth_shift_pair(const ShiftSpec& spec);

}  // namespace mvpb
