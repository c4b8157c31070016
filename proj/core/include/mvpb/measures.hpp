#pragma once

#include <cstddef>
#include <vector>

namespace mvpb {

/// Tolerance for simplex validation. Weight vectors whose sum deviates from 1
/// by more than this are rejected outright; nothing is silently renormalized.
inline constexpr double kSimplexTol = 1e-12;

/// A finite probability distribution: nonnegative weights summing to 1.
/// Immutable after construction and safe to share across threads.
class Categorical {
 public:
  /// Validates the weights (finite, nonnegative, sum within kSimplexTol of 1).
  /// Throws std::invalid_argument on violation; refuses to renormalize.
  explicit Categorical(std::vector<double> weights);

  static Categorical uniform(std::size_t n);
  static Categorical point_mass(std::size_t n, std::size_t index);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const noexcept { return w_[i]; }
  const std::vector<double>& weights() const noexcept { return w_; }

  /// Inverse-CDF draw for u in [0, 1). Always returns a valid index.
  std::size_t sample(double u) const noexcept;

 private:
  std::vector<double> w_;
};

/// kl(q||p) between Bernoulli parameters, with 0*ln(0) == 0.
/// Returns +infinity when q puts mass where p has none.
double kl_bernoulli(double q, double p);

/// KL divergence between two same-size categoricals; +infinity when Q is not
/// absolutely continuous w.r.t. P.
double kl_categorical(const Categorical& q, const Categorical& p);

/// Renyi divergence D_alpha(Q||P) = ln(sum_i P_i (Q_i/P_i)^alpha) / (alpha-1)
/// for alpha > 1. Throws std::domain_error on alpha <= 1 or when Q is not
/// absolutely continuous w.r.t. P.
double renyi_divergence(const Categorical& q, const Categorical& p, double alpha);

/// Largest p with kl_bernoulli(q, p) <= eps, by bisection on [q, 1].
/// Absolute tolerance 1e-12 on p, at most 200 iterations.
double kl_inverse_upper(double q, double eps);

/// Smallest p with kl_bernoulli(q, p) <= eps, by bisection on [0, q].
double kl_inverse_lower(double q, double eps);

/// The product distribution q (x) q over index pairs, row-major:
/// weight(i*K + j) = q_i * q_j. Satisfies KL(q(x)q || p(x)p) = 2 KL(q||p).
Categorical pair_product(const Categorical& q);

}  // namespace mvpb
