#include "mvpb/measures.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mvpb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::domain_error(std::string(name) + " must lie in [0,1]");
}

}  // namespace

Categorical::Categorical(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw std::invalid_argument("categorical needs at least one weight");
  double sum = 0.0, comp = 0.0;
  for (double w : w_) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("categorical weights must be finite and nonnegative");
    double y = w - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("categorical weights must sum to 1 (off by " +
                                std::to_string(sum - 1.0) + "); renormalization is refused");
}

Categorical Categorical::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("categorical needs at least one weight");
  return Categorical(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Categorical Categorical::point_mass(std::size_t n, std::size_t index) {
  if (index >= n) throw std::invalid_argument("point mass index out of range");
  std::vector<double> w(n, 0.0);
  w[index] = 1.0;
  return Categorical(std::move(w));
}

std::size_t Categorical::sample(double u) const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < w_.size(); ++i) {
    acc += w_[i];
    if (u < acc) return i;
  }
  return w_.size() - 1;
}

double kl_bernoulli(double q, double p) {
  check_probability(q, "q");
  check_probability(p, "p");
  double t = 0.0;
  if (q > 0.0) {
    if (p == 0.0) return kInf;
    t += q * std::log(q / p);
  }
  if (q < 1.0) {
    if (p == 1.0) return kInf;
    t += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
  }
  // Rounding can push tiny true values a hair below zero; kl is nonnegative.
  return t < 0.0 ? 0.0 : t;
}

double kl_categorical(const Categorical& q, const Categorical& p) {
  if (q.size() != p.size())
    throw std::invalid_argument("kl_categorical: size mismatch");
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) return kInf;
    double term = q[i] * std::log(q[i] / p[i]);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum < 0.0 ? 0.0 : sum;
}

double renyi_divergence(const Categorical& q, const Categorical& p, double alpha) {
  if (q.size() != p.size())
    throw std::invalid_argument("renyi_divergence: size mismatch");
  if (!(alpha > 1.0))
    throw std::domain_error("renyi_divergence requires alpha > 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0)
      throw std::domain_error("renyi_divergence: Q not absolutely continuous w.r.t. P");
    sum += p[i] * std::pow(q[i] / p[i], alpha);
  }
  double d = std::log(sum) / (alpha - 1.0);
  return d < 0.0 ? 0.0 : d;
}

namespace {

// Bisection for the max/min p with kl(q||p) <= eps on a bracket where
// kl(q||.) is monotone. Runs to floating-point convergence (the interval
// collapses in ~60 steps, far inside the 1e-12 tolerance); hard cap 200.
double bisect_kl(double q, double eps, double lo, double hi, bool upper) {
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    bool inside = kl_bernoulli(q, mid) <= eps;
    if (upper) {
      (inside ? lo : hi) = mid;
    } else {
      (inside ? hi : lo) = mid;
    }
  }
  return upper ? lo : hi;
}

}  // namespace

double kl_inverse_upper(double q, double eps) {
  check_probability(q, "q");
  if (!(eps >= 0.0)) throw std::domain_error("eps must be nonnegative");
  // kl(q||.) vanishes only at q, and near that double root the evaluation is
  // all cancellation noise, so the zero-budget case is answered exactly.
  if (eps == 0.0) return q;
  if (kl_bernoulli(q, 1.0) <= eps) return 1.0;
  return bisect_kl(q, eps, q, 1.0, /*upper=*/true);
}

double kl_inverse_lower(double q, double eps) {
  check_probability(q, "q");
  if (!(eps >= 0.0)) throw std::domain_error("eps must be nonnegative");
  if (eps == 0.0) return q;
  if (kl_bernoulli(q, 0.0) <= eps) return 0.0;
  return bisect_kl(q, eps, 0.0, q, /*upper=*/false);
}

Categorical pair_product(const Categorical& q) {
  const std::size_t k = q.size();
  std::vector<double> w;
  w.reserve(k * k);
  double total = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double prod = q[i] * q[j];
      w.push_back(prod);
      double y = prod - comp;
      double t = total + y;
      comp = (t - total) - y;
      total = t;
    }
  // A sum-tolerance of 1e-12 on q squares to 2e-12 on the products, so the
  // product vector must be scaled by its own total to stay constructible.
  // total == 1.0 makes this a no-op.
  if (total != 1.0)
    for (double& v : w) v /= total;
  return Categorical(std::move(w));
}

}  // namespace mvpb
