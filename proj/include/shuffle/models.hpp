#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <vector>

#include "shuffle/permutation.hpp"

namespace shuffle {

using Vec = std::vector<double>;

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// x * log(y) with the conventions 0 * log(0) = 0 and x * log(0) = -inf
/// for x > 0. Never returns NaN for x >= 0, y >= 0.
inline double xlogy(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y <= 0.0) return kNegInf;
  return x * std::log(y);
}

}  // namespace detail

/**
 * Observation model for p independent Gaussian coordinates with known
 * common variance: X_i ~ N(theta_i, sigma2). Log-densities drop additive
 * constants that do not depend on theta.
 */
struct GaussianMeansModel {
  int p;
  double sigma2;

  explicit GaussianMeansModel(int p_, double sigma2_ = 1.0) : p(p_), sigma2(sigma2_) {
    if (p < 1) throw std::invalid_argument("GaussianMeansModel: p must be positive");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("GaussianMeansModel: sigma2 must be positive");
  }

  bool valid_theta(const Vec& theta) const {
    if (static_cast<int>(theta.size()) != p) return false;
    for (double t : theta) {
      if (!std::isfinite(t)) return false;
    }
    return true;
  }

  /// -sum_i (x_i - theta_i)^2 / (2 sigma2), up to an additive constant.
  double log_density(const Vec& x, const Vec& theta) const {
    check_size(x);
    if (static_cast<int>(theta.size()) != p) {
      throw std::invalid_argument("GaussianMeansModel::log_density: theta has wrong length");
    }
    double ss = 0.0;
    for (int i = 0; i < p; ++i) {
      const double d = x[static_cast<std::size_t>(i)] - theta[static_cast<std::size_t>(i)];
      ss += d * d;
    }
    return -ss / (2.0 * sigma2);
  }

  /// Sufficient statistic for theta: the observation itself.
  Vec stat(const Vec& x) const {
    check_size(x);
    return x;
  }

  /// Log-density change from exchanging the images of i and j in pi,
  /// evaluated at theta = psi permuted by pi. O(1): only the two affected
  /// coordinates enter.
  double swap_log_ratio(const Vec& x, const Vec& psi, const Permutation& pi, int i, int j) const {
    return swap_log_ratio(x, psi, pi.mapping(), i, j);
  }

  /// Overload on a raw image table, for samplers that maintain one.
  double swap_log_ratio(const Vec& x, const Vec& psi, const std::vector<int>& pi, int i,
                        int j) const {
    const double xi = x[static_cast<std::size_t>(i)];
    const double xj = x[static_cast<std::size_t>(j)];
    const double pi_i = psi[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)])];
    const double pi_j = psi[static_cast<std::size_t>(pi[static_cast<std::size_t>(j)])];
    const double cur = (xi - pi_i) * (xi - pi_i) + (xj - pi_j) * (xj - pi_j);
    const double prop = (xi - pi_j) * (xi - pi_j) + (xj - pi_i) * (xj - pi_i);
    return (cur - prop) / (2.0 * sigma2);
  }

 private:
  void check_size(const Vec& x) const {
    if (static_cast<int>(x.size()) != p) {
      throw std::invalid_argument("GaussianMeansModel: observation has wrong length");
    }
  }
};

/**
 * Multinomial model with n trials over p categories and probability vector
 * theta on the simplex. Log-densities drop the multinomial coefficient.
 */
struct MultinomialModel {
  int p;
  long long n;

  MultinomialModel(int p_, long long n_) : p(p_), n(n_) {
    if (p < 1) throw std::invalid_argument("MultinomialModel: p must be positive");
    if (n < 1) throw std::invalid_argument("MultinomialModel: n must be positive");
  }

  /// theta must be nonnegative and sum to 1 within 1e-12.
  bool valid_theta(const Vec& theta) const {
    if (static_cast<int>(theta.size()) != p) return false;
    double sum = 0.0;
    for (double t : theta) {
      if (!(t >= 0.0)) return false;
      sum += t;
    }
    return std::abs(sum - 1.0) <= 1e-12;
  }

  /// sum_i x_i log(theta_i), up to an additive constant, with
  /// 0 log 0 = 0. Returns -inf when some theta_i = 0 has x_i > 0.
  double log_density(const Vec& x, const Vec& theta) const {
    check_counts(x);
    if (static_cast<int>(theta.size()) != p) {
      throw std::invalid_argument("MultinomialModel::log_density: theta has wrong length");
    }
    double lp = 0.0;
    for (int i = 0; i < p; ++i) {
      lp += detail::xlogy(x[static_cast<std::size_t>(i)], theta[static_cast<std::size_t>(i)]);
    }
    return lp;
  }

  /// Sufficient statistic for theta: observed proportions x / n.
  Vec stat(const Vec& x) const {
    check_counts(x);
    Vec s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] / static_cast<double>(n);
    return s;
  }

  /// Log-density change from exchanging the images of i and j in pi.
  /// When the current assignment already has zero density the ratio is
  /// defined as +inf so a sampler never gets trapped in a zero-probability
  /// state.
  double swap_log_ratio(const Vec& x, const Vec& psi, const Permutation& pi, int i, int j) const {
    return swap_log_ratio(x, psi, pi.mapping(), i, j);
  }

  /// Overload on a raw image table, for samplers that maintain one.
  double swap_log_ratio(const Vec& x, const Vec& psi, const std::vector<int>& pi, int i,
                        int j) const {
    const double xi = x[static_cast<std::size_t>(i)];
    const double xj = x[static_cast<std::size_t>(j)];
    const double pi_i = psi[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)])];
    const double pi_j = psi[static_cast<std::size_t>(pi[static_cast<std::size_t>(j)])];
    const double cur = detail::xlogy(xi, pi_i) + detail::xlogy(xj, pi_j);
    const double prop = detail::xlogy(xi, pi_j) + detail::xlogy(xj, pi_i);
    if (cur == detail::kNegInf) return detail::kPosInf;
    return prop - cur;
  }

 private:
  void check_counts(const Vec& x) const {
    if (static_cast<int>(x.size()) != p) {
      throw std::invalid_argument("MultinomialModel: count vector has wrong length");
    }
    double sum = 0.0;
    for (double c : x) {
      if (!(c >= 0.0) || c != std::floor(c)) {
        throw std::invalid_argument("MultinomialModel: counts must be nonnegative integers");
      }
      sum += c;
    }
    if (sum != static_cast<double>(n)) {
      throw std::invalid_argument("MultinomialModel: counts must sum to n");
    }
  }
};

/// Requirements on an observation model usable with the shuffled-parameter
/// routines: a dimension, a log-density in theta, a sufficient statistic
/// taking values in theta-space, a validity test, and an O(1) log-density
/// ratio for transposing two images of a permutation.
template <typename M>
concept ShuffledModel = requires(const M& m, const Vec& x, const Vec& theta,
                                 const Permutation& pi, int i, int j) {
  { m.p } -> std::convertible_to<int>;
  { m.log_density(x, theta) } -> std::same_as<double>;
  { m.stat(x) } -> std::same_as<Vec>;
  { m.valid_theta(theta) } -> std::same_as<bool>;
  { m.swap_log_ratio(x, theta, pi, i, j) } -> std::same_as<double>;
};

/// Joint log-density of (x, pi) under the shuffled model with base
/// parameter psi: log f(x | psi permuted by pi) - log |G|, the permutation
/// being uniform on the group.
template <ShuffledModel M>
double log_joint(const M& m, const Vec& x, const Permutation& pi, const Vec& psi,
                 const ShuffleGroup& g) {
  const Vec theta = shuffle::apply(pi, psi);
  if (!m.valid_theta(theta)) {
    throw std::invalid_argument("log_joint: psi permuted by pi is not a valid parameter");
  }
  return m.log_density(x, theta) - g.log_order();
}

/// The sufficient statistic pulled back through pi: shuffle::apply(invert(pi), stat(x)).
/// This is the complete-data estimate of psi when the hidden permutation
/// is pi, since theta = psi permuted by pi means psi = theta permuted by
/// the inverse.
template <ShuffledModel M>
Vec stat_permuted(const M& m, const Vec& x, const Permutation& pi) {
  return shuffle::apply(invert(pi), m.stat(x));
}

}  // namespace shuffle
