#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "shuffle/models.hpp"
#include "shuffle/permutation.hpp"

namespace shuffle {

namespace detail {

/// log(sum_i exp(v_i)), stable, with empty or all -inf input mapping to -inf.
inline double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double t : v) mx = std::max(mx, t);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : v) s += std::exp(t - mx);
  return mx + std::log(s);
}

}  // namespace detail

/// Posterior over the elements of a small group, aligned with
/// ShuffleGroup::enumerate order. Weights are nonnegative and sum to 1.
struct PermutationPosterior {
  std::vector<Permutation> permutations;
  Vec weights;
};

/// Marginal log-likelihood of psi under the shuffled model, by direct
/// enumeration: log( (1/|G|) sum_pi f(x | psi permuted by pi) ).
template <ShuffledModel M>
double exact_shuffled_loglik(const M& m, const Vec& x, const Vec& psi, const ShuffleGroup& g,
                             int cap = kEnumerationCap) {
  const std::vector<Permutation> perms = g.enumerate(cap);
  std::vector<double> lw(perms.size());
  for (std::size_t k = 0; k < perms.size(); ++k) {
    lw[k] = log_joint(m, x, perms[k], psi, g);
  }
  return detail::log_sum_exp(lw);
}

/// Conditional distribution of the hidden permutation given x at base
/// parameter psi. Throws when every permutation has zero density.
template <ShuffledModel M>
PermutationPosterior exact_permutation_posterior(const M& m, const Vec& x, const Vec& psi,
                                                 const ShuffleGroup& g,
                                                 int cap = kEnumerationCap) {
  PermutationPosterior post;
  post.permutations = g.enumerate(cap);
  std::vector<double> lw(post.permutations.size());
  double mx = detail::kNegInf;
  for (std::size_t k = 0; k < post.permutations.size(); ++k) {
    lw[k] = log_joint(m, x, post.permutations[k], psi, g);
    mx = std::max(mx, lw[k]);
  }
  if (mx == detail::kNegInf) {
    throw std::runtime_error("exact_permutation_posterior: every permutation has zero density");
  }
  post.weights.resize(lw.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < lw.size(); ++k) {
    post.weights[k] = std::exp(lw[k] - mx);
    sum += post.weights[k];
  }
  for (double& w : post.weights) w /= sum;
  return post;
}

/// Posterior mean of theta = psi permuted by the hidden permutation:
/// sum_pi w(pi) shuffle::apply(pi, psi). This is the estimate of the coordinatewise
/// parameter once the multiset psi has been fixed.
template <ShuffledModel M>
Vec exact_conditional_theta(const M& m, const Vec& x, const Vec& psi, const ShuffleGroup& g,
                            int cap = kEnumerationCap) {
  const PermutationPosterior post = exact_permutation_posterior(m, x, psi, g, cap);
  Vec theta(psi.size(), 0.0);
  for (std::size_t k = 0; k < post.permutations.size(); ++k) {
    const Vec t = shuffle::apply(post.permutations[k], psi);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += post.weights[k] * t[i];
  }
  return theta;
}

/// One EM update for the multiset parameter: the posterior-weighted average
/// of the complete-data estimates, sum_pi w(pi) stat_permuted(x, pi).
template <ShuffledModel M>
Vec exact_em_step(const M& m, const Vec& x, const Vec& psi, const ShuffleGroup& g,
                  int cap = kEnumerationCap) {
  const PermutationPosterior post = exact_permutation_posterior(m, x, psi, g, cap);
  Vec next(psi.size(), 0.0);
  for (std::size_t k = 0; k < post.permutations.size(); ++k) {
    const Vec s = stat_permuted(m, x, post.permutations[k]);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += post.weights[k] * s[i];
  }
  return next;
}

struct ExactMleResult {
  Vec psi_hat;        // multiset estimate, sorted ascending on movable indices
  Vec psi_raw;        // same values in the order the iteration produced them
  Vec theta_shuffle;  // posterior mean of the coordinatewise parameter at psi_hat
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Maximum-likelihood estimate of the multiset parameter by EM fixed-point
/// iteration from psi = stat(x), to max-norm tolerance `tol`. Requires an
/// enumerable group.
template <ShuffledModel M>
ExactMleResult exact_mle(const M& m, const Vec& x, const ShuffleGroup& g, double tol = 1e-10,
                         int max_iter = 100000, int cap = kEnumerationCap) {
  if (!(tol > 0.0)) throw std::invalid_argument("exact_mle: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("exact_mle: max_iter must be positive");
  const std::vector<Permutation> perms = g.enumerate(cap);
  const std::vector<Permutation> inverses = [&] {
    std::vector<Permutation> inv;
    inv.reserve(perms.size());
    for (const Permutation& pi : perms) inv.push_back(invert(pi));
    return inv;
  }();
  const Vec s = m.stat(x);

  ExactMleResult res;
  Vec psi = s;
  std::vector<double> lw(perms.size());
  for (int it = 1; it <= max_iter; ++it) {
    double mx = detail::kNegInf;
    for (std::size_t k = 0; k < perms.size(); ++k) {
      lw[k] = log_joint(m, x, perms[k], psi, g);
      mx = std::max(mx, lw[k]);
    }
    if (mx == detail::kNegInf) {
      throw std::runtime_error("exact_mle: every permutation has zero density");
    }
    Vec next(psi.size(), 0.0);
    double wsum = 0.0;
    for (std::size_t k = 0; k < perms.size(); ++k) {
      const double w = std::exp(lw[k] - mx);
      wsum += w;
      const Vec sp = shuffle::apply(inverses[k], s);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += w * sp[i];
    }
    for (double& v : next) v /= wsum;
    double delta = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) delta = std::max(delta, std::abs(next[i] - psi[i]));
    psi = std::move(next);
    res.iterations = it;
    if (delta < tol) {
      res.converged = true;
      break;
    }
  }
  res.psi_raw = psi;
  res.psi_hat = sort_on_movable(psi, g);
  res.theta_shuffle = exact_conditional_theta(m, x, res.psi_hat, g, cap);
  res.loglik = exact_shuffled_loglik(m, x, res.psi_hat, g, cap);
  return res;
}

}  // namespace shuffle
