#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "shuffle/models.hpp"

namespace shuffle {

/// Plain maximum-likelihood estimate, ignoring any parameter shuffling:
/// the sufficient statistic itself.
template <ShuffledModel M>
Vec mle(const M& m, const Vec& x) {
  return m.stat(x);
}

/// Positive-part James-Stein estimate shrinking toward the grand mean,
/// for p >= 4 coordinates with known common variance sigma2:
/// mu + max(0, 1 - (p-3) sigma2 / S) (x - mu) with S = sum (x - mu)^2.
/// Degenerate S = 0 (all coordinates equal) shrinks fully to the mean.
inline Vec james_stein_eb(const Vec& x, double sigma2) {
  const int p = static_cast<int>(x.size());
  if (p < 4) throw std::invalid_argument("james_stein_eb: needs at least 4 coordinates");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("james_stein_eb: sigma2 must be positive");
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= static_cast<double>(p);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  const double b = s > 0.0 ? std::max(0.0, 1.0 - static_cast<double>(p - 3) * sigma2 / s) : 0.0;
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = mu + b * (x[i] - mu);
  return out;
}

/// Count-of-counts summary of a category count vector: counts[k] is the
/// number of categories observed exactly k times (k = 0 included).
struct CountOfCounts {
  std::map<long long, long long> counts;
  long long n = 0;  // total observations
  int p = 0;        // total categories
};

inline CountOfCounts count_of_counts(const std::vector<long long>& x) {
  CountOfCounts cc;
  cc.p = static_cast<int>(x.size());
  for (long long c : x) {
    if (c < 0) throw std::invalid_argument("count_of_counts: counts must be nonnegative");
    ++cc.counts[c];
    cc.n += c;
  }
  return cc;
}

/// Turing's estimate of the total probability of categories observed k
/// times: (k+1) N_{k+1} / (n N_k) per such category. Defined only when
/// some category was observed exactly k times.
inline double good_turing_percount(const CountOfCounts& cc, long long k) {
  if (cc.n == 0) throw std::invalid_argument("good_turing_percount: no observations");
  const auto nk = cc.counts.find(k);
  if (nk == cc.counts.end() || nk->second == 0) {
    throw std::invalid_argument("good_turing_percount: no category observed k times");
  }
  const auto nk1 = cc.counts.find(k + 1);
  const double n_next = nk1 == cc.counts.end() ? 0.0 : static_cast<double>(nk1->second);
  return static_cast<double>(k + 1) * n_next /
         (static_cast<double>(cc.n) * static_cast<double>(nk->second));
}

/// Estimated total probability of everything not yet seen: N_1 / n.
inline double good_turing_unseen_mass(const CountOfCounts& cc) {
  if (cc.n == 0) throw std::invalid_argument("good_turing_unseen_mass: no observations");
  const auto n1 = cc.counts.find(1);
  const double singletons = n1 == cc.counts.end() ? 0.0 : static_cast<double>(n1->second);
  return singletons / static_cast<double>(cc.n);
}

/// One grid point of the conditional-mean identity: the posterior-style
/// conditional mean of a category's probability given it was seen k times
/// in n draws, against the expected-count ratio
/// (k+1) E N_{k+1,n+1} / ((n+1) E N_{k,n}). The two columns agree exactly
/// for any theta; the second is computable from observable frequencies.
struct GoodIdentityPoint {
  int k = 0;
  double conditional_mean = 0.0;
  double count_ratio = 0.0;
};

namespace detail {

/// Visits every length-p nonnegative integer vector summing to n.
template <typename F>
void for_each_composition(int p, int n, std::vector<int>& buf, int idx, int rem, F&& f) {
  if (idx == p - 1) {
    buf[static_cast<std::size_t>(idx)] = rem;
    f(buf);
    return;
  }
  for (int c = 0; c <= rem; ++c) {
    buf[static_cast<std::size_t>(idx)] = c;
    for_each_composition(p, n, buf, idx + 1, rem - c, f);
  }
}

inline double multinomial_pmf(const std::vector<int>& counts, const Vec& theta, int n) {
  double lp = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    lp -= std::lgamma(static_cast<double>(counts[i]) + 1.0);
    const double term = xlogy(static_cast<double>(counts[i]), theta[i]);
    if (term == kNegInf) return 0.0;
    lp += term;
  }
  return std::exp(lp);
}

/// E #{categories seen exactly k times} in n multinomial draws, by
/// brute-force enumeration of all outcomes.
inline double expected_count_of_count(int p, int n, const Vec& theta, int k) {
  double e = 0.0;
  std::vector<int> buf(static_cast<std::size_t>(p));
  for_each_composition(p, n, buf, 0, n, [&](const std::vector<int>& counts) {
    int hits = 0;
    for (int c : counts) {
      if (c == k) ++hits;
    }
    if (hits > 0) e += multinomial_pmf(counts, theta, n) * hits;
  });
  return e;
}

}  // namespace detail

/// Evaluates both routes of the conditional-mean identity at every
/// k = 0..n. Enumeration limits the problem size to p <= 4, n <= 6.
inline std::vector<GoodIdentityPoint> good_identity_check(int p, int n, const Vec& theta) {
  if (p < 1 || p > 4) throw std::invalid_argument("good_identity_check: p must be in 1..4");
  if (n < 1 || n > 6) throw std::invalid_argument("good_identity_check: n must be in 1..6");
  if (static_cast<int>(theta.size()) != p) {
    throw std::invalid_argument("good_identity_check: theta has wrong length");
  }
  double sum = 0.0;
  for (double t : theta) {
    if (!(t >= 0.0)) throw std::invalid_argument("good_identity_check: theta must be nonnegative");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("good_identity_check: theta must sum to 1");
  }

  std::vector<GoodIdentityPoint> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    GoodIdentityPoint pt;
    pt.k = k;
    double num = 0.0;
    double den = 0.0;
    for (double t : theta) {
      const double tail = std::pow(1.0 - t, static_cast<double>(n - k));
      num += std::pow(t, static_cast<double>(k + 1)) * tail;
      den += std::pow(t, static_cast<double>(k)) * tail;
    }
    pt.conditional_mean = num / den;
    const double e_now = detail::expected_count_of_count(p, n, theta, k);
    const double e_next = detail::expected_count_of_count(p, n + 1, theta, k + 1);
    pt.count_ratio =
        static_cast<double>(k + 1) * e_next / (static_cast<double>(n + 1) * e_now);
    out.push_back(pt);
  }
  return out;
}

/// Posterior mean of the category probabilities under a uniform prior on
/// the simplex: (x_i + 1) / (n + p).
inline Vec dirichlet_uniform_posterior_mean(const std::vector<long long>& x) {
  const int p = static_cast<int>(x.size());
  if (p < 1) throw std::invalid_argument("dirichlet_uniform_posterior_mean: empty counts");
  long long n = 0;
  for (long long c : x) {
    if (c < 0) throw std::invalid_argument("dirichlet_uniform_posterior_mean: counts must be nonnegative");
    n += c;
  }
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = static_cast<double>(x[i] + 1) / static_cast<double>(n + p);
  }
  return out;
}

/// Variance-stabilizing transform of a batting-average style proportion
/// observed over n0 trials: sqrt(n0) asin(2 avg - 1). On this scale the
/// sampling distribution is approximately N(., 1).
inline double arcsine_fwd(double avg, double n0) {
  if (!(n0 > 0.0)) throw std::invalid_argument("arcsine_fwd: n0 must be positive");
  if (!(avg >= 0.0 && avg <= 1.0)) {
    throw std::invalid_argument("arcsine_fwd: proportion must lie in [0, 1]");
  }
  return std::sqrt(n0) * std::asin(2.0 * avg - 1.0);
}

/// Inverse of arcsine_fwd: (sin(t / sqrt(n0)) + 1) / 2.
inline double arcsine_inv(double t, double n0) {
  if (!(n0 > 0.0)) throw std::invalid_argument("arcsine_inv: n0 must be positive");
  return (std::sin(t / std::sqrt(n0)) + 1.0) / 2.0;
}

}  // namespace shuffle
