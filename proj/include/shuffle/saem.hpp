#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shuffle/models.hpp"
#include "shuffle/oracle.hpp"
#include "shuffle/permutation.hpp"
#include "shuffle/rng.hpp"

namespace shuffle {

struct SaemConfig {
  int iterations = 100000;       // per restart
  int restarts = 10;
  double gamma_offset = 1000.0;  // step size at iteration k is 1 / (k + gamma_offset)
  std::uint64_t seed = 0;
  bool oracle_loglik = true;     // evaluate the exact log-likelihood at the
                                 // fitted psi when the group is enumerable
};

/// Mutable state of one stochastic-approximation run. `iter` counts
/// iterations within the current restart, starting at 0.
struct SaemState {
  Vec psi;
  Vec theta_bar;
  Permutation perm;
  long long iter = 0;
};

template <ShuffledModel M>
SaemState initial_saem_state(const M& m, const Vec& x) {
  Vec s = m.stat(x);
  return SaemState{s, s, Permutation::identity(m.p), 0};
}

struct SaemResult {
  Vec psi_hat;        // multiset estimate, sorted ascending on movable indices
  Vec psi_raw;        // same values in chain order
  Vec theta_shuffle;  // averaged coordinatewise estimate
  double acceptance_rate = 0.0;
  std::optional<double> final_loglik_estimate;
  long long iterations_total = 0;
};

/// One Metropolis step on the hidden permutation at fixed psi: propose a
/// uniform random transposition of the images at two distinct movable
/// indices, draw Z ~ Exp(1), and accept exactly when -Z <= H with H the
/// swap log-density ratio. Mutates state.perm on acceptance; returns
/// whether the proposal was accepted.
template <ShuffledModel M>
bool mh_step(const M& m, const Vec& x, SaemState& state, const ShuffleGroup& g,
             SplitMix64& rng) {
  const auto [i, j] = g.propose_transposition(rng);
  const double h = m.swap_log_ratio(x, state.psi, state.perm, i, j);
  const double z = rng.next_exponential();
  const bool accept = (-z <= h);
  if (accept) state.perm = transpose_images(state.perm, i, j);
  return accept;
}

/// One full stochastic-approximation iteration: a Metropolis step on the
/// permutation (skipped when the group is trivial), then Robbins-Monro
/// averaging of the complete-data estimate into psi and of the fresh
/// coordinatewise estimate into theta_bar, with step size
/// 1 / (iter + gamma_offset).
template <ShuffledModel M>
void saem_iterate(const M& m, const Vec& x, SaemState& state, const ShuffleGroup& g,
                  const SaemConfig& config, SplitMix64& rng) {
  if (g.movable_count() >= 2) mh_step(m, x, state, g, rng);
  const double gamma = 1.0 / (static_cast<double>(state.iter) + config.gamma_offset);
  const Vec s = stat_permuted(m, x, state.perm);
  for (std::size_t k = 0; k < state.psi.size(); ++k) {
    state.psi[k] = (1.0 - gamma) * state.psi[k] + gamma * s[k];
  }
  const Vec t = shuffle::apply(state.perm, state.psi);
  for (std::size_t k = 0; k < state.theta_bar.size(); ++k) {
    state.theta_bar[k] = (1.0 - gamma) * state.theta_bar[k] + gamma * t[k];
  }
  ++state.iter;
}

/// Full stochastic-approximation fit with restarts. The first restart
/// starts from psi = theta_bar = stat(x); each later restart keeps psi,
/// resets theta_bar to psi, the permutation to the identity, and the
/// iteration counter (hence the step size schedule) to the beginning.
/// Iteration-for-iteration equivalent to driving saem_iterate by hand with
/// a SplitMix64 seeded from config.seed.
template <ShuffledModel M>
SaemResult saem_fit(const M& m, const Vec& x, const ShuffleGroup& g, const SaemConfig& config) {
  if (config.iterations < 1) throw std::invalid_argument("saem_fit: iterations must be positive");
  if (config.restarts < 1) throw std::invalid_argument("saem_fit: restarts must be positive");
  if (!(config.gamma_offset >= 1.0)) {
    throw std::invalid_argument("saem_fit: gamma_offset must be at least 1");
  }
  if (static_cast<int>(x.size()) != m.p) {
    throw std::invalid_argument("saem_fit: observation has wrong length");
  }

  SplitMix64 rng(config.seed);
  const Vec s = m.stat(x);
  const int p = m.p;
  const bool trivial = g.movable_count() < 2;

  Vec psi = s;
  Vec theta_bar = s;
  std::vector<int> perm(static_cast<std::size_t>(p));
  std::vector<int> perm_inv(static_cast<std::size_t>(p));
  long long accepted = 0;
  long long proposed = 0;

  for (int r = 0; r < config.restarts; ++r) {
    if (r > 0) theta_bar = psi;
    for (int i = 0; i < p; ++i) {
      perm[static_cast<std::size_t>(i)] = i;
      perm_inv[static_cast<std::size_t>(i)] = i;
    }
    for (int k = 0; k < config.iterations; ++k) {
      if (!trivial) {
        const auto [i, j] = g.propose_transposition(rng);
        const double h = m.swap_log_ratio(x, psi, perm, i, j);
        const double z = rng.next_exponential();
        ++proposed;
        if (-z <= h) {
          ++accepted;
          std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
          perm_inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
          perm_inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])] = j;
        }
      }
      const double gamma = 1.0 / (static_cast<double>(k) + config.gamma_offset);
      for (int c = 0; c < p; ++c) {
        psi[static_cast<std::size_t>(c)] =
            (1.0 - gamma) * psi[static_cast<std::size_t>(c)] +
            gamma * s[static_cast<std::size_t>(perm_inv[static_cast<std::size_t>(c)])];
      }
      for (int c = 0; c < p; ++c) {
        theta_bar[static_cast<std::size_t>(c)] =
            (1.0 - gamma) * theta_bar[static_cast<std::size_t>(c)] +
            gamma * psi[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])];
      }
    }
  }

  SaemResult res;
  res.psi_raw = psi;
  res.psi_hat = sort_on_movable(psi, g);
  res.theta_shuffle = theta_bar;
  res.acceptance_rate =
      proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  res.iterations_total =
      static_cast<long long>(config.restarts) * static_cast<long long>(config.iterations);
  if (config.oracle_loglik && g.movable_count() <= kEnumerationCap) {
    res.final_loglik_estimate = exact_shuffled_loglik(m, x, res.psi_hat, g);
  }
  return res;
}

/// Empirical distribution of the Metropolis chain over an enumerable group,
/// run at fixed psi for n_samples recorded steps after a 10% burn-in.
/// Frequencies are aligned with ShuffleGroup::enumerate order, for direct
/// comparison against exact_permutation_posterior.
template <ShuffledModel M>
PermutationPosterior mh_stationarity_check(const M& m, const Vec& x, const Vec& psi,
                                           const ShuffleGroup& g, long long n_samples,
                                           SplitMix64& rng, int cap = kEnumerationCap) {
  if (n_samples < 1) throw std::invalid_argument("mh_stationarity_check: n_samples must be positive");
  PermutationPosterior out;
  out.permutations = g.enumerate(cap);
  out.weights.assign(out.permutations.size(), 0.0);
  if (g.movable_count() < 2) {
    out.weights[0] = 1.0;
    return out;
  }
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t k = 0; k < out.permutations.size(); ++k) {
    index[out.permutations[k].mapping()] = k;
  }
  SaemState state{psi, psi, Permutation::identity(g.p()), 0};
  const long long burn = n_samples / 10;
  for (long long t = 0; t < burn + n_samples; ++t) {
    mh_step(m, x, state, g, rng);
    if (t >= burn) out.weights[index.at(state.perm.mapping())] += 1.0;
  }
  for (double& w : out.weights) w /= static_cast<double>(n_samples);
  return out;
}

}  // namespace shuffle
