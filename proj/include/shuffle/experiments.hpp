#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "shuffle/baselines.hpp"
#include "shuffle/io.hpp"
#include "shuffle/models.hpp"
#include "shuffle/rng.hpp"
#include "shuffle/saem.hpp"

namespace shuffle {

// ---------------------------------------------------------------------------
// Batting averages: estimate each player's rest-of-season average from the
// first 45 at-bats of the 1970 season.
// ---------------------------------------------------------------------------

inline constexpr double kBaseballFirstAtBats = 45.0;

struct BaseballRecord {
  std::string player;
  int hits_first = 0;
  int atbats_first = 0;
  int hits_remain = 0;
  int atbats_remain = 0;
};

/// Hits in the first 45 at-bats of the 1970 season for the 18 players of
/// the classic batting-average study, Clemente first.
inline const std::vector<int>& baseball_first45_hits() {
  static const std::vector<int> hits = {18, 17, 16, 15, 14, 14, 13, 12, 11,
                                        11, 10, 10, 10, 10, 10, 9,  8,  7};
  return hits;
}

/// Clemente's 1970 line: 18 hits in the first 45 at-bats, then 127 hits in
/// the remaining 367.
inline BaseballRecord clemente_reference() { return BaseballRecord{"Clemente", 18, 45, 127, 367}; }

/// Loads the batting table. Expected header:
/// player,hits_first,atbats_first,hits_remain,atbats_remain with one row
/// per player, first-period at-bats fixed at 45.
inline std::vector<BaseballRecord> load_baseball_records(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(
        "batting data file not found: " + path +
        " (expected the 1970 season table with columns "
        "player,hits_first,atbats_first,hits_remain,atbats_remain)");
  }
  std::istringstream in(text);
  std::string line;
  std::vector<BaseballRecord> records;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != "player,hits_first,atbats_first,hits_remain,atbats_remain") {
        throw std::invalid_argument(path + ": unexpected header '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 5) {
      throw std::invalid_argument(path + ": expected 5 fields, got row '" + line + "'");
    }
    BaseballRecord rec;
    rec.player = fields[0];
    const auto to_count = [&](const std::string& field) {
      std::size_t pos = 0;
      int value = 0;
      try {
        value = std::stoi(field, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != field.size() || field.empty()) {
        throw std::invalid_argument(path + ": non-integer count in row '" + line + "'");
      }
      return value;
    };
    rec.hits_first = to_count(fields[1]);
    rec.atbats_first = to_count(fields[2]);
    rec.hits_remain = to_count(fields[3]);
    rec.atbats_remain = to_count(fields[4]);
    if (rec.player.empty()) throw std::invalid_argument(path + ": empty player name");
    if (rec.atbats_first != static_cast<int>(kBaseballFirstAtBats)) {
      throw std::invalid_argument(path + ": first-period at-bats must be 45 for " + rec.player);
    }
    if (rec.hits_first < 0 || rec.hits_first > rec.atbats_first) {
      throw std::invalid_argument(path + ": first-period hits out of range for " + rec.player);
    }
    if (rec.atbats_remain < 1 || rec.hits_remain < 0 || rec.hits_remain > rec.atbats_remain) {
      throw std::invalid_argument(path + ": remainder counts out of range for " + rec.player);
    }
    records.push_back(std::move(rec));
  }
  if (!saw_header) throw std::invalid_argument(path + ": missing header");
  if (records.size() < 4) {
    throw std::invalid_argument(path + ": needs at least 4 players");
  }
  return records;
}

enum class BaseballVariant { standard, clemente_boost };

/// The counterfactual where Clemente starts hot: 20 hits in the first 45
/// at-bats, 143 in the remaining 367. Other players are untouched.
inline std::vector<BaseballRecord> apply_variant(std::vector<BaseballRecord> records,
                                                 BaseballVariant variant) {
  if (variant == BaseballVariant::standard) return records;
  for (BaseballRecord& rec : records) {
    if (rec.player.find("Clemente") != std::string::npos) {
      rec.hits_first = 20;
      rec.hits_remain = 143;
      rec.atbats_remain = 367;
      return records;
    }
  }
  throw std::invalid_argument("apply_variant: no Clemente row to boost");
}

/// Estimates from the first-period hits alone. The averages are mapped to
/// the variance-stabilized scale, where three estimators run side by side:
/// the raw maximum-likelihood estimate, positive-part James-Stein
/// shrinkage, and the shuffled-parameter fit over the full permutation
/// group. Results are reported on both scales.
struct BaseballFit {
  std::vector<std::string> players;
  Vec avg_first;
  Vec transformed;  // sqrt(45) asin(2 avg - 1), approximately N(theta, 1)
  Vec mle_t, james_stein_t, shuffled_t;
  Vec mle, james_stein, shuffled;
  SaemResult saem;
};

inline BaseballFit baseball_fit(const std::vector<std::string>& players,
                                const std::vector<int>& hits_first, const SaemConfig& config) {
  const int p = static_cast<int>(players.size());
  if (static_cast<int>(hits_first.size()) != p) {
    throw std::invalid_argument("baseball_fit: players and hits differ in length");
  }
  if (p < 4) throw std::invalid_argument("baseball_fit: needs at least 4 players");

  BaseballFit fit;
  fit.players = players;
  fit.avg_first.resize(players.size());
  fit.transformed.resize(players.size());
  for (int i = 0; i < p; ++i) {
    if (hits_first[static_cast<std::size_t>(i)] < 0 ||
        hits_first[static_cast<std::size_t>(i)] > static_cast<int>(kBaseballFirstAtBats)) {
      throw std::invalid_argument("baseball_fit: hits out of range for " +
                                  players[static_cast<std::size_t>(i)]);
    }
    fit.avg_first[static_cast<std::size_t>(i)] =
        static_cast<double>(hits_first[static_cast<std::size_t>(i)]) / kBaseballFirstAtBats;
    fit.transformed[static_cast<std::size_t>(i)] =
        arcsine_fwd(fit.avg_first[static_cast<std::size_t>(i)], kBaseballFirstAtBats);
  }

  const GaussianMeansModel model(p, 1.0);
  fit.mle_t = mle(model, fit.transformed);
  fit.james_stein_t = james_stein_eb(fit.transformed, 1.0);
  fit.saem = saem_fit(model, fit.transformed, ShuffleGroup::full(p), config);
  fit.shuffled_t = fit.saem.theta_shuffle;

  const auto back = [](const Vec& t) {
    Vec out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = arcsine_inv(t[i], kBaseballFirstAtBats);
    return out;
  };
  fit.mle = back(fit.mle_t);
  fit.james_stein = back(fit.james_stein_t);
  fit.shuffled = back(fit.shuffled_t);
  return fit;
}

/// A fit together with its held-out evaluation: total squared error of
/// each estimator against the rest-of-season averages, on the average scale.
struct BaseballRun {
  BaseballFit fit;
  Vec avg_remain;
  double error_mle = 0.0;
  double error_james_stein = 0.0;
  double error_shuffled = 0.0;
};

inline BaseballRun baseball_run(const std::vector<BaseballRecord>& records,
                                BaseballVariant variant, const SaemConfig& config) {
  const std::vector<BaseballRecord> recs = apply_variant(records, variant);
  std::vector<std::string> players;
  std::vector<int> hits;
  players.reserve(recs.size());
  hits.reserve(recs.size());
  for (const BaseballRecord& rec : recs) {
    players.push_back(rec.player);
    hits.push_back(rec.hits_first);
  }
  BaseballRun run;
  run.fit = baseball_fit(players, hits, config);
  run.avg_remain.resize(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    run.avg_remain[i] =
        static_cast<double>(recs[i].hits_remain) / static_cast<double>(recs[i].atbats_remain);
  }
  const auto sq_error = [&](const Vec& est) {
    double e = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      const double d = est[i] - run.avg_remain[i];
      e += d * d;
    }
    return e;
  };
  run.error_mle = sq_error(run.fit.mle);
  run.error_james_stein = sq_error(run.fit.james_stein);
  run.error_shuffled = sq_error(run.fit.shuffled);
  return run;
}

// ---------------------------------------------------------------------------
// Species abundance: recover a multinomial probability vector that was
// drawn uniformly from the simplex, from a sample of n = 50 observations.
// ---------------------------------------------------------------------------

/// Uniform draw from the simplex: normalized unit-rate exponentials.
inline Vec dirichlet_uniform_draw(int p, SplitMix64& rng) {
  if (p < 1) throw std::invalid_argument("dirichlet_uniform_draw: p must be positive");
  Vec theta(static_cast<std::size_t>(p));
  double s = 0.0;
  for (double& v : theta) {
    v = rng.next_exponential();
    s += v;
  }
  for (double& v : theta) v /= s;
  return theta;
}

/// n independent categorical draws tallied into counts.
inline std::vector<long long> multinomial_draw(long long n, const Vec& theta, SplitMix64& rng) {
  if (n < 0) throw std::invalid_argument("multinomial_draw: n must be nonnegative");
  std::vector<long long> counts(theta.size(), 0);
  for (long long t = 0; t < n; ++t) {
    const double u = rng.next_double();
    double acc = 0.0;
    std::size_t pick = theta.size() - 1;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      acc += theta[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    ++counts[pick];
  }
  return counts;
}

struct SpeciesConfig {
  std::vector<int> p_values{5, 10, 25, 50};
  long long n = 50;
  int replicates = 100;
  std::uint64_t seed = 0;
  // Reduced sampler budget; the full-size budget used for the batting data
  // is available through these knobs.
  int saem_iterations = 20000;
  int saem_restarts = 2;
  double gamma_offset = 1000.0;
};

/// One output row of a simulation: total squared error of one estimator on
/// one replicate.
struct ExperimentRecord {
  std::string experiment;
  std::string estimator;
  int replicate = 0;
  int p = 0;
  double error = 0.0;
  std::uint64_t seed = 0;
};

/// Simulates the species problem: theta uniform on the simplex, counts
/// multinomial, and three estimators of theta per replicate: the observed
/// proportions ("mle"), the shuffled-parameter fit over the full group
/// ("shuffled"), and the conjugate posterior mean under the uniform prior
/// ("bayes"). Replicate streams are independent and reproducible.
inline std::vector<ExperimentRecord> species_sim(const SpeciesConfig& config) {
  if (config.replicates < 1) throw std::invalid_argument("species_sim: replicates must be positive");
  if (config.n < 1) throw std::invalid_argument("species_sim: n must be positive");
  std::vector<ExperimentRecord> out;
  out.reserve(config.p_values.size() * static_cast<std::size_t>(config.replicates) * 3);
  for (int p : config.p_values) {
    if (p < 2) throw std::invalid_argument("species_sim: p must be at least 2");
    const MultinomialModel model(p, config.n);
    for (int rep = 0; rep < config.replicates; ++rep) {
      SplitMix64 rng = rng_stream(config.seed, static_cast<std::uint64_t>(rep))
                           .split(static_cast<std::uint64_t>(p));
      const Vec theta = dirichlet_uniform_draw(p, rng);
      const std::vector<long long> counts = multinomial_draw(config.n, theta, rng);
      Vec x(counts.begin(), counts.end());

      SaemConfig fit_config;
      fit_config.iterations = config.saem_iterations;
      fit_config.restarts = config.saem_restarts;
      fit_config.gamma_offset = config.gamma_offset;
      fit_config.seed = rng.next_u64();
      fit_config.oracle_loglik = false;
      const SaemResult fit = saem_fit(model, x, ShuffleGroup::full(p), fit_config);

      const Vec prop = model.stat(x);
      const Vec bayes = dirichlet_uniform_posterior_mean(counts);
      const auto sq_error = [&](const Vec& est) {
        double e = 0.0;
        for (std::size_t i = 0; i < est.size(); ++i) {
          const double d = est[i] - theta[i];
          e += d * d;
        }
        return e;
      };
      const auto emit = [&](const std::string& name, double err) {
        out.push_back(ExperimentRecord{"species", name, rep, p, err, config.seed});
      };
      emit("mle", sq_error(prop));
      emit("shuffled", sq_error(fit.theta_shuffle));
      emit("bayes", sq_error(bayes));
    }
  }
  return out;
}

}  // namespace shuffle
