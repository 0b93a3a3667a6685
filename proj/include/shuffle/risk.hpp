#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "shuffle/models.hpp"
#include "shuffle/permutation.hpp"
#include "shuffle/rng.hpp"

namespace shuffle {

/// Risk differences below this are treated as zero when deciding whether a
/// risk function is permutation invariant.
inline constexpr double kRiskInvarianceTol = 1e-9;

/**
 * A fully tabulated decision problem: a finite parameter grid, a finite
 * sample space, a finite action set, and a deterministic decision rule.
 * likelihood[t][x] = P(x | thetas[t]); loss[t][a] is the loss of action a
 * at thetas[t]; rule[x] is the action taken on outcome x.
 */
struct FiniteDecisionProblem {
  std::vector<Vec> thetas;
  std::vector<Vec> likelihood;
  std::vector<Vec> loss;
  std::vector<int> rule;

  int num_thetas() const { return static_cast<int>(thetas.size()); }
  int num_outcomes() const { return static_cast<int>(rule.size()); }
  int num_actions() const { return thetas.empty() || loss.empty() ? 0 : static_cast<int>(loss[0].size()); }
  int dim() const { return thetas.empty() ? 0 : static_cast<int>(thetas[0].size()); }
};

inline void validate(const FiniteDecisionProblem& prob) {
  if (prob.thetas.empty()) throw std::invalid_argument("FiniteDecisionProblem: empty parameter grid");
  const std::size_t p = prob.thetas[0].size();
  if (p == 0) throw std::invalid_argument("FiniteDecisionProblem: zero-dimensional parameters");
  for (const Vec& t : prob.thetas) {
    if (t.size() != p) throw std::invalid_argument("FiniteDecisionProblem: ragged parameter grid");
  }
  if (prob.likelihood.size() != prob.thetas.size()) {
    throw std::invalid_argument("FiniteDecisionProblem: one likelihood row per parameter required");
  }
  const std::size_t nx = prob.rule.size();
  if (nx == 0) throw std::invalid_argument("FiniteDecisionProblem: empty sample space");
  for (const Vec& row : prob.likelihood) {
    if (row.size() != nx) throw std::invalid_argument("FiniteDecisionProblem: likelihood row length mismatch");
    double s = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) throw std::invalid_argument("FiniteDecisionProblem: negative probability");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) {
      throw std::invalid_argument("FiniteDecisionProblem: likelihood row does not sum to 1");
    }
  }
  if (prob.loss.size() != prob.thetas.size()) {
    throw std::invalid_argument("FiniteDecisionProblem: one loss row per parameter required");
  }
  const std::size_t na = prob.loss[0].size();
  if (na == 0) throw std::invalid_argument("FiniteDecisionProblem: empty action set");
  for (const Vec& row : prob.loss) {
    if (row.size() != na) throw std::invalid_argument("FiniteDecisionProblem: loss row length mismatch");
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("FiniteDecisionProblem: loss must be finite");
    }
  }
  for (int a : prob.rule) {
    if (a < 0 || a >= static_cast<int>(na)) {
      throw std::invalid_argument("FiniteDecisionProblem: rule action out of range");
    }
  }
}

/// Prior over the rows of a parameter grid; weights sum to 1.
struct FinitePrior {
  Vec weights;
};

inline void validate(const FinitePrior& prior, const FiniteDecisionProblem& prob) {
  if (prior.weights.size() != prob.thetas.size()) {
    throw std::invalid_argument("FinitePrior: weight count does not match grid");
  }
  double s = 0.0;
  for (double w : prior.weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("FinitePrior: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("FinitePrior: weights do not sum to 1");
}

/// Frequentist risk of the rule at grid point theta_index:
/// sum_x P(x | theta) L(theta, rule(x)).
inline double risk(const FiniteDecisionProblem& prob, int theta_index,
                   const std::vector<int>& rule) {
  if (theta_index < 0 || theta_index >= prob.num_thetas()) {
    throw std::invalid_argument("risk: theta index out of range");
  }
  if (static_cast<int>(rule.size()) != prob.num_outcomes()) {
    throw std::invalid_argument("risk: rule length does not match sample space");
  }
  const Vec& lik = prob.likelihood[static_cast<std::size_t>(theta_index)];
  const Vec& loss = prob.loss[static_cast<std::size_t>(theta_index)];
  double r = 0.0;
  for (std::size_t x = 0; x < rule.size(); ++x) {
    r += lik[x] * loss[static_cast<std::size_t>(rule[x])];
  }
  return r;
}

inline double risk(const FiniteDecisionProblem& prob, int theta_index) {
  return risk(prob, theta_index, prob.rule);
}

/// Bayes risk: the prior-weighted average of the frequentist risk.
inline double bayes_risk(const FiniteDecisionProblem& prob, const FinitePrior& prior,
                         const std::vector<int>& rule) {
  if (prior.weights.size() != prob.thetas.size()) {
    throw std::invalid_argument("bayes_risk: prior does not match grid");
  }
  double r = 0.0;
  for (int t = 0; t < prob.num_thetas(); ++t) {
    r += prior.weights[static_cast<std::size_t>(t)] * risk(prob, t, rule);
  }
  return r;
}

inline double bayes_risk(const FiniteDecisionProblem& prob, const FinitePrior& prior) {
  return bayes_risk(prob, prior, prob.rule);
}

/// Index of theta in the grid by exact coordinate match, or -1. Grid
/// closures copy coordinates bit-for-bit, so exact comparison is the
/// right notion here.
inline int find_theta(const std::vector<Vec>& thetas, const Vec& theta) {
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    if (thetas[t] == theta) return static_cast<int>(t);
  }
  return -1;
}

/// A prior together with the grid carrying it, as produced by symmetrize:
/// the input grid, possibly extended by permuted copies of its points.
struct PriorOnGrid {
  std::vector<Vec> thetas;
  Vec weights;
};

/// Group average of a prior: the result gives each theta the average of
/// the input weights over its orbit preimages,
/// w*(theta') = (1/|G|) sum_pi sum_{theta : permuted(theta) = theta'} w(theta).
/// The grid is extended (in first-discovery order) so it is closed under
/// the group action.
inline PriorOnGrid symmetrize(const std::vector<Vec>& thetas, const Vec& weights,
                              const ShuffleGroup& g, int cap = kEnumerationCap) {
  if (thetas.size() != weights.size()) {
    throw std::invalid_argument("symmetrize: grid and weights differ in length");
  }
  for (const Vec& t : thetas) {
    if (static_cast<int>(t.size()) != g.p()) {
      throw std::invalid_argument("symmetrize: parameter dimension does not match group");
    }
  }
  const std::vector<Permutation> perms = g.enumerate(cap);
  PriorOnGrid out;
  out.thetas = thetas;
  std::map<std::vector<double>, int> index;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    index.emplace(thetas[t], static_cast<int>(t));
  }
  out.weights.assign(thetas.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(perms.size());
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    for (const Permutation& pi : perms) {
      const Vec image = shuffle::apply(pi, thetas[t]);
      auto [it, inserted] = index.emplace(image, static_cast<int>(out.thetas.size()));
      if (inserted) {
        out.thetas.push_back(image);
        out.weights.push_back(0.0);
      }
      out.weights[static_cast<std::size_t>(it->second)] += scale * weights[t];
    }
  }
  return out;
}

/// Whether the prior is unchanged by every group element. Requires the
/// grid to be closed under the action; an unclosed grid cannot carry an
/// exchangeable prior with positive weight off-closure.
inline bool is_exchangeable(const std::vector<Vec>& thetas, const Vec& weights,
                            const ShuffleGroup& g, int cap = kEnumerationCap) {
  if (thetas.size() != weights.size()) {
    throw std::invalid_argument("is_exchangeable: grid and weights differ in length");
  }
  const std::vector<Permutation> perms = g.enumerate(cap);
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    for (const Permutation& pi : perms) {
      const int u = find_theta(thetas, shuffle::apply(pi, thetas[t]));
      if (u < 0) {
        if (weights[t] > 0.0) return false;
        continue;
      }
      if (std::abs(weights[static_cast<std::size_t>(u)] - weights[t]) > 1e-12) return false;
    }
  }
  return true;
}

/// Outcome of comparing the Bayes risk under the original prior with the
/// Bayes risk under its group average. When the frequentist risk function
/// is constant on group orbits the two agree.
struct SymmetrizationCheck {
  double bayes_risk_original = 0.0;
  double bayes_risk_symmetrized = 0.0;
  bool risk_invariant = false;
};

/// Evaluates both Bayes risks and tests orbit invariance of the risk
/// function. The grid must be closed under the group action.
inline SymmetrizationCheck check_symmetrization_invariance(const FiniteDecisionProblem& prob, const FinitePrior& prior,
                                    const ShuffleGroup& g, int cap = kEnumerationCap) {
  validate(prob);
  validate(prior, prob);
  if (prob.dim() != g.p()) {
    throw std::invalid_argument("check_symmetrization_invariance: parameter dimension does not match group");
  }
  const std::vector<Permutation> perms = g.enumerate(cap);
  std::vector<double> r(prob.thetas.size());
  for (int t = 0; t < prob.num_thetas(); ++t) r[static_cast<std::size_t>(t)] = risk(prob, t);

  bool invariant = true;
  for (std::size_t t = 0; t < prob.thetas.size(); ++t) {
    for (const Permutation& pi : perms) {
      const int u = find_theta(prob.thetas, shuffle::apply(pi, prob.thetas[t]));
      if (u < 0) {
        throw std::invalid_argument("check_symmetrization_invariance: grid is not closed under the group action");
      }
      if (std::abs(r[static_cast<std::size_t>(u)] - r[t]) > kRiskInvarianceTol) invariant = false;
    }
  }

  const PriorOnGrid sym = symmetrize(prob.thetas, prior.weights, g, cap);
  // Closure cannot add points here, so the symmetrized weights live on the
  // problem grid.
  SymmetrizationCheck out;
  out.bayes_risk_original = bayes_risk(prob, prior);
  out.bayes_risk_symmetrized = bayes_risk(prob, FinitePrior{sym.weights});
  out.risk_invariant = invariant;
  return out;
}

/// Labels for randomized test problems exercising the Bayes-risk
/// symmetrization identities.
enum class SymmetrizationCaseKind {
  orbit_invariant_tables,   // likelihood and loss constant on orbits; equality guaranteed
  exchangeable_prior,       // arbitrary tables, group-averaged prior; equality guaranteed
  equivariant_bernoulli,    // p = 2 product-Bernoulli data, equivariant rule, squared loss
  noninvariant_control,     // arbitrary tables and prior; no equality expected
};

struct SymmetrizationCase {
  FiniteDecisionProblem problem;
  FinitePrior prior;
  ShuffleGroup group{0, {}};
  SymmetrizationCaseKind kind = SymmetrizationCaseKind::orbit_invariant_tables;
  bool expect_equal = false;      // lhs == rhs guaranteed by construction
  bool expect_invariant = false;  // risk function orbit-constant by construction
};

namespace detail {

inline Vec random_simplex_row(int len, SplitMix64& rng) {
  Vec row(static_cast<std::size_t>(len));
  double s = 0.0;
  for (double& v : row) {
    v = 0.05 + rng.next_double();
    s += v;
  }
  for (double& v : row) v /= s;
  return row;
}

inline std::vector<Vec> closed_random_grid(int p, int n_base, const ShuffleGroup& g,
                                           SplitMix64& rng) {
  std::vector<Vec> grid;
  const std::vector<Permutation> perms = g.enumerate();
  std::map<std::vector<double>, int> seen;
  for (int b = 0; b < n_base; ++b) {
    Vec base(static_cast<std::size_t>(p));
    for (double& v : base) v = rng.next_double();
    for (const Permutation& pi : perms) {
      Vec image = shuffle::apply(pi, base);
      if (seen.emplace(image, static_cast<int>(grid.size())).second) {
        grid.push_back(std::move(image));
      }
    }
  }
  return grid;
}

/// Canonical orbit key under the full group on movable indices: the grid
/// points here are closed under a full group, so sorting identifies orbits.
inline std::vector<double> orbit_key(const Vec& theta) {
  std::vector<double> key = theta;
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace detail

/// Randomized finite decision problem of the requested kind, small enough
/// for exact evaluation.
inline SymmetrizationCase make_symmetrization_case(SymmetrizationCaseKind kind, SplitMix64& rng) {
  SymmetrizationCase out;
  out.kind = kind;

  if (kind == SymmetrizationCaseKind::equivariant_bernoulli) {
    // Two Bernoulli coordinates, outcomes (x1, x2) coded as 2 x1 + x2,
    // actions = coordinatewise plug-in estimates (c[x1], c[x2]),
    // squared-error loss. The risk decomposes into a symmetric sum over
    // coordinates, so it is invariant under swapping theta.
    const double a = 0.05 + 0.9 * rng.next_double();
    const double b = 0.05 + 0.9 * rng.next_double();
    const double c0 = rng.next_double();
    const double c1 = rng.next_double();
    out.group = ShuffleGroup::full(2);
    FiniteDecisionProblem& prob = out.problem;
    prob.thetas = {{a, b}, {b, a}};
    for (const Vec& th : prob.thetas) {
      Vec row(4);
      for (int x1 = 0; x1 < 2; ++x1) {
        for (int x2 = 0; x2 < 2; ++x2) {
          const double p1 = x1 == 1 ? th[0] : 1.0 - th[0];
          const double p2 = x2 == 1 ? th[1] : 1.0 - th[1];
          row[static_cast<std::size_t>(2 * x1 + x2)] = p1 * p2;
        }
      }
      prob.likelihood.push_back(row);
    }
    const double est[2] = {c0, c1};
    for (const Vec& th : prob.thetas) {
      Vec row(4);
      for (int x1 = 0; x1 < 2; ++x1) {
        for (int x2 = 0; x2 < 2; ++x2) {
          const double d1 = th[0] - est[x1];
          const double d2 = th[1] - est[x2];
          row[static_cast<std::size_t>(2 * x1 + x2)] = d1 * d1 + d2 * d2;
        }
      }
      prob.loss.push_back(row);
    }
    prob.rule = {0, 1, 2, 3};
    const double w = rng.next_double();
    out.prior.weights = {w, 1.0 - w};
    out.expect_equal = true;
    out.expect_invariant = true;
    return out;
  }

  const int p = 2 + static_cast<int>(rng.next_below(2));  // 2 or 3
  out.group = ShuffleGroup::full(p);
  const std::vector<Vec> grid = detail::closed_random_grid(p, 2, out.group, rng);
  const int nx = 2 + static_cast<int>(rng.next_below(5));  // 2..6 outcomes
  const int na = 2 + static_cast<int>(rng.next_below(3));  // 2..4 actions

  FiniteDecisionProblem& prob = out.problem;
  prob.thetas = grid;
  if (kind == SymmetrizationCaseKind::orbit_invariant_tables) {
    // One likelihood row and one loss row per orbit, shared by all points
    // of the orbit, making the risk function exactly orbit-constant.
    std::map<std::vector<double>, std::pair<Vec, Vec>> orbit_rows;
    for (const Vec& th : grid) {
      const std::vector<double> key = detail::orbit_key(th);
      auto it = orbit_rows.find(key);
      if (it == orbit_rows.end()) {
        Vec lik = detail::random_simplex_row(nx, rng);
        Vec loss(static_cast<std::size_t>(na));
        for (double& v : loss) v = 5.0 * rng.next_double();
        it = orbit_rows.emplace(key, std::make_pair(std::move(lik), std::move(loss))).first;
      }
      prob.likelihood.push_back(it->second.first);
      prob.loss.push_back(it->second.second);
    }
    out.expect_equal = true;
    out.expect_invariant = true;
  } else {
    for (std::size_t t = 0; t < grid.size(); ++t) {
      prob.likelihood.push_back(detail::random_simplex_row(nx, rng));
      Vec loss(static_cast<std::size_t>(na));
      for (double& v : loss) v = 5.0 * rng.next_double();
      prob.loss.push_back(std::move(loss));
    }
  }
  prob.rule.resize(static_cast<std::size_t>(nx));
  for (int& a : prob.rule) a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(na)));

  Vec w = detail::random_simplex_row(static_cast<int>(grid.size()), rng);
  if (kind == SymmetrizationCaseKind::exchangeable_prior) {
    const PriorOnGrid sym = symmetrize(grid, w, out.group);
    // The grid is already closed, so the symmetrized prior lives on it.
    out.prior.weights = sym.weights;
    out.expect_equal = true;
    out.expect_invariant = false;
  } else {
    out.prior.weights = std::move(w);
    out.expect_equal = kind == SymmetrizationCaseKind::orbit_invariant_tables;
    out.expect_invariant = kind == SymmetrizationCaseKind::orbit_invariant_tables;
  }
  return out;
}

}  // namespace shuffle
