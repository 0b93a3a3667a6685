#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shuffle/rng.hpp"

namespace shuffle {

/// Permutations enumerable by brute force must have at most this many
/// movable indices (8! = 40320 terms).
inline constexpr int kEnumerationCap = 8;

/**
 * A permutation of {0, ..., p-1}, stored as the image table
 * mapping[i] = pi(i). Immutable after construction.
 */
class Permutation {
 public:
  /// Validates that `mapping` is a bijection of {0, ..., p-1}.
  explicit Permutation(std::vector<int> mapping) : map_(std::move(mapping)) {
    const int p = static_cast<int>(map_.size());
    std::vector<char> seen(map_.size(), 0);
    for (int v : map_) {
      if (v < 0 || v >= p || seen[v]) {
        throw std::invalid_argument("Permutation: mapping is not a bijection of {0..p-1}");
      }
      seen[v] = 1;
    }
  }

  static Permutation identity(int p) {
    if (p < 0) throw std::invalid_argument("Permutation::identity: p must be nonnegative");
    std::vector<int> m(p);
    for (int i = 0; i < p; ++i) m[i] = i;
    return Permutation(std::move(m));
  }

  int size() const { return static_cast<int>(map_.size()); }

  /// Image of index i.
  int operator()(int i) const { return map_[static_cast<std::size_t>(i)]; }

  const std::vector<int>& mapping() const { return map_; }

  bool is_identity() const {
    for (int i = 0; i < size(); ++i) {
      if (map_[static_cast<std::size_t>(i)] != i) return false;
    }
    return true;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> map_;
};

/// Composition a after b: result(i) = a(b(i)).
inline Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("compose: size mismatch");
  }
  std::vector<int> m(static_cast<std::size_t>(a.size()));
  for (int i = 0; i < a.size(); ++i) m[static_cast<std::size_t>(i)] = a(b(i));
  return Permutation(std::move(m));
}

inline Permutation invert(const Permutation& pi) {
  std::vector<int> m(static_cast<std::size_t>(pi.size()));
  for (int i = 0; i < pi.size(); ++i) m[static_cast<std::size_t>(pi(i))] = i;
  return Permutation(std::move(m));
}

/// Copy of `pi` with the images at positions i and j exchanged.
inline Permutation transpose_images(const Permutation& pi, int i, int j) {
  if (i < 0 || j < 0 || i >= pi.size() || j >= pi.size()) {
    throw std::invalid_argument("transpose_images: index out of range");
  }
  std::vector<int> m = pi.mapping();
  std::swap(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]);
  return Permutation(std::move(m));
}

/// Coordinate shuffle: result[i] = v[pi(i)].
template <typename T>
std::vector<T> apply(const Permutation& pi, const std::vector<T>& v) {
  if (static_cast<int>(v.size()) != pi.size()) {
    throw std::invalid_argument("apply: vector length does not match permutation size");
  }
  std::vector<T> out(v.size());
  for (int i = 0; i < pi.size(); ++i) {
    out[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(pi(i))];
  }
  return out;
}

/**
 * The group of permutations of {0, ..., p-1} that fix every index outside
 * a designated movable set pointwise. Covers the identity-only group
 * (movable empty or a single index), the full symmetric group, and
 * everything between.
 */
class ShuffleGroup {
 public:
  ShuffleGroup(int p, std::vector<int> movable) : p_(p), movable_(std::move(movable)) {
    if (p < 0) throw std::invalid_argument("ShuffleGroup: p must be nonnegative");
    std::sort(movable_.begin(), movable_.end());
    for (std::size_t k = 0; k < movable_.size(); ++k) {
      if (movable_[k] < 0 || movable_[k] >= p) {
        throw std::invalid_argument("ShuffleGroup: movable index out of range");
      }
      if (k > 0 && movable_[k] == movable_[k - 1]) {
        throw std::invalid_argument("ShuffleGroup: duplicate movable index");
      }
    }
  }

  static ShuffleGroup identity_only(int p) { return ShuffleGroup(p, {}); }

  static ShuffleGroup full(int p) {
    std::vector<int> all(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) all[static_cast<std::size_t>(i)] = i;
    return ShuffleGroup(p, std::move(all));
  }

  /// Group fixing the given indices, acting freely on the rest.
  static ShuffleGroup fixing(int p, const std::vector<int>& fixed) {
    std::vector<char> is_fixed(static_cast<std::size_t>(p), 0);
    for (int i : fixed) {
      if (i < 0 || i >= p) throw std::invalid_argument("ShuffleGroup::fixing: index out of range");
      is_fixed[static_cast<std::size_t>(i)] = 1;
    }
    std::vector<int> movable;
    for (int i = 0; i < p; ++i) {
      if (!is_fixed[static_cast<std::size_t>(i)]) movable.push_back(i);
    }
    return ShuffleGroup(p, std::move(movable));
  }

  int p() const { return p_; }
  const std::vector<int>& movable() const { return movable_; }
  int movable_count() const { return static_cast<int>(movable_.size()); }

  /// True when the group contains only the identity.
  bool is_identity_only() const { return movable_.size() <= 1; }

  /// |G| = (number of movable indices)!, exact up to 20 movable indices.
  std::uint64_t order() const {
    if (movable_.size() > 20) {
      throw std::invalid_argument("ShuffleGroup::order: overflows 64 bits beyond 20 movable indices");
    }
    std::uint64_t f = 1;
    for (std::uint64_t k = 2; k <= movable_.size(); ++k) f *= k;
    return f;
  }

  /// log |G| = log((number of movable indices)!), valid for any size.
  double log_order() const {
    return std::lgamma(static_cast<double>(movable_.size()) + 1.0);
  }

  /// All group elements, identity first. Throws when the movable set
  /// exceeds `cap` indices.
  std::vector<Permutation> enumerate(int cap = kEnumerationCap) const {
    if (movable_count() > cap) {
      throw std::invalid_argument("ShuffleGroup::enumerate: movable set exceeds enumeration cap");
    }
    std::vector<int> images = movable_;
    std::vector<Permutation> out;
    out.reserve(static_cast<std::size_t>(order()));
    std::vector<int> base(static_cast<std::size_t>(p_));
    for (int i = 0; i < p_; ++i) base[static_cast<std::size_t>(i)] = i;
    // next_permutation starting from sorted order yields the identity
    // assignment first.
    do {
      std::vector<int> m = base;
      for (std::size_t k = 0; k < movable_.size(); ++k) {
        m[static_cast<std::size_t>(movable_[k])] = images[k];
      }
      out.emplace_back(std::move(m));
    } while (std::next_permutation(images.begin(), images.end()));
    return out;
  }

  /// Uniform random pair of distinct movable indices (i, j).
  std::pair<int, int> propose_transposition(SplitMix64& rng) const {
    const std::uint64_t m = movable_.size();
    if (m < 2) {
      throw std::invalid_argument("ShuffleGroup::propose_transposition: needs at least two movable indices");
    }
    const std::uint64_t a = rng.next_below(m);
    std::uint64_t b = rng.next_below(m - 1);
    if (b >= a) ++b;
    return {movable_[a], movable_[b]};
  }

  /// Uniform random group element (Fisher-Yates shuffle of the movable images).
  Permutation random_element(SplitMix64& rng) const {
    std::vector<int> m(static_cast<std::size_t>(p_));
    for (int i = 0; i < p_; ++i) m[static_cast<std::size_t>(i)] = i;
    for (std::size_t k = movable_.size(); k > 1; --k) {
      const std::uint64_t r = rng.next_below(k);
      std::swap(m[static_cast<std::size_t>(movable_[k - 1])],
                m[static_cast<std::size_t>(movable_[r])]);
    }
    return Permutation(std::move(m));
  }

  friend bool operator==(const ShuffleGroup&, const ShuffleGroup&) = default;

 private:
  int p_;
  std::vector<int> movable_;
};

/// Parses a group descriptor: "identity", "full", or "fix=i,j,..." naming
/// the indices held fixed while all others may move.
inline ShuffleGroup parse_group(const std::string& desc, int p) {
  if (desc == "identity") return ShuffleGroup::identity_only(p);
  if (desc == "full") return ShuffleGroup::full(p);
  const std::string prefix = "fix=";
  if (desc.rfind(prefix, 0) == 0) {
    std::vector<int> fixed;
    std::stringstream ss(desc.substr(prefix.size()));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(tok, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("parse_group: bad index '" + tok + "'");
      }
      if (pos != tok.size()) throw std::invalid_argument("parse_group: bad index '" + tok + "'");
      fixed.push_back(v);
    }
    return ShuffleGroup::fixing(p, fixed);
  }
  throw std::invalid_argument("parse_group: unknown descriptor '" + desc + "' (expected identity, full, or fix=i,j,...)");
}

/// Copy of v with the values at movable indices sorted ascending; fixed
/// coordinates are untouched. Canonical representative of a multiset
/// estimate that is only identified up to the group action.
inline std::vector<double> sort_on_movable(std::vector<double> v, const ShuffleGroup& g) {
  if (static_cast<int>(v.size()) != g.p()) {
    throw std::invalid_argument("sort_on_movable: vector length does not match group dimension");
  }
  std::vector<double> vals;
  vals.reserve(g.movable().size());
  for (int i : g.movable()) vals.push_back(v[static_cast<std::size_t>(i)]);
  std::sort(vals.begin(), vals.end());
  for (std::size_t k = 0; k < vals.size(); ++k) {
    v[static_cast<std::size_t>(g.movable()[k])] = vals[k];
  }
  return v;
}

}  // namespace shuffle
