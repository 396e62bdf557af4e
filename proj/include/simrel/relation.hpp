#pragma once

#include <utility>
#include <vector>

#include "simrel/model.hpp"

namespace simrel {

/// Binary relation on [0, n) x [0, n) with O(1) membership and forward /
/// inverse image iteration. Pair iteration order is lexicographic.
class Relation {
public:
  Relation() = default;
  explicit Relation(int n) : n_(n), bits_(static_cast<size_t>(n) * n, 0) {}

  int domain_size() const { return n_; }
  long size() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(StateId a, StateId b) const { return bits_[index(a, b)] != 0; }

  void insert(StateId a, StateId b) {
    auto& cell = bits_[index(a, b)];
    if (!cell) {
      cell = 1;
      ++count_;
    }
  }

  void erase(StateId a, StateId b) {
    auto& cell = bits_[index(a, b)];
    if (cell) {
      cell = 0;
      --count_;
    }
  }

  /// R(a) = { b | (a,b) in R }, ascending.
  std::vector<StateId> image(StateId a) const {
    std::vector<StateId> out;
    for (StateId b = 0; b < n_; ++b)
      if (contains(a, b)) out.push_back(b);
    return out;
  }

  /// R^{-1}(b) = { a | (a,b) in R }, ascending.
  std::vector<StateId> preimage(StateId b) const {
    std::vector<StateId> out;
    for (StateId a = 0; a < n_; ++a)
      if (contains(a, b)) out.push_back(a);
    return out;
  }

  std::vector<std::pair<StateId, StateId>> pairs() const {
    std::vector<std::pair<StateId, StateId>> out;
    out.reserve(static_cast<size_t>(count_));
    for (StateId a = 0; a < n_; ++a)
      for (StateId b = 0; b < n_; ++b)
        if (contains(a, b)) out.emplace_back(a, b);
    return out;
  }

  bool operator==(const Relation& other) const { return n_ == other.n_ && bits_ == other.bits_; }

  bool subset_of(const Relation& other) const {
    for (StateId a = 0; a < n_; ++a)
      for (StateId b = 0; b < n_; ++b)
        if (contains(a, b) && !other.contains(a, b)) return false;
    return true;
  }

private:
  size_t index(StateId a, StateId b) const { return static_cast<size_t>(a) * n_ + b; }

  int n_ = 0;
  long count_ = 0;
  std::vector<char> bits_;
};

/// Pairs with equal label sets; the usual initial relation R1.
Relation label_equal_relation(const Model& model);

} // namespace simrel
