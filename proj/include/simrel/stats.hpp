#pragma once

#include <set>
#include <utility>
#include <vector>

#include "simrel/flownet.hpp"
#include "simrel/lp.hpp"
#include "simrel/relation.hpp"

namespace simrel {

/// Counters shared by all decision engines; the CLI prints them under a fixed
/// key set regardless of which engine ran.
struct RunStats {
  long iterations = 0;
  FlowStats flow;
  LpStats lp;
  long branch_a = 0;
  long branch_b = 0;
  long branch_c = 0;
};

/// Optional per-iteration recording for tests and instrumentation.
struct SimTrace {
  using Pair = std::pair<StateId, StateId>;
  std::vector<Relation> relations;                 // R_i at the start of iteration i
  std::vector<std::vector<Pair>> removed;          // pairs removed during iteration i
  std::vector<std::set<Pair>> updated_pairs;       // checked via smf_update
  std::vector<std::set<Pair>> fresh_pairs;         // checked via a fresh network

  bool pair_updated_in(int iteration, StateId a, StateId b) const {
    return iteration - 1 < static_cast<int>(updated_pairs.size()) &&
           updated_pairs[iteration - 1].count({a, b}) != 0;
  }
  bool pair_fresh_in(int iteration, StateId a, StateId b) const {
    return iteration - 1 < static_cast<int>(fresh_pairs.size()) &&
           fresh_pairs[iteration - 1].count({a, b}) != 0;
  }
  bool pair_removed_in(int iteration, StateId a, StateId b) const {
    if (iteration - 1 >= static_cast<int>(removed.size())) return false;
    for (const auto& p : removed[iteration - 1])
      if (p.first == a && p.second == b) return true;
    return false;
  }
};

} // namespace simrel
