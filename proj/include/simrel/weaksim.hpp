#pragma once

#include "simrel/flownet.hpp"
#include "simrel/model.hpp"
#include "simrel/relation.hpp"
#include "simrel/stats.hpp"

namespace simrel {

struct WeakOptions {
  bool improved = false;             // partition-based branch (c) when h > 1
  bool incomplete_heuristic = false; // skip h = 1 pairs in incomplete iterations
};

/// Parametric network N(gamma) for the pair (s1, s2) under rel, with the
/// MU/PV partition of the successor sets. `rows` must be the probability rows
/// of the model (for a CTMC, of its embedded DTMC).
ParametricNetwork build_parametric(const Model& model, const std::vector<Distribution>& rows,
                                   StateId s1, StateId s2, const Relation& rel,
                                   FlowStats* stats = nullptr);

/// Equivalence classes A_1..A_h of (H u H^-1)* where H is the local fragment
/// of rel between the posts of s1 and s2; the class containing s1 and s2 is
/// last. Requires (s1, s2) in rel.
std::vector<std::vector<StateId>> weak_partition(const Model& model, StateId s1, StateId s2,
                                                 const Relation& rel);

/// Checks s1 (weakly, up to rel) below s2 in a DTMC: stutter-only shortcut,
/// reachability branch, or breakpoint analysis of N(gamma).
bool ws_check(const Model& dtmc, StateId s1, StateId s2, const Relation& rel,
              RunStats* stats = nullptr, bool improved = false);

/// Branch (c) tailored to DTMCs for h > 1: all class ratios gamma_i must
/// agree and the common value must be valid. `rate_bound` carries the CTMC
/// bound gamma* when present.
bool ws_improved_check(const Model& model, const std::vector<Distribution>& rows, StateId s1,
                       StateId s2, const Relation& rel,
                       const std::vector<std::vector<StateId>>& classes,
                       const std::optional<Rational>& rate_bound, RunStats* stats = nullptr);

/// CTMC variant: reachability branch removed, validity bounded by
/// gamma* = R(s2,S)/R(s1,S).
bool ws_check_ctmc(const Model& ctmc, StateId s1, StateId s2, const Relation& rel,
                   RunStats* stats = nullptr, bool improved = false);

/// Weak-simulation preorder of a DTMC or CTMC by refinement over ws_check /
/// ws_check_ctmc.
Relation simrel_w(const Model& model, const WeakOptions& options = {}, RunStats* stats = nullptr,
                  SimTrace* trace = nullptr);

} // namespace simrel
