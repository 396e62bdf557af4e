#pragma once

#include "simrel/model.hpp"
#include "simrel/relation.hpp"
#include "simrel/stats.hpp"

namespace simrel {

/// Initial relation R1 of the refinement loops: label-equal pairs, restricted
/// by the static side conditions of the model class (exit-rate dominance for
/// CTMCs, action-set inclusion for PA/CPA).
Relation initial_strong_relation(const Model& model);

/// One-step check "s2 strongly simulates s1 up to rel": the label condition
/// plus the weight-function condition via maximum flow (per successor
/// distribution for PA/CPA, with the exit-rate side conditions in continuous
/// time). rel is an arbitrary candidate relation.
bool strong_sim_upto(const Model& model, StateId s1, StateId s2, const Relation& rel,
                     RunStats* stats = nullptr);

/// Basic refinement loop: a fresh maximum-flow check for every surviving pair
/// in every iteration. Works for all model kinds.
Relation simrel_basic(const Model& model, RunStats* stats = nullptr, SimTrace* trace = nullptr);

/// Improved engine for FPS/DTMC/CTMC: per-pair persistent networks with
/// listener-driven edge deletion sets and incremental max-flow recomputation.
/// Returns the same relation as simrel_basic.
Relation simrel_fps(const Model& model, RunStats* stats = nullptr, SimTrace* trace = nullptr);

/// Improved engine for PA/CPA: per-arc candidate lists with incremental
/// recomputation for the head candidate (ActSmf). For CPAs, candidate lists
/// are pre-filtered by the exit-rate condition and networks are built over
/// induced distributions.
Relation simrel_pa(const Model& model, RunStats* stats = nullptr, SimTrace* trace = nullptr);

} // namespace simrel
