#pragma once

#include "simrel/flownet.hpp"
#include "simrel/lp.hpp"
#include "simrel/model.hpp"
#include "simrel/relation.hpp"

namespace simrel {

// Brute-force / LP reference implementations used by property tests and as
// the `--engine oracle` escape hatch. They deliberately avoid the flow
// machinery: weight functions and valid-gamma questions are decided by LP
// feasibility alone.

/// Direct LP encoding of the weight-function definition over Delta variables
/// on R_aux; kAuxVertex stands for the auxiliary state.
struct WeightLp {
  LpProblem lp;
  std::vector<std::pair<std::pair<StateId, StateId>, int>> delta_vars;
};
WeightLp build_weight_lp(const Distribution& mu1, const Distribution& mu2, const Relation& rel);

bool weight_oracle(const Distribution& mu1, const Distribution& mu2, const Relation& rel,
                   LpStats* stats = nullptr);

/// Joint LP over the flow variables and gamma: conservation, capacity (with
/// equality on the mandatory edges), gamma >= 0 and optionally gamma <=
/// bound. Returns a feasible gamma or nullopt.
std::optional<Rational> valid_gamma_oracle(const ParametricNetwork& pn,
                                           const std::optional<Rational>& bound = std::nullopt,
                                           LpStats* stats = nullptr);

enum class RelationKind { Strong, StrongProbabilistic, Weak };

/// Hard ceiling on naive_simrel inputs; the oracles enumerate pairs with LP
/// checks and are meant for desk-scale cross-validation only.
constexpr int kNaiveSizeBound = 32;

/// Ground-truth fixpoint computed with the LP oracles only (no flow
/// machinery). Throws std::invalid_argument when the model exceeds the size
/// bound or the relation kind does not fit the model kind.
Relation naive_simrel(const Model& model, RelationKind kind, LpStats* stats = nullptr);

} // namespace simrel
