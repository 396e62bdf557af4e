#pragma once

#include "simrel/lp.hpp"
#include "simrel/model.hpp"
#include "simrel/relation.hpp"
#include "simrel/stats.hpp"

namespace simrel {

/// LP encoding of a combined-transition match, together with the variable
/// layout needed to decode a witness (coefficients c_i and the coupling
/// f_(s,t) over R_aux; kAuxVertex stands for the auxiliary state).
struct CombinedLp {
  LpProblem lp;
  std::vector<int> c_vars;
  std::vector<std::pair<std::pair<StateId, StateId>, int>> f_vars;
};

/// Combined-transition feasibility for PAs: sum c_i = 1, 0 <= c_i <= 1, 0 <= f <= 1,
/// mu(s) = sum_t f_(s,t), and sum_s f_(s,t) = sum_i c_i mu_i(t), over the
/// candidate set Steps_alpha(s2). Requires Steps_alpha(s2) nonempty.
CombinedLp build_lp_pa(const Model& m, StateId s1, ActionId alpha, const Distribution& mu,
                       StateId s2, const Relation& rel);

/// CPA variant over the exit-rate class Steps^E_alpha(s2): r(s) = r(S) *
/// sum_t f_(s,t) and E * sum_s f_(s,t) = sum_i c_i r_i(t). Requires
/// E >= r(S) > 0 and a nonempty class.
CombinedLp build_lp_cpa(const Model& m, StateId s1, ActionId alpha, const RateFunction& r,
                        StateId s2, const Rational& exit_class, const Relation& rel);

/// Exit rates of alpha-successor rate functions of s, ascending, distinct.
std::vector<Rational> exit_rate_classes(const Model& m, StateId s, ActionId alpha);

/// One-step check "s2 strongly probabilistically simulates s1 up to rel".
bool prob_sim_upto(const Model& m, StateId s1, StateId s2, const Relation& rel,
                   RunStats* stats = nullptr);

/// Refinement fixpoints with per-arc LP feasibility as the survival test.
Relation simrel_pa_prob(const Model& m, RunStats* stats = nullptr, SimTrace* trace = nullptr);
Relation simrel_cpa_prob(const Model& m, RunStats* stats = nullptr, SimTrace* trace = nullptr);

/// Dispatches on the model kind (PA or CPA).
Relation simrel_prob(const Model& m, RunStats* stats = nullptr, SimTrace* trace = nullptr);

} // namespace simrel
