#include "simrel/probsim.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "simrel/flownet.hpp"
#include "simrel/strongsim.hpp"

namespace simrel {

namespace {

// Shared construction for the PA and CPA feasibility tests. The coupling variables range
// over R_aux restricted to the relevant supports: left side supp_aux(mu),
// right side the union of the candidate supports (targets outside it are
// forced to zero inflow and can be dropped).
CombinedLp build_combined(const std::vector<std::pair<StateId, Rational>>& left_mass,
                          const std::vector<std::vector<std::pair<StateId, Rational>>>& candidates,
                          const Relation& rel, const Rational& left_scale,
                          const Rational& right_scale) {
  CombinedLp out;
  LpProblem& lp = out.lp;

  size_t k = candidates.size();
  for (size_t i = 0; i < k; ++i) {
    int v = lp.add_variable("c" + std::to_string(i + 1));
    lp.set_lower(v, Rational(0));
    lp.set_upper(v, Rational(1));
    out.c_vars.push_back(v);
  }

  auto name_of = [](StateId s) { return s == kAuxVertex ? std::string("aux") : std::to_string(s); };

  std::vector<StateId> targets;
  for (const auto& cand : candidates)
    for (const auto& [t, value] : cand)
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
  std::sort(targets.begin(), targets.end());

  auto related = [&](StateId s, StateId t) {
    if (s == kAuxVertex) return true;  // aux is below everything
    if (t == kAuxVertex) return false;
    return rel.contains(s, t);
  };

  std::vector<std::vector<int>> row_vars(left_mass.size());
  std::vector<std::vector<std::pair<int, Rational>>> col_sums(targets.size());
  for (size_t si = 0; si < left_mass.size(); ++si) {
    for (size_t ti = 0; ti < targets.size(); ++ti) {
      if (!related(left_mass[si].first, targets[ti])) continue;
      int v = lp.add_variable("f_" + name_of(left_mass[si].first) + "_" + name_of(targets[ti]));
      lp.set_lower(v, Rational(0));
      lp.set_upper(v, Rational(1));
      out.f_vars.push_back({{left_mass[si].first, targets[ti]}, v});
      row_vars[si].push_back(v);
      col_sums[ti].push_back({v, Rational(1)});
    }
  }

  {
    std::vector<std::pair<int, Rational>> coeffs;
    for (int v : out.c_vars) coeffs.push_back({v, Rational(1)});
    lp.add_constraint(std::move(coeffs), LpProblem::Rel::Eq, Rational(1));
  }
  // Left mass constraints: mu(s) = left_scale * sum_t f_(s,t).
  for (size_t si = 0; si < left_mass.size(); ++si) {
    std::vector<std::pair<int, Rational>> coeffs;
    for (int v : row_vars[si]) coeffs.push_back({v, left_scale});
    lp.add_constraint(std::move(coeffs), LpProblem::Rel::Eq, left_mass[si].second);
  }
  // Right coupling constraints: right_scale * sum_s f_(s,t) = sum_i c_i mu_i(t).
  for (size_t ti = 0; ti < targets.size(); ++ti) {
    std::vector<std::pair<int, Rational>> coeffs;
    for (const auto& [v, one] : col_sums[ti]) coeffs.push_back({v, right_scale});
    for (size_t i = 0; i < k; ++i) {
      Rational mass(0);
      for (const auto& [t, value] : candidates[i])
        if (t == targets[ti]) mass = value;
      if (mass != 0) coeffs.push_back({out.c_vars[i], -mass});
    }
    lp.add_constraint(std::move(coeffs), LpProblem::Rel::Eq, Rational(0));
  }
  return out;
}

std::vector<std::pair<StateId, Rational>> mass_with_aux(const Distribution& mu) {
  std::vector<std::pair<StateId, Rational>> out;
  if (mu.deficit() > 0) out.push_back({kAuxVertex, mu.deficit()});
  out.insert(out.end(), mu.entries().begin(), mu.entries().end());
  return out;
}

} // namespace

CombinedLp build_lp_pa(const Model& m, StateId /*s1*/, ActionId alpha, const Distribution& mu,
                       StateId s2, const Relation& rel) {
  auto it = m.pa[s2].steps.find(alpha);
  if (it == m.pa[s2].steps.end() || it->second.empty())
    throw std::invalid_argument("build_lp_pa: no alpha-successor distributions at s2");
  std::vector<std::vector<std::pair<StateId, Rational>>> candidates;
  for (const auto& cand : it->second) candidates.push_back(mass_with_aux(cand));
  return build_combined(mass_with_aux(mu), candidates, rel, Rational(1), Rational(1));
}

CombinedLp build_lp_cpa(const Model& m, StateId /*s1*/, ActionId alpha, const RateFunction& r,
                        StateId s2, const Rational& exit_class, const Relation& rel) {
  Rational exit = r.exit_rate();
  assert(exit > 0 && exit_class >= exit);
  auto it = m.cpa[s2].steps.find(alpha);
  assert(it != m.cpa[s2].steps.end());
  std::vector<std::vector<std::pair<StateId, Rational>>> candidates;
  for (const auto& cand : it->second)
    if (cand.exit_rate() == exit_class)
      candidates.push_back({cand.entries().begin(), cand.entries().end()});
  assert(!candidates.empty());
  std::vector<std::pair<StateId, Rational>> left(r.entries().begin(), r.entries().end());
  return build_combined(left, candidates, rel, exit, exit_class);
}

std::vector<Rational> exit_rate_classes(const Model& m, StateId s, ActionId alpha) {
  std::vector<Rational> out;
  auto it = m.cpa[s].steps.find(alpha);
  if (it == m.cpa[s].steps.end()) return out;
  for (const auto& r : it->second) {
    Rational e = r.exit_rate();
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool prob_sim_upto(const Model& m, StateId s1, StateId s2, const Relation& rel, RunStats* stats) {
  if (!m.label_equal(s1, s2)) return false;
  LpStats* ls = stats ? &stats->lp : nullptr;
  if (m.kind == ModelKind::PA) {
    for (const auto& [alpha, dists] : m.pa[s1].steps) {
      auto it = m.pa[s2].steps.find(alpha);
      if (it == m.pa[s2].steps.end() || it->second.empty()) return false;
      for (const auto& mu1 : dists) {
        CombinedLp clp = build_lp_pa(m, s1, alpha, mu1, s2, rel);
        if (!lp_feasible(clp.lp, ls)) return false;
      }
    }
    return true;
  }
  if (m.kind == ModelKind::CPA) {
    for (const auto& [alpha, rates] : m.cpa[s1].steps) {
      for (const auto& r1 : rates) {
        if (r1.exit_rate() == 0) continue;  // vacuously matched
        bool matched = false;
        for (const Rational& e : exit_rate_classes(m, s2, alpha)) {
          if (e < r1.exit_rate()) continue;
          CombinedLp clp = build_lp_cpa(m, s1, alpha, r1, s2, e, rel);
          if (lp_feasible(clp.lp, ls)) {
            matched = true;
            break;
          }
        }
        if (!matched) return false;
      }
    }
    return true;
  }
  throw std::invalid_argument("prob_sim_upto needs a PA or CPA");
}

namespace {

Relation prob_fixpoint(const Model& m, RunStats* stats, SimTrace* trace) {
  Relation cur = initial_strong_relation(m);
  for (;;) {
    if (stats) ++stats->iterations;
    if (trace) {
      trace->relations.push_back(cur);
      trace->removed.emplace_back();
      trace->updated_pairs.emplace_back();
      trace->fresh_pairs.emplace_back();
    }
    Relation next(m.n);
    bool changed = false;
    for (const auto& [s1, s2] : cur.pairs()) {
      if (prob_sim_upto(m, s1, s2, cur, stats)) {
        next.insert(s1, s2);
      } else {
        changed = true;
        if (trace) trace->removed.back().push_back({s1, s2});
      }
    }
    cur = std::move(next);
    if (!changed) return cur;
  }
}

} // namespace

Relation simrel_pa_prob(const Model& m, RunStats* stats, SimTrace* trace) {
  if (m.kind != ModelKind::PA) throw std::invalid_argument("simrel_pa_prob needs a PA");
  return prob_fixpoint(m, stats, trace);
}

Relation simrel_cpa_prob(const Model& m, RunStats* stats, SimTrace* trace) {
  if (m.kind != ModelKind::CPA) throw std::invalid_argument("simrel_cpa_prob needs a CPA");
  return prob_fixpoint(m, stats, trace);
}

Relation simrel_prob(const Model& m, RunStats* stats, SimTrace* trace) {
  if (m.kind == ModelKind::PA) return simrel_pa_prob(m, stats, trace);
  if (m.kind == ModelKind::CPA) return simrel_cpa_prob(m, stats, trace);
  throw std::invalid_argument("strong probabilistic simulation needs a PA or CPA");
}

} // namespace simrel
