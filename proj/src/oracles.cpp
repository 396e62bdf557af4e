#include "simrel/oracles.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <stdexcept>

#include "simrel/probsim.hpp"

namespace simrel {

WeightLp build_weight_lp(const Distribution& mu1, const Distribution& mu2, const Relation& rel) {
  WeightLp out;
  LpProblem& lp = out.lp;
  auto name_of = [](StateId s) { return s == kAuxVertex ? std::string("aux") : std::to_string(s); };

  std::vector<std::pair<StateId, Rational>> left(mu1.entries().begin(), mu1.entries().end());
  if (mu1.deficit() > 0) left.push_back({kAuxVertex, mu1.deficit()});
  std::vector<std::pair<StateId, Rational>> right(mu2.entries().begin(), mu2.entries().end());
  if (mu2.deficit() > 0) right.push_back({kAuxVertex, mu2.deficit()});

  auto related = [&](StateId s, StateId t) {
    if (s == kAuxVertex) return true;
    if (t == kAuxVertex) return false;
    return rel.contains(s, t);
  };

  std::vector<std::vector<std::pair<int, Rational>>> rows(left.size()), cols(right.size());
  for (size_t i = 0; i < left.size(); ++i) {
    for (size_t j = 0; j < right.size(); ++j) {
      if (!related(left[i].first, right[j].first)) continue;
      int v = lp.add_variable("d_" + name_of(left[i].first) + "_" + name_of(right[j].first));
      lp.set_lower(v, Rational(0));
      out.delta_vars.push_back({{left[i].first, right[j].first}, v});
      rows[i].push_back({v, Rational(1)});
      cols[j].push_back({v, Rational(1)});
    }
  }
  for (size_t i = 0; i < left.size(); ++i)
    lp.add_constraint(rows[i], LpProblem::Rel::Eq, left[i].second);
  for (size_t j = 0; j < right.size(); ++j)
    lp.add_constraint(cols[j], LpProblem::Rel::Eq, right[j].second);
  return out;
}

bool weight_oracle(const Distribution& mu1, const Distribution& mu2, const Relation& rel,
                   LpStats* stats) {
  WeightLp wlp = build_weight_lp(mu1, mu2, rel);
  return lp_feasible(wlp.lp, stats).has_value();
}

namespace {

std::optional<Rational> valid_gamma_lp(const std::vector<ParametricNetwork::LeftSpec>& left,
                                       const std::vector<ParametricNetwork::RightSpec>& right,
                                       const std::vector<std::pair<StateId, StateId>>& edges,
                                       const std::optional<Rational>& bound, LpStats* stats) {
  LpProblem lp;
  int gamma = lp.add_variable("gamma");
  lp.set_lower(gamma, Rational(0));
  if (bound) lp.set_upper(gamma, *bound);

  std::vector<int> src(left.size()), snk(right.size());
  std::vector<std::vector<std::pair<int, Rational>>> left_out(left.size());
  std::vector<std::vector<std::pair<int, Rational>>> right_in(right.size());
  auto left_index = [&](StateId id) {
    for (size_t i = 0; i < left.size(); ++i)
      if (left[i].id == id) return static_cast<int>(i);
    return -1;
  };
  auto right_index = [&](StateId id) {
    for (size_t j = 0; j < right.size(); ++j)
      if (right[j].id == id) return static_cast<int>(j);
    return -1;
  };

  for (size_t i = 0; i < left.size(); ++i) {
    src[i] = lp.add_variable("fsrc_" + std::to_string(left[i].id));
    lp.set_lower(src[i], left[i].mandatory ? left[i].cap : Rational(0));
    lp.set_upper(src[i], left[i].cap);
  }
  for (size_t j = 0; j < right.size(); ++j) {
    snk[j] = lp.add_variable("fsnk_" + std::to_string(right[j].id));
    lp.set_lower(snk[j], Rational(0));
    // f(t, sink) <= gamma * base, with equality on MU2 edges.
    lp.add_constraint({{snk[j], Rational(1)}, {gamma, -right[j].base}},
                      right[j].mandatory ? LpProblem::Rel::Eq : LpProblem::Rel::Le, Rational(0));
  }
  for (const auto& [l, r] : edges) {
    int v = lp.add_variable("f_" + std::to_string(l) + "_" + std::to_string(r));
    lp.set_lower(v, Rational(0));
    left_out[left_index(l)].push_back({v, Rational(1)});
    right_in[right_index(r)].push_back({v, Rational(1)});
  }
  for (size_t i = 0; i < left.size(); ++i) {
    auto coeffs = left_out[i];
    coeffs.push_back({src[i], Rational(-1)});
    lp.add_constraint(std::move(coeffs), LpProblem::Rel::Eq, Rational(0));
  }
  for (size_t j = 0; j < right.size(); ++j) {
    auto coeffs = right_in[j];
    coeffs.push_back({snk[j], Rational(-1)});
    lp.add_constraint(std::move(coeffs), LpProblem::Rel::Eq, Rational(0));
  }
  auto solution = lp_feasible(lp, stats);
  if (!solution) return std::nullopt;
  return (*solution)[gamma];
}

} // namespace

std::optional<Rational> valid_gamma_oracle(const ParametricNetwork& pn,
                                           const std::optional<Rational>& bound, LpStats* stats) {
  return valid_gamma_lp(pn.left(), pn.right(), pn.edges(), bound, stats);
}

namespace {

std::vector<Distribution> embedded_rows(const Model& m) {
  std::vector<Distribution> rows(m.n);
  for (StateId s = 0; s < m.n; ++s) rows[s] = induced_distribution(m.rate[s]);
  return rows;
}

// Label-equal pairs plus the static side conditions of the relation kind.
Relation initial_relation_for_oracle(const Model& m, bool strong) {
  Relation r(m.n);
  for (StateId a = 0; a < m.n; ++a) {
    for (StateId b = 0; b < m.n; ++b) {
      if (!m.label_equal(a, b)) continue;
      if (strong) {
        if (m.kind == ModelKind::CTMC && !(m.rate[a].exit_rate() <= m.rate[b].exit_rate())) continue;
        if (m.kind == ModelKind::PA || m.kind == ModelKind::CPA) {
          bool subset = true;
          for (ActionId act : m.enabled_actions(a)) {
            bool found = false;
            for (ActionId other : m.enabled_actions(b)) found |= other == act;
            subset &= found;
          }
          if (!subset) continue;
        }
      }
      r.insert(a, b);
    }
  }
  return r;
}

bool naive_strong_pair(const Model& m, const std::vector<Distribution>& rows, StateId s1,
                       StateId s2, const Relation& rel, LpStats* stats) {
  switch (m.kind) {
    case ModelKind::FPS:
    case ModelKind::DTMC:
    case ModelKind::CTMC:
      return weight_oracle(rows[s1], rows[s2], rel, stats);
    case ModelKind::PA: {
      for (const auto& [a, dists] : m.pa[s1].steps) {
        auto it = m.pa[s2].steps.find(a);
        for (const auto& mu1 : dists) {
          bool matched = false;
          if (it != m.pa[s2].steps.end())
            for (const auto& mu2 : it->second)
              if (weight_oracle(mu1, mu2, rel, stats)) {
                matched = true;
                break;
              }
          if (!matched) return false;
        }
      }
      return true;
    }
    case ModelKind::CPA: {
      for (const auto& [a, rates] : m.cpa[s1].steps) {
        auto it = m.cpa[s2].steps.find(a);
        for (const auto& r1 : rates) {
          bool matched = false;
          if (it != m.cpa[s2].steps.end())
            for (const auto& r2 : it->second)
              if (r1.exit_rate() <= r2.exit_rate() &&
                  weight_oracle(induced_distribution(r1), induced_distribution(r2), rel, stats)) {
                matched = true;
                break;
              }
          if (!matched) return false;
        }
      }
      return true;
    }
  }
  return false;
}

bool naive_prob_pair(const Model& m, StateId s1, StateId s2, const Relation& rel, LpStats* stats) {
  if (m.kind == ModelKind::PA) {
    for (const auto& [a, dists] : m.pa[s1].steps) {
      auto it = m.pa[s2].steps.find(a);
      if (it == m.pa[s2].steps.end() || it->second.empty()) return false;
      for (const auto& mu1 : dists) {
        CombinedLp clp = build_lp_pa(m, s1, a, mu1, s2, rel);
        if (!lp_feasible(clp.lp, stats)) return false;
      }
    }
    return true;
  }
  for (const auto& [a, rates] : m.cpa[s1].steps) {
    for (const auto& r1 : rates) {
      if (r1.exit_rate() == 0) continue;
      bool matched = false;
      for (const Rational& e : exit_rate_classes(m, s2, a)) {
        if (e < r1.exit_rate()) continue;
        CombinedLp clp = build_lp_cpa(m, s1, a, r1, s2, e, rel);
        if (lp_feasible(clp.lp, stats)) {
          matched = true;
          break;
        }
      }
      if (!matched) return false;
    }
  }
  return true;
}

// Weak-simulation-up-to check by definition: stutter shortcut, reachability
// condition, or feasibility of the joint (flow, gamma) LP.
bool naive_weak_pair(const Model& m, const std::vector<Distribution>& rows, StateId s1, StateId s2,
                     const Relation& rel, LpStats* stats) {
  bool stutter_only = true;
  for (StateId u : m.post(s1))
    if (!rel.contains(u, s2)) {
      stutter_only = false;
      break;
    }
  if (stutter_only) return true;
  bool continuous = m.kind == ModelKind::CTMC;

  if (!continuous) {
    bool post2_sim = true;
    for (StateId t : m.post(s2))
      if (!rel.contains(s1, t)) {
        post2_sim = false;
        break;
      }
    if (post2_sim) {
      // Reachability over states simulating s1, n = 0 fragments included.
      std::vector<char> frontier(m.n, 0), target(m.n, 0);
      std::deque<StateId> queue;
      frontier[s2] = 1;
      queue.push_back(s2);
      while (!queue.empty()) {
        StateId w = queue.front();
        queue.pop_front();
        for (StateId t : m.post(w)) {
          target[t] = 1;
          if (!frontier[t] && rel.contains(s1, t)) {
            frontier[t] = 1;
            queue.push_back(t);
          }
        }
      }
      for (StateId u1 : m.post(s1)) {
        if (rel.contains(u1, s2)) continue;
        bool matched = false;
        for (StateId t = 0; t < m.n && !matched; ++t)
          if (target[t] && rel.contains(u1, t)) matched = true;
        if (!matched) return false;
      }
      return true;
    }
  }

  std::optional<Rational> bound;
  if (continuous) {
    Rational r1 = m.exit_rate(s1);
    assert(r1 > 0);
    bound = m.exit_rate(s2) / r1;
  }
  // MU/PV split per the definitions; the gamma LP decides the rest.
  std::vector<ParametricNetwork::LeftSpec> left;
  std::vector<ParametricNetwork::RightSpec> right;
  std::vector<std::pair<StateId, StateId>> edges;
  for (const auto& [u, p] : rows[s1].entries()) left.push_back({u, p, !rel.contains(u, s2)});
  for (const auto& [t, p] : rows[s2].entries()) right.push_back({t, p, !rel.contains(s1, t)});
  for (const auto& [u, pu] : rows[s1].entries())
    for (const auto& [t, pt] : rows[s2].entries())
      if (rel.contains(u, t)) edges.push_back({u, t});
  return valid_gamma_lp(left, right, edges, bound, stats).has_value();
}

} // namespace

Relation naive_simrel(const Model& m, RelationKind kind, LpStats* stats) {
  if (m.n > kNaiveSizeBound)
    throw std::invalid_argument("naive_simrel: model exceeds the size bound of " +
                                std::to_string(kNaiveSizeBound) + " states");
  std::vector<Distribution> rows;
  Relation cur(m.n);
  switch (kind) {
    case RelationKind::Strong:
      rows = m.kind == ModelKind::CTMC ? embedded_rows(m) : m.prob;
      cur = initial_relation_for_oracle(m, true);
      break;
    case RelationKind::StrongProbabilistic:
      if (m.kind != ModelKind::PA && m.kind != ModelKind::CPA)
        throw std::invalid_argument("strong probabilistic simulation needs a PA or CPA");
      cur = initial_relation_for_oracle(m, true);
      break;
    case RelationKind::Weak:
      if (m.kind != ModelKind::DTMC && m.kind != ModelKind::CTMC)
        throw std::invalid_argument("weak simulation needs a DTMC or CTMC");
      rows = m.kind == ModelKind::CTMC ? embedded_rows(m) : m.prob;
      cur = initial_relation_for_oracle(m, false);
      break;
  }
  for (;;) {
    Relation next(m.n);
    bool changed = false;
    for (const auto& [s1, s2] : cur.pairs()) {
      bool keep = false;
      switch (kind) {
        case RelationKind::Strong: keep = naive_strong_pair(m, rows, s1, s2, cur, stats); break;
        case RelationKind::StrongProbabilistic: keep = naive_prob_pair(m, s1, s2, cur, stats); break;
        case RelationKind::Weak: keep = naive_weak_pair(m, rows, s1, s2, cur, stats); break;
      }
      if (keep) next.insert(s1, s2);
      else changed = true;
    }
    cur = std::move(next);
    if (!changed) return cur;
  }
}

} // namespace simrel
