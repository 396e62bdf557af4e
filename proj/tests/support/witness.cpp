#include "support/witness.hpp"

#include <set>

namespace simrel::test {

bool is_weight_function(const Distribution& mu1, const Distribution& mu2, const Relation& rel,
                        const Coupling& delta) {
  auto related = [&](StateId s, StateId t) {
    if (s == kAuxVertex) return true;
    if (t == kAuxVertex) return false;
    return rel.contains(s, t);
  };
  std::vector<StateId> support1 = mu1.support(), support2 = mu2.support();
  std::set<StateId> left(support1.begin(), support1.end());
  if (mu1.deficit() > 0) left.insert(kAuxVertex);
  std::set<StateId> right(support2.begin(), support2.end());
  if (mu2.deficit() > 0) right.insert(kAuxVertex);

  for (const auto& [st, v] : delta) {
    if (v < 0 || v > 1) return false;
    if (v > 0 && !related(st.first, st.second)) return false;
    if (v > 0 && (!left.count(st.first) || !right.count(st.second))) return false;
  }
  for (StateId s : left) {
    Rational row(0);
    for (const auto& [st, v] : delta)
      if (st.first == s) row += v;
    Rational expect = s == kAuxVertex ? mu1.deficit() : mu1.at(s);
    if (row != expect) return false;
  }
  for (StateId t : right) {
    Rational col(0);
    for (const auto& [st, v] : delta)
      if (st.second == t) col += v;
    Rational expect = t == kAuxVertex ? mu2.deficit() : mu2.at(t);
    if (col != expect) return false;
  }
  return true;
}

bool verify_weak_witness(const Model& m, const std::vector<Distribution>& rows, StateId s1,
                         StateId s2, const Relation& rel, const Rational& gamma,
                         const FeasibleFlow& flow) {
  // delta_1(s) = f(source, s) / P(s1, s); delta_2(s) = f(sbar, sink) / (gamma P(s2, s)).
  std::map<StateId, Rational> delta1, delta2;
  for (const auto& [s, p] : rows[s1].entries()) delta1[s] = flow.source_flow(s) / p;
  for (const auto& [t, p] : rows[s2].entries()) {
    if (gamma == 0) return false;
    delta2[t] = flow.sink_flow(t) / (gamma * p);
  }
  for (const auto& [s, d] : delta1)
    if (d < 0 || d > 1) return false;
  for (const auto& [t, d] : delta2)
    if (d < 0 || d > 1) return false;

  auto u1 = [&](StateId s) { return delta1.count(s) && delta1[s] > 0; };
  auto u2 = [&](StateId s) { return delta2.count(s) && delta2[s] > 0; };

  // Condition (1): stutter fragments respect the relation.
  for (const auto& [s, d] : delta1)
    if (d < 1 && !rel.contains(s, s2)) return false;
  for (const auto& [t, d] : delta2)
    if (d < 1 && !rel.contains(s1, t)) return false;

  Rational k1(0), k2(0);
  for (const auto& [s, d] : delta1) k1 += d * rows[s1].at(s);
  for (const auto& [t, d] : delta2) k2 += d * rows[s2].at(t);
  if (k1 == 0 || k2 == 0) return false;  // branch (c) witnesses have visible mass

  // Delta(w, w') = f(w, w'bar) / K1.
  Coupling big_delta;
  for (const auto& [lr, f] : flow.inner)
    if (f != 0) big_delta[lr] = f / k1;

  // Condition (2a).
  for (const auto& [ww, v] : big_delta) {
    if (v <= 0) return false;
    if (!u1(ww.first) || !u2(ww.second)) return false;
    if (!rel.contains(ww.first, ww.second)) return false;
  }
  // Condition (2b): K1 Delta(w, U2) = P(s1,w) delta_1(w) and symmetrically.
  for (StateId w = 0; w < m.n; ++w) {
    Rational lhs(0);
    for (const auto& [ww, v] : big_delta)
      if (ww.first == w && u2(ww.second)) lhs += v;
    Rational rhs = delta1.count(w) ? Rational(rows[s1].at(w) * delta1[w]) : Rational(0);
    if (k1 * lhs != rhs) return false;
  }
  for (StateId w = 0; w < m.n; ++w) {
    Rational lhs(0);
    for (const auto& [ww, v] : big_delta)
      if (ww.second == w && u1(ww.first)) lhs += v;
    Rational rhs = delta2.count(w) ? Rational(rows[s2].at(w) * delta2[w]) : Rational(0);
    if (k2 * lhs != rhs) return false;
  }
  // Condition (3): every U1 state has a one-step witness inside U2.
  for (const auto& [s, d] : delta1) {
    if (!(d > 0)) continue;
    bool matched = false;
    for (const auto& [ww, v] : big_delta)
      if (ww.first == s && u2(ww.second) && rel.contains(s, ww.second)) matched = true;
    if (!matched) return false;
  }
  // CTMC rate condition: K1 R(s1,S) <= K2 R(s2,S).
  if (m.kind == ModelKind::CTMC && !(k1 * m.exit_rate(s1) <= k2 * m.exit_rate(s2))) return false;
  return true;
}

bool verify_feasible_flow(const FlowNetwork& shape,
                          const std::vector<std::pair<EdgeRef, Rational>>& lower,
                          const FeasibleFlow& flow) {
  for (int i = 0; i < shape.left_count(); ++i) {
    Rational f = flow.source_flow(shape.left_id(i));
    if (f < 0 || f > shape.source_cap(i)) return false;
  }
  for (int j = 0; j < shape.right_count(); ++j) {
    Rational f = flow.sink_flow(shape.right_id(j));
    if (f < 0 || f > shape.sink_cap(j)) return false;
  }
  for (const auto& [lr, f] : flow.inner) {
    if (f < 0) return false;
    if (!shape.has_edge(lr.first, lr.second)) return false;
  }
  for (const auto& [e, l] : lower) {
    Rational f;
    switch (e.kind) {
      case EdgeRef::Source: f = flow.source_flow(e.left); break;
      case EdgeRef::Inner: f = flow.inner_flow(e.left, e.right); break;
      case EdgeRef::Sink: f = flow.sink_flow(e.right); break;
    }
    if (f < l) return false;
  }
  // Conservation at both layers.
  for (int i = 0; i < shape.left_count(); ++i) {
    Rational out(0);
    for (const auto& [lr, f] : flow.inner)
      if (lr.first == shape.left_id(i)) out += f;
    if (out != flow.source_flow(shape.left_id(i))) return false;
  }
  for (int j = 0; j < shape.right_count(); ++j) {
    Rational in(0);
    for (const auto& [lr, f] : flow.inner)
      if (lr.second == shape.right_id(j)) in += f;
    if (in != flow.sink_flow(shape.right_id(j))) return false;
  }
  return true;
}

} // namespace simrel::test
