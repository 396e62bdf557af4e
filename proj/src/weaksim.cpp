#include "simrel/weaksim.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace simrel {

namespace {

std::vector<Distribution> weak_rows(const Model& m) {
  if (m.kind == ModelKind::CTMC) {
    std::vector<Distribution> rows(m.n);
    for (StateId s = 0; s < m.n; ++s) rows[s] = induced_distribution(m.rate[s]);
    return rows;
  }
  return m.prob;
}

bool all_stutter(const Model& m, StateId s1, StateId s2, const Relation& rel) {
  for (StateId u : m.post(s1))
    if (!rel.contains(u, s2)) return false;
  return true;
}

// Reachability branch of the DTMC algorithm: every mandatory visible
// successor of s1 must be matchable by a state reachable from s2 while
// passing only through states that simulate s1 (n = 0 path fragments count,
// so s2 itself seeds the frontier).
bool reachability_condition(const Model& m, StateId s1, StateId s2, const Relation& rel) {
  std::vector<char> frontier(m.n, 0);
  std::deque<StateId> queue;
  frontier[s2] = 1;
  queue.push_back(s2);
  std::vector<char> target(m.n, 0);
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
    if (rel.contains(u1, s2)) continue;  // belongs to PV1, not forced into U1
    bool matched = false;
    for (StateId t = 0; t < m.n && !matched; ++t)
      if (target[t] && rel.contains(u1, t)) matched = true;
    if (!matched) return false;
  }
  return true;
}

} // namespace

ParametricNetwork build_parametric(const Model& /*m*/, const std::vector<Distribution>& rows,
                                   StateId s1, StateId s2, const Relation& rel, FlowStats* stats) {
  std::vector<ParametricNetwork::LeftSpec> left;
  std::vector<ParametricNetwork::RightSpec> right;
  std::vector<std::pair<StateId, StateId>> edges;
  for (const auto& [u, p] : rows[s1].entries())
    left.push_back({u, p, !rel.contains(u, s2)});  // MU1 = post(s1) \ R^-1(s2)
  for (const auto& [t, p] : rows[s2].entries())
    right.push_back({t, p, !rel.contains(s1, t)}); // MU2 = post(s2) \ R(s1)
  for (const auto& [u, pu] : rows[s1].entries())
    for (const auto& [t, pt] : rows[s2].entries())
      if (rel.contains(u, t)) edges.push_back({u, t});
  return ParametricNetwork(std::move(left), std::move(right), std::move(edges), Rational(1), stats);
}

std::vector<std::vector<StateId>> weak_partition(const Model& m, StateId s1, StateId s2,
                                                 const Relation& rel) {
  assert(rel.contains(s1, s2));
  std::vector<StateId> ground;
  auto add = [&](StateId s) {
    if (std::find(ground.begin(), ground.end(), s) == ground.end()) ground.push_back(s);
  };
  for (StateId u : m.post(s1)) add(u);
  for (StateId t : m.post(s2)) add(t);
  add(s1);
  add(s2);
  std::sort(ground.begin(), ground.end());

  std::vector<int> parent(ground.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  auto index_of = [&](StateId s) {
    return static_cast<int>(std::lower_bound(ground.begin(), ground.end(), s) - ground.begin());
  };
  auto unite = [&](StateId a, StateId b) { parent[find(index_of(a))] = find(index_of(b)); };

  // H = rel restricted to (post(s1) u {s1}) x (post(s2) u {s2}).
  std::vector<StateId> lefts(m.post(s1));
  lefts.push_back(s1);
  std::vector<StateId> rights(m.post(s2));
  rights.push_back(s2);
  for (StateId a : lefts)
    for (StateId b : rights)
      if (rel.contains(a, b)) unite(a, b);

  std::vector<std::vector<StateId>> classes;
  std::vector<int> root_class(ground.size(), -1);
  for (size_t i = 0; i < ground.size(); ++i) {
    int r = find(static_cast<int>(i));
    if (root_class[r] < 0) {
      root_class[r] = static_cast<int>(classes.size());
      classes.emplace_back();
    }
    classes[root_class[r]].push_back(ground[i]);
  }
  // The class containing s1 (and s2) goes last.
  int home = root_class[find(index_of(s1))];
  assert(home == root_class[find(index_of(s2))]);
  if (home != static_cast<int>(classes.size()) - 1)
    std::swap(classes[home], classes.back());
  return classes;
}

bool ws_improved_check(const Model& m, const std::vector<Distribution>& rows, StateId s1,
                       StateId s2, const Relation& rel,
                       const std::vector<std::vector<StateId>>& classes,
                       const std::optional<Rational>& rate_bound, RunStats* stats) {
  assert(classes.size() > 1);
  std::optional<Rational> gamma1;
  for (size_t i = 0; i + 1 < classes.size(); ++i) {
    Rational p1(0), p2(0);
    for (StateId t : classes[i]) {
      p1 += rows[s1].at(t);
      p2 += rows[s2].at(t);
    }
    // Classes below A_h contain successor states only, so both masses cannot
    // vanish at once.
    assert(!(p1 == 0 && p2 == 0));
    if (p1 == 0 || p2 == 0) return false;
    Rational gi = p1 / p2;
    if (gamma1 && *gamma1 != gi) return false;
    if (!gamma1) gamma1 = gi;
  }
  assert(gamma1);
  if (rate_bound && *gamma1 > *rate_bound) return false;
  ParametricNetwork pn = build_parametric(m, rows, s1, s2, rel, stats ? &stats->flow : nullptr);
  return classify_gamma(pn, *gamma1) == GammaClass::Valid;
}

bool ws_check(const Model& m, StateId s1, StateId s2, const Relation& rel, RunStats* stats,
              bool improved) {
  if (m.kind != ModelKind::DTMC) throw std::invalid_argument("ws_check expects a DTMC");
  if (all_stutter(m, s1, s2, rel)) {
    if (stats) ++stats->branch_a;
    return true;
  }
  bool post2_simulated = true;
  for (StateId t : m.post(s2))
    if (!rel.contains(s1, t)) {
      post2_simulated = false;
      break;
    }
  if (post2_simulated) {
    if (stats) ++stats->branch_b;
    return reachability_condition(m, s1, s2, rel);
  }
  if (stats) ++stats->branch_c;
  if (improved) {
    auto classes = weak_partition(m, s1, s2, rel);
    if (classes.size() > 1)
      return ws_improved_check(m, m.prob, s1, s2, rel, classes, std::nullopt, stats);
  }
  ParametricNetwork pn = build_parametric(m, m.prob, s1, s2, rel, stats ? &stats->flow : nullptr);
  BreakpointList bl = breakpoints(pn);
  // Constant kappa has no breakpoints; validity is gamma-independent then and
  // one probe decides it.
  if (bl.points.empty()) return classify_gamma(pn, Rational(1)) == GammaClass::Valid;
  return find_valid_breakpoint(pn, bl, std::nullopt, false).has_value();
}

bool ws_check_ctmc(const Model& m, StateId s1, StateId s2, const Relation& rel, RunStats* stats,
                   bool improved) {
  if (m.kind != ModelKind::CTMC) throw std::invalid_argument("ws_check_ctmc expects a CTMC");
  if (all_stutter(m, s1, s2, rel)) {
    if (stats) ++stats->branch_a;
    return true;
  }
  // The reachability branch disappears; the rate condition bounds gamma.
  if (stats) ++stats->branch_c;
  std::vector<Distribution> rows = weak_rows(m);
  Rational r1 = m.exit_rate(s1);
  assert(r1 > 0);  // s1 has a visible step
  Rational gamma_star = m.exit_rate(s2) / r1;
  if (improved) {
    auto classes = weak_partition(m, s1, s2, rel);
    if (classes.size() > 1)
      return ws_improved_check(m, rows, s1, s2, rel, classes, gamma_star, stats);
  }
  ParametricNetwork pn = build_parametric(m, rows, s1, s2, rel, stats ? &stats->flow : nullptr);
  auto minimal = find_valid_breakpoint(pn, breakpoints(pn), gamma_star, true);
  if (minimal) return true;
  // A valid gamma <= gamma* may also sit on a segment without a qualifying
  // breakpoint (or kappa may have no breakpoints at all); gamma* itself then
  // witnesses it.
  return classify_gamma(pn, gamma_star) == GammaClass::Valid;
}

Relation simrel_w(const Model& m, const WeakOptions& options, RunStats* stats, SimTrace* trace) {
  if (m.kind != ModelKind::DTMC && m.kind != ModelKind::CTMC)
    throw std::invalid_argument("weak simulation is defined for DTMCs and CTMCs");
  bool continuous = m.kind == ModelKind::CTMC;
  std::vector<Distribution> rows = weak_rows(m);

  // In an incomplete iteration, pairs whose network cannot be partitioned
  // (h = 1) are kept without the expensive check; the final iteration is
  // always complete, so the fixpoint is unchanged.
  auto check_pair = [&](StateId s1, StateId s2, const Relation& rel, bool allow_skip) {
    if (allow_skip) {
      bool branch_c;
      if (continuous) branch_c = !all_stutter(m, s1, s2, rel);
      else
        branch_c = !all_stutter(m, s1, s2, rel) && [&] {
          for (StateId t : m.post(s2))
            if (!rel.contains(s1, t)) return true;
          return false;
        }();
      if (branch_c && weak_partition(m, s1, s2, rel).size() == 1) return true;  // skipped
    }
    return continuous ? ws_check_ctmc(m, s1, s2, rel, stats, options.improved)
                      : ws_check(m, s1, s2, rel, stats, options.improved);
  };

  Relation cur = label_equal_relation(m);
  bool heuristic = options.improved && options.incomplete_heuristic;
  bool incomplete = heuristic;
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
      if (check_pair(s1, s2, cur, incomplete)) {
        next.insert(s1, s2);
      } else {
        changed = true;
        if (trace) trace->removed.back().push_back({s1, s2});
      }
    }
    cur = std::move(next);
    if (!changed) {
      if (incomplete) {
        incomplete = false;  // rerun completely before declaring the fixpoint
        continue;
      }
      return cur;
    }
    if (heuristic) incomplete = true;
  }
}

} // namespace simrel
