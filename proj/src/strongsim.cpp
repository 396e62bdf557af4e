#include "simrel/strongsim.hpp"

#include <cassert>
#include <map>
#include <stdexcept>

namespace simrel {

namespace {

using Pair = std::pair<StateId, StateId>;

// Successor rows used by the flow checks: plain rows for FPS/DTMC, embedded
// rows for CTMC.
std::vector<Distribution> flow_rows(const Model& m) {
  std::vector<Distribution> rows(m.n);
  if (m.kind == ModelKind::CTMC) {
    for (StateId s = 0; s < m.n; ++s) rows[s] = induced_distribution(m.rate[s]);
  } else {
    rows = m.prob;
  }
  return rows;
}

} // namespace

Relation initial_strong_relation(const Model& m) {
  Relation r(m.n);
  for (StateId a = 0; a < m.n; ++a) {
    for (StateId b = 0; b < m.n; ++b) {
      if (!m.label_equal(a, b)) continue;
      if (m.kind == ModelKind::CTMC && !(m.exit_rate(a) <= m.exit_rate(b))) continue;
      if (m.kind == ModelKind::PA || m.kind == ModelKind::CPA) {
        bool act_subset = true;
        for (ActionId act : m.enabled_actions(a)) {
          bool found = false;
          for (ActionId other : m.enabled_actions(b)) found |= other == act;
          if (!found) {
            act_subset = false;
            break;
          }
        }
        if (!act_subset) continue;
      }
      r.insert(a, b);
    }
  }
  return r;
}

bool strong_sim_upto(const Model& m, StateId s1, StateId s2, const Relation& rel, RunStats* stats) {
  if (!m.label_equal(s1, s2)) return false;
  FlowStats* fs = stats ? &stats->flow : nullptr;
  switch (m.kind) {
    case ModelKind::FPS:
    case ModelKind::DTMC:
      return weight_check(m.prob[s1], m.prob[s2], rel, fs);
    case ModelKind::CTMC:
      if (!(m.exit_rate(s1) <= m.exit_rate(s2))) return false;
      return weight_check(induced_distribution(m.rate[s1]), induced_distribution(m.rate[s2]), rel, fs);
    case ModelKind::PA: {
      for (const auto& [a, dists] : m.pa[s1].steps) {
        auto it = m.pa[s2].steps.find(a);
        for (const auto& mu1 : dists) {
          bool matched = false;
          if (it != m.pa[s2].steps.end())
            for (const auto& mu2 : it->second)
              if (weight_check(mu1, mu2, rel, fs)) {
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
                  weight_check(induced_distribution(r1), induced_distribution(r2), rel, fs)) {
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

Relation simrel_basic(const Model& m, RunStats* stats, SimTrace* trace) {
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
      if (strong_sim_upto(m, s1, s2, cur, stats)) {
        next.insert(s1, s2);
      } else {
        changed = true;
        if (trace) trace->removed.back().push_back({s1, s2});
      }
      if (trace) trace->fresh_pairs.back().insert({s1, s2});
    }
    cur = std::move(next);
    if (!changed) return cur;
  }
}

// ---------------------------------------------------------------------------
// Improved engine for FPS/DTMC/CTMC (per-pair networks + Smf).

Relation simrel_fps(const Model& input, RunStats* stats, SimTrace* trace) {
  if (input.kind == ModelKind::PA || input.kind == ModelKind::CPA)
    throw std::invalid_argument("simrel_fps handles FPS/DTMC/CTMC; use simrel_pa");
  const Model& m = input;
  std::vector<Distribution> rows = flow_rows(m);
  FlowStats* fs = stats ? &stats->flow : nullptr;

  Relation cur = initial_strong_relation(m);

  struct PairState {
    FlowNetwork net;
    Rational value;
  };
  std::map<Pair, PairState> states;
  std::map<Pair, std::vector<Pair>> listeners;
  std::map<Pair, std::vector<Pair>> pending;

  for (const auto& [s1, s2] : cur.pairs()) {
    std::vector<Pair> ls;
    for (StateId u1 : m.pre(s1))
      for (StateId u2 : m.pre(s2))
        if (m.label_equal(u1, u2)) ls.push_back({u1, u2});
    listeners.emplace(Pair{s1, s2}, std::move(ls));
  }

  std::vector<Pair> removed_now;
  int iteration = 0;
  for (;;) {
    ++iteration;
    if (stats) ++stats->iterations;
    if (trace) {
      trace->relations.push_back(cur);
      trace->removed.emplace_back();
      trace->updated_pairs.emplace_back();
      trace->fresh_pairs.emplace_back();
    }
    removed_now.clear();
    Relation next(m.n);
    for (const auto& [s1, s2] : cur.pairs()) {
      Pair p{s1, s2};
      bool match;
      if (iteration == 1) {
        PairState ps;
        ps.net = build_network(rows[s1], rows[s2], cur);
        ps.net.set_stats(fs);
        if (fs) ++fs->fresh_networks;
        ps.value = ps.net.max_flow();
        match = ps.value == 1;
        if (trace) trace->fresh_pairs.back().insert(p);
        if (match) states.emplace(p, std::move(ps));
      } else {
        PairState& ps = states.at(p);
        auto it = pending.find(p);
        if (it != pending.end() && !it->second.empty()) {
          ps.value = ps.net.smf_update(it->second);
          it->second.clear();
          if (trace) trace->updated_pairs.back().insert(p);
        }
        match = ps.value == 1;
        if (!match) states.erase(p);
      }
      if (match) {
        next.insert(s1, s2);
      } else {
        removed_now.push_back(p);
        if (trace) trace->removed.back().push_back(p);
      }
    }
    cur = std::move(next);
    if (removed_now.empty()) return cur;
    // Stage the edges deleted this iteration into the networks that contain
    // them; stale listeners (pairs already gone) are skipped.
    for (const auto& p : removed_now)
      for (const auto& q : listeners.at(p))
        if (cur.contains(q.first, q.second)) pending[q].push_back(p);
  }
}

// ---------------------------------------------------------------------------
// Improved engine for PA/CPA (candidate lists + ActSmf).

namespace {

struct ArcKey {
  StateId s1;
  ActionId action;
  int mu1;
  StateId s2;
  bool operator<(const ArcKey& o) const {
    if (s1 != o.s1) return s1 < o.s1;
    if (action != o.action) return action < o.action;
    if (mu1 != o.mu1) return mu1 < o.mu1;
    return s2 < o.s2;
  }
};

struct ArcState {
  std::vector<int> candidates;  // remaining mu2 indices, head first
  FlowNetwork net;              // network of the head candidate
  bool has_net = false;
  Rational value;
  std::vector<Pair> pending;    // staged deletions for the head network
};

struct Listener {
  StateId u1;
  ActionId action;
  int mu1;
  StateId u2;
  int mu2;
};

} // namespace

Relation simrel_pa(const Model& m, RunStats* stats, SimTrace* trace) {
  if (m.kind != ModelKind::PA && m.kind != ModelKind::CPA)
    throw std::invalid_argument("simrel_pa handles PA/CPA; use simrel_fps");
  bool continuous = m.kind == ModelKind::CPA;
  FlowStats* fs = stats ? &stats->flow : nullptr;

  // Distributions (induced, for CPAs) plus exit rates per (state, action).
  auto dists_of = [&](StateId s, ActionId a) {
    std::vector<Distribution> out;
    if (continuous) {
      auto it = m.cpa[s].steps.find(a);
      if (it != m.cpa[s].steps.end())
        for (const auto& r : it->second) out.push_back(induced_distribution(r));
    } else {
      auto it = m.pa[s].steps.find(a);
      if (it != m.pa[s].steps.end()) out = it->second;
    }
    return out;
  };
  auto exit_rates_of = [&](StateId s, ActionId a) {
    std::vector<Rational> out;
    if (continuous) {
      auto it = m.cpa[s].steps.find(a);
      if (it != m.cpa[s].steps.end())
        for (const auto& r : it->second) out.push_back(r.exit_rate());
    } else {
      auto it = m.pa[s].steps.find(a);
      if (it != m.pa[s].steps.end()) out.assign(it->second.size(), Rational(1));
    }
    return out;
  };

  Relation cur = initial_strong_relation(m);

  std::map<Pair, std::vector<Listener>> listeners;
  for (const auto& [s1, s2] : cur.pairs()) {
    std::vector<Listener> ls;
    for (StateId u1 : m.pre(s1)) {
      for (StateId u2 : m.pre(s2)) {
        if (!m.label_equal(u1, u2)) continue;
        for (ActionId a = 0; a < static_cast<ActionId>(m.actions.size()); ++a) {
          auto d1 = dists_of(u1, a);
          auto d2 = dists_of(u2, a);
          for (size_t i = 0; i < d1.size(); ++i) {
            if (!(d1[i].at(s1) > 0)) continue;
            for (size_t j = 0; j < d2.size(); ++j)
              if (d2[j].at(s2) > 0) ls.push_back({u1, a, static_cast<int>(i), u2, static_cast<int>(j)});
          }
        }
      }
    }
    listeners.emplace(Pair{s1, s2}, std::move(ls));
  }

  std::map<ArcKey, ArcState> arcs;
  auto arc_keys_of_pair = [&](StateId s1, StateId s2) {
    std::vector<ArcKey> keys;
    for (ActionId a : m.enabled_actions(s1)) {
      size_t k = dists_of(s1, a).size();
      for (size_t i = 0; i < k; ++i) keys.push_back({s1, a, static_cast<int>(i), s2});
    }
    return keys;
  };

  // ActSmf for one arc in iteration `iteration` against the frozen relation.
  auto act_smf = [&](const ArcKey& key, ArcState& st, const Relation& rel) {
    const Distribution mu1 = dists_of(key.s1, key.action)[key.mu1];
    auto candidates_dists = dists_of(key.s2, key.action);
    bool needs_fresh = !st.has_net;
    if (st.has_net && !st.pending.empty()) {
      st.value = st.net.smf_update(st.pending);
      st.pending.clear();
      if (trace) trace->updated_pairs.back().insert({key.s1, key.s2});
      if (st.value != 1) {
        // Head candidate failed; it never becomes a candidate again.
        st.candidates.erase(st.candidates.begin());
        st.has_net = false;
        needs_fresh = true;
      }
    }
    if (needs_fresh) {
      while (!st.candidates.empty()) {
        int c = st.candidates.front();
        st.net = build_network(mu1, candidates_dists[c], rel);
        st.net.set_stats(fs);
        if (fs) ++fs->fresh_networks;
        if (trace) trace->fresh_pairs.back().insert({key.s1, key.s2});
        st.value = st.net.max_flow();
        st.has_net = true;
        if (st.value == 1) break;
        st.candidates.erase(st.candidates.begin());
        st.has_net = false;
      }
    }
    return !st.candidates.empty() && st.value == 1;
  };

  std::vector<Pair> removed_now;
  int iteration = 0;
  for (;;) {
    ++iteration;
    if (stats) ++stats->iterations;
    if (trace) {
      trace->relations.push_back(cur);
      trace->removed.emplace_back();
      trace->updated_pairs.emplace_back();
      trace->fresh_pairs.emplace_back();
    }
    removed_now.clear();
    Relation next(m.n);
    for (const auto& [s1, s2] : cur.pairs()) {
      bool all_matched = true;
      if (iteration == 1) {
        for (const ArcKey& key : arc_keys_of_pair(s1, s2)) {
          ArcState st;
          auto rates1 = exit_rates_of(s1, key.action);
          auto rates2 = exit_rates_of(s2, key.action);
          for (size_t j = 0; j < rates2.size(); ++j) {
            // CPA: rule out candidates that violate the exit-rate condition.
            if (!continuous || rates1[key.mu1] <= rates2[j]) st.candidates.push_back(static_cast<int>(j));
          }
          bool matched = act_smf(key, st, cur);
          all_matched &= matched;
          arcs.emplace(key, std::move(st));
        }
      } else {
        for (const ArcKey& key : arc_keys_of_pair(s1, s2)) {
          all_matched &= act_smf(key, arcs.at(key), cur);
        }
      }
      if (all_matched) {
        next.insert(s1, s2);
      } else {
        removed_now.push_back({s1, s2});
        if (trace) trace->removed.back().push_back({s1, s2});
        for (const ArcKey& key : arc_keys_of_pair(s1, s2)) arcs.erase(key);
      }
    }
    cur = std::move(next);
    if (removed_now.empty()) return cur;
    for (const auto& p : removed_now) {
      for (const Listener& l : listeners.at(p)) {
        if (!cur.contains(l.u1, l.u2)) continue;
        ArcKey key{l.u1, l.action, l.mu1, l.u2};
        auto it = arcs.find(key);
        if (it == arcs.end()) continue;
        ArcState& st = it->second;
        // Deletions apply to the head candidate's network only; freshly built
        // networks already reflect the shrunken relation.
        if (st.has_net && !st.candidates.empty() && st.candidates.front() == l.mu2)
          st.pending.push_back(p);
      }
    }
  }
}

} // namespace simrel
