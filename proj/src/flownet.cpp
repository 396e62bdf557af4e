#include "simrel/flownet.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

namespace simrel {

namespace {
const Rational kZero(0);
const Rational kOne(1);
} // namespace

// ---------------------------------------------------------------------------
// FlowNetwork

void FlowNetwork::add_left(StateId id, const Rational& cap) {
  assert(!prepared_);
  assert(left_index(id) < 0);
  left_ids_.push_back(id);
  src_cap_.push_back(cap);
  src_flow_.push_back(kZero);
}

void FlowNetwork::add_right(StateId id, const Rational& cap) {
  assert(!prepared_);
  assert(right_index(id) < 0);
  right_ids_.push_back(id);
  snk_cap_.push_back(cap);
  snk_flow_.push_back(kZero);
}

void FlowNetwork::add_edge(StateId left, StateId right) {
  assert(!prepared_);
  int l = left_index(left);
  int r = right_index(right);
  assert(l >= 0 && r >= 0);
  edges_.push_back({l, r, kZero, true});
}

void FlowNetwork::prepare() {
  assert(!prepared_);
  std::sort(edges_.begin(), edges_.end(), [](const InnerEdge& a, const InnerEdge& b) {
    return a.left != b.left ? a.left < b.left : a.right < b.right;
  });
  for (size_t i = 1; i < edges_.size(); ++i)
    assert(edges_[i - 1].left != edges_[i].left || edges_[i - 1].right != edges_[i].right);
  left_adj_.assign(left_count(), {});
  right_adj_.assign(right_count(), {});
  for (size_t i = 0; i < edges_.size(); ++i) {
    left_adj_[edges_[i].left].push_back(static_cast<int>(i));
    right_adj_[edges_[i].right].push_back(static_cast<int>(i));
  }
  excess_.assign(vertex_count(), kZero);
  dist_.assign(vertex_count(), 0);
  // Labels stay below d(source) + |V|; the refined source label can reach
  // 2(|left| + 1), so size the buckets for the larger of the two.
  buckets_.assign(3 * vertex_count() + 2 * left_count() + 4, {});
  prepared_ = true;
}

int FlowNetwork::left_index(StateId id) const {
  for (size_t i = 0; i < left_ids_.size(); ++i)
    if (left_ids_[i] == id) return static_cast<int>(i);
  return -1;
}

int FlowNetwork::right_index(StateId id) const {
  for (size_t i = 0; i < right_ids_.size(); ++i)
    if (right_ids_[i] == id) return static_cast<int>(i);
  return -1;
}

bool FlowNetwork::has_edge(StateId left, StateId right) const {
  int l = left_index(left), r = right_index(right);
  if (l < 0 || r < 0) return false;
  for (int e : left_adj_[l])
    if (edges_[e].right == r) return edges_[e].alive;
  return false;
}

Rational FlowNetwork::total_source_cap() const {
  Rational sum(0);
  for (const auto& c : src_cap_) sum += c;
  return sum;
}

Rational FlowNetwork::flow_value() const {
  Rational sum(0);
  for (const auto& f : src_flow_) sum += f;
  return sum;
}

void FlowNetwork::push_active(int v) {
  if (v == source_vertex() || v == sink_vertex()) return;
  if (excess_[v] <= 0) return;
  buckets_[dist_[v]].push_back(v);
  highest_active_ = std::max(highest_active_, dist_[v]);
}

void FlowNetwork::init_preflow() {
  assert(prepared_);
  for (auto& e : edges_) e.flow = kZero;
  std::fill(snk_flow_.begin(), snk_flow_.end(), kZero);
  std::fill(excess_.begin(), excess_.end(), kZero);
  std::fill(dist_.begin(), dist_.end(), 0);
  dist_[source_vertex()] = refined_source_label_ ? 2 * (left_count() + 1) : vertex_count();
  for (auto& b : buckets_) b.clear();
  highest_active_ = -1;
  for (int i = 0; i < left_count(); ++i) {
    src_flow_[i] = src_cap_[i];
    excess_[left_vertex(i)] = src_cap_[i];
    push_active(left_vertex(i));
  }
  initialized_ = true;
}

Rational FlowNetwork::max_flow() {
  if (!initialized_) init_preflow();
  run_push_relabel();
  return flow_value();
}

void FlowNetwork::run_push_relabel() {
  while (highest_active_ >= 0) {
    auto& bucket = buckets_[highest_active_];
    if (bucket.empty()) {
      --highest_active_;
      continue;
    }
    int v = bucket.back();
    bucket.pop_back();
    if (excess_[v] <= 0 || dist_[v] != highest_active_) continue;  // stale entry
    discharge(v);
  }
#ifndef NDEBUG
  for (int v = 0; v < vertex_count(); ++v)
    if (v != source_vertex() && v != sink_vertex()) assert(excess_[v] == 0);
#endif
}

void FlowNetwork::discharge(int v) {
  int L = left_count();
  while (excess_[v] > 0) {
    bool pushed = false;
    if (v < L) {
      // Left vertex: forward inner edges (infinite capacity), then the
      // residual edge back to the source.
      for (int ei : left_adj_[v]) {
        InnerEdge& e = edges_[ei];
        int w = right_vertex(e.right);
        if (dist_[v] != dist_[w] + 1) continue;
        Rational delta = excess_[v];  // infinite residual capacity
        e.flow += delta;
        excess_[v] = 0;
        excess_[w] += delta;
        push_active(w);
        if (stats_) ++stats_->pushes;
        pushed = true;
        break;
      }
      if (!pushed && src_flow_[v] > 0 && dist_[v] == dist_[source_vertex()] + 1) {
        Rational delta = std::min(excess_[v], src_flow_[v]);
        src_flow_[v] -= delta;
        excess_[v] -= delta;
        if (stats_) ++stats_->pushes;
        pushed = true;
      }
    } else {
      int r = v - L;
      if (snk_flow_[r] < snk_cap_[r] && dist_[v] == 1) {
        Rational delta = std::min(excess_[v], Rational(snk_cap_[r] - snk_flow_[r]));
        snk_flow_[r] += delta;
        excess_[v] -= delta;
        if (stats_) ++stats_->pushes;
        pushed = true;
      }
      if (!pushed) {
        for (int ei : right_adj_[r]) {
          InnerEdge& e = edges_[ei];
          if (e.flow <= 0) continue;
          int w = left_vertex(e.left);
          if (dist_[v] != dist_[w] + 1) continue;
          Rational delta = std::min(excess_[v], e.flow);
          e.flow -= delta;
          excess_[v] -= delta;
          excess_[w] += delta;
          push_active(w);
          if (stats_) ++stats_->pushes;
          pushed = true;
          break;
        }
      }
    }
    if (!pushed) relabel(v);
  }
}

void FlowNetwork::relabel(int v) {
  int L = left_count();
  int best = -1;
  if (v < L) {
    for (int ei : left_adj_[v]) {
      int d = dist_[right_vertex(edges_[ei].right)];
      if (best < 0 || d < best) best = d;
    }
    if (src_flow_[v] > 0) {
      int d = dist_[source_vertex()];
      if (best < 0 || d < best) best = d;
    }
  } else {
    int r = v - L;
    if (snk_flow_[r] < snk_cap_[r]) best = dist_[sink_vertex()];
    for (int ei : right_adj_[r]) {
      if (edges_[ei].flow <= 0) continue;
      int d = dist_[left_vertex(edges_[ei].left)];
      if (best < 0 || d < best) best = d;
    }
  }
  // Excess always has a residual path back to the source.
  assert(best >= 0);
  int next = best + 1;
  assert(next > dist_[v]);
  assert(next < static_cast<int>(buckets_.size()));
  dist_[v] = next;
  if (stats_) ++stats_->relabels;
  buckets_[next].push_back(v);
  highest_active_ = std::max(highest_active_, next);
}

bool FlowNetwork::labels_valid_after_deletion(const std::vector<int>& touched_rights) const {
  for (int r : touched_rights)
    if (snk_flow_[r] < snk_cap_[r] && dist_[left_count() + r] > 1) return false;
  return true;
}

Rational FlowNetwork::smf_update(const std::vector<std::pair<StateId, StateId>>& deleted) {
  assert(initialized_);  // must hold the previous max flow and labels
  if (stats_) ++stats_->smf_updates;
  std::vector<int> touched;
  for (const auto& [lid, rid] : deleted) {
    int l = left_index(lid);
    int r = right_index(rid);
    assert(l >= 0 && r >= 0);
    int found = -1;
    for (int ei : left_adj_[l])
      if (edges_[ei].right == r) {
        found = ei;
        break;
      }
    assert(found >= 0 && edges_[found].alive);
    InnerEdge& e = edges_[found];
    if (e.flow > 0) {
      snk_flow_[r] -= e.flow;
      assert(snk_flow_[r] >= 0);
      excess_[left_vertex(l)] += e.flow;
      e.flow = 0;
      touched.push_back(r);
    }
    e.alive = false;
    left_adj_[l].erase(std::find(left_adj_[l].begin(), left_adj_[l].end(), found));
    right_adj_[r].erase(std::find(right_adj_[r].begin(), right_adj_[r].end(), found));
  }
  // Deleting edges only removes residual edges, except that a reduced sink
  // flow may unsaturate (r, sink) while d(r) > 1. The stale labels would then
  // wrongly certify maximality, so push-relabel restarts from the surviving
  // flow (sources re-saturated, labels reset); the flow routing is kept.
  if (!labels_valid_after_deletion(touched)) restart_from_current_flow();
  else
    for (int i = 0; i < left_count(); ++i) push_active(left_vertex(i));
  run_push_relabel();
  return flow_value();
}

void FlowNetwork::clamp_sink_flows() {
  assert(initialized_);
  for (int r = 0; r < right_count(); ++r) {
    if (snk_flow_[r] > snk_cap_[r]) {
      excess_[right_vertex(r)] += snk_flow_[r] - snk_cap_[r];
      snk_flow_[r] = snk_cap_[r];
      push_active(right_vertex(r));
    }
  }
}

void FlowNetwork::restart_from_current_flow() {
  assert(prepared_);
  if (stats_) ++stats_->restarts;
  std::fill(dist_.begin(), dist_.end(), 0);
  dist_[source_vertex()] = refined_source_label_ ? 2 * (left_count() + 1) : vertex_count();
  for (auto& b : buckets_) b.clear();
  highest_active_ = -1;
  for (int i = 0; i < left_count(); ++i) {
    excess_[left_vertex(i)] += src_cap_[i] - src_flow_[i];
    src_flow_[i] = src_cap_[i];
    push_active(left_vertex(i));
  }
  for (int r = 0; r < right_count(); ++r) push_active(right_vertex(r));
  initialized_ = true;
}

void FlowNetwork::min_cut(std::vector<char>& left_in_cut, std::vector<char>& right_in_cut) const {
  left_in_cut.assign(left_count(), 0);
  right_in_cut.assign(right_count(), 0);
  std::deque<int> queue;
  std::vector<char> seen(vertex_count(), 0);
  seen[source_vertex()] = 1;
  queue.push_back(source_vertex());
  int L = left_count();
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    if (x == source_vertex()) {
      for (int u = 0; u < L; ++u)
        if (src_flow_[u] < src_cap_[u] && !seen[u]) {
          seen[u] = 1;
          left_in_cut[u] = 1;
          queue.push_back(u);
        }
    } else if (x < L) {
      for (int ei : left_adj_[x]) {
        const InnerEdge& e = edges_[ei];
        int v = right_vertex(e.right);
        if (!seen[v]) {
          seen[v] = 1;
          right_in_cut[e.right] = 1;
          queue.push_back(v);
        }
      }
      if (src_flow_[x] > 0) seen[source_vertex()] = 1;
    } else if (x < L + right_count()) {
      int r = x - L;
      for (int ei : right_adj_[r]) {
        const InnerEdge& e = edges_[ei];
        if (e.flow <= 0) continue;
        int v = left_vertex(e.left);
        if (!seen[v]) {
          seen[v] = 1;
          left_in_cut[e.left] = 1;
          queue.push_back(v);
        }
      }
      // Residual (r, sink) must not exist for r on the source side of a
      // finished max flow; nothing to do for the sink.
    }
  }
}

void FlowNetwork::apply_path(const std::vector<int>& parent_vertex,
                             const std::vector<int>& parent_edge,
                             const std::vector<char>& backward, const Rational& delta) {
  int L = left_count();
  int source = source_vertex(), sink = sink_vertex();
  for (int v = sink; v != source; v = parent_vertex[v]) {
    int pe = parent_edge[v];
    if (pe == -1) {
      src_flow_[v] += delta;
    } else if (pe == -2) {
      snk_flow_[parent_vertex[v] - L] += delta;
    } else if (backward[v]) {
      edges_[pe].flow -= delta;
      assert(edges_[pe].flow >= 0);
    } else {
      edges_[pe].flow += delta;
    }
  }
}

bool FlowNetwork::invariants_ok() const {
  if (!prepared_) return false;
  for (int i = 0; i < left_count(); ++i)
    if (src_flow_[i] < 0 || src_flow_[i] > src_cap_[i]) return false;
  for (int j = 0; j < right_count(); ++j)
    if (snk_flow_[j] < 0 || snk_flow_[j] > snk_cap_[j]) return false;
  for (const auto& e : edges_)
    if (e.flow < 0 || (!e.alive && e.flow != 0)) return false;
  // Conservation against the recorded excess.
  for (int i = 0; i < left_count(); ++i) {
    Rational out(0);
    for (int ei : left_adj_[i]) out += edges_[ei].flow;
    if (src_flow_[i] - out != excess_[left_vertex(i)]) return false;
  }
  for (int j = 0; j < right_count(); ++j) {
    Rational in(0);
    for (int ei : right_adj_[j]) in += edges_[ei].flow;
    if (in - snk_flow_[j] != excess_[right_vertex(j)]) return false;
  }
  if (!initialized_) return true;
  // Distance validity: d(v) <= d(w) + 1 for every residual edge (v, w).
  for (int i = 0; i < left_count(); ++i) {
    int v = left_vertex(i);
    if (src_flow_[i] < src_cap_[i] && dist_[source_vertex()] > dist_[v] + 1) return false;
    if (src_flow_[i] > 0 && dist_[v] > dist_[source_vertex()] + 1) return false;
    for (int ei : left_adj_[i])
      if (dist_[v] > dist_[right_vertex(edges_[ei].right)] + 1) return false;
  }
  for (int j = 0; j < right_count(); ++j) {
    int v = right_vertex(j);
    if (snk_flow_[j] < snk_cap_[j] && dist_[v] > dist_[sink_vertex()] + 1) return false;
    for (int ei : right_adj_[j])
      if (edges_[ei].flow > 0 && dist_[v] > dist_[left_vertex(edges_[ei].left)] + 1) return false;
  }
  return true;
}

std::string FlowNetwork::to_dot(const std::string& name) const {
  auto vertex_name = [](StateId id, bool right) {
    std::string base = id == kAuxVertex ? std::string("aux") : std::to_string(id);
    return (right ? "r_" : "l_") + base;
  };
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n  rankdir=LR;\n  source [shape=diamond];\n  sink [shape=diamond];\n";
  for (int i = 0; i < left_count(); ++i)
    out << "  " << vertex_name(left_ids_[i], false) << " [label=\""
        << (left_ids_[i] == kAuxVertex ? "aux" : std::to_string(left_ids_[i])) << "\"];\n";
  for (int j = 0; j < right_count(); ++j)
    out << "  " << vertex_name(right_ids_[j], true) << " [label=\""
        << (right_ids_[j] == kAuxVertex ? "aux" : std::to_string(right_ids_[j])) << "\",style=dashed];\n";
  for (int i = 0; i < left_count(); ++i)
    out << "  source -> " << vertex_name(left_ids_[i], false) << " [label=\""
        << to_string(src_flow_[i]) << "/" << to_string(src_cap_[i]) << "\"];\n";
  for (const auto& e : edges_) {
    if (!e.alive) continue;
    out << "  " << vertex_name(left_ids_[e.left], false) << " -> "
        << vertex_name(right_ids_[e.right], true) << " [label=\"" << to_string(e.flow)
        << "/inf\"];\n";
  }
  for (int j = 0; j < right_count(); ++j)
    out << "  " << vertex_name(right_ids_[j], true) << " -> sink [label=\""
        << to_string(snk_flow_[j]) << "/" << to_string(snk_cap_[j]) << "\"];\n";
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Network construction from distribution pairs

FlowNetwork build_network(const Distribution& mu1, const Distribution& mu2, const Relation& rel) {
  FlowNetwork net;
  for (const auto& [s, p] : mu1.entries()) net.add_left(s, p);
  Rational aux1 = mu1.deficit();
  bool has_aux1 = aux1 > 0;
  if (has_aux1) net.add_left(kAuxVertex, aux1);
  for (const auto& [t, p] : mu2.entries()) net.add_right(t, p);
  Rational aux2 = mu2.deficit();
  bool has_aux2 = aux2 > 0;
  if (has_aux2) net.add_right(kAuxVertex, aux2);

  for (const auto& [s, p1] : mu1.entries())
    for (const auto& [t, p2] : mu2.entries())
      if (rel.contains(s, t)) net.add_edge(s, t);
  if (has_aux1) {
    // The auxiliary state sits below every state, including itself.
    for (const auto& [t, p2] : mu2.entries()) net.add_edge(kAuxVertex, t);
    if (has_aux2) net.add_edge(kAuxVertex, kAuxVertex);
  }
  net.prepare();
  return net;
}

bool weight_check(const Distribution& mu1, const Distribution& mu2, const Relation& rel,
                  FlowStats* stats) {
  FlowNetwork net = build_network(mu1, mu2, rel);
  net.set_stats(stats);
  if (stats) ++stats->fresh_networks;
  return net.max_flow() == 1;
}

// ---------------------------------------------------------------------------
// Feasible flow with lower bounds

namespace {

// Generic exact max flow (BFS augmenting paths) for the transformed feasible
// flow network; nullopt capacity means infinite.
class MiniFlow {
public:
  int add_node() {
    adj_.emplace_back();
    return static_cast<int>(adj_.size()) - 1;
  }

  int add_edge(int from, int to, std::optional<Rational> cap) {
    adj_[from].push_back({to, std::move(cap), kZero, static_cast<int>(adj_[to].size())});
    adj_[to].push_back({from, Rational(0), kZero, static_cast<int>(adj_[from].size()) - 1});
    return static_cast<int>(adj_[from].size()) - 1;
  }

  const Rational& flow(int from, int index) const { return adj_[from][index].flow; }

  Rational max_flow(int s, int t) {
    Rational total(0);
    for (;;) {
      std::vector<std::pair<int, int>> parent(adj_.size(), {-1, -1});
      std::vector<char> seen(adj_.size(), 0);
      std::deque<int> queue;
      seen[s] = 1;
      queue.push_back(s);
      while (!queue.empty() && !seen[t]) {
        int x = queue.front();
        queue.pop_front();
        for (size_t i = 0; i < adj_[x].size(); ++i) {
          const Edge& e = adj_[x][i];
          if (seen[e.to] || !has_residual(e)) continue;
          seen[e.to] = 1;
          parent[e.to] = {x, static_cast<int>(i)};
          queue.push_back(e.to);
        }
      }
      if (!seen[t]) return total;
      std::optional<Rational> delta;
      for (int v = t; v != s;) {
        auto [u, i] = parent[v];
        const Edge& e = adj_[u][i];
        if (e.cap) {
          Rational res = *e.cap - e.flow;
          if (!delta || res < *delta) delta = res;
        }
        v = u;
      }
      assert(delta && *delta > 0);  // paths through the super source are finite
      for (int v = t; v != s;) {
        auto [u, i] = parent[v];
        Edge& e = adj_[u][i];
        e.flow += *delta;
        adj_[e.to][e.rev].flow -= *delta;
        v = u;
      }
      total += *delta;
    }
  }

private:
  struct Edge {
    int to;
    std::optional<Rational> cap;
    Rational flow;
    int rev;
  };

  bool has_residual(const Edge& e) const { return !e.cap || e.flow < *e.cap; }

  std::vector<std::vector<Edge>> adj_;
};

} // namespace

Rational FeasibleFlow::source_flow(StateId l) const {
  for (const auto& [id, f] : source)
    if (id == l) return f;
  return kZero;
}

Rational FeasibleFlow::inner_flow(StateId l, StateId r) const {
  for (const auto& [e, f] : inner)
    if (e.first == l && e.second == r) return f;
  return kZero;
}

Rational FeasibleFlow::sink_flow(StateId r) const {
  for (const auto& [id, f] : sink)
    if (id == r) return f;
  return kZero;
}

std::optional<FeasibleFlow> feasible_flow(const FlowNetwork& shape,
                                          const std::vector<std::pair<EdgeRef, Rational>>& lower) {
  std::map<StateId, Rational> lower_src, lower_snk;
  std::map<std::pair<StateId, StateId>, Rational> lower_inner;
  for (const auto& [e, l] : lower) {
    assert(l >= 0);
    switch (e.kind) {
      case EdgeRef::Source: lower_src[e.left] += l; break;
      case EdgeRef::Inner: lower_inner[{e.left, e.right}] += l; break;
      case EdgeRef::Sink: lower_snk[e.right] += l; break;
    }
  }

  MiniFlow g;
  int L = shape.left_count(), R = shape.right_count();
  std::vector<int> left_node(L), right_node(R);
  for (int i = 0; i < L; ++i) left_node[i] = g.add_node();
  for (int j = 0; j < R; ++j) right_node[j] = g.add_node();
  int s = g.add_node(), t = g.add_node();
  int super_s = g.add_node(), super_t = g.add_node();

  int node_count = L + R + 4;
  std::vector<Rational> supply(node_count, kZero), demand(node_count, kZero);
  auto place = [&](int from, int to, const std::optional<Rational>& cap, const Rational& low) -> int {
    if (low > 0) {
      assert(!cap || low <= *cap);
      demand[from] += low;
      supply[to] += low;
    }
    std::optional<Rational> reduced = cap;
    if (reduced) *reduced -= low;
    return g.add_edge(from, to, std::move(reduced));
  };

  std::vector<int> src_edge(L), snk_edge(R);
  std::vector<std::pair<std::pair<int, int>, int>> inner_edges;  // ((l, r), edge index at left node)
  for (int i = 0; i < L; ++i) {
    Rational low = lower_src.count(shape.left_id(i)) ? lower_src[shape.left_id(i)] : kZero;
    if (low > shape.source_cap(i)) return std::nullopt;
    src_edge[i] = place(s, left_node[i], shape.source_cap(i), low);
  }
  for (const auto& e : shape.inner_edges()) {
    if (!e.alive) continue;
    auto key = std::make_pair(shape.left_id(e.left), shape.right_id(e.right));
    Rational low = lower_inner.count(key) ? lower_inner[key] : kZero;
    inner_edges.push_back({{e.left, e.right}, place(left_node[e.left], right_node[e.right], std::nullopt, low)});
  }
  for (int j = 0; j < R; ++j) {
    Rational low = lower_snk.count(shape.right_id(j)) ? lower_snk[shape.right_id(j)] : kZero;
    if (low > shape.sink_cap(j)) return std::nullopt;
    snk_edge[j] = place(right_node[j], t, shape.sink_cap(j), low);
  }
  g.add_edge(t, s, std::nullopt);

  Rational total_supply(0);
  for (int v = 0; v < node_count; ++v) {
    if (supply[v] > 0) {
      g.add_edge(super_s, v, supply[v]);
      total_supply += supply[v];
    }
    if (demand[v] > 0) g.add_edge(v, super_t, demand[v]);
  }

  Rational value = g.max_flow(super_s, super_t);
  if (value != total_supply) return std::nullopt;

  FeasibleFlow result;
  result.value = 0;
  for (int i = 0; i < L; ++i) {
    Rational low = lower_src.count(shape.left_id(i)) ? lower_src[shape.left_id(i)] : kZero;
    Rational f = g.flow(s, src_edge[i]) + low;
    result.source.push_back({shape.left_id(i), f});
    result.value += f;
  }
  for (const auto& [lr, ei] : inner_edges) {
    auto key = std::make_pair(shape.left_id(lr.first), shape.right_id(lr.second));
    Rational low = lower_inner.count(key) ? lower_inner[key] : kZero;
    result.inner.push_back({key, g.flow(left_node[lr.first], ei) + low});
  }
  for (int j = 0; j < R; ++j) {
    Rational low = lower_snk.count(shape.right_id(j)) ? lower_snk[shape.right_id(j)] : kZero;
    result.sink.push_back({shape.right_id(j), g.flow(right_node[j], snk_edge[j]) + low});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Parametric networks

std::string gamma_class_name(GammaClass c) {
  switch (c) {
    case GammaClass::Valid: return "valid";
    case GammaClass::TooSmall: return "too-small";
    case GammaClass::TooLarge: return "too-large";
    case GammaClass::NoValidExists: return "no-valid-gamma";
  }
  return "?";
}

Rational BreakpointList::kappa(const Rational& gamma) const {
  size_t i = 0;
  while (i < points.size() && gamma > points[i]) ++i;
  return segments[i].at(gamma);
}

ParametricNetwork::ParametricNetwork(std::vector<LeftSpec> left, std::vector<RightSpec> right,
                                     std::vector<std::pair<StateId, StateId>> edges,
                                     Rational initial_gamma, FlowStats* stats)
    : left_(std::move(left)), right_(std::move(right)), edges_(std::move(edges)),
      gamma_(std::move(initial_gamma)), stats_(stats) {
  std::sort(left_.begin(), left_.end(), [](const LeftSpec& a, const LeftSpec& b) { return a.id < b.id; });
  std::sort(right_.begin(), right_.end(), [](const RightSpec& a, const RightSpec& b) { return a.id < b.id; });
  std::sort(edges_.begin(), edges_.end());
  net_ = fresh_network(gamma_);
}

FlowNetwork ParametricNetwork::fresh_network(const Rational& gamma) const {
  FlowNetwork net;
  for (const auto& l : left_) net.add_left(l.id, l.cap);
  for (const auto& r : right_) net.add_right(r.id, r.base * gamma);
  for (const auto& [l, r] : edges_) net.add_edge(l, r);
  net.prepare();
  net.set_stats(stats_);
  if (stats_) ++stats_->fresh_networks;
  return net;
}

std::vector<char> ParametricNetwork::mu1_mask(const FlowNetwork& net) const {
  std::vector<char> mask(net.left_count(), 0);
  for (const auto& l : left_)
    if (l.mandatory) mask[net.left_index(l.id)] = 1;
  return mask;
}

std::vector<char> ParametricNetwork::mu2_mask(const FlowNetwork& net) const {
  std::vector<char> mask(net.right_count(), 0);
  for (const auto& r : right_)
    if (r.mandatory) mask[net.right_index(r.id)] = 1;
  return mask;
}

bool ParametricNetwork::mu1_empty() const {
  for (const auto& l : left_)
    if (l.mandatory) return false;
  return true;
}

bool ParametricNetwork::mu2_empty() const {
  for (const auto& r : right_)
    if (r.mandatory) return false;
  return true;
}

void set_gamma(ParametricNetwork& pn, const Rational& gamma) {
  assert(gamma >= 0);
  if (gamma == pn.gamma_) return;
  bool decreasing = gamma < pn.gamma_;
  pn.gamma_ = gamma;
  for (size_t j = 0; j < pn.right_.size(); ++j) {
    int idx = pn.net_.right_index(pn.right_[j].id);
    pn.net_.set_sink_cap(idx, pn.right_[j].base * gamma);
  }
  if (!pn.net_.has_run()) return;
  if (decreasing) pn.net_.clamp_sink_flows();
  else pn.net_.restart_from_current_flow();
}

namespace {

struct CutProbe {
  KappaSegment line;
  Rational value;
};

CutProbe evaluate_cut(ParametricNetwork& pn, const Rational& gamma) {
  set_gamma(pn, gamma);
  Rational value = pn.network().max_flow();
  std::vector<char> lx, rx;
  pn.network().min_cut(lx, rx);
  KappaSegment line{Rational(0), Rational(0)};
  const FlowNetwork& net = pn.network();
  for (int i = 0; i < net.left_count(); ++i)
    if (!lx[i]) line.intercept += net.source_cap(i);
  for (size_t j = 0; j < pn.right().size(); ++j) {
    int idx = net.right_index(pn.right()[j].id);
    if (rx[idx]) line.slope += pn.right()[j].base;
  }
  if (line.at(gamma) != value)
    throw std::logic_error("parametric cut line does not match the flow value");
  return {line, value};
}

void collect_breakpoints(ParametricNetwork& pn, const Rational& glo, const KappaSegment& llo,
                         const Rational& ghi, const KappaSegment& lhi, std::vector<Rational>& out) {
  if (llo == lhi) return;
  assert(llo.slope > lhi.slope);
  Rational meet = (lhi.intercept - llo.intercept) / (llo.slope - lhi.slope);
  assert(meet >= glo && meet <= ghi);
  Rational bound = llo.at(meet);
  CutProbe probe = evaluate_cut(pn, meet);
  assert(probe.value <= bound);
  if (probe.value == bound) {
    out.push_back(meet);
    return;
  }
  collect_breakpoints(pn, glo, llo, meet, probe.line, out);
  collect_breakpoints(pn, meet, probe.line, ghi, lhi, out);
}

} // namespace

BreakpointList breakpoints(ParametricNetwork& pn) {
  if (pn.stats()) ++pn.stats()->breakpoint_computations;
  BreakpointList result;
  CutProbe low = evaluate_cut(pn, Rational(0));
  assert(low.value == 0);
  if (low.line.slope == 0) {
    result.segments.push_back(low.line);
    return result;
  }
  Rational ghi(1);
  CutProbe high = evaluate_cut(pn, ghi);
  while (high.line.slope != 0) {
    ghi *= 2;
    high = evaluate_cut(pn, ghi);
  }
  std::vector<Rational> candidates;
  collect_breakpoints(pn, Rational(0), low.line, ghi, high.line, candidates);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Candidate points where the segment line does not actually change are
  // artifacts of touching cuts; merge them away.
  std::vector<KappaSegment> segments;
  auto midpoint_segment = [&](size_t i, const std::vector<Rational>& pts) {
    Rational g;
    if (pts.empty()) g = 1;
    else if (i == 0) g = pts[0] / 2;
    else if (i == pts.size()) g = pts.back() + 1;
    else g = (pts[i - 1] + pts[i]) / 2;
    return evaluate_cut(pn, g).line;
  };
  for (;;) {
    segments.clear();
    for (size_t i = 0; i <= candidates.size(); ++i) segments.push_back(midpoint_segment(i, candidates));
    bool merged = false;
    for (size_t i = 0; i + 1 <= candidates.size(); ++i) {
      if (segments[i] == segments[i + 1]) {
        candidates.erase(candidates.begin() + static_cast<long>(i));
        merged = true;
        break;
      }
    }
    if (!merged) break;
  }
  result.points = std::move(candidates);
  result.segments = std::move(segments);
  for (size_t i = 0; i + 1 < result.segments.size(); ++i) {
    assert(result.segments[i].slope > result.segments[i + 1].slope);
    assert(result.segments[i].at(result.points[i]) == result.segments[i + 1].at(result.points[i]));
  }
  assert(static_cast<int>(result.points.size()) <= pn.network().vertex_count() - 2);
  return result;
}

FlowNetwork max_cost_max_flow(const ParametricNetwork& pn, const Rational& gamma) {
  // Successive maximum-cost augmenting paths under the MU-weighted cost
  // function (2 between mandatory vertices, 1 mixed, 0 otherwise). Starting
  // from the zero flow the residual network never contains a positive-cost
  // cycle, so every intermediate flow has maximum cost for its value and the
  // final one is a maximum flow of maximum cost. Residual arcs into the
  // source and out of the sink can never lie on a source-to-sink path, which
  // realises the "removed residual arcs" of the construction.
  FlowNetwork net = pn.fresh_network(gamma);
  std::vector<char> mu1 = pn.mu1_mask(net);
  std::vector<char> mu2 = pn.mu2_mask(net);
  int L = net.left_count(), R = net.right_count();
  int V = L + R + 2;
  int source = L + R, sink = L + R + 1;
  auto edge_cost = [&](const FlowNetwork::InnerEdge& e) {
    return (mu1[e.left] ? 1 : 0) + (mu2[e.right] ? 1 : 0);
  };
  for (;;) {
    // Longest-path DP over the residual graph (costs in {-2..2}, no positive
    // cycles); deterministic relaxation order.
    std::vector<std::optional<Rational>> best(V);
    std::vector<int> parent_edge(V, -3);  // -1: source edge, -2: sink edge, else inner index
    std::vector<int> parent_vertex(V, -1);
    std::vector<char> backward(V, 0);
    best[source] = Rational(0);
    bool changed = false;
    for (int round = 0; round <= V; ++round) {
      changed = false;
      auto relax = [&](int from, int to, int cost, int pe, bool back) {
        if (!best[from]) return;
        Rational candidate = *best[from] + cost;
        if (!best[to] || candidate > *best[to]) {
          best[to] = candidate;
          parent_edge[to] = pe;
          parent_vertex[to] = from;
          backward[to] = back;
          changed = true;
        }
      };
      for (int i = 0; i < L; ++i)
        if (net.source_flow(i) < net.source_cap(i)) relax(source, i, 0, -1, false);
      const auto& edges = net.inner_edges();
      for (size_t ei = 0; ei < edges.size(); ++ei) {
        const auto& e = edges[ei];
        if (!e.alive) continue;
        relax(e.left, L + e.right, edge_cost(e), static_cast<int>(ei), false);
        if (e.flow > 0) relax(L + e.right, e.left, -edge_cost(e), static_cast<int>(ei), true);
      }
      for (int j = 0; j < R; ++j)
        if (net.sink_flow(j) < net.sink_cap(j)) relax(L + j, sink, 0, -2, false);
      if (!changed) break;
    }
    if (changed) throw std::logic_error("positive-cost cycle in a residual network");
    if (!best[sink]) return net;
    // Bottleneck and augmentation along the parent chain.
    std::optional<Rational> delta;
    auto tighten = [&](const Rational& residual) {
      if (!delta || residual < *delta) delta = residual;
    };
    for (int v = sink; v != source; v = parent_vertex[v]) {
      int pe = parent_edge[v];
      if (pe == -1) tighten(net.source_cap(v) - net.source_flow(v));
      else if (pe == -2) tighten(net.sink_cap(parent_vertex[v] - L) - net.sink_flow(parent_vertex[v] - L));
      else if (backward[v]) tighten(net.inner_edges()[pe].flow);
      // forward inner edges are infinite
    }
    assert(delta && *delta > 0);
    net.apply_path(parent_vertex, parent_edge, backward, *delta);
  }
}

GammaClass classify_gamma(const ParametricNetwork& pn, const Rational& gamma_star) {
  if (pn.stats()) ++pn.stats()->classify_calls;
  FlowNetwork net = max_cost_max_flow(pn, gamma_star);
  std::vector<char> mu1 = pn.mu1_mask(net);
  std::vector<char> mu2 = pn.mu2_mask(net);
  bool mu1_sat = true, mu2_sat = true;
  for (int i = 0; i < net.left_count(); ++i)
    if (mu1[i] && !net.source_saturated(i)) mu1_sat = false;
  for (int j = 0; j < net.right_count(); ++j)
    if (mu2[j] && !net.sink_saturated(j)) mu2_sat = false;
  if (mu1_sat && mu2_sat) return GammaClass::Valid;
  if (!mu1_sat && mu2_sat) return GammaClass::TooSmall;
  if (mu1_sat && !mu2_sat) return GammaClass::TooLarge;
  return GammaClass::NoValidExists;
}

std::optional<Rational> find_valid_breakpoint(const ParametricNetwork& pn,
                                              const BreakpointList& list,
                                              const std::optional<Rational>& bound, bool minimal) {
  std::vector<Rational> points = list.points;
  if (bound) {
    while (!points.empty() && points.back() > *bound) points.pop_back();
  }
  std::optional<Rational> best;
  int lo = 0, hi = static_cast<int>(points.size()) - 1;
  while (lo <= hi) {
    int mid = lo + (hi - lo) / 2;
    switch (classify_gamma(pn, points[mid])) {
      case GammaClass::Valid:
        best = points[mid];
        if (!minimal) return best;
        hi = mid - 1;
        break;
      case GammaClass::TooSmall:
        lo = mid + 1;
        break;
      case GammaClass::TooLarge:
        hi = mid - 1;
        break;
      case GammaClass::NoValidExists:
        return std::nullopt;
    }
  }
  return best;
}

std::optional<Rational> find_valid_breakpoint(ParametricNetwork& pn,
                                              const std::optional<Rational>& bound, bool minimal) {
  return find_valid_breakpoint(pn, breakpoints(pn), bound, minimal);
}

} // namespace simrel
