#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simrel/model.hpp"
#include "simrel/relation.hpp"

namespace simrel {

/// External vertex id of the auxiliary state in a network; absorbs the
/// deficit of a sub-stochastic distribution and sits below every state.
constexpr StateId kAuxVertex = -1;

struct FlowStats {
  long pushes = 0;
  long relabels = 0;
  long restarts = 0;
  long fresh_networks = 0;
  long smf_updates = 0;
  long breakpoint_computations = 0;
  long classify_calls = 0;
};

/// Bipartite flow network N(mu, mu', R): source -> left copies -> right
/// copies -> sink, with infinite inner capacities. Carries a persistent
/// preflow and distance function so that max flows can be recomputed
/// incrementally after edge deletions (the Smf kernel).
class FlowNetwork {
public:
  struct InnerEdge {
    int left;        // internal left index
    int right;       // internal right index
    Rational flow;
    bool alive;
  };

  /// Shape construction. Vertices are added once, edges once; finish with
  /// prepare(). External ids are StateIds or kAuxVertex.
  void add_left(StateId id, const Rational& cap);
  void add_right(StateId id, const Rational& cap);
  void add_edge(StateId left, StateId right);
  void prepare();

  void set_stats(FlowStats* stats) { stats_ = stats; }
  /// d(source) = 2|V1| instead of |V|; both are valid labelings.
  void set_refined_source_label(bool on) { refined_source_label_ = on; }

  /// Runs (or resumes) highest-label push-relabel and returns the flow value.
  Rational max_flow();
  /// Deletes inner edges (pairs of external ids), repairs the preflow per the
  /// Smf rules, resumes push-relabel, and returns the new max-flow value.
  Rational smf_update(const std::vector<std::pair<StateId, StateId>>& deleted);

  Rational flow_value() const;
  bool has_run() const { return initialized_; }

  int left_count() const { return static_cast<int>(left_ids_.size()); }
  int right_count() const { return static_cast<int>(right_ids_.size()); }
  int vertex_count() const { return left_count() + right_count() + 2; }
  StateId left_id(int i) const { return left_ids_[i]; }
  StateId right_id(int i) const { return right_ids_[i]; }
  int left_index(StateId id) const;   // -1 if absent
  int right_index(StateId id) const;

  bool has_edge(StateId left, StateId right) const;
  const Rational& source_cap(int i) const { return src_cap_[i]; }
  const Rational& sink_cap(int i) const { return snk_cap_[i]; }
  const Rational& source_flow(int i) const { return src_flow_[i]; }
  const Rational& sink_flow(int i) const { return snk_flow_[i]; }
  const std::vector<InnerEdge>& inner_edges() const { return edges_; }
  Rational total_source_cap() const;

  void set_sink_cap(int i, const Rational& cap) { snk_cap_[i] = cap; }

  /// Clamps sink flows to their capacities (used when capacities shrink);
  /// excess appears at the affected right vertices. Labels stay valid.
  void clamp_sink_flows();
  /// Re-saturates every source edge and resets the distance labels to the
  /// initial labeling (used when capacities grow).
  void restart_from_current_flow();

  /// Minimal source side of a minimum cut (residual reachability from the
  /// source); valid after max_flow. Indices are internal.
  void min_cut(std::vector<char>& left_in_cut, std::vector<char>& right_in_cut) const;

  /// Augments along a source-to-sink path given as parent chains (edge code
  /// -1: source edge, -2: sink edge, else inner edge index). Used by the
  /// max-cost flow search; does not touch the distance labels.
  void apply_path(const std::vector<int>& parent_vertex, const std::vector<int>& parent_edge,
                  const std::vector<char>& backward, const Rational& delta);

  bool source_saturated(int i) const { return src_flow_[i] == src_cap_[i]; }
  bool sink_saturated(int i) const { return snk_flow_[i] == snk_cap_[i]; }

  /// Audit of the current state: capacity bounds, conservation at every
  /// inner vertex (modulo recorded excess), and validity of the distance
  /// labeling for the current preflow.
  bool invariants_ok() const;

  std::string to_dot(const std::string& name) const;

private:
  int left_vertex(int i) const { return i; }
  int right_vertex(int i) const { return left_count() + i; }
  int source_vertex() const { return left_count() + right_count(); }
  int sink_vertex() const { return left_count() + right_count() + 1; }

  void init_preflow();
  void run_push_relabel();
  void discharge(int v);
  void relabel(int v);
  void push_active(int v);
  bool labels_valid_after_deletion(const std::vector<int>& touched_rights) const;

  std::vector<StateId> left_ids_, right_ids_;
  std::vector<Rational> src_cap_, src_flow_;
  std::vector<Rational> snk_cap_, snk_flow_;
  std::vector<InnerEdge> edges_;               // sorted by (left, right)
  std::vector<std::vector<int>> left_adj_;     // edge indices, ascending right
  std::vector<std::vector<int>> right_adj_;    // edge indices, ascending left
  std::vector<Rational> excess_;
  std::vector<int> dist_;
  std::vector<std::vector<int>> buckets_;      // active vertices by label
  int highest_active_ = -1;
  bool prepared_ = false;
  bool initialized_ = false;
  bool refined_source_label_ = false;
  FlowStats* stats_ = nullptr;
};

/// The network N(mu, mu', R) whose maximum flow decides weight-function
/// existence: left vertices support_aux(mu), right vertices support_aux(mu'),
/// inner edges R_aux (the auxiliary state sits below everything).
FlowNetwork build_network(const Distribution& mu1, const Distribution& mu2, const Relation& rel);

/// mu weight-related to mu' w.r.t. R iff the network's max flow is 1.
bool weight_check(const Distribution& mu1, const Distribution& mu2, const Relation& rel,
                  FlowStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Feasible flow with lower bounds.

struct EdgeRef {
  enum Kind { Source, Inner, Sink } kind;
  StateId left = kAuxVertex;   // meaningful for Source and Inner
  StateId right = kAuxVertex;  // meaningful for Inner and Sink
  static EdgeRef source(StateId l) { return {Source, l, kAuxVertex}; }
  static EdgeRef inner(StateId l, StateId r) { return {Inner, l, r}; }
  static EdgeRef sink(StateId r) { return {Sink, kAuxVertex, r}; }
};

struct FeasibleFlow {
  std::vector<std::pair<StateId, Rational>> source;            // per left id
  std::vector<std::pair<std::pair<StateId, StateId>, Rational>> inner;
  std::vector<std::pair<StateId, Rational>> sink;              // per right id
  Rational value;

  Rational source_flow(StateId l) const;
  Rational inner_flow(StateId l, StateId r) const;
  Rational sink_flow(StateId r) const;
};

/// Finds a flow with f(e) >= lower(e) via the supply/demand transformation
/// with super source and sink; nullopt when none exists.
std::optional<FeasibleFlow> feasible_flow(const FlowNetwork& shape,
                                          const std::vector<std::pair<EdgeRef, Rational>>& lower);

// ---------------------------------------------------------------------------
// Parametric networks N(gamma) with sink capacities gamma * P(s2, t).

struct KappaSegment {
  Rational intercept;
  Rational slope;
  Rational at(const Rational& gamma) const { return intercept + slope * gamma; }
  bool operator==(const KappaSegment& other) const {
    return intercept == other.intercept && slope == other.slope;
  }
};

/// Breakpoints of the minimum-cut capacity function kappa(gamma) together
/// with the line segments between them; segments.size() == points.size() + 1
/// and slopes strictly decrease (kappa is concave).
struct BreakpointList {
  std::vector<Rational> points;
  std::vector<KappaSegment> segments;
  Rational kappa(const Rational& gamma) const;
};

enum class GammaClass { Valid, TooSmall, TooLarge, NoValidExists };

std::string gamma_class_name(GammaClass c);

class ParametricNetwork {
public:
  struct LeftSpec {
    StateId id;
    Rational cap;
    bool mandatory;  // in MU1
  };
  struct RightSpec {
    StateId id;
    Rational base;   // sink capacity is gamma * base
    bool mandatory;  // in MU2
  };

  ParametricNetwork(std::vector<LeftSpec> left, std::vector<RightSpec> right,
                    std::vector<std::pair<StateId, StateId>> edges, Rational initial_gamma,
                    FlowStats* stats = nullptr);

  const Rational& gamma() const { return gamma_; }
  FlowNetwork& network() { return net_; }
  const FlowNetwork& network() const { return net_; }
  const std::vector<LeftSpec>& left() const { return left_; }
  const std::vector<RightSpec>& right() const { return right_; }
  const std::vector<std::pair<StateId, StateId>>& edges() const { return edges_; }

  bool mu1_empty() const;
  bool mu2_empty() const;
  FlowStats* stats() const { return stats_; }

  /// Fresh zero-flow network with sink capacities at the given gamma.
  FlowNetwork fresh_network(const Rational& gamma) const;
  std::vector<char> mu1_mask(const FlowNetwork& net) const;
  std::vector<char> mu2_mask(const FlowNetwork& net) const;

  friend void set_gamma(ParametricNetwork& pn, const Rational& gamma);

private:
  std::vector<LeftSpec> left_;
  std::vector<RightSpec> right_;
  std::vector<std::pair<StateId, StateId>> edges_;
  Rational gamma_;
  FlowNetwork net_;
  FlowStats* stats_ = nullptr;
};

/// Rescales the sink capacities to gamma * base. Decreasing gamma clamps the
/// existing sink flows and resumes from the surviving preflow; increasing
/// gamma restarts push-relabel from the current flow.
void set_gamma(ParametricNetwork& pn, const Rational& gamma);

/// All breakpoints of kappa(gamma), by divide-and-conquer intersection of
/// exact minimum-cut lines.
BreakpointList breakpoints(ParametricNetwork& pn);

/// Maximum flow of N(gamma) with maximum cost under the MU-weighted cost
/// function (cost 2 between mandatory vertices, 1 mixed, 0 otherwise),
/// computed by successive maximum-cost augmenting paths.
FlowNetwork max_cost_max_flow(const ParametricNetwork& pn, const Rational& gamma);
inline FlowNetwork max_cost_max_flow(const ParametricNetwork& pn) {
  return max_cost_max_flow(pn, pn.gamma());
}

/// Saturation verdict of the max-cost max flow at gamma*.
GammaClass classify_gamma(const ParametricNetwork& pn, const Rational& gamma_star);

/// Binary search over the precomputed breakpoints driven by classify_gamma.
/// With minimal=true the search continues leftward after a hit and returns
/// the smallest valid breakpoint; with a bound only breakpoints <= bound
/// qualify. The convenience overload computes the breakpoints itself.
std::optional<Rational> find_valid_breakpoint(const ParametricNetwork& pn,
                                              const BreakpointList& breakpoints,
                                              const std::optional<Rational>& bound, bool minimal);
std::optional<Rational> find_valid_breakpoint(ParametricNetwork& pn,
                                              const std::optional<Rational>& bound, bool minimal);

} // namespace simrel
