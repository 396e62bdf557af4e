#pragma once

#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "simrel/flownet.hpp"
#include "simrel/model.hpp"
#include "simrel/model_io.hpp"
#include "simrel/relation.hpp"

namespace simrel::test {

inline std::string data_path(const std::string& name) {
  return std::string(SIMREL_TEST_DATA_DIR) + "/" + name;
}

inline Model load(const std::string& name) { return parse_model_file(data_path(name)); }

inline StateId sid(const Model& m, const std::string& name) {
  auto s = m.state_by_name(name);
  if (!s) throw std::runtime_error("no state named " + name);
  return *s;
}

inline Relation make_relation(const Model& m,
                              const std::vector<std::pair<std::string, std::string>>& pairs) {
  Relation r(m.n);
  for (const auto& [a, b] : pairs) r.insert(sid(m, a), sid(m, b));
  return r;
}

// ---------------------------------------------------------------------------
// Independent maximum-flow oracle: plain BFS augmenting paths over an
// antisymmetric flow matrix. Shares nothing with the push-relabel code.

class AugmentingOracle {
public:
  explicit AugmentingOracle(const FlowNetwork& net) {
    int L = net.left_count(), R = net.right_count();
    n_ = L + R + 2;
    source_ = L + R;
    sink_ = L + R + 1;
    inf_.assign(n_, std::vector<char>(n_, 0));
    cap_.assign(n_, std::vector<Rational>(n_, Rational(0)));
    for (int i = 0; i < L; ++i) cap_[source_][i] = net.source_cap(i);
    for (int j = 0; j < R; ++j) cap_[L + j][sink_] = net.sink_cap(j);
    for (const auto& e : net.inner_edges())
      if (e.alive) inf_[e.left][L + e.right] = 1;
  }

  Rational max_flow() const {
    std::vector<std::vector<Rational>> flow(n_, std::vector<Rational>(n_, Rational(0)));
    Rational total(0);
    for (;;) {
      std::vector<int> parent(n_, -1);
      parent[source_] = source_;
      std::vector<int> queue{source_};
      for (size_t qi = 0; qi < queue.size() && parent[sink_] < 0; ++qi) {
        int u = queue[qi];
        for (int v = 0; v < n_; ++v) {
          if (parent[v] >= 0 || !has_residual(u, v, flow)) continue;
          parent[v] = u;
          queue.push_back(v);
        }
      }
      if (parent[sink_] < 0) return total;
      std::optional<Rational> delta;
      for (int v = sink_; v != source_; v = parent[v]) {
        int u = parent[v];
        if (inf_[u][v]) continue;  // unbounded residual
        Rational res = cap_[u][v] - flow[u][v];
        if (!delta || res < *delta) delta = res;
      }
      if (!delta) throw std::logic_error("augmenting path with unbounded bottleneck");
      for (int v = sink_; v != source_; v = parent[v]) {
        int u = parent[v];
        flow[u][v] += *delta;
        flow[v][u] -= *delta;
      }
      total += *delta;
    }
  }

private:
  // Residual capacity c(u,v) - f(u,v) with f antisymmetric; reverse residuals
  // of infinite edges show up as negative flow against zero capacity.
  bool has_residual(int u, int v, const std::vector<std::vector<Rational>>& flow) const {
    if (inf_[u][v]) return true;
    return cap_[u][v] - flow[u][v] > 0;
  }

  int n_, source_, sink_;
  std::vector<std::vector<char>> inf_;
  std::vector<std::vector<Rational>> cap_;
};

// ---------------------------------------------------------------------------
// Deterministic random-model generators for the property suites.

class Rng {
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  int below(int n) { return static_cast<int>(gen_() % static_cast<uint64_t>(n)); }
  bool chance(int percent) { return below(100) < percent; }
  std::mt19937_64& raw() { return gen_; }

private:
  std::mt19937_64 gen_;
};

// A sub-distribution over up to `fanout` distinct successors with denominator
// from a small set; stochastic rows on demand.
Distribution random_distribution(Rng& rng, int n, int fanout, bool stochastic);
Model random_markov(Rng& rng, ModelKind kind, int max_n, int max_fanout, int label_count);
Model random_pa(Rng& rng, bool continuous, int max_n, int max_actions, int max_dists,
                int label_count, bool mdp = false);

} // namespace simrel::test
