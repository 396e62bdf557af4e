#include "support/support.hpp"

#include <algorithm>

namespace simrel::test {

Distribution random_distribution(Rng& rng, int n, int fanout, bool stochastic) {
  Distribution d;
  int k = 1 + rng.below(std::min(fanout, n));
  std::vector<StateId> targets;
  while (static_cast<int>(targets.size()) < k) {
    StateId t = rng.below(n);
    if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
  }
  static const int denominators[] = {2, 3, 4, 6, 8};
  int den = denominators[rng.below(5)];
  while (den < k) den *= 2;
  // Split `den` units over k positive weights, then possibly drop some mass
  // (keeping the support nonempty) for sub-stochastic rows.
  std::vector<int> weights(k, 1);
  for (int extra = den - k; extra > 0; --extra) ++weights[rng.below(k)];
  if (!stochastic && rng.chance(40)) {
    int drop = rng.below(den / 2 + 1);
    while (drop-- > 0) {
      int j = rng.below(k);
      int total = 0;
      for (int w : weights) total += w;
      if (total <= 1) break;
      if (weights[j] > 0) --weights[j];
    }
  }
  for (int i = 0; i < k; ++i)
    if (weights[i] > 0) d.set(targets[i], rat(weights[i], den));
  return d;
}

Model random_markov(Rng& rng, ModelKind kind, int max_n, int max_fanout, int label_count) {
  Model m;
  m.kind = kind;
  m.n = 2 + rng.below(max_n - 1);
  m.labels.assign(m.n, {});
  m.names.resize(m.n);
  for (StateId s = 0; s < m.n; ++s) {
    m.names[s] = std::to_string(s);
    m.labels[s].insert("l" + std::to_string(rng.below(label_count)));
  }
  if (kind == ModelKind::CTMC) {
    m.rate.resize(m.n);
    for (StateId s = 0; s < m.n; ++s) {
      if (rng.chance(25)) continue;  // absorbing
      int k = 1 + rng.below(max_fanout);
      for (int i = 0; i < k; ++i) {
        StateId t = rng.below(m.n);
        if (m.rate[s].contains(t)) continue;
        m.rate[s].set(t, rat(1 + rng.below(4), 1 + rng.below(2)));
      }
    }
  } else {
    m.prob.resize(m.n);
    for (StateId s = 0; s < m.n; ++s) {
      if (rng.chance(25)) continue;  // absorbing
      m.prob[s] = random_distribution(rng, m.n, max_fanout, kind == ModelKind::DTMC);
      if (kind == ModelKind::DTMC && !m.prob[s].absorbing() && !m.prob[s].stochastic()) {
        // Patch the row up to a stochastic one.
        Rational missing = m.prob[s].deficit();
        Distribution fixed;
        bool bumped = false;
        for (const auto& [t, p] : m.prob[s].entries()) {
          if (!bumped) {
            fixed.set(t, p + missing);
            bumped = true;
          } else {
            fixed.set(t, p);
          }
        }
        m.prob[s] = fixed;
      }
    }
  }
  m.finalize();
  return m;
}

Model random_pa(Rng& rng, bool continuous, int max_n, int max_actions, int max_dists,
                int label_count, bool mdp) {
  Model m;
  m.kind = continuous ? ModelKind::CPA : ModelKind::PA;
  m.n = 2 + rng.below(max_n - 1);
  m.labels.assign(m.n, {});
  m.names.resize(m.n);
  for (StateId s = 0; s < m.n; ++s) {
    m.names[s] = std::to_string(s);
    m.labels[s].insert("l" + std::to_string(rng.below(label_count)));
  }
  int actions = 1 + rng.below(max_actions);
  for (int a = 0; a < actions; ++a) m.actions.push_back(std::string(1, static_cast<char>('a' + a)));
  if (continuous) m.cpa.resize(m.n);
  else m.pa.resize(m.n);
  // Small shared pool of exit rates so CPA combination classes occur.
  static const int exits[] = {1, 2, 3};
  for (StateId s = 0; s < m.n; ++s) {
    for (ActionId a = 0; a < actions; ++a) {
      if (rng.chance(35)) continue;
      int k = mdp ? 1 : 1 + rng.below(max_dists);
      for (int i = 0; i < k; ++i) {
        Distribution d = random_distribution(rng, m.n, 3, mdp || rng.chance(70));
        if (continuous) {
          RateFunction r;
          Rational exit(exits[rng.below(3)]);
          for (const auto& [t, p] : d.entries()) r.set(t, p * exit / d.total());
          m.cpa[s].steps[a].push_back(std::move(r));
        } else {
          m.pa[s].steps[a].push_back(std::move(d));
        }
      }
    }
  }
  m.finalize();
  return m;
}

} // namespace simrel::test
