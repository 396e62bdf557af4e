#include "simrel/model.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <stdexcept>

namespace simrel {

std::string kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::FPS: return "FPS";
    case ModelKind::DTMC: return "DTMC";
    case ModelKind::CTMC: return "CTMC";
    case ModelKind::PA: return "PA";
    case ModelKind::CPA: return "CPA";
  }
  return "?";
}

void Distribution::set(StateId s, const Rational& p) {
  assert(p > 0);
  auto [it, inserted] = entries_.emplace(s, p);
  assert(inserted);
  (void)it;
  (void)inserted;
}

const Rational& Distribution::at(StateId s) const {
  static const Rational zero(0);
  auto it = entries_.find(s);
  return it == entries_.end() ? zero : it->second;
}

Rational Distribution::total() const {
  Rational sum(0);
  for (const auto& [s, p] : entries_) sum += p;
  return sum;
}

Rational Distribution::deficit() const { return Rational(1) - total(); }

std::vector<StateId> Distribution::support() const {
  std::vector<StateId> out;
  out.reserve(entries_.size());
  for (const auto& [s, p] : entries_) out.push_back(s);
  return out;
}

void RateFunction::set(StateId s, const Rational& r) {
  assert(r > 0);
  auto [it, inserted] = entries_.emplace(s, r);
  assert(inserted);
  (void)it;
  (void)inserted;
}

const Rational& RateFunction::at(StateId s) const {
  static const Rational zero(0);
  auto it = entries_.find(s);
  return it == entries_.end() ? zero : it->second;
}

Rational RateFunction::exit_rate() const {
  Rational sum(0);
  for (const auto& [s, r] : entries_) sum += r;
  return sum;
}

std::vector<StateId> RateFunction::support() const {
  std::vector<StateId> out;
  out.reserve(entries_.size());
  for (const auto& [s, r] : entries_) out.push_back(s);
  return out;
}

Distribution induced_distribution(const RateFunction& r) {
  Distribution mu;
  Rational exit = r.exit_rate();
  if (exit == 0) return mu;
  for (const auto& [s, v] : r.entries()) mu.set(s, v / exit);
  return mu;
}

std::optional<StateId> Model::state_by_name(const std::string& name) const {
  for (StateId s = 0; s < n; ++s)
    if (names[s] == name) return s;
  // Fall back to a plain index.
  if (!name.empty() && name.find_first_not_of("0123456789") == std::string::npos) {
    long idx = std::stol(name);
    if (idx >= 0 && idx < n) return static_cast<StateId>(idx);
  }
  return std::nullopt;
}

std::vector<ActionId> Model::enabled_actions(StateId s) const {
  std::vector<ActionId> out;
  if (kind == ModelKind::PA) {
    for (const auto& [a, dists] : pa[s].steps)
      if (!dists.empty()) out.push_back(a);
  } else if (kind == ModelKind::CPA) {
    for (const auto& [a, rates] : cpa[s].steps)
      if (!rates.empty()) out.push_back(a);
  }
  return out;
}

long Model::transition_count() const {
  long m = 0;
  switch (kind) {
    case ModelKind::FPS:
    case ModelKind::DTMC:
      for (const auto& row : prob) m += row.size();
      break;
    case ModelKind::CTMC:
      for (const auto& row : rate) m += row.size();
      break;
    case ModelKind::PA:
      for (const auto& t : pa)
        for (const auto& [a, dists] : t.steps)
          for (const auto& d : dists) m += d.size() + 1;
      break;
    case ModelKind::CPA:
      for (const auto& t : cpa)
        for (const auto& [a, rates] : t.steps)
          for (const auto& r : rates) m += r.size() + 1;
      break;
  }
  return m;
}

int Model::fanout() const {
  int g = 0;
  for (StateId s = 0; s < n; ++s) g = std::max(g, static_cast<int>(post_[s].size()));
  return g;
}

const std::vector<StateId>& Model::post(StateId s) const { return post_[s]; }
const std::vector<StateId>& Model::pre(StateId s) const { return pre_[s]; }

std::set<StateId> Model::reach(StateId s) const {
  std::set<StateId> seen;
  std::deque<StateId> queue(post_[s].begin(), post_[s].end());
  for (StateId t : post_[s]) seen.insert(t);
  while (!queue.empty()) {
    StateId t = queue.front();
    queue.pop_front();
    for (StateId u : post_[t])
      if (seen.insert(u).second) queue.push_back(u);
  }
  return seen;
}

Rational Model::exit_rate(StateId s) const {
  assert(kind == ModelKind::CTMC);
  return rate[s].exit_rate();
}

void Model::finalize() {
  post_.assign(n, {});
  pre_.assign(n, {});
  auto add = [&](StateId src, StateId dst) { post_[src].push_back(dst); };
  switch (kind) {
    case ModelKind::FPS:
    case ModelKind::DTMC:
      for (StateId s = 0; s < n; ++s)
        for (const auto& [t, p] : prob[s].entries()) add(s, t);
      break;
    case ModelKind::CTMC:
      for (StateId s = 0; s < n; ++s)
        for (const auto& [t, r] : rate[s].entries()) add(s, t);
      break;
    case ModelKind::PA:
      for (StateId s = 0; s < n; ++s) {
        std::set<StateId> succ;
        for (const auto& [a, dists] : pa[s].steps)
          for (const auto& d : dists)
            for (const auto& [t, p] : d.entries()) succ.insert(t);
        post_[s].assign(succ.begin(), succ.end());
      }
      break;
    case ModelKind::CPA:
      for (StateId s = 0; s < n; ++s) {
        std::set<StateId> succ;
        for (const auto& [a, rates] : cpa[s].steps)
          for (const auto& r : rates)
            for (const auto& [t, v] : r.entries()) succ.insert(t);
        post_[s].assign(succ.begin(), succ.end());
      }
      break;
  }
  for (StateId s = 0; s < n; ++s) {
    std::sort(post_[s].begin(), post_[s].end());
    post_[s].erase(std::unique(post_[s].begin(), post_[s].end()), post_[s].end());
  }
  for (StateId s = 0; s < n; ++s)
    for (StateId t : post_[s]) pre_[t].push_back(s);
  for (StateId s = 0; s < n; ++s) {
    std::sort(pre_[s].begin(), pre_[s].end());
    pre_[s].erase(std::unique(pre_[s].begin(), pre_[s].end()), pre_[s].end());
  }
}

Model embedded_dtmc(const Model& ctmc) {
  if (ctmc.kind != ModelKind::CTMC) throw std::invalid_argument("embedded_dtmc needs a CTMC");
  Model d;
  d.kind = ModelKind::DTMC;
  d.n = ctmc.n;
  d.labels = ctmc.labels;
  d.names = ctmc.names;
  d.prob.resize(d.n);
  for (StateId s = 0; s < d.n; ++s) d.prob[s] = induced_distribution(ctmc.rate[s]);
  d.finalize();
  return d;
}

} // namespace simrel
