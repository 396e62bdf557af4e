#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "simrel/rational.hpp"

namespace simrel {

/// Dense state index in [0, n).
using StateId = int;

/// Interned action name; index into Model::actions.
using ActionId = int;

enum class ModelKind { FPS, DTMC, CTMC, PA, CPA };

std::string kind_name(ModelKind kind);

/// Sub-distribution over states: only positive entries are stored and the
/// stored values sum to at most 1. The deficit 1 - mu(S) is the implicit mass
/// of the auxiliary state, never materialised as a StateId.
class Distribution {
public:
  Distribution() = default;

  void set(StateId s, const Rational& p);      // p must be > 0, s unseen
  const Rational& at(StateId s) const;          // 0 if absent
  bool contains(StateId s) const { return entries_.count(s) != 0; }

  const std::map<StateId, Rational>& entries() const { return entries_; }
  Rational total() const;                       // mu(S)
  Rational deficit() const;                     // mu of the auxiliary state
  bool stochastic() const { return total() == 1; }
  bool absorbing() const { return entries_.empty(); }
  std::vector<StateId> support() const;
  int size() const { return static_cast<int>(entries_.size()); }

  bool operator==(const Distribution& other) const { return entries_ == other.entries_; }

private:
  std::map<StateId, Rational> entries_;
};

/// Rate function r : S -> Q>=0 with positive entries stored; exit rate r(S).
class RateFunction {
public:
  RateFunction() = default;

  void set(StateId s, const Rational& rate);    // rate must be > 0, s unseen
  const Rational& at(StateId s) const;
  bool contains(StateId s) const { return entries_.count(s) != 0; }
  const std::map<StateId, Rational>& entries() const { return entries_; }
  Rational exit_rate() const;
  std::vector<StateId> support() const;
  int size() const { return static_cast<int>(entries_.size()); }

  bool operator==(const RateFunction& other) const { return entries_ == other.entries_; }

private:
  std::map<StateId, Rational> entries_;
};

/// Distribution proportional to r; empty when the exit rate is zero.
Distribution induced_distribution(const RateFunction& r);

struct PaTransitions {
  // Per action, the successor distributions in file order; the index is the
  // distribution's identity.
  std::map<ActionId, std::vector<Distribution>> steps;
};

struct CpaTransitions {
  std::map<ActionId, std::vector<RateFunction>> steps;
};

class Model {
public:
  ModelKind kind = ModelKind::FPS;
  int n = 0;
  std::vector<std::set<std::string>> labels;    // per state
  std::vector<std::string> names;               // display names; defaults to indices

  // FPS/DTMC rows (kind-dependent; unused vectors stay empty).
  std::vector<Distribution> prob;
  // CTMC rows.
  std::vector<RateFunction> rate;
  // PA / CPA transition structure.
  std::vector<PaTransitions> pa;
  std::vector<CpaTransitions> cpa;

  std::vector<std::string> actions;             // interned action names

  bool continuous() const { return kind == ModelKind::CTMC || kind == ModelKind::CPA; }
  bool label_equal(StateId a, StateId b) const { return labels[a] == labels[b]; }

  const std::string& name(StateId s) const { return names[s]; }
  /// Looks a state up by display name or decimal index.
  std::optional<StateId> state_by_name(const std::string& name) const;

  std::vector<ActionId> enabled_actions(StateId s) const;
  /// Number of transitions m per the usual size conventions (sum of |post(s)|
  /// for Markov models, sum of fanout(s) for PA/CPA).
  long transition_count() const;
  int fanout() const;

  const std::vector<StateId>& post(StateId s) const;
  const std::vector<StateId>& pre(StateId s) const;
  /// States reachable from s with positive probability in one or more steps.
  std::set<StateId> reach(StateId s) const;

  Rational exit_rate(StateId s) const;          // CTMC only

  /// Recomputes post/pre adjacency caches; called by the parser and by tests
  /// that build models programmatically.
  void finalize();

private:
  std::vector<std::vector<StateId>> post_;
  std::vector<std::vector<StateId>> pre_;
};

/// Embedded DTMC of a CTMC: row s is R(s,.)/R(s,S) when R(s,S) > 0 and
/// absorbing otherwise; labels and names are preserved.
Model embedded_dtmc(const Model& ctmc);

} // namespace simrel
