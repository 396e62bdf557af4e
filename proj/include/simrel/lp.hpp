#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simrel/rational.hpp"

namespace simrel {

/// Sparse linear feasibility problem over named rational variables. There is
/// no objective; the only query is feasibility.
class LpProblem {
public:
  enum class Rel { Le, Eq, Ge };

  struct Constraint {
    std::vector<std::pair<int, Rational>> coeffs;
    Rel rel;
    Rational rhs;
  };

  int add_variable(const std::string& name);
  int variable_count() const { return static_cast<int>(names_.size()); }
  const std::string& variable_name(int v) const { return names_[v]; }

  void set_lower(int v, const Rational& lo);
  void set_upper(int v, const Rational& hi);
  const std::optional<Rational>& lower(int v) const { return lower_[v]; }
  const std::optional<Rational>& upper(int v) const { return upper_[v]; }

  /// Coefficient rows may mention each declared variable at most once.
  void add_constraint(std::vector<std::pair<int, Rational>> coeffs, Rel rel, Rational rhs);
  const std::vector<Constraint>& constraints() const { return constraints_; }

  /// Exact evaluation of every constraint and bound under an assignment.
  bool satisfied_by(const std::vector<Rational>& assignment) const;

private:
  std::vector<std::string> names_;
  std::vector<std::optional<Rational>> lower_, upper_;
  std::vector<Constraint> constraints_;
};

struct LpStats {
  long problems = 0;
  long pivots = 0;
  long max_constraints = 0;
};

/// Phase-1 simplex with Bland's anti-cycling rule over exact rationals.
/// Returns a satisfying assignment (indexed by variable) or nullopt. Any
/// returned assignment is re-checked exactly before being handed out.
std::optional<std::vector<Rational>> lp_feasible(const LpProblem& lp, LpStats* stats = nullptr);

} // namespace simrel
