#include "simrel/lp.hpp"

#include <cassert>
#include <stdexcept>

namespace simrel {

int LpProblem::add_variable(const std::string& name) {
  names_.push_back(name);
  lower_.emplace_back();
  upper_.emplace_back();
  return static_cast<int>(names_.size()) - 1;
}

void LpProblem::set_lower(int v, const Rational& lo) { lower_[v] = lo; }
void LpProblem::set_upper(int v, const Rational& hi) { upper_[v] = hi; }

void LpProblem::add_constraint(std::vector<std::pair<int, Rational>> coeffs, Rel rel, Rational rhs) {
  for (const auto& [v, c] : coeffs) {
    if (v < 0 || v >= variable_count()) throw std::out_of_range("constraint references undeclared variable");
  }
  constraints_.push_back({std::move(coeffs), rel, std::move(rhs)});
}

bool LpProblem::satisfied_by(const std::vector<Rational>& x) const {
  if (x.size() != names_.size()) return false;
  for (int v = 0; v < variable_count(); ++v) {
    if (lower_[v] && x[v] < *lower_[v]) return false;
    if (upper_[v] && x[v] > *upper_[v]) return false;
  }
  for (const auto& c : constraints_) {
    Rational lhs(0);
    for (const auto& [v, a] : c.coeffs) lhs += a * x[v];
    switch (c.rel) {
      case Rel::Le: if (lhs > c.rhs) return false; break;
      case Rel::Eq: if (lhs != c.rhs) return false; break;
      case Rel::Ge: if (lhs < c.rhs) return false; break;
    }
  }
  return true;
}

namespace {

// Dense phase-1 tableau. Original variables are shifted / split so every
// column is nonnegative; rows get slack or artificial columns; the phase-1
// objective (sum of artificials) is driven to zero or declared positive.
class Phase1 {
public:
  explicit Phase1(const LpProblem& lp, LpStats* stats) : lp_(lp), stats_(stats) {}

  std::optional<std::vector<Rational>> run() {
    if (!setup()) return std::nullopt;
    if (!optimize()) return std::nullopt;
    return extract();
  }

private:
  struct ColOrigin {
    int var = -1;        // original variable, -1 for slack/artificial
    bool negative_part = false;
    Rational shift;      // x = shift + y (or shift - y when negated)
    bool negated = false;
  };

  bool setup() {
    int nvars = lp_.variable_count();
    col_of_var_.assign(nvars, {-1, -1});
    for (int v = 0; v < nvars; ++v) {
      const auto& lo = lp_.lower(v);
      const auto& hi = lp_.upper(v);
      if (lo && hi && *hi < *lo) return false;
      if (lo) {
        int c = new_col({v, false, *lo, false});
        col_of_var_[v] = {c, -1};
        if (hi) upper_rows_.push_back({c, *hi - *lo});
      } else if (hi) {
        // x = hi - y with y >= 0.
        int c = new_col({v, false, *hi, true});
        col_of_var_[v] = {c, -1};
      } else {
        int cp = new_col({v, false, Rational(0), false});
        int cn = new_col({v, true, Rational(0), false});
        col_of_var_[v] = {cp, cn};
      }
    }

    // Structural rows in column space.
    for (const auto& c : lp_.constraints()) {
      std::vector<Rational> row(cols_.size(), Rational(0));
      Rational rhs = c.rhs;
      for (const auto& [v, a] : c.coeffs) {
        const auto& [cp, cn] = col_of_var_[v];
        const ColOrigin& origin = cols_[cp];
        rhs -= a * origin.shift;
        row[cp] += origin.negated ? -a : a;
        if (cn >= 0) row[cn] -= a;
      }
      if (!push_row(std::move(row), c.rel, std::move(rhs))) return false;
    }
    for (auto& [col, bound] : upper_rows_) {
      std::vector<Rational> row(cols_.size(), Rational(0));
      row[col] = 1;
      if (!push_row(std::move(row), LpProblem::Rel::Le, bound)) return false;
    }
    attach_slacks();
    return true;
  }

  int new_col(ColOrigin origin) {
    cols_.push_back(std::move(origin));
    return static_cast<int>(cols_.size()) - 1;
  }

  bool push_row(std::vector<Rational> row, LpProblem::Rel rel, Rational rhs) {
    bool zero = true;
    for (const auto& a : row)
      if (a != 0) { zero = false; break; }
    if (zero) {
      switch (rel) {
        case LpProblem::Rel::Le: return rhs >= 0;
        case LpProblem::Rel::Eq: return rhs == 0;
        case LpProblem::Rel::Ge: return rhs <= 0;
      }
    }
    rows_.push_back(std::move(row));
    rels_.push_back(rel);
    rhs_.push_back(std::move(rhs));
    return true;
  }

  void attach_slacks() {
    size_t m = rows_.size();
    basis_.assign(m, -1);
    // Normalise to rhs >= 0, add slack for inequalities, artificials where no
    // natural basic column exists.
    for (size_t i = 0; i < m; ++i) {
      if (rhs_[i] < 0) {
        for (auto& a : rows_[i]) a = -a;
        rhs_[i] = -rhs_[i];
        if (rels_[i] == LpProblem::Rel::Le) rels_[i] = LpProblem::Rel::Ge;
        else if (rels_[i] == LpProblem::Rel::Ge) rels_[i] = LpProblem::Rel::Le;
      }
    }
    for (size_t i = 0; i < m; ++i) {
      if (rels_[i] == LpProblem::Rel::Le) {
        int s = new_col({});
        grow_rows();
        rows_[i][s] = 1;
        basis_[i] = s;
      } else if (rels_[i] == LpProblem::Rel::Ge) {
        int s = new_col({});
        grow_rows();
        rows_[i][s] = -1;
      }
    }
    first_artificial_ = static_cast<int>(cols_.size());
    for (size_t i = 0; i < m; ++i) {
      if (basis_[i] < 0) {
        int a = new_col({});
        grow_rows();
        rows_[i][a] = 1;
        basis_[i] = a;
      }
    }
    // Phase-1 objective row: sum of all rows whose basic column is artificial,
    // with the artificial columns themselves priced at zero.
    obj_.assign(cols_.size(), Rational(0));
    obj_val_ = 0;
    for (size_t i = 0; i < m; ++i) {
      if (basis_[i] >= first_artificial_) {
        for (size_t j = 0; j < cols_.size(); ++j)
          if (static_cast<int>(j) < first_artificial_) obj_[j] += rows_[i][j];
        obj_val_ += rhs_[i];
      }
    }
    if (stats_) {
      ++stats_->problems;
      stats_->max_constraints = std::max<long>(stats_->max_constraints, static_cast<long>(m));
    }
  }

  void grow_rows() {
    for (auto& r : rows_) r.resize(cols_.size(), Rational(0));
  }

  bool optimize() {
    size_t m = rows_.size();
    for (;;) {
      // Bland: entering = lowest-index non-artificial column with positive
      // objective coefficient (increasing it reduces the artificial sum).
      int enter = -1;
      for (int j = 0; j < first_artificial_; ++j) {
        if (obj_[j] > 0) { enter = j; break; }
      }
      if (enter < 0) break;
      int leave = -1;
      Rational best;
      for (size_t i = 0; i < m; ++i) {
        if (rows_[i][enter] <= 0) continue;
        Rational ratio = rhs_[i] / rows_[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
      // The phase-1 objective is bounded below by zero, so a ratio row exists.
      assert(leave >= 0);
      pivot(static_cast<size_t>(leave), enter);
    }
    return obj_val_ == 0;
  }

  void pivot(size_t r, int c) {
    if (stats_) ++stats_->pivots;
    Rational inv = rows_[r][c];
    for (auto& a : rows_[r]) a /= inv;
    rhs_[r] /= inv;
    for (size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || rows_[i][c] == 0) continue;
      Rational factor = rows_[i][c];
      for (size_t j = 0; j < cols_.size(); ++j) rows_[i][j] -= factor * rows_[r][j];
      rhs_[i] -= factor * rhs_[r];
    }
    if (obj_[c] != 0) {
      Rational factor = obj_[c];
      for (size_t j = 0; j < cols_.size(); ++j) obj_[j] -= factor * rows_[r][j];
      obj_val_ -= factor * rhs_[r];
    }
    basis_[r] = c;
  }

  std::optional<std::vector<Rational>> extract() const {
    std::vector<Rational> col_val(cols_.size(), Rational(0));
    for (size_t i = 0; i < rows_.size(); ++i) col_val[basis_[i]] = rhs_[i];
    std::vector<Rational> x(lp_.variable_count(), Rational(0));
    for (int v = 0; v < lp_.variable_count(); ++v) {
      const auto& [cp, cn] = col_of_var_[v];
      const ColOrigin& origin = cols_[cp];
      Rational value = origin.shift;
      if (origin.negated) value -= col_val[cp];
      else value += col_val[cp];
      if (cn >= 0) value -= col_val[cn];
      x[v] = value;
    }
    if (!lp_.satisfied_by(x)) throw std::logic_error("lp_feasible produced an invalid assignment");
    return x;
  }

  const LpProblem& lp_;
  LpStats* stats_;
  std::vector<ColOrigin> cols_;
  std::vector<std::pair<int, int>> col_of_var_;
  std::vector<std::pair<int, Rational>> upper_rows_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<LpProblem::Rel> rels_;
  std::vector<Rational> rhs_;
  std::vector<int> basis_;
  std::vector<Rational> obj_;
  Rational obj_val_;
  int first_artificial_ = 0;
};

} // namespace

std::optional<std::vector<Rational>> lp_feasible(const LpProblem& lp, LpStats* stats) {
  return Phase1(lp, stats).run();
}

} // namespace simrel
