#include "sam/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sam {

void LinearExpr::add_term(int var, double coeff) {
  if (var < 0) throw std::invalid_argument("LinearExpr: negative var id");
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.emplace(var, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double LinearExpr::coeff(int var) const {
  auto it = terms_.find(var);
  return it == terms_.end() ? 0.0 : it->second;
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  for (const auto& [v, c] : other.terms_) add_term(v, c);
  constant_ += other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other) {
  for (const auto& [v, c] : other.terms_) add_term(v, -c);
  constant_ -= other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double factor) {
  if (factor == 0.0) {
    terms_.clear();
    constant_ = 0.0;
    return *this;
  }
  for (auto& [v, c] : terms_) c *= factor;
  constant_ *= factor;
  return *this;
}

Constraint::Constraint(LinearExpr e, Sense s, double rhs_value, std::string n)
    : expr(std::move(e)), sense(s), rhs(rhs_value), name(std::move(n)) {
  rhs -= expr.constant();
  expr.set_constant(0.0);
}

int Model::add_var(std::string name, VarDomain domain, double lower, double upper) {
  if (domain == VarDomain::Binary) {
    if (lower < 0.0 || upper > 1.0)
      throw std::invalid_argument("binary variable bounds must lie in [0,1]: " + name);
  }
  if (!(lower <= upper))
    throw std::invalid_argument("variable bounds inverted: " + name);
  VarSpec v;
  v.id = static_cast<int>(vars_.size());
  v.name = std::move(name);
  v.domain = domain;
  v.lower = lower;
  v.upper = upper;
  vars_.push_back(std::move(v));
  return vars_.back().id;
}

void Model::add_constraint(LinearExpr expr, Sense sense, double rhs, std::string name) {
  Constraint c(std::move(expr), sense, rhs, std::move(name));
  check_expr_ids(c.expr);
  constraints_.push_back(std::move(c));
}

void Model::set_objective(LinearExpr obj) {
  check_expr_ids(obj);
  objective_ = std::move(obj);
}

void Model::set_bounds(int var, double lower, double upper) {
  VarSpec& v = vars_.at(static_cast<std::size_t>(var));
  if (!(lower <= upper))
    throw std::invalid_argument("variable bounds inverted: " + v.name);
  if (v.domain == VarDomain::Binary && (lower < 0.0 || upper > 1.0))
    throw std::invalid_argument("binary variable bounds must lie in [0,1]: " + v.name);
  v.lower = lower;
  v.upper = upper;
}

void Model::check_expr_ids(const LinearExpr& e) const {
  if (e.max_var_id() >= num_vars())
    throw std::invalid_argument("expression references unknown var id " +
                                std::to_string(e.max_var_id()));
}

void Model::validate() const {
  if (vars_.empty()) throw std::invalid_argument("model has no variables");
  for (const auto& v : vars_) {
    if (!(v.lower <= v.upper))
      throw std::invalid_argument("variable bounds inverted: " + v.name);
    if (v.domain == VarDomain::Binary && (v.lower < 0.0 || v.upper > 1.0))
      throw std::invalid_argument("binary variable bounds outside [0,1]: " + v.name);
  }
  check_expr_ids(objective_);
  for (const auto& c : constraints_) check_expr_ids(c.expr);
}

double evaluate(const LinearExpr& expr, const Assignment& a) {
  if (expr.max_var_id() >= static_cast<int>(a.size()))
    throw std::out_of_range("evaluate: assignment does not cover var id " +
                            std::to_string(expr.max_var_id()));
  double sum = 0.0;
  for (const auto& [v, c] : expr.terms()) sum += c * a[v];
  return sum + expr.constant();
}

std::string Violation::describe(const Model& m) const {
  std::ostringstream os;
  switch (kind) {
    case ViolationKind::Bound:
      os << "bound violation on " << m.var(index).name << " by " << amount;
      break;
    case ViolationKind::Integrality:
      os << "integrality violation on " << m.var(index).name << " by " << amount;
      break;
    case ViolationKind::Constraint: {
      const auto& c = m.constraints()[static_cast<std::size_t>(index)];
      os << "constraint " << (c.name.empty() ? std::to_string(index) : c.name)
         << " violated by " << amount;
      break;
    }
  }
  return os.str();
}

FeasibilityReport check_feasible(const Model& m, const Assignment& a, const Tolerances& tol) {
  FeasibilityReport report;
  if (a.size() != static_cast<std::size_t>(m.num_vars()))
    throw std::invalid_argument("assignment length does not match model var count");

  for (const auto& v : m.vars()) {
    double x = a[v.id];
    double excess = std::max(v.lower - x, x - v.upper);
    if (excess > tol.feasibility)
      report.violations.push_back({ViolationKind::Bound, v.id, excess});
    if (v.is_integral()) {
      double frac = std::abs(x - std::round(x));
      if (frac > tol.integrality)
        report.violations.push_back({ViolationKind::Integrality, v.id, frac});
    }
  }
  for (std::size_t i = 0; i < m.constraints().size(); ++i) {
    const Constraint& c = m.constraints()[i];
    double lhs = evaluate(c.expr, a);
    double excess = 0.0;
    switch (c.sense) {
      case Sense::LessEqual: excess = lhs - c.rhs; break;
      case Sense::GreaterEqual: excess = c.rhs - lhs; break;
      case Sense::Equal: excess = std::abs(lhs - c.rhs); break;
    }
    if (excess > tol.feasibility)
      report.violations.push_back({ViolationKind::Constraint, static_cast<int>(i), excess});
  }
  report.feasible = report.violations.empty();
  return report;
}

FeasibilityReport check_feasible(const Model& m, const Assignment& a, double tol) {
  return check_feasible(m, a, Tolerances{tol, tol});
}

bool add_constraint_pruned(Model& m, LinearExpr expr, Sense sense, double rhs,
                           std::string name) {
  double lo = expr.constant(), hi = expr.constant();
  for (const auto& [j, coeff] : expr.terms()) {
    const VarSpec& v = m.var(j);
    lo += std::min(coeff * v.lower, coeff * v.upper);
    hi += std::max(coeff * v.lower, coeff * v.upper);
  }
  bool holds = false;
  switch (sense) {
    case Sense::LessEqual: holds = hi <= rhs; break;
    case Sense::GreaterEqual: holds = lo >= rhs; break;
    case Sense::Equal: holds = lo == rhs && hi == rhs; break;
  }
  if (holds) return false;
  m.add_constraint(std::move(expr), sense, rhs, std::move(name));
  return true;
}

double relative_gap(double ub, double lb) {
  if (std::isinf(ub)) return 1.0;
  if (lb < 0.0) throw std::invalid_argument("relative_gap: lb must be >= 0");
  if (lb > ub) {
    double slack = 1e-9 * std::max(1.0, std::abs(ub));
    if (lb - ub > slack)
      throw std::invalid_argument("relative_gap: lb exceeds ub beyond tolerance");
    lb = ub;
  }
  if (ub == 0.0) return 0.0;
  return (ub - lb) / ub;
}

}  // namespace sam
