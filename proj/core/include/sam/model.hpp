#ifndef SAM_MODEL_HPP
#define SAM_MODEL_HPP

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sam {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarDomain { Continuous, Binary, Integer };
enum class Sense { LessEqual, Equal, GreaterEqual };

struct VarSpec {
  int id = -1;
  std::string name;
  VarDomain domain = VarDomain::Continuous;
  double lower = -kInf;
  double upper = kInf;

  bool is_integral() const { return domain != VarDomain::Continuous; }
};

/// Affine expression: sum of coeff * var + constant. Terms are kept in
/// ascending var-id order and zero coefficients are dropped, so evaluation
/// order is deterministic.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}

  static LinearExpr term(int var, double coeff) {
    LinearExpr e;
    e.add_term(var, coeff);
    return e;
  }

  void add_term(int var, double coeff);
  void add_constant(double c) { constant_ += c; }
  void clear() { terms_.clear(); constant_ = 0.0; }

  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }
  const std::map<int, double>& terms() const { return terms_; }
  double coeff(int var) const;
  bool empty() const { return terms_.empty(); }
  int max_var_id() const { return terms_.empty() ? -1 : terms_.rbegin()->first; }

  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator-=(const LinearExpr& other);
  LinearExpr& operator*=(double factor);
  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { a += b; return a; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { a -= b; return a; }
  friend LinearExpr operator*(LinearExpr a, double f) { a *= f; return a; }
  friend LinearExpr operator*(double f, LinearExpr a) { a *= f; return a; }

 private:
  std::map<int, double> terms_;
  double constant_ = 0.0;
};

/// Linear constraint expr (sense) rhs. Any constant in expr is folded into
/// the right-hand side at construction.
struct Constraint {
  Constraint(LinearExpr e, Sense s, double rhs_value, std::string n = "");

  LinearExpr expr;  // constant() == 0 after construction
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string name;
};

/// Solution values indexed by var id.
struct Assignment {
  std::vector<double> values;

  Assignment() = default;
  explicit Assignment(std::vector<double> v) : values(std::move(v)) {}
  Assignment(std::initializer_list<double> v) : values(v) {}
  explicit Assignment(std::size_t n, double fill = 0.0) : values(n, fill) {}

  double operator[](int id) const { return values[static_cast<std::size_t>(id)]; }
  double& operator[](int id) { return values[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return values.size(); }
};

/// A mixed-integer program in minimization form.
class Model {
 public:
  int add_var(std::string name, VarDomain domain, double lower, double upper);
  int add_continuous(std::string name, double lower, double upper) {
    return add_var(std::move(name), VarDomain::Continuous, lower, upper);
  }
  int add_binary(std::string name) { return add_var(std::move(name), VarDomain::Binary, 0.0, 1.0); }
  int add_integer(std::string name, double lower, double upper) {
    return add_var(std::move(name), VarDomain::Integer, lower, upper);
  }

  void add_constraint(LinearExpr expr, Sense sense, double rhs, std::string name = "");
  void set_objective(LinearExpr obj);

  /// Tightens the bounds of an existing variable (used e.g. to pin a
  /// variable to a constant value). Binary variables stay within [0, 1].
  void set_bounds(int var, double lower, double upper);


  int num_vars() const { return static_cast<int>(vars_.size()); }
  const std::vector<VarSpec>& vars() const { return vars_; }
  const VarSpec& var(int id) const { return vars_.at(static_cast<std::size_t>(id)); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinearExpr& objective() const { return objective_; }

  /// Throws std::invalid_argument if the model violates a structural
  /// invariant (no variables, dangling var ids, inverted bounds, ...).
  void validate() const;

 private:
  void check_expr_ids(const LinearExpr& e) const;

  std::vector<VarSpec> vars_;
  std::vector<Constraint> constraints_;
  LinearExpr objective_;
};

struct Tolerances {
  double feasibility = 1e-6;
  double integrality = 1e-6;
};

enum class ViolationKind { Bound, Integrality, Constraint };

struct Violation {
  ViolationKind kind;
  int index;      // var id or constraint index
  double amount;  // magnitude of the violation
  std::string describe(const Model& m) const;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

/// Exact evaluation in ascending var-id order.
double evaluate(const LinearExpr& expr, const Assignment& a);

FeasibilityReport check_feasible(const Model& m, const Assignment& a, const Tolerances& tol);
FeasibilityReport check_feasible(const Model& m, const Assignment& a, double tol = 1e-6);

/// Relative optimality gap (ub - lb) / ub for 0 <= lb <= ub.
/// Degenerate rules: ub == 0 gives 0, ub == +inf gives 1. A lower bound
/// exceeding ub by more than a small tolerance is an inconsistency error.
double relative_gap(double ub, double lb);

/// Adds the constraint unless the variable bounds alone already guarantee
/// it (model builders use this to drop vacuous big-M rows once first-stage
/// values are fixed). Returns true when the row was added.
bool add_constraint_pruned(Model& m, LinearExpr expr, Sense sense, double rhs,
                           std::string name = "");

}  // namespace sam

#endif  // SAM_MODEL_HPP
