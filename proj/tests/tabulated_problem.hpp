#ifndef SAM_TESTS_TABULATED_PROBLEM_HPP
#define SAM_TESTS_TABULATED_PROBLEM_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sam/two_stage.hpp"

namespace sam::testutil {

/// Two-stage problem with table-driven second-stage costs: Q(x, s) = q[s]
/// for every x, f(x) = f_const. The master is min f_const + z subject to
/// z >= q_s for s in D. The heuristic reports q[s] * ub_factor[s] as upper
/// and q[s] * lb_factor[s] as lower bound (exact when factors are 1/1).
/// Exact solves still run through the real embedded solver: the second
/// stage is a one-variable model whose optimum is q[s]. When hard_second_stage
/// is set, the second-stage model needs a few branch-and-bound nodes, which
/// lets tests exercise per-scenario time limits with a virtual clock.
class TabulatedProblem : public TwoStageProblem {
 public:
  TabulatedProblem(std::vector<double> q, double f_const = 0.0)
      : q_(std::move(q)), f_(f_const) {
    ub_factor_.assign(q_.size(), 1.0);
    lb_factor_.assign(q_.size(), 1.0);
  }

  void set_heuristic_factors(std::vector<double> ub_factor, std::vector<double> lb_factor) {
    if (ub_factor.size() != q_.size() || lb_factor.size() != q_.size())
      throw std::invalid_argument("factor size mismatch");
    for (std::size_t s = 0; s < q_.size(); ++s) {
      if (ub_factor[s] < 1.0 || lb_factor[s] < 0.0 || lb_factor[s] > 1.0)
        throw std::invalid_argument("heuristic factors must satisfy ubf >= 1, lbf in [0,1]");
    }
    ub_factor_ = std::move(ub_factor);
    lb_factor_ = std::move(lb_factor);
  }
  void set_hard_second_stage(bool hard) { hard_ = hard; }
  void set_heuristic_blind(bool blind) { blind_ = blind; }  // heuristic finds nothing

  std::vector<int> scenarios() const override {
    std::vector<int> s(q_.size());
    for (std::size_t i = 0; i < q_.size(); ++i) s[i] = static_cast<int>(i);
    return s;
  }

  MasterBuild build_master(const std::vector<int>& d) const override {
    MasterBuild mb;
    int x0 = mb.model.add_continuous("x0", 0.0, 0.0);  // placeholder first stage
    int z = mb.model.add_continuous("z", 0.0, kInf);
    for (int s : d)
      mb.model.add_constraint(LinearExpr::term(z, 1.0), Sense::GreaterEqual, q_.at(s),
                              "epi_" + std::to_string(s));
    LinearExpr obj = LinearExpr::term(z, 1.0);
    obj.add_constant(f_);
    mb.model.set_objective(obj);
    mb.x_var_ids = {x0};
    mb.z_var_id = z;
    mb.first_stage_cost = LinearExpr(f_);
    return mb;
  }

  Model build_second_stage(const Assignment&, int scenario) const override {
    Model q;
    double v = q_.at(scenario);
    if (hard_) {
      // integral var with a fractional floor: the LP relaxation is
      // fractional, so the solve needs a couple of nodes
      int y = q.add_integer("y", 0.0, std::ceil(v) + 2.0);
      q.add_constraint(LinearExpr::term(y, 1.0), Sense::GreaterEqual, v - 0.25);
      int y2 = q.add_binary("y2");
      q.add_constraint(LinearExpr::term(y2, 1.0) + LinearExpr::term(y, 1.0),
                       Sense::GreaterEqual, v + 0.5);
      q.set_objective(LinearExpr::term(y, 1.0));  // optimum is v for integral v
      return q;
    }
    int y = q.add_continuous("y", v, v);
    q.set_objective(LinearExpr::term(y, 1.0));
    return q;
  }

  double first_stage_cost(const Assignment&) const override { return f_; }

  HeuristicResult heuristic(const Assignment&, int scenario, double budget, const ClockPtr& clock,
                            double) const override {
    clock->charge(budget);  // pretend the budget was used
    HeuristicResult hr;
    if (blind_) return hr;
    double v = q_.at(scenario);
    hr.ub = v * ub_factor_[static_cast<std::size_t>(scenario)];
    hr.lb = v * lb_factor_[static_cast<std::size_t>(scenario)];
    return hr;
  }

  double q(int scenario) const { return q_.at(scenario); }

 private:
  std::vector<double> q_;
  double f_;
  std::vector<double> ub_factor_, lb_factor_;
  bool hard_ = false;
  bool blind_ = false;
};

}  // namespace sam::testutil

#endif
