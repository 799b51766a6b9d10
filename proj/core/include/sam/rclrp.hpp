#ifndef SAM_RCLRP_HPP
#define SAM_RCLRP_HPP

#include <string>
#include <vector>

#include "sam/two_stage.hpp"

namespace sam::rclrp {

/// Robust capacitated location routing: first-stage warehouse opening and
/// sizing, second-stage recovery (reopening/resizing at a premium) plus
/// capacitated vehicle routing under per-scenario customer demands.
///
/// Nodes are indexed warehouses first (0..I-1), then customers
/// (I..I+J-1). Arc matrices are (I+J)^2 row-major.
struct Instance {
  int num_warehouses = 0;
  int num_customers = 0;
  std::vector<double> c;      // traversal cost
  std::vector<double> alpha;  // empty-vehicle emission cost
  std::vector<double> gamma;  // per-ton emission cost
  std::vector<double> e, d;            // first-stage fixed / per-unit-size cost
  std::vector<double> e_prime, d_prime;  // second-stage (recovery) costs, > e / > d
  std::vector<double> a_max;           // max warehouse capacity A_i
  double vehicle_capacity = 0.0;       // L
  double tour_fixed_cost = 0.0;        // F
  std::vector<std::vector<double>> demands;  // demands[s][j], 0 <= beta <= L
  std::vector<double> wh_x, wh_y, cust_x, cust_y;  // optional coordinates

  int num_nodes() const { return num_warehouses + num_customers; }
  int node_of_customer(int j) const { return num_warehouses + j; }
  double at(const std::vector<double>& m, int v1, int v2) const {
    return m[static_cast<std::size_t>(v1) * num_nodes() + v2];
  }
  void validate() const;
};

struct GenParams {
  int num_warehouses = 2;
  int num_customers = 3;
  int num_scenarios = 3;
  int instance_number = 1;  // seeds the generator
};

/// Synthetic instance generator: coordinates uniform on a 100x100 square,
/// c = Euclidean distance rounded to 0.01, alpha = 0.1 c, gamma = 0.05 c,
/// nominal demands uniform in [5,25], L = twice the max nominal demand,
/// warehouse capacities sized to cover any scenario's total demand,
/// first-stage costs drawn and scaled by 1/40, recovery costs 50% higher,
/// F = 50. Scenario demands: 3% chance 0, else 50% chance 1.2x nominal,
/// else nominal. Fully determined by the parameters.
Instance generate(const GenParams& p);

/// First-stage canonical order: w0_0..w0_{I-1}, a0_0..a0_{I-1}.
MasterBuild build_master(const Instance& inst, const std::vector<int>& scenario_subset);
Model build_second_stage(const Instance& inst, const Assignment& x, int scenario);
double first_stage_cost(const Instance& inst, const Assignment& x);

/// JSON instance format with top-level keys
/// {warehouses, customers, arcs, costs, capacities, scenarios};
/// save(load(save(x))) is byte-identical to save(x).
std::string to_json_string(const Instance& inst);
Instance from_json_string(const std::string& text);
void save_json(const Instance& inst, const std::string& path);
Instance load_json(const std::string& path);

class Problem : public TwoStageProblem {
 public:
  explicit Problem(Instance inst, double default_heuristic_budget = 0.1)
      : inst_(std::move(inst)), default_budget_(default_heuristic_budget) {
    inst_.validate();
  }

  std::vector<int> scenarios() const override;
  MasterBuild build_master(const std::vector<int>& d) const override {
    return rclrp::build_master(inst_, d);
  }
  Model build_second_stage(const Assignment& x, int s) const override {
    return rclrp::build_second_stage(inst_, x, s);
  }
  double first_stage_cost(const Assignment& x) const override {
    return rclrp::first_stage_cost(inst_, x);
  }
  HeuristicResult heuristic(const Assignment& x, int s, double budget, const ClockPtr& clock,
                            double cutoff = -kInf) const override {
    Model q = rclrp::build_second_stage(inst_, x, s);
    return budgeted_solver_heuristic(q, budget > 0 ? budget : default_budget_, clock, cutoff);
  }

  const Instance& instance() const { return inst_; }

 private:
  Instance inst_;
  double default_budget_;
};

}  // namespace sam::rclrp

#endif  // SAM_RCLRP_HPP
