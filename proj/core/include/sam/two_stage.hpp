#ifndef SAM_TWO_STAGE_HPP
#define SAM_TWO_STAGE_HPP

#include <optional>
#include <vector>

#include "sam/clock.hpp"
#include "sam/model.hpp"

namespace sam {

/// Master model for a scenario subset D, with the extraction maps the
/// engine needs: where the first-stage variables and the epigraph variable
/// z live, and the first-stage cost as an expression over master var ids.
struct MasterBuild {
  Model model;
  std::vector<int> x_var_ids;  // first-stage vars in the problem's canonical order
  int z_var_id = -1;
  LinearExpr first_stage_cost;
};

struct HeuristicResult {
  double ub = kInf;  // objective of a feasible second-stage solution, +inf if none
  double lb = 0.0;   // dual bound when available (0 otherwise)
  std::optional<Assignment> incumbent;
};

/// The abstraction a scenario addition method drives: a finite scenario set,
/// a master builder for any subset D, a second-stage builder whose optimum
/// is Q(x, s), the first-stage cost f(x), and a primal heuristic.
///
/// Contracts: build_master over the full scenario set is the monolithic
/// problem; z is bounded below by 0; second-stage optima are non-negative;
/// the heuristic's ub is the cost of a feasible second-stage solution when
/// finite and lb <= Q(x, s) always. Builders must be deterministic (two
/// builds of the same model produce identical var ids).
class TwoStageProblem {
 public:
  virtual ~TwoStageProblem() = default;

  virtual std::vector<int> scenarios() const = 0;
  virtual MasterBuild build_master(const std::vector<int>& d) const = 0;
  virtual Model build_second_stage(const Assignment& x, int scenario) const = 0;
  virtual double first_stage_cost(const Assignment& x) const = 0;

  /// Primal heuristic for Q(x, s) within the given budget (clock seconds).
  /// May stop early once its incumbent is <= cutoff. The default is a
  /// budgeted run of the embedded solver on build_second_stage; it never
  /// claims infeasibility (returns (+inf, 0) when nothing was found).
  virtual HeuristicResult heuristic(const Assignment& x, int scenario, double budget,
                                    const ClockPtr& clock, double cutoff = -kInf) const;

  /// Problem-specific warm-start scenarios, if any.
  virtual std::optional<std::vector<int>> init_hint() const { return std::nullopt; }
};

/// The default heuristic implementation: a budgeted embedded-solver run on
/// the given model, honoring an early-stop cutoff on the incumbent.
HeuristicResult budgeted_solver_heuristic(const Model& second_stage, double budget,
                                          const ClockPtr& clock, double cutoff = -kInf);

}  // namespace sam

#endif  // SAM_TWO_STAGE_HPP
