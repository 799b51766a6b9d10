#ifndef SAM_STRATEGIES_HPP
#define SAM_STRATEGIES_HPP

#include <optional>
#include <vector>

#include "sam/engine.hpp"

namespace sam {

/// Outcome of one FindBadScenario call.
///
/// scenario == nullopt means the strategy certified the current master
/// solution but D is empty, so there is no scenario to echo back; the
/// engine treats it exactly like a returned scenario in D. On any
/// certifying return, certificate bounds max over all scenarios of
/// Q(x, s); it is meaningless otherwise.
struct FindOutcome {
  std::optional<int> scenario;
  double certificate = kInf;
  std::vector<ScenarioBoundsSnapshot> bounds;
  double heuristic_time = 0.0;
  double solve_time = 0.0;
};

/// Raised inside a strategy when the engine's global deadline expires
/// mid-phase; run_sam converts it into a GlobalTimeLimit result.
class GlobalTimeout : public std::exception {
 public:
  const char* what() const noexcept override { return "global time limit reached"; }
};

/// Worst-scenario search: heuristic upper bounds for every scenario, then
/// exact solves in non-increasing UB order until the last solved scenario
/// still attains the maximum. The returned scenario is a worst scenario for
/// ms.x over the full scenario set.
FindOutcome isam_find(const TwoStageProblem& problem, const std::vector<int>& d,
                      const MasterSolution& ms, const SamConfig& cfg, double deadline = kInf);

/// First-exceeding scan: walks scenarios outside D in id order, heuristic
/// with early stop at z, exact solve only when the heuristic exceeds z, and
/// returns the first scenario whose exact cost exceeds z. Falls back to
/// min(D) (certifying) when no scenario exceeds z.
FindOutcome srp_find(const TwoStageProblem& problem, const std::vector<int>& d,
                     const MasterSolution& ms, const SamConfig& cfg, double deadline = kInf);

/// Bracketed search with adaptive per-scenario time limits and gap-adjusted
/// pruning. Maintains per-scenario brackets [LB, UB] and budgets rho,
/// repeatedly advances the scenario with the worst UB, prunes scenarios
/// whose UB falls below the adjusted bound z' or below another scenario's
/// LB, and stops early on time-limit or proof. The cfg toggles use_lb,
/// use_zb and use_tl disable the corresponding ingredient.
FindOutcome asbp_find(const TwoStageProblem& problem, const std::vector<int>& d,
                      const MasterSolution& ms, double master_time, const SamConfig& cfg,
                      double deadline = kInf);

}  // namespace sam

#endif  // SAM_STRATEGIES_HPP
