#include "sam/two_stage.hpp"

#include <algorithm>

#include "sam/solver.hpp"

namespace sam {

HeuristicResult budgeted_solver_heuristic(const Model& second_stage, double budget,
                                          const ClockPtr& clock, double cutoff) {
  HeuristicResult out;
  if (budget <= 0.0) return out;
  SolveParams params;
  params.time_limit = budget;
  params.clock = clock;
  SolveSession session(second_stage, params);
  for (;;) {
    double remaining = budget - session.elapsed();
    if (remaining <= 0.0) break;
    SolveEvent ev = session.step(remaining);
    if (ev.kind == SolveEventKind::Infeasible) {
      // primal-only contract: infeasibility claims are left to exact solves
      return HeuristicResult{};
    }
    if (session.state() == SessionState::Finished) break;
    if (session.upper_bound() <= cutoff) break;
  }
  out.ub = session.upper_bound();
  out.lb = std::max(0.0, session.lower_bound());
  if (session.incumbent()) out.incumbent = session.incumbent();
  return out;
}

HeuristicResult TwoStageProblem::heuristic(const Assignment& x, int scenario, double budget,
                                           const ClockPtr& clock, double cutoff) const {
  Model q = build_second_stage(x, scenario);
  return budgeted_solver_heuristic(q, budget, clock, cutoff);
}

}  // namespace sam
