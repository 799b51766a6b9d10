#ifndef SAM_ENGINE_HPP
#define SAM_ENGINE_HPP

#include <string>
#include <vector>

#include "sam/clock.hpp"
#include "sam/two_stage.hpp"

namespace sam {

enum class Strategy { ISAM, SRP, ASBP };

const char* to_string(Strategy s);

/// How the initial scenario subset D is chosen.
struct InitSubset {
  enum class Kind { Empty, Random, Hint };
  Kind kind = Kind::Empty;
  int seed = 0;

  static InitSubset empty() { return {Kind::Empty, 0}; }
  static InitSubset random(int seed) { return {Kind::Random, seed}; }
  static InitSubset hint() { return {Kind::Hint, 0}; }
};

struct SamConfig {
  double target_gap = 0.0;  // P
  Strategy strategy = Strategy::ASBP;
  InitSubset init;
  double tl_linear = 1.0;  // per-scenario budget rho = max(tl_linear * MT, tl_min)
  double tl_min = 0.1;
  double heuristic_budget = 0.1;
  double master_time_limit = kInf;
  double global_time_limit = kInf;
  double epsilon = 1e-9;  // strict-comparison epsilon
  bool use_lb = true;     // second-stage lower bounds (ASBP)
  bool use_zb = true;     // comparisons against the adjusted bound z' (ASBP)
  bool use_tl = true;     // per-scenario time limits (ASBP)
  int seed = 0;
  ClockPtr clock = wall_clock();
  std::string log_path;  // when set, one JSON record per iteration is appended
};

/// Master solution handed to the FindBadScenario strategies.
struct MasterSolution {
  Assignment x;      // first-stage values in canonical order
  double z = 0.0;    // epigraph value
  double f_x = 0.0;  // first-stage cost f(x)
  double gap_p = 0.0;
};

struct ScenarioBoundsSnapshot {
  int scenario;
  double ub, lb, rho;
  bool heuristic_done;
  bool exact;
};

struct IterationLog {
  int iter = 0;
  std::vector<int> d_snapshot;
  double master_time = 0.0;  // MT
  double master_gap = 0.0;   // p
  double master_ub = 0.0, master_lb = 0.0;
  double z_tilde = 0.0, f_x = 0.0;
  int chosen_scenario = -1;  // -1: certificate without a concrete scenario
  bool certified = false;
  double heuristic_time = 0.0, subproblem_time = 0.0;
  std::vector<ScenarioBoundsSnapshot> bounds;
};

enum class SamStatus { GapCertified, GlobalTimeLimit };

struct SamResult {
  SamStatus status = SamStatus::GlobalTimeLimit;
  Assignment x;  // first-stage solution in canonical order
  double objective_ub = kInf;  // certified when status == GapCertified
  double certified_gap = 1.0;  // <= target gap when certified, 1 otherwise
  int iterations = 0;          // FindBadScenario calls (master solves)
  int additions = 0;           // scenarios added to D
  std::vector<int> final_d;
  std::vector<IterationLog> logs;
  double wall_time = 0.0;   // real seconds
  double clock_time = 0.0;  // budget-clock seconds (equals wall time for WallClock)
  double master_time_total = 0.0;
  double heuristic_time_total = 0.0;
  double subproblem_time_total = 0.0;
};

/// InitSubset options: Empty, one seeded-uniform random scenario, or the
/// problem's hint (error when the problem provides none).
std::vector<int> init_subset(const TwoStageProblem& problem, const InitSubset& init);

/// The adjusted epigraph bound z' = (1-p)/(1-P) z + (P-p)/(1-P) f_x used to
/// transfer a master gap p <= P to the target gap P. Requires
/// 0 <= p <= P < 1 and z, f_x >= 0; the result is always >= z.
double adjusted_bound(double z, double f_x, double p, double P);

/// The scenario addition loop: solve the master over D to gap <= P, ask the
/// configured strategy for a bad scenario, stop when the strategy certifies
/// (returns a scenario already in D), otherwise grow D and repeat. Returns a
/// first-stage solution with certified gap <= P, or the best-effort solution
/// when the global time limit strikes first.
SamResult run_sam(const TwoStageProblem& problem, const SamConfig& config);

}  // namespace sam

#endif  // SAM_ENGINE_HPP
