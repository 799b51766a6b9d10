#ifndef SAM_SOLVER_HPP
#define SAM_SOLVER_HPP

#include <memory>
#include <optional>
#include <queue>
#include <vector>

#include "sam/clock.hpp"
#include "sam/model.hpp"
#include "sam/simplex.hpp"

namespace sam {

struct SolveParams {
  double target_gap = 0.0;  // stop once relative gap <= target (if > 0)
  double time_limit = kInf; // total budget for the session, in clock seconds
  long node_limit = -1;     // < 0: unlimited
  int seed = 0;
  Tolerances tol;
  ClockPtr clock = wall_clock();
  std::optional<Assignment> warm_start;  // ignored when infeasible
};

enum class SolveEventKind {
  IncumbentImproved,
  BoundImproved,
  Optimal,
  Infeasible,
  TimeLimitReached,
  GapReached,
};

const char* to_string(SolveEventKind k);

struct SolveEvent {
  SolveEventKind kind;
  double ub;
  double lb;
};

enum class SessionState { Fresh, Paused, Finished };

/// Incremental branch-and-bound solve of one model. The search tree is kept
/// between step() calls, so a paused session resumes exactly where it
/// stopped. Best-bound node selection, most-fractional branching; node LPs
/// are solved by the dense bounded simplex. Deterministic for identical
/// (model, params, budget sequence) when driven by a virtual clock.
///
/// The model must outlive the session. A session is single-threaded;
/// distinct sessions are independent, even on the same model.
class SolveSession {
 public:
  SolveSession(const Model& m, SolveParams params);

  /// Runs until the incumbent strictly improves, the global lower bound
  /// strictly increases, the target gap is met, optimality/infeasibility is
  /// proven, or the budget (seconds) is exhausted. Terminal events repeat
  /// idempotently once the session is finished.
  SolveEvent step(double budget);

  double upper_bound() const { return ub_; }
  double lower_bound() const { return lb_; }
  const std::optional<Assignment>& incumbent() const { return incumbent_; }
  double elapsed() const { return elapsed_; }
  SessionState state() const { return state_; }
  long nodes() const { return nodes_; }
  /// Gap of the current bounds (1 while no incumbent exists).
  double gap() const;

 private:
  struct Node {
    long id;
    int parent;  // index into pool_, -1 for root
    int var;     // branching var (<0 for root)
    double lo, hi;
    double bound;
  };
  struct FrontierOrder {
    const std::vector<Node>* pool;
    bool operator()(int a, int b) const;
  };

  void build_bounds(int node_idx);
  bool try_incumbent(const std::vector<double>& x);
  SolveEvent finish(SolveEventKind kind);
  SolveEvent pause(SolveEventKind kind);

  const Model* model_;
  SolveParams params_;
  double ub_ = kInf;
  double lb_ = -kInf;
  double trivial_lb_ = -kInf;
  std::optional<Assignment> incumbent_;
  double elapsed_ = 0.0;
  SessionState state_ = SessionState::Fresh;
  long nodes_ = 0;
  long next_id_ = 0;

  std::vector<Node> pool_;
  std::priority_queue<int, std::vector<int>, FrontierOrder> frontier_;
  std::vector<double> cur_lo_, cur_hi_;
  std::vector<int> int_vars_;
  LpWorkspace ws_;
  std::optional<SolveEvent> terminal_;
};

/// Factory mirroring the session contract; throws on malformed models.
SolveSession open_session(const Model& m, SolveParams params = {});

struct SolveResult {
  SolveEventKind status;  // Optimal | Infeasible | GapReached | TimeLimitReached
  double ub;
  double lb;
  double gap;
  std::optional<Assignment> incumbent;
  double solve_time;
  long nodes;
};

/// Convenience loop over open_session/step until a stopping event.
SolveResult solve(const Model& m, SolveParams params = {});

enum class BruteStatus { Optimal, Infeasible, Unbounded };

struct BruteResult {
  BruteStatus status;
  double objective = kInf;
  std::optional<Assignment> argmin;
  long nodes_visited = 0;
};

/// Independent oracle: depth-first enumeration of the integer lattice with
/// interval-based feasibility pruning (no bounding by objective), solving the
/// continuous remainder of each leaf with the simplex. Ties are broken by the
/// lexicographically smallest integer assignment. Every integer variable must
/// be finitely bounded. Throws when more than max_points lattice nodes would
/// have to be visited.
BruteResult brute_force_solve(const Model& m, long max_points = 5000000);

}  // namespace sam

#endif  // SAM_SOLVER_HPP
