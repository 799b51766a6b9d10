#ifndef SAM_EXTERNAL_SOLVER_HPP
#define SAM_EXTERNAL_SOLVER_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "sam/solver.hpp"

namespace sam {

/// Environment variable naming the external MIP solver command. The command
/// is invoked as
///   <command> <model.lp> <out.sol> <time_limit_seconds> <target_gap> [<warm.mst>]
/// and must write a solution file (see parse_simple_sol for the format).
inline constexpr const char* kExternalSolverEnv = "SAM_EXTERNAL_SOLVER_CMD";

struct ExternalSolution {
  enum class Status { Optimal, Feasible, Infeasible, TimeLimit, Error };
  Status status = Status::Error;
  std::optional<double> bound;  // dual bound when reported
  std::map<std::string, double> values;
};

/// Default solution-file parser. Format, one entry per line:
///   # status optimal|feasible|infeasible|timelimit
///   # bound <dual bound>
///   <sanitized var name> <value>
/// Unknown '#' lines are ignored; status defaults to feasible when values
/// are present.
ExternalSolution parse_simple_sol(const std::string& path);

using SolutionParser = std::function<ExternalSolution(const std::string&)>;

struct ExternalSolverOptions {
  std::string command;   // empty: read from SAM_EXTERNAL_SOLVER_CMD
  std::string work_dir;  // empty: unique directory under the system temp dir
  SolutionParser parser = parse_simple_sol;
  bool keep_files = false;
};

/// Session-contract adapter around an external solver executable. Pause and
/// resume are emulated by re-invoking the command with the remaining budget
/// and a warm-start file holding the best incumbent found so far.
class ExternalSession {
 public:
  ExternalSession(const Model& m, SolveParams params, ExternalSolverOptions opts = {});
  ~ExternalSession();
  ExternalSession(const ExternalSession&) = delete;
  ExternalSession& operator=(const ExternalSession&) = delete;

  SolveEvent step(double budget);

  double upper_bound() const { return ub_; }
  double lower_bound() const { return lb_; }
  const std::optional<Assignment>& incumbent() const { return incumbent_; }
  SessionState state() const { return state_; }
  double elapsed() const { return elapsed_; }

 private:
  const Model* model_;
  SolveParams params_;
  ExternalSolverOptions opts_;
  std::string dir_, lp_path_, sol_path_, mst_path_;
  double ub_ = kInf;
  double lb_ = -kInf;
  std::optional<Assignment> incumbent_;
  SessionState state_ = SessionState::Fresh;
  double elapsed_ = 0.0;
  int invocations_ = 0;
};

/// Convenience loop mirroring solve() over the external adapter.
SolveResult solve_with_external(const Model& m, SolveParams params,
                                ExternalSolverOptions opts = {});

}  // namespace sam

#endif  // SAM_EXTERNAL_SOLVER_HPP
