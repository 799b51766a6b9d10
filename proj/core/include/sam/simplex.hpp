#ifndef SAM_SIMPLEX_HPP
#define SAM_SIMPLEX_HPP

#include <vector>

#include "sam/model.hpp"

namespace sam {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpResult {
  LpStatus status = LpStatus::IterLimit;
  double objective = 0.0;
  std::vector<double> x;  // structural solution, indexed by var id
  int iterations = 0;
};

struct LpOptions {
  double tol = 1e-9;
  int max_iterations = 1000000;
};

/// Reusable buffers so branch-and-bound nodes do not reallocate.
struct LpWorkspace {
  std::vector<double> tab, d1, d2, xb, xn, lo, up, sol;
  std::vector<int> basis, col_var, var_col;
  std::vector<unsigned char> stat;
};

/// Solves the LP relaxation of m (integrality dropped) with the variable
/// bounds given in lower/upper, which must cover all var ids. Dense
/// bounded-variable two-phase simplex; Dantzig pricing with a switch to
/// Bland's rule after a run of degenerate pivots, so it cannot cycle.
/// Deterministic for identical inputs.
LpResult solve_lp(const Model& m, const std::vector<double>& lower,
                  const std::vector<double>& upper, LpWorkspace* ws = nullptr,
                  const LpOptions& opts = {});

/// Convenience overload using the model's own bounds.
LpResult solve_lp(const Model& m, LpWorkspace* ws = nullptr, const LpOptions& opts = {});

}  // namespace sam

#endif  // SAM_SIMPLEX_HPP
