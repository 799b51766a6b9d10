#include "sam/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace sam {

namespace {

constexpr double kImprove = 1e-9;        // strict-improvement epsilon
constexpr double kVirtualNodeCost = 1e-4; // virtual seconds charged per node
constexpr double kVirtualIterCost = 1e-5; // plus per simplex iteration

double objective_bound_from_vars(const Model& m) {
  double bound = m.objective().constant();
  for (const auto& [j, c] : m.objective().terms()) {
    const VarSpec& v = m.var(j);
    double lo = c >= 0 ? c * v.lower : c * v.upper;
    if (!std::isfinite(lo)) return -kInf;
    bound += lo;
  }
  return bound;
}

double session_gap(double ub, double lb) {
  if (std::isinf(ub)) return 1.0;
  if (ub == 0.0 && lb >= -kImprove) return 0.0;
  if (lb < 0.0 && ub > 0.0) return 1.0;
  double denom = std::abs(ub);
  if (denom < 1e-12) return 1.0;
  return std::max(0.0, (ub - lb) / denom);
}

}  // namespace

const char* to_string(SolveEventKind k) {
  switch (k) {
    case SolveEventKind::IncumbentImproved: return "IncumbentImproved";
    case SolveEventKind::BoundImproved: return "BoundImproved";
    case SolveEventKind::Optimal: return "Optimal";
    case SolveEventKind::Infeasible: return "Infeasible";
    case SolveEventKind::TimeLimitReached: return "TimeLimitReached";
    case SolveEventKind::GapReached: return "GapReached";
  }
  return "?";
}

bool SolveSession::FrontierOrder::operator()(int a, int b) const {
  const Node& na = (*pool)[static_cast<std::size_t>(a)];
  const Node& nb = (*pool)[static_cast<std::size_t>(b)];
  if (na.bound != nb.bound) return na.bound > nb.bound;  // min-heap on bound
  return na.id < nb.id;  // newest first: dives on equal bounds, deterministic
}

SolveSession::SolveSession(const Model& m, SolveParams params)
    : model_(&m), params_(std::move(params)), frontier_(FrontierOrder{&pool_}) {
  m.validate();
  if (params_.target_gap < 0.0 || params_.target_gap >= 1.0)
    throw std::invalid_argument("target_gap must be in [0,1)");
  if (!(params_.time_limit > 0.0))
    throw std::invalid_argument("time_limit must be positive");
  for (const auto& v : m.vars())
    if (v.is_integral()) int_vars_.push_back(v.id);

  trivial_lb_ = objective_bound_from_vars(m);
  lb_ = trivial_lb_;

  if (params_.warm_start) {
    const Assignment& w = *params_.warm_start;
    if (w.size() == static_cast<std::size_t>(m.num_vars())) {
      Assignment snapped = w;
      for (int j : int_vars_) snapped[j] = std::round(snapped[j]);
      if (check_feasible(m, snapped, params_.tol).feasible) {
        incumbent_ = snapped;
        ub_ = evaluate(m.objective(), snapped);
      }
    }
  }

  pool_.push_back(Node{next_id_++, -1, -1, 0.0, 0.0, lb_});
  frontier_.push(0);
}

SolveSession open_session(const Model& m, SolveParams params) {
  return SolveSession(m, std::move(params));
}

void SolveSession::build_bounds(int node_idx) {
  const int n = model_->num_vars();
  cur_lo_.resize(static_cast<std::size_t>(n));
  cur_hi_.resize(static_cast<std::size_t>(n));
  for (const auto& v : model_->vars()) {
    cur_lo_[v.id] = v.lower;
    cur_hi_[v.id] = v.upper;
  }
  for (int i = node_idx; i >= 0; i = pool_[static_cast<std::size_t>(i)].parent) {
    const Node& nd = pool_[static_cast<std::size_t>(i)];
    if (nd.var < 0) continue;
    cur_lo_[nd.var] = std::max(cur_lo_[nd.var], nd.lo);
    cur_hi_[nd.var] = std::min(cur_hi_[nd.var], nd.hi);
  }
}

bool SolveSession::try_incumbent(const std::vector<double>& x) {
  Assignment cand(x);
  for (int j : int_vars_) cand[j] = std::round(cand[j]);
  if (!check_feasible(*model_, cand, params_.tol).feasible) {
    // snap broke feasibility: re-optimize the continuous part with the
    // integers fixed
    std::vector<double> lo = cur_lo_, hi = cur_hi_;
    for (int j : int_vars_) lo[j] = hi[j] = cand[j];
    LpResult fixed = solve_lp(*model_, lo, hi, &ws_);
    if (fixed.status != LpStatus::Optimal) return false;
    cand = Assignment(fixed.x);
    for (int j : int_vars_) cand[j] = std::round(cand[j]);
    if (!check_feasible(*model_, cand, params_.tol).feasible) return false;
  }
  double obj = evaluate(model_->objective(), cand);
  if (obj < ub_ - kImprove) {
    ub_ = obj;
    incumbent_ = std::move(cand);
    return true;
  }
  return false;
}

SolveEvent SolveSession::finish(SolveEventKind kind) {
  if (kind == SolveEventKind::Optimal) lb_ = ub_;
  if (kind == SolveEventKind::Infeasible) { ub_ = kInf; lb_ = kInf; }
  state_ = SessionState::Finished;
  terminal_ = SolveEvent{kind, ub_, lb_};
  return *terminal_;
}

SolveEvent SolveSession::pause(SolveEventKind kind) {
  state_ = SessionState::Paused;
  return SolveEvent{kind, ub_, lb_};
}

double SolveSession::gap() const { return session_gap(ub_, lb_); }

SolveEvent SolveSession::step(double budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("step budget must be > 0");
  if (terminal_) return *terminal_;

  Clock& clock = *params_.clock;
  const double step_start = clock.now();
  auto spent_here = [&] { return clock.now() - step_start; };
  auto total_elapsed = [&] { return elapsed_ + spent_here(); };
  bool first_node = true;

  for (;;) {
    // budget checks; always process at least one node per call so arbitrary
    // small budgets still make progress
    if (!first_node) {
      if (spent_here() >= budget) {
        elapsed_ = total_elapsed();
        return pause(SolveEventKind::TimeLimitReached);
      }
    }
    if (total_elapsed() >= params_.time_limit) {
      elapsed_ = total_elapsed();
      return finish(SolveEventKind::TimeLimitReached);
    }
    if (params_.node_limit >= 0 && nodes_ >= params_.node_limit) {
      elapsed_ = total_elapsed();
      return pause(SolveEventKind::TimeLimitReached);
    }

    if (frontier_.empty()) {
      elapsed_ = total_elapsed();
      return incumbent_ ? finish(SolveEventKind::Optimal) : finish(SolveEventKind::Infeasible);
    }

    int idx = frontier_.top();
    frontier_.pop();
    const double node_bound = pool_[static_cast<std::size_t>(idx)].bound;
    if (node_bound >= ub_ - kImprove) continue;  // pruned by bound

    first_node = false;
    build_bounds(idx);
    LpResult lp = solve_lp(*model_, cur_lo_, cur_hi_, &ws_);
    ++nodes_;
    clock.charge(kVirtualNodeCost + kVirtualIterCost * lp.iterations);

    bool incumbent_improved = false;
    if (lp.status == LpStatus::IterLimit)
      throw std::runtime_error("simplex iteration limit reached");
    if (lp.status == LpStatus::Unbounded)
      throw std::runtime_error("LP relaxation is unbounded");
    if (lp.status == LpStatus::Optimal && lp.objective < ub_ - kImprove) {
      // find most fractional integer var
      int branch_var = -1;
      double best_score = params_.tol.integrality;
      for (int j : int_vars_) {
        double x = lp.x[static_cast<std::size_t>(j)];
        double frac = x - std::floor(x);
        double dist = std::min(frac, 1.0 - frac);
        if (dist > best_score + 1e-12) {
          best_score = dist;
          branch_var = j;
        }
      }
      if (branch_var < 0) {
        incumbent_improved = try_incumbent(lp.x);
      } else {
        double x = lp.x[static_cast<std::size_t>(branch_var)];
        double child_bound = std::max(lp.objective, node_bound);
        pool_.push_back(Node{next_id_++, idx, branch_var, cur_lo_[branch_var], std::floor(x),
                             child_bound});
        frontier_.push(static_cast<int>(pool_.size()) - 1);
        pool_.push_back(Node{next_id_++, idx, branch_var, std::ceil(x), cur_hi_[branch_var],
                             child_bound});
        frontier_.push(static_cast<int>(pool_.size()) - 1);
      }
    }

    // refresh global lower bound from the frontier
    double frontier_min = kInf;
    if (!frontier_.empty())
      frontier_min = pool_[static_cast<std::size_t>(frontier_.top())].bound;
    double new_lb = std::min(frontier_min, ub_);
    bool bound_improved = false;
    if (new_lb > lb_ + kImprove && std::isfinite(new_lb)) {
      lb_ = new_lb;
      bound_improved = true;
    }

    if (frontier_.empty()) {
      elapsed_ = total_elapsed();
      return incumbent_ ? finish(SolveEventKind::Optimal) : finish(SolveEventKind::Infeasible);
    }
    if (params_.target_gap > 0.0 && session_gap(ub_, lb_) <= params_.target_gap) {
      elapsed_ = total_elapsed();
      return finish(SolveEventKind::GapReached);
    }
    if (incumbent_improved) {
      elapsed_ = total_elapsed();
      return pause(SolveEventKind::IncumbentImproved);
    }
    if (bound_improved) {
      elapsed_ = total_elapsed();
      return pause(SolveEventKind::BoundImproved);
    }
  }
}

SolveResult solve(const Model& m, SolveParams params) {
  SolveSession session(m, params);
  SolveResult res;
  for (;;) {
    double remaining = params.time_limit - session.elapsed();
    if (remaining <= 0.0) remaining = 1e-9;
    SolveEvent ev = session.step(remaining);
    switch (ev.kind) {
      case SolveEventKind::Optimal:
      case SolveEventKind::Infeasible:
      case SolveEventKind::GapReached:
      case SolveEventKind::TimeLimitReached:
        res.status = ev.kind;
        res.ub = ev.ub;
        res.lb = ev.lb;
        res.gap = session.gap();
        res.incumbent = session.incumbent();
        res.solve_time = session.elapsed();
        res.nodes = session.nodes();
        return res;
      default:
        break;
    }
  }
}

namespace {

struct BruteState {
  const Model* m;
  long max_points;
  long visited = 0;
  std::vector<int> int_vars;
  std::vector<int> cont_vars;
  std::vector<double> fixed;             // current integer values
  std::vector<double> row_min, row_max;  // interval of each row's lhs
  // per (row) list of (position in int_vars, coeff) for incremental updates
  std::vector<std::vector<std::pair<int, double>>> row_int_terms;
  std::vector<std::vector<int>> rows_of_var;  // int var position -> row ids
  double best = kInf;
  bool found = false;
  bool unbounded = false;
  std::vector<double> best_x;
  LpWorkspace ws;
  std::vector<double> lo, hi;
  double tol = 1e-6 + 1e-9;
};

void brute_leaf(BruteState& st) {
  const Model& m = *st.m;
  if (st.cont_vars.empty()) {
    Assignment pt(static_cast<std::size_t>(m.num_vars()), 0.0);
    for (std::size_t k = 0; k < st.int_vars.size(); ++k)
      pt[st.int_vars[k]] = st.fixed[k];
    // rows are fully determined; interval pruning already enforced
    // feasibility, bounds hold by construction
    double obj = evaluate(m.objective(), pt);
    if (!st.found || obj < st.best - 1e-12) {
      st.found = true;
      st.best = obj;
      st.best_x = pt.values;
    }
    return;
  }
  for (int j = 0; j < m.num_vars(); ++j) {
    st.lo[j] = m.var(j).lower;
    st.hi[j] = m.var(j).upper;
  }
  for (std::size_t k = 0; k < st.int_vars.size(); ++k)
    st.lo[st.int_vars[k]] = st.hi[st.int_vars[k]] = st.fixed[k];
  LpResult lp = solve_lp(m, st.lo, st.hi, &st.ws);
  if (lp.status == LpStatus::Unbounded) {
    st.unbounded = true;
    return;
  }
  if (lp.status != LpStatus::Optimal) return;
  if (!st.found || lp.objective < st.best - 1e-12) {
    st.found = true;
    st.best = lp.objective;
    st.best_x = lp.x;
    for (std::size_t k = 0; k < st.int_vars.size(); ++k)
      st.best_x[static_cast<std::size_t>(st.int_vars[k])] = st.fixed[k];
  }
}

bool brute_dfs(BruteState& st, std::size_t depth) {
  if (st.unbounded) return true;
  if (++st.visited > st.max_points)
    throw std::invalid_argument("brute_force_solve: lattice too large");
  if (depth == st.int_vars.size()) {
    brute_leaf(st);
    return true;
  }
  const Model& m = *st.m;
  const VarSpec& v = m.var(st.int_vars[depth]);
  long lo = static_cast<long>(std::ceil(v.lower - st.tol));
  long hi = static_cast<long>(std::floor(v.upper + st.tol));
  for (long val = lo; val <= hi; ++val) {
    double x = static_cast<double>(val);
    st.fixed[depth] = x;
    // tighten touched row intervals
    bool ok = true;
    for (int r : st.rows_of_var[depth]) {
      double coeff = 0.0;
      for (const auto& [pos, c] : st.row_int_terms[r])
        if (pos == static_cast<int>(depth)) { coeff = c; break; }
      const VarSpec& vv = v;
      double cmin = std::min(coeff * vv.lower, coeff * vv.upper);
      double cmax = std::max(coeff * vv.lower, coeff * vv.upper);
      st.row_min[r] += coeff * x - cmin;
      st.row_max[r] += coeff * x - cmax;
      const Constraint& con = m.constraints()[static_cast<std::size_t>(r)];
      if (con.sense != Sense::GreaterEqual && st.row_min[r] > con.rhs + st.tol) ok = false;
      if (con.sense != Sense::LessEqual && st.row_max[r] < con.rhs - st.tol) ok = false;
    }
    if (ok) {
      if (!brute_dfs(st, depth + 1)) return false;
      if (st.unbounded) return true;
    }
    // undo
    for (int r : st.rows_of_var[depth]) {
      double coeff = 0.0;
      for (const auto& [pos, c] : st.row_int_terms[r])
        if (pos == static_cast<int>(depth)) { coeff = c; break; }
      double cmin = std::min(coeff * v.lower, coeff * v.upper);
      double cmax = std::max(coeff * v.lower, coeff * v.upper);
      st.row_min[r] -= coeff * x - cmin;
      st.row_max[r] -= coeff * x - cmax;
    }
  }
  return true;
}

}  // namespace

BruteResult brute_force_solve(const Model& m, long max_points) {
  m.validate();
  BruteState st;
  st.m = &m;
  st.max_points = max_points;

  for (const auto& v : m.vars()) {
    if (v.is_integral()) {
      if (!std::isfinite(v.lower) || !std::isfinite(v.upper))
        throw std::invalid_argument("brute_force_solve: integer var " + v.name +
                                    " must be finitely bounded");
      st.int_vars.push_back(v.id);
    } else {
      st.cont_vars.push_back(v.id);
    }
  }
  st.fixed.assign(st.int_vars.size(), 0.0);
  st.lo.assign(static_cast<std::size_t>(m.num_vars()), 0.0);
  st.hi.assign(static_cast<std::size_t>(m.num_vars()), 0.0);

  const std::size_t rows = m.constraints().size();
  st.row_min.assign(rows, 0.0);
  st.row_max.assign(rows, 0.0);
  st.row_int_terms.resize(rows);
  st.rows_of_var.resize(st.int_vars.size());
  std::vector<int> pos_of_var(static_cast<std::size_t>(m.num_vars()), -1);
  for (std::size_t k = 0; k < st.int_vars.size(); ++k)
    pos_of_var[static_cast<std::size_t>(st.int_vars[k])] = static_cast<int>(k);

  for (std::size_t r = 0; r < rows; ++r) {
    const Constraint& con = m.constraints()[r];
    for (const auto& [j, c] : con.expr.terms()) {
      const VarSpec& v = m.var(j);
      double cmin = std::min(c * v.lower, c * v.upper);
      double cmax = std::max(c * v.lower, c * v.upper);
      st.row_min[r] += cmin;
      st.row_max[r] += cmax;
      int pos = pos_of_var[static_cast<std::size_t>(j)];
      if (pos >= 0) {
        st.row_int_terms[r].push_back({pos, c});
        st.rows_of_var[static_cast<std::size_t>(pos)].push_back(static_cast<int>(r));
      }
    }
  }

  brute_dfs(st, 0);

  BruteResult res;
  res.nodes_visited = st.visited;
  if (st.unbounded) {
    res.status = BruteStatus::Unbounded;
    return res;
  }
  if (!st.found) {
    res.status = BruteStatus::Infeasible;
    return res;
  }
  res.status = BruteStatus::Optimal;
  res.objective = st.best;
  res.argmin = Assignment(st.best_x);
  return res;
}

}  // namespace sam
