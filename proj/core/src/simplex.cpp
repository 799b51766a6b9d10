#include "sam/simplex.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace sam {

namespace {

enum Status : unsigned char { kAtLower, kAtUpper, kFreeZero, kFixed, kBasic };

constexpr int kStallLimit = 60;  // degenerate pivots before switching to Bland

struct Tableau {
  const Model* model = nullptr;
  LpWorkspace* ws = nullptr;
  int m = 0;       // rows
  int n_act = 0;   // active structural columns
  int width = 0;   // n_act + m (slack per row)
  double tol = 1e-9;

  double* row(int r) { return ws->tab.data() + static_cast<std::size_t>(r) * width; }

  int art_id(int r) const { return width + r; }
  bool is_art(int id) const { return id >= width; }

  double lo_of(int id) const { return is_art(id) ? 0.0 : ws->lo[id]; }
  double up_of(int id) const { return is_art(id) ? kInf : ws->up[id]; }
};

}  // namespace

LpResult solve_lp(const Model& m, LpWorkspace* ws, const LpOptions& opts) {
  std::vector<double> lower(m.num_vars()), upper(m.num_vars());
  for (const auto& v : m.vars()) {
    lower[v.id] = v.lower;
    upper[v.id] = v.upper;
  }
  return solve_lp(m, lower, upper, ws, opts);
}

LpResult solve_lp(const Model& m, const std::vector<double>& lower,
                  const std::vector<double>& upper, LpWorkspace* ws_in,
                  const LpOptions& opts) {
  const int n = m.num_vars();
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
    throw std::invalid_argument("solve_lp: bound arrays must cover all vars");

  LpWorkspace local;
  LpWorkspace& w = ws_in ? *ws_in : local;

  Tableau t;
  t.model = &m;
  t.ws = &w;
  t.tol = opts.tol;
  const int rows = static_cast<int>(m.constraints().size());
  t.m = rows;

  // Active columns: structural vars with lo < up come first, then one slack
  // per row. Fixed vars are substituted into the right-hand sides.
  w.var_col.assign(n, -1);
  w.col_var.clear();
  w.sol.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double lj = lower[j], uj = upper[j];
    if (lj > uj) return {LpStatus::Infeasible, 0.0, {}, 0};
    if (uj - lj <= 0.0) {
      w.sol[j] = lj;  // fixed
    } else {
      w.var_col[j] = static_cast<int>(w.col_var.size());
      w.col_var.push_back(j);
    }
  }
  t.n_act = static_cast<int>(w.col_var.size());
  t.width = t.n_act + rows;
  const int W = t.width;

  w.lo.assign(W, 0.0);
  w.up.assign(W, 0.0);
  w.xn.assign(W, 0.0);
  w.stat.assign(W, kAtLower);
  for (int c = 0; c < t.n_act; ++c) {
    int j = w.col_var[c];
    w.lo[c] = lower[j];
    w.up[c] = upper[j];
    if (std::isfinite(w.lo[c])) {
      w.stat[c] = kAtLower;
      w.xn[c] = w.lo[c];
    } else if (std::isfinite(w.up[c])) {
      w.stat[c] = kAtUpper;
      w.xn[c] = w.up[c];
    } else {
      w.stat[c] = kFreeZero;
      w.xn[c] = 0.0;
    }
  }
  for (int r = 0; r < rows; ++r) {
    int c = t.n_act + r;
    switch (m.constraints()[r].sense) {
      case Sense::LessEqual:
        w.lo[c] = 0.0; w.up[c] = kInf; w.stat[c] = kAtLower;
        break;
      case Sense::GreaterEqual:
        w.lo[c] = -kInf; w.up[c] = 0.0; w.stat[c] = kAtUpper;
        break;
      case Sense::Equal:
        w.lo[c] = 0.0; w.up[c] = 0.0; w.stat[c] = kFixed;
        break;
    }
    w.xn[c] = 0.0;
  }

  w.tab.assign(static_cast<std::size_t>(rows) * W, 0.0);
  w.basis.assign(rows, -1);
  w.xb.assign(rows, 0.0);
  w.d1.assign(W, 0.0);
  w.d2.assign(W, 0.0);

  // Fill rows; substitute fixed vars; decide slack-basic vs artificial.
  bool any_art = false;
  for (int r = 0; r < rows; ++r) {
    const Constraint& con = m.constraints()[r];
    double rhs = con.rhs;
    double* tr = t.row(r);
    for (const auto& [j, coeff] : con.expr.terms()) {
      int c = w.var_col[j];
      if (c < 0) rhs -= coeff * w.sol[j];
      else tr[c] = coeff;
    }
    tr[t.n_act + r] = 1.0;
    // residual with nonbasics at their start values
    double res = rhs;
    for (const auto& [j, coeff] : con.expr.terms()) {
      int c = w.var_col[j];
      if (c >= 0) res -= coeff * w.xn[c];
    }
    int slack = t.n_act + r;
    bool slack_ok = res >= w.lo[slack] - 1e-12 && res <= w.up[slack] + 1e-12;
    if (slack_ok) {
      w.basis[r] = slack;
      w.stat[slack] = kBasic;
      w.xb[r] = res;
    } else {
      if (res < 0) {  // scale the row so the artificial enters at +|res|
        for (int c = 0; c < W; ++c) tr[c] = -tr[c];
        res = -res;
      }
      w.basis[r] = t.art_id(r);
      w.xb[r] = res;
      any_art = true;
    }
  }

  // Phase-1 reduced costs: cost 1 on basic artificials.
  if (any_art) {
    for (int r = 0; r < rows; ++r) {
      if (!t.is_art(w.basis[r])) continue;
      const double* tr = t.row(r);
      for (int c = 0; c < W; ++c) w.d1[c] -= tr[c];
    }
  }
  // Phase-2 reduced costs: model objective on structural columns (all
  // initial basics are slacks/artificials with zero phase-2 cost).
  for (const auto& [j, coeff] : m.objective().terms()) {
    int c = w.var_col[j];
    if (c >= 0) w.d2[c] = coeff;
  }

  LpResult result;
  int iters = 0;
  int stall = 0;
  bool bland = false;

  auto pivot_update = [&](int r_piv, int c_piv) {
    double* pr = t.row(r_piv);
    double inv = 1.0 / pr[c_piv];
    for (int c = 0; c < W; ++c) pr[c] *= inv;
    pr[c_piv] = 1.0;  // keep the unit entry exact
    for (int r = 0; r < rows; ++r) {
      if (r == r_piv) continue;
      double* tr = t.row(r);
      double f = tr[c_piv];
      if (f == 0.0) continue;
      for (int c = 0; c < W; ++c) tr[c] -= f * pr[c];
      tr[c_piv] = 0.0;
    }
    for (double* d : {w.d1.data(), w.d2.data()}) {
      double f = d[c_piv];
      if (f == 0.0) continue;
      for (int c = 0; c < W; ++c) d[c] -= f * pr[c];
      d[c_piv] = 0.0;
    }
  };

  // One simplex phase over the given reduced-cost row. Returns false on
  // iteration-limit; sets *unbounded when a ray is found (phase 2 only).
  auto run_phase = [&](std::vector<double>& d, bool* unbounded) -> bool {
    for (;;) {
      if (++iters > opts.max_iterations) return false;
      // entering column
      int enter = -1, dir = 0;
      double best = t.tol;
      for (int c = 0; c < W; ++c) {
        unsigned char st = w.stat[c];
        if (st == kBasic || st == kFixed) continue;
        double dc = d[c];
        int cdir = 0;
        if ((st == kAtLower || st == kFreeZero) && dc < -t.tol) cdir = +1;
        else if (st == kAtUpper && dc > t.tol) cdir = -1;
        else if (st == kFreeZero && dc > t.tol) cdir = -1;
        if (cdir == 0) continue;
        if (bland) { enter = c; dir = cdir; break; }
        if (std::abs(dc) > best) { best = std::abs(dc); enter = c; dir = cdir; }
      }
      if (enter < 0) return true;  // optimal for this phase

      // ratio test
      double limit = kInf;
      int leave_row = -1;
      int leave_to_upper = 0;
      double own_range = w.up[enter] - w.lo[enter];
      for (int r = 0; r < rows; ++r) {
        double a = t.row(r)[enter] * dir;
        if (std::abs(a) <= t.tol) continue;
        int bid = w.basis[r];
        double cand;
        int to_upper;
        if (a > 0) {  // basic decreases toward its lower bound
          double lb = t.lo_of(bid);
          if (!std::isfinite(lb)) continue;
          cand = (w.xb[r] - lb) / a;
          to_upper = 0;
        } else {  // basic increases toward its upper bound
          double ub = t.up_of(bid);
          if (!std::isfinite(ub)) continue;
          cand = (w.xb[r] - ub) / a;
          to_upper = 1;
        }
        if (cand < 0.0) cand = 0.0;
        if (cand < limit - 1e-12 ||
            (cand < limit + 1e-12 && leave_row >= 0 && bid < w.basis[leave_row])) {
          limit = cand;
          leave_row = r;
          leave_to_upper = to_upper;
        }
      }

      if (own_range < limit - 1e-12 && std::isfinite(own_range)) {
        // bound flip, no basis change
        for (int r = 0; r < rows; ++r) {
          double a = t.row(r)[enter];
          if (a != 0.0) w.xb[r] -= dir * own_range * a;
        }
        w.xn[enter] = dir > 0 ? w.up[enter] : w.lo[enter];
        w.stat[enter] = dir > 0 ? kAtUpper : kAtLower;
        if (own_range > 1e-9) { stall = 0; bland = false; }
        else if (++stall > kStallLimit) bland = true;
        continue;
      }
      if (leave_row < 0) {
        if (unbounded) *unbounded = true;
        return true;
      }

      double step = limit;
      for (int r = 0; r < rows; ++r) {
        if (r == leave_row) continue;
        double a = t.row(r)[enter];
        if (a != 0.0) w.xb[r] -= dir * step * a;
      }
      int leaving = w.basis[leave_row];
      if (!t.is_art(leaving)) {
        bool zero_range = w.up[leaving] - w.lo[leaving] <= 0.0;
        w.stat[leaving] = zero_range ? kFixed : (leave_to_upper ? kAtUpper : kAtLower);
        w.xn[leaving] = leave_to_upper ? w.up[leaving] : w.lo[leaving];
      }
      double enter_val = w.xn[enter] + dir * step;
      pivot_update(leave_row, enter);
      w.basis[leave_row] = enter;
      w.stat[enter] = kBasic;
      w.xb[leave_row] = enter_val;

      if (step > 1e-9) { stall = 0; bland = false; }
      else if (++stall > kStallLimit) bland = true;
    }
  };

  if (any_art) {
    if (!run_phase(w.d1, nullptr)) return {LpStatus::IterLimit, 0.0, {}, iters};
    double infeas = 0.0;
    for (int r = 0; r < rows; ++r)
      if (t.is_art(w.basis[r])) infeas += w.xb[r];
    if (infeas > 1e-7) {
      result.status = LpStatus::Infeasible;
      result.iterations = iters;
      return result;
    }
    // Drive remaining artificials out of the basis where possible; rows
    // where that fails are linearly dependent and stay pinned at zero.
    for (int r = 0; r < rows; ++r) {
      if (!t.is_art(w.basis[r])) continue;
      const double* tr = t.row(r);
      int col = -1;
      for (int c = 0; c < W; ++c) {
        if (w.stat[c] == kBasic) continue;
        if (std::abs(tr[c]) > 1e-7) { col = c; break; }
      }
      if (col < 0) continue;
      int prev_stat = w.stat[col];
      double enter_val = w.xn[col];
      pivot_update(r, col);
      w.basis[r] = col;
      w.stat[col] = kBasic;
      w.xb[r] = enter_val;
      (void)prev_stat;
    }
  }

  stall = 0;
  bland = false;
  bool unbounded = false;
  if (!run_phase(w.d2, &unbounded)) return {LpStatus::IterLimit, 0.0, {}, iters};
  if (unbounded) {
    result.status = LpStatus::Unbounded;
    result.iterations = iters;
    return result;
  }

  for (int c = 0; c < t.n_act; ++c)
    if (w.stat[c] != kBasic) w.sol[w.col_var[c]] = w.xn[c];
  for (int r = 0; r < rows; ++r) {
    int bid = w.basis[r];
    if (bid < t.n_act) w.sol[w.col_var[bid]] = w.xb[r];
  }
  result.status = LpStatus::Optimal;
  result.x = w.sol;
  result.objective = evaluate(m.objective(), Assignment(result.x));
  result.iterations = iters;
  return result;
}

}  // namespace sam
