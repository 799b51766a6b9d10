#include "sam/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "sam/solver.hpp"

namespace sam {

namespace {

struct Bracket {
  double ub = kInf;
  double lb = 0.0;
  double rho = kInf;
  bool heuristic_done = false;
  bool exact = false;  // solver proved optimality or infeasibility
  std::unique_ptr<Model> model;
  std::unique_ptr<SolveSession> session;
  std::optional<Assignment> warm;
};

bool in_set(const std::vector<int>& d, int s) {
  return std::find(d.begin(), d.end(), s) != d.end();
}

int min_of(const std::vector<int>& d) { return *std::min_element(d.begin(), d.end()); }

void check_deadline(const Clock& clock, double deadline) {
  if (clock.now() >= deadline) throw GlobalTimeout{};
}

/// Exact solve of a second-stage model; only ever returns with the optimum
/// or a proof of infeasibility (throws GlobalTimeout when the engine's
/// deadline cuts it short).
SolveResult exact_solve(const Model& q, const Bracket& b, const SamConfig& cfg,
                        double deadline) {
  SolveParams p;
  p.clock = cfg.clock;
  p.seed = cfg.seed;
  p.warm_start = b.warm;
  if (std::isfinite(deadline)) {
    p.time_limit = deadline - cfg.clock->now();
    if (p.time_limit <= 0.0) throw GlobalTimeout{};
  }
  SolveResult res = solve(q, p);
  if (res.status == SolveEventKind::TimeLimitReached) throw GlobalTimeout{};
  return res;
}

void append_snapshots(FindOutcome& out, const std::map<int, Bracket>& br) {
  for (const auto& [s, b] : br)
    out.bounds.push_back({s, b.ub, b.lb, b.rho, b.heuristic_done, b.exact});
}

}  // namespace

FindOutcome isam_find(const TwoStageProblem& problem, const std::vector<int>& d,
                      const MasterSolution& ms, const SamConfig& cfg, double deadline) {
  const std::vector<int> scen = problem.scenarios();
  if (scen.empty()) throw std::invalid_argument("isam_find: no scenarios");
  const Clock& clock = *cfg.clock;
  (void)d;  // the worst-scenario search always scans the full set

  std::map<int, Bracket> br;
  FindOutcome out;
  for (int s : scen) {
    check_deadline(clock, deadline);
    double t0 = clock.now();
    HeuristicResult hr = problem.heuristic(ms.x, s, cfg.heuristic_budget, cfg.clock);
    out.heuristic_time += clock.now() - t0;
    Bracket& b = br[s];
    b.ub = hr.ub;
    b.lb = std::max(0.0, hr.lb);
    b.warm = std::move(hr.incumbent);
    b.heuristic_done = true;
  }

  for (;;) {
    int k = -1;
    double best = -kInf;
    for (int s : scen)
      if (br[s].ub > best) { best = br[s].ub; k = s; }
    Bracket& bk = br[k];
    if (bk.exact) {  // picked an already optimally solved scenario: done
      out.scenario = k;
      out.certificate = bk.ub;
      break;
    }
    check_deadline(clock, deadline);
    Model q = problem.build_second_stage(ms.x, k);
    double t0 = clock.now();
    SolveResult res = exact_solve(q, bk, cfg, deadline);
    out.solve_time += clock.now() - t0;
    if (res.status == SolveEventKind::Infeasible) {
      bk.ub = bk.lb = kInf;
    } else {
      bk.ub = res.ub;
      bk.lb = res.ub;
    }
    bk.exact = true;
    double mx = -kInf;
    for (int s : scen) mx = std::max(mx, br[s].ub);
    if (bk.ub >= mx) {  // k is still worst w.r.t. UB after its exact solve
      out.scenario = k;
      out.certificate = bk.ub;
      break;
    }
  }
  append_snapshots(out, br);
  return out;
}

FindOutcome srp_find(const TwoStageProblem& problem, const std::vector<int>& d,
                     const MasterSolution& ms, const SamConfig& cfg, double deadline) {
  const std::vector<int> scen = problem.scenarios();
  if (scen.empty()) throw std::invalid_argument("srp_find: no scenarios");
  const Clock& clock = *cfg.clock;
  const double z = ms.z;
  const double eps = cfg.epsilon;

  std::map<int, Bracket> br;
  FindOutcome out;
  for (int s : scen) {
    if (in_set(d, s)) continue;
    check_deadline(clock, deadline);
    double t0 = clock.now();
    HeuristicResult hr = problem.heuristic(ms.x, s, cfg.heuristic_budget, cfg.clock, z);
    out.heuristic_time += clock.now() - t0;
    Bracket& b = br[s];
    b.ub = hr.ub;
    b.lb = std::max(0.0, hr.lb);
    b.warm = std::move(hr.incumbent);
    b.heuristic_done = true;
    if (b.ub > z + eps) {
      Model q = problem.build_second_stage(ms.x, s);
      double s0 = clock.now();
      SolveResult res = exact_solve(q, b, cfg, deadline);
      out.solve_time += clock.now() - s0;
      if (res.status == SolveEventKind::Infeasible) {
        b.ub = b.lb = kInf;
      } else {
        b.ub = res.ub;
        b.lb = res.ub;
      }
      b.exact = true;
      if (b.ub > z + eps) {
        out.scenario = s;
        append_snapshots(out, br);
        return out;
      }
    }
  }
  // no scenario outside D exceeds z: certify with any scenario already in D
  out.certificate = z;
  if (!d.empty()) out.scenario = min_of(d);
  append_snapshots(out, br);
  return out;
}

FindOutcome asbp_find(const TwoStageProblem& problem, const std::vector<int>& d,
                      const MasterSolution& ms, double master_time, const SamConfig& cfg,
                      double deadline) {
  const std::vector<int> scen = problem.scenarios();
  if (scen.empty()) throw std::invalid_argument("asbp_find: no scenarios");
  if (ms.gap_p > cfg.target_gap + 1e-12)
    throw std::invalid_argument("asbp_find: master gap p exceeds the target gap P");
  const Clock& clock = *cfg.clock;
  const double eps = cfg.epsilon;
  const double zprime =
      cfg.use_zb ? adjusted_bound(ms.z, ms.f_x, std::min(ms.gap_p, cfg.target_gap),
                                  cfg.target_gap)
                 : 0.0;
  const double rho0 = cfg.use_tl ? std::max(cfg.tl_linear * master_time, cfg.tl_min) : kInf;

  std::map<int, Bracket> br;
  for (int s : scen) br[s].rho = rho0;

  // candidate set: S \ D, or all of S when the z'-comparisons are disabled
  // (scenarios in D are then not excluded up front)
  std::vector<int> r_set;
  for (int s : scen)
    if (!cfg.use_zb || !in_set(d, s)) r_set.push_back(s);

  FindOutcome out;
  for (int s : r_set) {
    check_deadline(clock, deadline);
    double t0 = clock.now();
    HeuristicResult hr = problem.heuristic(ms.x, s, cfg.heuristic_budget, cfg.clock);
    out.heuristic_time += clock.now() - t0;
    Bracket& b = br[s];
    b.ub = hr.ub;
    b.lb = std::max(0.0, hr.lb);
    b.warm = std::move(hr.incumbent);
    b.heuristic_done = true;
  }

  auto lb_eff = [&](const Bracket& b) { return (cfg.use_lb || b.exact) ? b.lb : 0.0; };

  for (;;) {
    check_deadline(clock, deadline);
    // prune: keep scenarios whose UB exceeds z' and is not dominated by
    // another candidate's LB (max taken over the pre-filter set)
    double maxlb = -kInf;
    for (int s : r_set) maxlb = std::max(maxlb, lb_eff(br[s]));
    std::erase_if(r_set, [&](int s) {
      const Bracket& b = br[s];
      return !(b.ub > zprime + eps && b.ub >= maxlb - eps);
    });

    if (r_set.empty()) {
      out.certificate = std::max(zprime, ms.z);
      if (!d.empty()) out.scenario = min_of(d);
      break;
    }

    int k = -1;
    double best = -kInf;
    for (int s : r_set)
      if (br[s].ub > best) { best = br[s].ub; k = s; }
    Bracket& bk = br[k];

    if (r_set.size() == 1 && lb_eff(bk) > zprime + eps) {
      out.scenario = k;
      out.certificate = in_set(d, k) ? std::max(zprime, ms.z) : bk.ub;
      break;
    }
    if (bk.exact || bk.ub - bk.lb <= eps) {
      out.scenario = k;
      out.certificate = in_set(d, k) ? std::max({zprime, ms.z, bk.ub}) : bk.ub;
      break;
    }
    if (bk.rho <= 0.0) {
      if (!cfg.use_zb && in_set(d, k)) {
        // a scenario already in D cannot be "added" again; returning it on a
        // time limit would terminate the engine without a proof, so keep
        // solving it until its bracket closes
        bk.rho = std::max(cfg.tl_min, 1e-3);
      } else {
        out.scenario = k;
        out.certificate = bk.ub;
        break;
      }
    }

    if (!bk.session) {  // lazily created on first selection
      bk.model = std::make_unique<Model>(problem.build_second_stage(ms.x, k));
      SolveParams p;
      p.clock = cfg.clock;
      p.seed = cfg.seed;
      p.warm_start = bk.warm;
      bk.session = std::make_unique<SolveSession>(*bk.model, p);
    }
    double budget = bk.rho;
    if (std::isfinite(deadline)) budget = std::min(budget, deadline - clock.now());
    if (budget <= 0.0) throw GlobalTimeout{};
    double t0 = clock.now();
    SolveEvent ev = bk.session->step(budget);
    double used = clock.now() - t0;
    out.solve_time += used;
    if (ev.kind == SolveEventKind::Infeasible) {
      bk.ub = kInf;
      bk.lb = kInf;
      bk.exact = true;
    } else {
      bk.ub = std::min(bk.ub, ev.ub);
      bk.lb = std::max(bk.lb, ev.lb);
      if (ev.kind == SolveEventKind::Optimal) bk.exact = true;
    }
    bk.rho -= std::max(used, 1e-3);  // measured time, floored at 1 ms
  }
  append_snapshots(out, br);
  return out;
}

}  // namespace sam
