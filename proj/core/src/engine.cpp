#include "sam/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "sam/rng.hpp"
#include "sam/solver.hpp"
#include "sam/strategies.hpp"

namespace sam {

namespace {

using nlohmann::json;

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json log_to_json(const IterationLog& log) {
  json rec;
  rec["iter"] = log.iter;
  rec["d"] = log.d_snapshot;
  rec["master_time"] = log.master_time;
  rec["master_gap"] = log.master_gap;
  rec["master_ub"] = finite_or_null(log.master_ub);
  rec["master_lb"] = finite_or_null(log.master_lb);
  rec["z"] = log.z_tilde;
  rec["f_x"] = log.f_x;
  rec["chosen"] = log.chosen_scenario;
  rec["certified"] = log.certified;
  rec["heuristic_time"] = log.heuristic_time;
  rec["subproblem_time"] = log.subproblem_time;
  json bounds = json::array();
  for (const auto& b : log.bounds) {
    bounds.push_back({{"s", b.scenario},
                      {"ub", finite_or_null(b.ub)},
                      {"lb", finite_or_null(b.lb)},
                      {"rho", finite_or_null(b.rho)},
                      {"heuristic", b.heuristic_done},
                      {"exact", b.exact}});
  }
  rec["bounds"] = std::move(bounds);
  return rec;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::ISAM: return "isam";
    case Strategy::SRP: return "srp";
    case Strategy::ASBP: return "asbp";
  }
  return "?";
}

std::vector<int> init_subset(const TwoStageProblem& problem, const InitSubset& init) {
  switch (init.kind) {
    case InitSubset::Kind::Empty:
      return {};
    case InitSubset::Kind::Random: {
      const std::vector<int> scen = problem.scenarios();
      if (scen.empty()) throw std::invalid_argument("init_subset: no scenarios");
      std::mt19937_64 rng(mix_seed(static_cast<std::uint64_t>(init.seed), scen.size()));
      return {scen[rng() % scen.size()]};
    }
    case InitSubset::Kind::Hint: {
      auto hint = problem.init_hint();
      if (!hint) throw std::runtime_error("init_subset: problem provides no init hint");
      return *hint;
    }
  }
  return {};
}

double adjusted_bound(double z, double f_x, double p, double P) {
  if (!(P >= 0.0 && P < 1.0))
    throw std::invalid_argument("adjusted_bound: target gap P must be in [0,1)");
  if (p < 0.0 || p > P + 1e-12)
    throw std::invalid_argument("adjusted_bound: need 0 <= p <= P");
  if (z < 0.0 || f_x < 0.0)
    throw std::invalid_argument("adjusted_bound: z and f_x must be non-negative");
  p = std::min(p, P);
  return (1.0 - p) / (1.0 - P) * z + (P - p) / (1.0 - P) * f_x;
}

SamResult run_sam(const TwoStageProblem& problem, const SamConfig& cfg) {
  if (!(cfg.target_gap >= 0.0 && cfg.target_gap < 1.0))
    throw std::invalid_argument("run_sam: target gap must be in [0,1)");
  if (cfg.use_tl && !(cfg.tl_min > 0.0))
    throw std::invalid_argument("run_sam: tl_min must be positive when time limits are used");
  const std::vector<int> scen = problem.scenarios();
  if (scen.empty()) throw std::invalid_argument("run_sam: problem has no scenarios");

  const Clock& clock = *cfg.clock;
  WallClock wall;
  const double t0 = clock.now();
  const double w0 = wall.now();
  const double deadline =
      std::isfinite(cfg.global_time_limit) ? t0 + cfg.global_time_limit : kInf;

  std::ofstream log_stream;
  if (!cfg.log_path.empty()) log_stream.open(cfg.log_path, std::ios::trunc);
  auto emit_log = [&](const IterationLog& log) {
    if (log_stream.is_open()) log_stream << log_to_json(log).dump() << '\n';
  };

  SamResult result;
  std::vector<int> d = init_subset(problem, cfg.init);
  result.final_d = d;
  std::optional<MasterSolution> last_ms;

  auto finalize = [&]() {
    result.wall_time = wall.now() - w0;
    result.clock_time = clock.now() - t0;
  };
  auto time_limit_result = [&]() {
    result.status = SamStatus::GlobalTimeLimit;
    result.certified_gap = 1.0;
    if (last_ms) {
      result.x = last_ms->x;
      // best-effort bound: valid for the scenarios in D only, not certified
      result.objective_ub = last_ms->f_x + last_ms->z;
    }
    finalize();
    return result;
  };

  for (int iter = 1;; ++iter) {
    if (clock.now() >= deadline) return time_limit_result();

    MasterBuild mb = problem.build_master(d);
    SolveParams mp;
    mp.target_gap = cfg.target_gap;
    mp.clock = cfg.clock;
    mp.seed = cfg.seed;
    mp.time_limit = std::min(cfg.master_time_limit, deadline - clock.now());
    if (!(mp.time_limit > 0.0)) return time_limit_result();

    const double m0 = clock.now();
    SolveResult mres = solve(mb.model, mp);
    const double master_time = clock.now() - m0;
    result.master_time_total += master_time;
    result.iterations = iter;

    if (mres.status == SolveEventKind::Infeasible)
      throw std::runtime_error(
          "run_sam: master problem is infeasible; the problem violates the assumption that "
          "a feasible first-stage decision exists for every scenario subset");
    if (!mres.incumbent) return time_limit_result();

    const double master_lb = std::max(0.0, std::min(mres.lb, mres.ub));
    double p = relative_gap(mres.ub, master_lb);
    if (p > cfg.target_gap + 1e-9) return time_limit_result();
    p = std::min(p, cfg.target_gap);

    MasterSolution ms;
    ms.x = Assignment(mb.x_var_ids.size());
    for (std::size_t i = 0; i < mb.x_var_ids.size(); ++i) {
      double v = (*mres.incumbent)[mb.x_var_ids[i]];
      if (mb.model.var(mb.x_var_ids[i]).is_integral()) v = std::round(v);
      ms.x[static_cast<int>(i)] = v;
    }
    ms.z = (*mres.incumbent)[mb.z_var_id];
    ms.f_x = problem.first_stage_cost(ms.x);
    ms.gap_p = p;
    last_ms = ms;

    IterationLog log;
    log.iter = iter;
    log.d_snapshot = d;
    log.master_time = master_time;
    log.master_gap = p;
    log.master_ub = mres.ub;
    log.master_lb = mres.lb;
    log.z_tilde = ms.z;
    log.f_x = ms.f_x;

    if (clock.now() >= deadline) {
      result.logs.push_back(log);
      emit_log(log);
      return time_limit_result();
    }

    FindOutcome outcome;
    try {
      switch (cfg.strategy) {
        case Strategy::ISAM: outcome = isam_find(problem, d, ms, cfg, deadline); break;
        case Strategy::SRP: outcome = srp_find(problem, d, ms, cfg, deadline); break;
        case Strategy::ASBP:
          outcome = asbp_find(problem, d, ms, master_time, cfg, deadline);
          break;
      }
    } catch (const GlobalTimeout&) {
      result.logs.push_back(log);
      emit_log(log);
      return time_limit_result();
    }
    result.heuristic_time_total += outcome.heuristic_time;
    result.subproblem_time_total += outcome.solve_time;

    const bool certified =
        !outcome.scenario ||
        std::find(d.begin(), d.end(), *outcome.scenario) != d.end();
    log.chosen_scenario = outcome.scenario.value_or(-1);
    log.certified = certified;
    log.heuristic_time = outcome.heuristic_time;
    log.subproblem_time = outcome.solve_time;
    log.bounds = std::move(outcome.bounds);
    result.logs.push_back(log);
    emit_log(result.logs.back());

    if (certified) {
      result.status = SamStatus::GapCertified;
      result.x = ms.x;
      result.objective_ub = ms.f_x + outcome.certificate;
      result.certified_gap = cfg.target_gap;
      result.final_d = d;
      break;
    }
    d.push_back(*outcome.scenario);
    ++result.additions;
    result.final_d = d;
  }

  finalize();
  return result;
}

}  // namespace sam
