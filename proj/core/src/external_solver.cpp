#include "sam/external_solver.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sam/lp_format.hpp"

namespace fs = std::filesystem;

namespace sam {

namespace {

std::atomic<int> dir_counter{0};

std::string make_work_dir() {
  fs::path base = fs::temp_directory_path() /
                  ("sam_ext_" + std::to_string(::getpid()) + "_" +
                   std::to_string(dir_counter.fetch_add(1)));
  fs::create_directories(base);
  return base.string();
}

}  // namespace

ExternalSolution parse_simple_sol(const std::string& path) {
  ExternalSolution sol;
  std::ifstream in(path);
  if (!in) return sol;
  bool status_seen = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "status") {
        std::string v;
        ls >> v;
        status_seen = true;
        if (v == "optimal") sol.status = ExternalSolution::Status::Optimal;
        else if (v == "feasible") sol.status = ExternalSolution::Status::Feasible;
        else if (v == "infeasible") sol.status = ExternalSolution::Status::Infeasible;
        else if (v == "timelimit") sol.status = ExternalSolution::Status::TimeLimit;
        else status_seen = false;
      } else if (key == "bound") {
        double b;
        if (ls >> b) sol.bound = b;
      }
      continue;
    }
    std::string name;
    double value;
    if (ls >> name >> value) sol.values[name] = value;
  }
  if (!status_seen)
    sol.status = sol.values.empty() ? ExternalSolution::Status::Error
                                    : ExternalSolution::Status::Feasible;
  return sol;
}

ExternalSession::ExternalSession(const Model& m, SolveParams params, ExternalSolverOptions opts)
    : model_(&m), params_(std::move(params)), opts_(std::move(opts)) {
  m.validate();
  if (opts_.command.empty()) {
    const char* env = std::getenv(kExternalSolverEnv);
    if (!env || !*env)
      throw std::runtime_error(std::string("external solver command not set; export ") +
                               kExternalSolverEnv);
    opts_.command = env;
  }
  dir_ = opts_.work_dir.empty() ? make_work_dir() : opts_.work_dir;
  fs::create_directories(dir_);
  lp_path_ = (fs::path(dir_) / "model.lp").string();
  sol_path_ = (fs::path(dir_) / "out.sol").string();
  mst_path_ = (fs::path(dir_) / "warm.mst").string();
  std::ofstream lp(lp_path_);
  write_lp(m, lp);
  lb_ = params_.tol.feasibility >= 0 ? -kInf : -kInf;
}

ExternalSession::~ExternalSession() {
  if (!opts_.keep_files && opts_.work_dir.empty()) {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
}

SolveEvent ExternalSession::step(double budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("step budget must be > 0");
  if (state_ == SessionState::Finished)
    return {ub_ == kInf && lb_ == kInf ? SolveEventKind::Infeasible : SolveEventKind::Optimal,
            ub_, lb_};

  const auto names = lp_var_names(*model_);
  std::string mst_arg;
  if (incumbent_) {
    std::ofstream mst(mst_path_);
    for (const auto& v : model_->vars())
      mst << names[v.id] << ' ' << (*incumbent_)[v.id] << '\n';
    mst_arg = mst_path_;
  }
  std::error_code ec;
  fs::remove(sol_path_, ec);

  std::ostringstream cmd;
  cmd << opts_.command << " '" << lp_path_ << "' '" << sol_path_ << "' " << budget << ' '
      << params_.target_gap;
  if (!mst_arg.empty()) cmd << " '" << mst_arg << "'";
  Stopwatch sw(params_.clock);
  int rc = std::system(cmd.str().c_str());
  elapsed_ += sw.elapsed();
  ++invocations_;
  if (rc != 0)
    throw std::runtime_error("external solver command failed with exit code " +
                             std::to_string(rc));

  ExternalSolution sol = opts_.parser(sol_path_);
  if (sol.status == ExternalSolution::Status::Error)
    throw std::runtime_error("external solver produced no parsable solution file");

  double old_ub = ub_, old_lb = lb_;
  if (sol.status == ExternalSolution::Status::Infeasible) {
    ub_ = lb_ = kInf;
    state_ = SessionState::Finished;
    return {SolveEventKind::Infeasible, ub_, lb_};
  }
  if (!sol.values.empty()) {
    std::map<std::string, int> by_name;
    for (const auto& v : model_->vars()) by_name[names[v.id]] = v.id;
    Assignment a(static_cast<std::size_t>(model_->num_vars()), 0.0);
    for (const auto& [name, value] : sol.values) {
      auto it = by_name.find(name);
      if (it != by_name.end()) a[it->second] = value;
    }
    for (const auto& v : model_->vars())
      if (v.is_integral()) a[v.id] = std::round(a[v.id]);
    if (check_feasible(*model_, a, params_.tol).feasible) {
      double obj = evaluate(model_->objective(), a);
      if (obj < ub_) {
        ub_ = obj;
        incumbent_ = std::move(a);
      }
    }
  }
  if (sol.bound) lb_ = std::max(lb_, *sol.bound);
  if (sol.status == ExternalSolution::Status::Optimal) {
    lb_ = ub_;
    state_ = SessionState::Finished;
    return {SolveEventKind::Optimal, ub_, lb_};
  }
  state_ = SessionState::Paused;
  if (ub_ < old_ub - 1e-9) return {SolveEventKind::IncumbentImproved, ub_, lb_};
  if (lb_ > old_lb + 1e-9) return {SolveEventKind::BoundImproved, ub_, lb_};
  return {SolveEventKind::TimeLimitReached, ub_, lb_};
}

SolveResult solve_with_external(const Model& m, SolveParams params, ExternalSolverOptions opts) {
  ExternalSession session(m, params, std::move(opts));
  SolveResult res{};
  for (;;) {
    double remaining = params.time_limit - session.elapsed();
    if (session.state() != SessionState::Finished && remaining <= 0.0) {
      res.status = SolveEventKind::TimeLimitReached;
      break;
    }
    SolveEvent ev = session.step(std::isfinite(remaining) ? remaining : 3600.0);
    if (ev.kind == SolveEventKind::Optimal || ev.kind == SolveEventKind::Infeasible) {
      res.status = ev.kind;
      break;
    }
    double gap = relative_gap(session.upper_bound(), std::max(0.0, session.lower_bound()));
    if (params.target_gap > 0.0 && gap <= params.target_gap) {
      res.status = SolveEventKind::GapReached;
      break;
    }
    if (session.elapsed() >= params.time_limit) {
      res.status = SolveEventKind::TimeLimitReached;
      break;
    }
  }
  res.ub = session.upper_bound();
  res.lb = session.lower_bound();
  res.gap = relative_gap(res.ub, std::max(0.0, std::min(res.lb, res.ub)));
  res.incumbent = session.incumbent();
  res.solve_time = session.elapsed();
  res.nodes = 0;
  return res;
}

}  // namespace sam
