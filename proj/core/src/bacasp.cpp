#include "sam/bacasp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sam/rng.hpp"

namespace sam::bacasp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num2(int a, int b) { return std::to_string(a) + "_" + std::to_string(b); }

/// Per-scenario second-stage block. Periods are 1-based (1..m).
struct BlockIds {
  int d0 = 0, t0 = 0, c0 = 0, al0 = 0, be0 = 0, ga0 = 0;
  int n = 0, m = 0, cranes = 0;
  int d(int g, int k, int j) const { return d0 + (g * n + k) * m + (j - 1); }
  int t(int k) const { return t0 + k; }
  int c(int k) const { return c0 + k; }
  int al(int k, int j) const { return al0 + k * m + (j - 1); }
  int be(int k, int j) const { return be0 + k * m + (j - 1); }
  int ga(int k, int j) const { return ga0 + k * m + (j - 1); }
};

/// First-stage values as expressions (variables in the master, constants in
/// the second stage).
struct FsView {
  const Instance* inst;
  std::vector<LinearExpr> e, u;  // indexed by FirstStageLayout::pair_index
  std::vector<LinearExpr> b;
  std::vector<LinearExpr> pi;  // k * sections + n
  bool constant = false;

  const LinearExpr& ee(int k, int l) const {
    return e[FirstStageLayout(*inst).pair_index(k, l)];
  }
  const LinearExpr& uu(int k, int l) const {
    return u[FirstStageLayout(*inst).pair_index(k, l)];
  }
  const LinearExpr& ppi(int k, int n) const { return pi[k * inst->num_sections + n]; }
};

BlockIds add_block_vars(Model& m, const Instance& inst, int scenario_row,
                        const std::string& tag) {
  const int n = inst.num_vessels(), mm = inst.horizon, g = static_cast<int>(inst.cranes.size());
  const std::vector<int>& arr = inst.arrivals[static_cast<std::size_t>(scenario_row)];
  BlockIds ids;
  ids.n = n;
  ids.m = mm;
  ids.cranes = g;
  ids.d0 = m.num_vars();
  for (int gg = 0; gg < g; ++gg)
    for (int k = 0; k < n; ++k)
      for (int j = 1; j <= mm; ++j) {
        m.add_binary("d_" + tag + "_" + std::to_string(gg) + "_" + num2(k, j));
      }
  ids.t0 = m.num_vars();
  for (int k = 0; k < n; ++k) {
    m.add_integer("t_" + tag + "_" + std::to_string(k), std::max(1, arr[k]),
                  static_cast<double>(mm));
  }
  ids.c0 = m.num_vars();
  for (int k = 0; k < n; ++k) {
    m.add_integer("c_" + tag + "_" + std::to_string(k), 1.0, static_cast<double>(mm));
  }
  ids.al0 = m.num_vars();
  for (int k = 0; k < n; ++k)
    for (int j = 1; j <= mm; ++j) m.add_binary("al_" + tag + "_" + num2(k, j));
  ids.be0 = m.num_vars();
  for (int k = 0; k < n; ++k)
    for (int j = 1; j <= mm; ++j) m.add_binary("be_" + tag + "_" + num2(k, j));
  ids.ga0 = m.num_vars();
  for (int k = 0; k < n; ++k)
    for (int j = 1; j <= mm; ++j) m.add_binary("ga_" + tag + "_" + num2(k, j));
  return ids;
}

/// Emits the second-stage constraints for one scenario and returns the
/// scenario cost sum_k (c_k - A^s_k) as an expression.
LinearExpr add_block_constraints(Model& m, const Instance& inst, const BlockIds& ids,
                                 const FsView& fs, int scenario_row, const std::string& tag) {
  const int n = ids.n, mm = ids.m, ng = ids.cranes;
  const int top = inst.num_sections;  // J + 1
  const std::vector<int>& arr = inst.arrivals[static_cast<std::size_t>(scenario_row)];
  const double big_m = static_cast<double>(mm);

  // ordering: a vessel berths only after its e-predecessors depart
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      LinearExpr row = LinearExpr::term(ids.t(l), 1.0) - LinearExpr::term(ids.c(k), 1.0) -
                       (big_m + inst.safety) * fs.ee(k, l);
      add_constraint_pruned(m, std::move(row), Sense::GreaterEqual,
                            inst.safety - (big_m + inst.safety),
                            "order_" + tag + "_" + num2(k, l));
    }
  // one vessel per crane and period
  for (int j = 1; j <= mm; ++j)
    for (int g = 0; g < ng; ++g) {
      LinearExpr row;
      for (int k = 0; k < n; ++k) row.add_term(ids.d(g, k, j), 1.0);
      add_constraint_pruned(m, std::move(row), Sense::LessEqual, 1.0,
                            "crane1_" + tag + "_" + num2(j, g));
    }
  for (int j = 1; j <= mm; ++j)
    for (int k = 0; k < n; ++k)
      for (int g = 0; g < ng; ++g) {
        // cranes only work after berthing: t_k <= j d + (1 - d) M
        LinearExpr row = LinearExpr::term(ids.t(k), 1.0) +
                         LinearExpr::term(ids.d(g, k, j), big_m - j);
        add_constraint_pruned(m, std::move(row), Sense::LessEqual, big_m,
                              "work_after_berth_" + tag + "_" + std::to_string(g) + "_" +
                                  num2(k, j));
        // departure after the last worked period: c_k >= (j+1) d
        LinearExpr dep = LinearExpr::term(ids.c(k), 1.0) -
                         LinearExpr::term(ids.d(g, k, j), static_cast<double>(j + 1));
        add_constraint_pruned(m, std::move(dep), Sense::GreaterEqual, 0.0,
                              "depart_after_work_" + tag + "_" + std::to_string(g) + "_" +
                                  num2(k, j));
      }
  // cargo coverage
  for (int k = 0; k < n; ++k) {
    LinearExpr cover;
    for (int j = 1; j <= mm; ++j)
      for (int g = 0; g < ng; ++g) cover.add_term(ids.d(g, k, j), inst.cranes[g].rate);
    m.add_constraint(std::move(cover), Sense::GreaterEqual, inst.vessels[k].cargo,
                     "cover_" + tag + "_" + std::to_string(k));
  }
  // crane operating ranges
  for (int j = 1; j <= mm; ++j)
    for (int k = 0; k < n; ++k)
      for (int g = 0; g < ng; ++g) {
        LinearExpr hi = fs.b[k] + LinearExpr::term(ids.d(g, k, j),
                                                   static_cast<double>(top - inst.cranes[g].end));
        add_constraint_pruned(m, std::move(hi), Sense::LessEqual,
                              static_cast<double>(top - inst.vessels[k].length),
                              "range_hi_" + tag + "_" + std::to_string(g) + "_" + num2(k, j));
        LinearExpr lo = fs.b[k] - LinearExpr::term(ids.d(g, k, j),
                                                   static_cast<double>(inst.cranes[g].start));
        add_constraint_pruned(m, std::move(lo), Sense::GreaterEqual, 0.0,
                              "range_lo_" + tag + "_" + std::to_string(g) + "_" + num2(k, j));
      }
  // cranes may not cross vessels: when l berths below k, any crane on l has
  // a higher index than any crane on k
  for (int j = 1; j <= mm; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        if (k == l) continue;
        for (int g = 1; g < ng; ++g)
          for (int gp = 0; gp < g; ++gp) {
            LinearExpr row = LinearExpr::term(ids.d(g, k, j), 1.0) +
                             LinearExpr::term(ids.d(gp, l, j), 1.0) + fs.uu(k, l);
            add_constraint_pruned(m, std::move(row), Sense::LessEqual, 2.0,
                                  "no_cross_" + tag + "_" + num2(j, k) + "_" +
                                      std::to_string(l) + "_" + num2(g, gp));
          }
      }
  // per-vessel crane cap
  for (int k = 0; k < n; ++k)
    for (int j = 1; j <= mm; ++j) {
      LinearExpr row;
      for (int g = 0; g < ng; ++g) row.add_term(ids.d(g, k, j), 1.0);
      add_constraint_pruned(m, std::move(row), Sense::LessEqual,
                            static_cast<double>(inst.vessels[k].max_cranes),
                            "nc_" + tag + "_" + num2(k, j));
    }
  // crane admissibility from the berthing position window
  for (int k = 0; k < n; ++k)
    for (int g = 0; g < ng; ++g) {
      LinearExpr window;
      for (int sec = inst.cranes[g].start;
           sec <= inst.cranes[g].end - inst.vessels[k].length && sec < inst.num_sections; ++sec)
        window += fs.ppi(k, sec);
      for (int j = 1; j <= mm; ++j) {
        LinearExpr row = LinearExpr::term(ids.d(g, k, j), 1.0) - window;
        add_constraint_pruned(m, std::move(row), Sense::LessEqual, 0.0,
                              "window_" + tag + "_" + std::to_string(g) + "_" + num2(k, j));
      }
    }
  // berthing time is the unique operating start
  for (int k = 0; k < n; ++k) {
    LinearExpr start = LinearExpr::term(ids.t(k), 1.0);
    for (int j = 1; j <= mm; ++j) start.add_term(ids.al(k, j), static_cast<double>(-j));
    m.add_constraint(std::move(start), Sense::Equal, 0.0, "tstart_" + tag + "_" + std::to_string(k));
    LinearExpr one;
    for (int j = 1; j <= mm; ++j) one.add_term(ids.al(k, j), 1.0);
    m.add_constraint(std::move(one), Sense::Equal, 1.0, "astart_" + tag + "_" + std::to_string(k));
  }
  for (int k = 0; k < n; ++k)
    for (int j = 1; j <= mm; ++j) {
      // departure after any operating period
      LinearExpr dep = LinearExpr::term(ids.c(k), 1.0) -
                       LinearExpr::term(ids.be(k, j), static_cast<double>(j + 1));
      add_constraint_pruned(m, std::move(dep), Sense::GreaterEqual, 0.0,
                            "depart_" + tag + "_" + num2(k, j));
      // cranes only during operating periods
      for (int g = 0; g < ng; ++g)
        add_constraint_pruned(m,
                              LinearExpr::term(ids.d(g, k, j), 1.0) -
                                  LinearExpr::term(ids.be(k, j), 1.0),
                              Sense::LessEqual, 0.0,
                              "d_in_beta_" + tag + "_" + std::to_string(g) + "_" + num2(k, j));
      // alpha marks the up-step of beta
      if (j > 1) {
        m.add_constraint(LinearExpr::term(ids.al(k, j), 1.0) -
                             LinearExpr::term(ids.be(k, j), 1.0) +
                             LinearExpr::term(ids.be(k, j - 1), 1.0),
                         Sense::GreaterEqual, 0.0, "astep_" + tag + "_" + num2(k, j));
        m.add_constraint(LinearExpr::term(ids.al(k, j), 1.0) +
                             LinearExpr::term(ids.be(k, j - 1), 1.0),
                         Sense::LessEqual, 1.0, "anew_" + tag + "_" + num2(k, j));
      }
      m.add_constraint(LinearExpr::term(ids.al(k, j), 1.0) -
                           LinearExpr::term(ids.be(k, j), 1.0),
                       Sense::LessEqual, 0.0, "ain_" + tag + "_" + num2(k, j));
      // gamma marks the down-step of beta
      if (j < mm) {
        m.add_constraint(LinearExpr::term(ids.ga(k, j), 1.0) -
                             LinearExpr::term(ids.be(k, j), 1.0) +
                             LinearExpr::term(ids.be(k, j + 1), 1.0),
                         Sense::GreaterEqual, 0.0, "gstep_" + tag + "_" + num2(k, j));
        m.add_constraint(LinearExpr::term(ids.ga(k, j), 1.0) +
                             LinearExpr::term(ids.be(k, j + 1), 1.0),
                         Sense::LessEqual, 1.0, "gend_" + tag + "_" + num2(k, j));
      }
      m.add_constraint(LinearExpr::term(ids.ga(k, j), 1.0) -
                           LinearExpr::term(ids.be(k, j), 1.0),
                       Sense::LessEqual, 0.0, "gin_" + tag + "_" + num2(k, j));
    }
  for (int k = 0; k < n; ++k) {
    m.add_constraint(LinearExpr::term(ids.al(k, 1), 1.0) - LinearExpr::term(ids.be(k, 1), 1.0),
                     Sense::GreaterEqual, 0.0, "afirst_" + tag + "_" + std::to_string(k));
    m.add_constraint(LinearExpr::term(ids.ga(k, mm), 1.0) -
                         LinearExpr::term(ids.be(k, mm), 1.0),
                     Sense::GreaterEqual, 0.0, "glast_" + tag + "_" + std::to_string(k));
    LinearExpr gone;
    for (int j = 1; j <= mm; ++j) gone.add_term(ids.ga(k, j), 1.0);
    m.add_constraint(std::move(gone), Sense::Equal, 1.0, "gsum_" + tag + "_" + std::to_string(k));
  }
  // safety separation: while k is operating, an e-successor l cannot start
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      for (int j = 1; j <= mm; ++j)
        for (int i = std::max(1, j - inst.safety); i <= mm; ++i) {
          LinearExpr row = fs.ee(k, l) + LinearExpr::term(ids.be(k, i), 1.0) +
                           LinearExpr::term(ids.al(l, j), 1.0);
          add_constraint_pruned(m, std::move(row), Sense::LessEqual, 2.0,
                                "sep_" + tag + "_" + num2(k, l) + "_" + num2(i, j));
        }
    }

  LinearExpr cost;
  for (int k = 0; k < n; ++k) {
    cost.add_term(ids.c(k), 1.0);
    cost.add_constant(-static_cast<double>(arr[k]));
  }
  return cost;
}

void add_first_stage_constraints(Model& m, const Instance& inst, const FsView& fs) {
  const int n = inst.num_vessels();
  const int top = inst.num_sections;  // J + 1
  const int j_max = top - 1;          // J
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      LinearExpr row = fs.ee(l, k) + fs.ee(k, l) + fs.uu(l, k) + fs.uu(k, l);
      m.add_constraint(std::move(row), Sense::Equal, 1.0, "disjunct_" + num2(k, l));
    }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      // u_{k,l} = 1 exactly when k berths completely above l
      LinearExpr above = fs.b[k] - fs.b[l] - static_cast<double>(top) * fs.uu(k, l);
      m.add_constraint(std::move(above), Sense::GreaterEqual,
                       static_cast<double>(inst.vessels[l].length - top),
                       "above_" + num2(k, l));
      LinearExpr below = fs.b[k] - fs.b[l] - static_cast<double>(j_max) * fs.uu(k, l);
      m.add_constraint(std::move(below), Sense::LessEqual,
                       static_cast<double>(inst.vessels[l].length - 1), "below_" + num2(k, l));
    }
  for (int k = 0; k < n; ++k) {
    LinearExpr pos = fs.b[k];
    for (int sec = 0; sec < top; ++sec) pos -= static_cast<double>(sec) * fs.ppi(k, sec);
    m.add_constraint(std::move(pos), Sense::Equal, 0.0, "pos_" + std::to_string(k));
  }
  FirstStageLayout lay(inst);
  for (int k = 0; k < n; ++k) {
    LinearExpr occupied, one;
    for (int sec = 0; sec < top; ++sec) {
      occupied += LinearExpr::term(lay.sigma(k, sec), 1.0);
      one += fs.ppi(k, sec);
    }
    m.add_constraint(std::move(occupied), Sense::Equal,
                     static_cast<double>(inst.vessels[k].length), "occupy_" + std::to_string(k));
    m.add_constraint(std::move(one), Sense::Equal, 1.0, "one_start_" + std::to_string(k));
  }
  for (int k = 0; k < n; ++k)
    for (int sec = 0; sec < top; ++sec) {
      int pi_id = lay.pi(k, sec), sig_id = lay.sigma(k, sec);
      if (sec > 0) {
        m.add_constraint(LinearExpr::term(pi_id, 1.0) - LinearExpr::term(sig_id, 1.0) +
                             LinearExpr::term(lay.sigma(k, sec - 1), 1.0),
                         Sense::GreaterEqual, 0.0, "pstep_" + num2(k, sec));
        m.add_constraint(LinearExpr::term(pi_id, 1.0) +
                             LinearExpr::term(lay.sigma(k, sec - 1), 1.0),
                         Sense::LessEqual, 1.0, "pnew_" + num2(k, sec));
      } else {
        m.add_constraint(LinearExpr::term(pi_id, 1.0) - LinearExpr::term(sig_id, 1.0),
                         Sense::GreaterEqual, 0.0, "pfirst_" + std::to_string(k));
      }
      m.add_constraint(LinearExpr::term(pi_id, 1.0) - LinearExpr::term(sig_id, 1.0),
                       Sense::LessEqual, 0.0, "pin_" + num2(k, sec));
    }
  // no-overlap tied to u via the start positions
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      for (int sec = 0; sec < top; ++sec) {
        LinearExpr row = fs.uu(k, l) + fs.ppi(k, sec);
        for (int msec = std::max(sec - inst.vessels[l].length + 1, 0); msec < top; ++msec)
          row += fs.ppi(l, msec);
        m.add_constraint(std::move(row), Sense::LessEqual, 2.0,
                         "sep_pos_" + num2(k, l) + "_" + std::to_string(sec));
      }
    }
}

FsView master_first_stage(Model& m, const Instance& inst, std::vector<int>& x_ids) {
  const int n = inst.num_vessels();
  const int top = inst.num_sections;
  FsView fs;
  fs.inst = &inst;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      int id = m.add_binary("e_" + num2(k, l));
      fs.e.push_back(LinearExpr::term(id, 1.0));
      x_ids.push_back(id);
    }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      int id = m.add_binary("u_" + num2(k, l));
      fs.u.push_back(LinearExpr::term(id, 1.0));
      x_ids.push_back(id);
    }
  for (int k = 0; k < n; ++k) {
    int id = m.add_integer("b_" + std::to_string(k), 0.0,
                           static_cast<double>(top - inst.vessels[k].length));
    fs.b.push_back(LinearExpr::term(id, 1.0));
    x_ids.push_back(id);
  }
  for (int k = 0; k < n; ++k)
    for (int sec = 0; sec < top; ++sec) {
      int id = m.add_binary("pi_" + num2(k, sec));
      fs.pi.push_back(LinearExpr::term(id, 1.0));
      x_ids.push_back(id);
    }
  for (int k = 0; k < n; ++k)
    for (int sec = 0; sec < top; ++sec) {
      int id = m.add_binary("sigma_" + num2(k, sec));
      x_ids.push_back(id);
    }
  return fs;
}

FsView constant_first_stage(const Instance& inst, const Assignment& x) {
  FirstStageLayout lay(inst);
  if (x.size() != static_cast<std::size_t>(lay.size()))
    throw std::invalid_argument("bacasp: first-stage assignment has wrong length");
  const int n = inst.num_vessels();
  FsView fs;
  fs.inst = &inst;
  fs.constant = true;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      fs.e.push_back(LinearExpr(x[lay.e(k, l)]));
    }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      fs.u.push_back(LinearExpr(x[lay.u(k, l)]));
    }
  for (int k = 0; k < n; ++k) fs.b.push_back(LinearExpr(x[lay.b(k)]));
  for (int k = 0; k < n; ++k)
    for (int sec = 0; sec < inst.num_sections; ++sec)
      fs.pi.push_back(LinearExpr(x[lay.pi(k, sec)]));
  return fs;
}

}  // namespace

void Instance::validate() const {
  if (num_vessels() < 1) throw std::invalid_argument("bacasp: need at least one vessel");
  if (num_sections < 1 || horizon < 1)
    throw std::invalid_argument("bacasp: sections and horizon must be positive");
  if (safety < 0) throw std::invalid_argument("bacasp: safety time must be non-negative");
  if (cranes.empty()) throw std::invalid_argument("bacasp: need at least one crane");
  for (const auto& v : vessels) {
    if (v.length < 1 || v.length > num_sections)
      throw std::invalid_argument("bacasp: vessel length out of range");
    if (v.arrival < 0 || v.max_delay < 0 || v.cargo < 0.0 || v.max_cranes < 0)
      throw std::invalid_argument("bacasp: vessel data must be non-negative");
    if (v.arrival + v.max_delay > horizon - 1)
      throw std::invalid_argument("bacasp: vessel cannot berth within the horizon");
  }
  for (const auto& g : cranes) {
    if (g.start < 0 || g.start > g.end || g.end > num_sections - 1)
      throw std::invalid_argument("bacasp: crane range out of bounds");
    if (!(g.rate > 0.0)) throw std::invalid_argument("bacasp: crane rate must be positive");
  }
  for (const auto& row : arrivals)
    if (row.size() != vessels.size())
      throw std::invalid_argument("bacasp: arrival rows must cover all vessels");
}

std::vector<std::vector<int>> enumerate_scenarios(const std::vector<int>& nominal_arrival,
                                                  const std::vector<int>& max_delay) {
  const int n = static_cast<int>(nominal_arrival.size());
  if (n < 3) throw std::invalid_argument("enumerate_scenarios: need at least 3 vessels");
  if (max_delay.size() != nominal_arrival.size())
    throw std::invalid_argument("enumerate_scenarios: size mismatch");

  const int third = static_cast<int>(std::floor(n / 3.0 + 0.5));  // round half up
  const std::array<std::pair<int, int>, 3> groups = {
      std::pair<int, int>{0, third}, {third, 2 * third}, {2 * third, n}};

  // per group: all deviation patterns with at most one nonzero entry,
  // sorted lexicographically (0 < 0.5 < 1)
  auto group_options = [&](int lo, int hi) {
    std::vector<std::vector<double>> opts;
    opts.emplace_back(static_cast<std::size_t>(hi - lo), 0.0);
    for (int k = lo; k < hi; ++k)
      for (double delta : {0.5, 1.0}) {
        std::vector<double> v(static_cast<std::size_t>(hi - lo), 0.0);
        v[static_cast<std::size_t>(k - lo)] = delta;
        opts.push_back(std::move(v));
      }
    std::sort(opts.begin(), opts.end());
    return opts;
  };
  auto o1 = group_options(groups[0].first, groups[0].second);
  auto o2 = group_options(groups[1].first, groups[1].second);
  auto o3 = group_options(groups[2].first, groups[2].second);

  std::vector<std::vector<int>> result;
  result.reserve(o1.size() * o2.size() * o3.size());
  std::vector<double> delta(static_cast<std::size_t>(n));
  for (const auto& a : o1)
    for (const auto& b : o2)
      for (const auto& c : o3) {
        std::copy(a.begin(), a.end(), delta.begin() + groups[0].first);
        std::copy(b.begin(), b.end(), delta.begin() + groups[1].first);
        std::copy(c.begin(), c.end(), delta.begin() + groups[2].first);
        std::vector<int> arr(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k)
          arr[k] = nominal_arrival[k] +
                   static_cast<int>(std::ceil(max_delay[k] * delta[static_cast<std::size_t>(k)] -
                                              1e-9));
        result.push_back(std::move(arr));
      }
  return result;
}

int slack_reduction_init(const Instance& inst) {
  if (inst.arrivals.empty()) throw std::invalid_argument("bacasp: no scenarios enumerated");
  int best = 0;
  double best_score = kInf;
  for (std::size_t s = 0; s < inst.arrivals.size(); ++s) {
    std::vector<int> sorted = inst.arrivals[s];
    std::sort(sorted.begin(), sorted.end());
    double score = 0.0;
    for (std::size_t i = 1; i < sorted.size(); ++i) score += sorted[i] - sorted[i - 1];
    if (score < best_score) {
      best_score = score;
      best = static_cast<int>(s);
    }
  }
  return best;
}

Instance generate(int n_vessels, int seed) {
  if (n_vessels < 3) throw std::invalid_argument("bacasp::generate: need at least 3 vessels");
  std::mt19937_64 rng(mix_seed(static_cast<std::uint64_t>(seed),
                               static_cast<std::uint64_t>(n_vessels)));
  Instance inst;
  inst.num_sections = 10;
  inst.safety = 1;
  double total_cargo = 0.0;
  int max_delay = 0;
  for (int k = 0; k < n_vessels; ++k) {
    Vessel v;
    v.length = static_cast<int>(uniform_int(rng, 2, 4));
    v.cargo = static_cast<double>(uniform_int(rng, 10, 40));
    v.arrival = static_cast<int>(uniform_int(rng, 0, 2 * n_vessels));
    v.max_delay = static_cast<int>(uniform_int(rng, 1, 4));
    v.max_cranes = 2;
    inst.vessels.push_back(v);
    total_cargo += v.cargo;
    max_delay = std::max(max_delay, v.max_delay);
  }
  const double rate = 10.0;
  for (int g = 0; g < 4; ++g) inst.cranes.push_back({0, inst.num_sections - 1, rate});
  inst.horizon = 2 * n_vessels + max_delay + static_cast<int>(std::ceil(total_cargo / rate)) + 4;

  std::vector<int> nominal, delays;
  for (const auto& v : inst.vessels) {
    nominal.push_back(v.arrival);
    delays.push_back(v.max_delay);
  }
  inst.arrivals = enumerate_scenarios(nominal, delays);
  inst.validate();
  return inst;
}

MasterBuild build_master(const Instance& inst, const std::vector<int>& scenario_subset) {
  inst.validate();
  MasterBuild mb;
  Model& m = mb.model;
  FsView fs = master_first_stage(m, inst, mb.x_var_ids);
  mb.z_var_id = m.add_continuous("z", 0.0, kInf);
  add_first_stage_constraints(m, inst, fs);
  for (int s : scenario_subset) {
    std::string tag = std::to_string(s);
    BlockIds ids = add_block_vars(m, inst, s, tag);
    LinearExpr cost = add_block_constraints(m, inst, ids, fs, s, tag);
    LinearExpr epi = LinearExpr::term(mb.z_var_id, 1.0) - cost;
    m.add_constraint(std::move(epi), Sense::GreaterEqual, 0.0, "epi_" + tag);
  }
  mb.first_stage_cost = LinearExpr(0.0);  // f == 0
  m.set_objective(LinearExpr::term(mb.z_var_id, 1.0));
  return mb;
}

Model build_second_stage(const Instance& inst, const Assignment& x, int scenario) {
  inst.validate();
  if (scenario < 0 || scenario >= static_cast<int>(inst.arrivals.size()))
    throw std::invalid_argument("bacasp: unknown scenario");
  Model m;
  FsView fs = constant_first_stage(inst, x);
  BlockIds ids = add_block_vars(m, inst, scenario, "s");
  LinearExpr cost = add_block_constraints(m, inst, ids, fs, scenario, "s");
  m.set_objective(std::move(cost));
  return m;
}

HeuristicResult greedy_heuristic(const Instance& inst, const Assignment& x, int scenario) {
  const int n = inst.num_vessels(), mm = inst.horizon;
  const int ng = static_cast<int>(inst.cranes.size());
  const std::vector<int>& arr = inst.arrivals[static_cast<std::size_t>(scenario)];
  FirstStageLayout lay(inst);
  HeuristicResult out;
  if (x.size() != static_cast<std::size_t>(lay.size())) return out;

  std::vector<int> berth(n), t(n, 0), c(n, 0);
  std::vector<double> remaining(n);
  for (int k = 0; k < n; ++k) {
    berth[k] = static_cast<int>(std::round(x[lay.b(k)]));
    remaining[k] = inst.vessels[k].cargo;
  }
  auto e_of = [&](int k, int l) { return x[lay.e(k, l)] > 0.5; };

  std::vector<std::vector<int>> crane_of(static_cast<std::size_t>(mm) + 1);
  for (auto& row : crane_of) row.assign(static_cast<std::size_t>(ng), -1);  // crane -> vessel

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (arr[a] != arr[b]) return arr[a] < arr[b];
    return a < b;
  });

  for (int j = 1; j <= mm; ++j) {
    // berth vessels whose predecessors have departed
    for (int k : order) {
      if (t[k] > 0 || j < std::max(1, arr[k])) continue;
      bool ok = true;
      for (int l = 0; l < n; ++l) {
        if (l == k) continue;
        if (e_of(l, k) && (c[l] == 0 || j < c[l] + inst.safety)) ok = false;
      }
      if (ok) t[k] = j;
    }
    // assign cranes: topmost vessel first, lowest crane index first
    std::vector<int> active;
    for (int k = 0; k < n; ++k)
      if (t[k] > 0 && remaining[k] > 0.0) active.push_back(k);
    std::sort(active.begin(), active.end(), [&](int a, int b) {
      if (berth[a] != berth[b]) return berth[a] > berth[b];
      return a < b;
    });
    int next_crane = 0;
    for (int k : active) {
      int assigned = 0;
      for (int g = next_crane; g < ng && assigned < inst.vessels[k].max_cranes; ++g) {
        if (remaining[k] <= 0.0) break;
        if (inst.cranes[g].start > berth[k]) continue;
        if (berth[k] + inst.vessels[k].length > inst.cranes[g].end) continue;
        crane_of[j][g] = k;
        remaining[k] -= inst.cranes[g].rate;
        ++assigned;
        next_crane = g + 1;
      }
    }
    for (int k = 0; k < n; ++k)
      if (t[k] > 0 && c[k] == 0 && remaining[k] <= 0.0) c[k] = j + 1;
  }
  for (int k = 0; k < n; ++k)
    if (c[k] == 0 || c[k] > mm) return out;  // could not finish within the horizon

  // assemble a full second-stage assignment and validate it
  Model model = build_second_stage(inst, x, scenario);
  Assignment a(static_cast<std::size_t>(model.num_vars()), 0.0);
  BlockIds ids;
  ids.n = n;
  ids.m = mm;
  ids.cranes = ng;
  ids.d0 = 0;
  ids.t0 = ids.d0 + ng * n * mm;
  ids.c0 = ids.t0 + n;
  ids.al0 = ids.c0 + n;
  ids.be0 = ids.al0 + n * mm;
  ids.ga0 = ids.be0 + n * mm;
  for (int j = 1; j <= mm; ++j)
    for (int g = 0; g < ng; ++g)
      if (crane_of[j][g] >= 0) a[ids.d(g, crane_of[j][g], j)] = 1.0;
  for (int k = 0; k < n; ++k) {
    a[ids.t(k)] = t[k];
    a[ids.c(k)] = c[k];
    a[ids.al(k, t[k])] = 1.0;
    for (int j = t[k]; j < c[k]; ++j) a[ids.be(k, j)] = 1.0;
    a[ids.ga(k, c[k] - 1)] = 1.0;
  }
  if (!check_feasible(model, a, 1e-6).feasible) return out;
  out.ub = evaluate(model.objective(), a);
  out.lb = 0.0;
  out.incumbent = std::move(a);
  return out;
}

Problem::Problem(Instance inst, std::vector<int> active, double default_heuristic_budget,
                 bool use_greedy_heuristic)
    : inst_(std::move(inst)),
      active_(std::move(active)),
      default_budget_(default_heuristic_budget),
      use_greedy_(use_greedy_heuristic) {
  inst_.validate();
  if (active_.empty()) {
    active_.resize(inst_.arrivals.size());
    std::iota(active_.begin(), active_.end(), 0);
  }
  for (int row : active_)
    if (row < 0 || row >= static_cast<int>(inst_.arrivals.size()))
      throw std::invalid_argument("bacasp: active scenario out of range");
}

std::vector<int> Problem::scenarios() const {
  std::vector<int> s(active_.size());
  std::iota(s.begin(), s.end(), 0);
  return s;
}

MasterBuild Problem::build_master(const std::vector<int>& d) const {
  std::vector<int> rows;
  rows.reserve(d.size());
  for (int s : d) rows.push_back(arrival_row(s));
  return bacasp::build_master(inst_, rows);
}

Model Problem::build_second_stage(const Assignment& x, int s) const {
  return bacasp::build_second_stage(inst_, x, arrival_row(s));
}

HeuristicResult Problem::heuristic(const Assignment& x, int s, double budget,
                                   const ClockPtr& clock, double cutoff) const {
  if (use_greedy_) {
    clock->charge(1e-4);
    return greedy_heuristic(inst_, x, arrival_row(s));
  }
  Model q = build_second_stage(x, s);
  return budgeted_solver_heuristic(q, budget > 0 ? budget : default_budget_, clock, cutoff);
}

std::optional<std::vector<int>> Problem::init_hint() const {
  // highest-congestion scenario among the active ones
  int best = -1;
  double best_score = kInf;
  for (std::size_t pos = 0; pos < active_.size(); ++pos) {
    std::vector<int> sorted = inst_.arrivals[static_cast<std::size_t>(active_[pos])];
    std::sort(sorted.begin(), sorted.end());
    double score = 0.0;
    for (std::size_t i = 1; i < sorted.size(); ++i) score += sorted[i] - sorted[i - 1];
    if (score < best_score) {
      best_score = score;
      best = static_cast<int>(pos);
    }
  }
  if (best < 0) return std::nullopt;
  return std::vector<int>{best};
}

std::string to_json_string(const Instance& inst) {
  ordered_json j;
  j["berth_sections"] = inst.num_sections;
  j["horizon"] = inst.horizon;
  j["safety"] = inst.safety;
  ordered_json vessels = ordered_json::array();
  for (const auto& v : inst.vessels)
    vessels.push_back({{"length", v.length},
                       {"cargo", v.cargo},
                       {"arrival", v.arrival},
                       {"max_delay", v.max_delay},
                       {"max_cranes", v.max_cranes}});
  j["vessels"] = std::move(vessels);
  ordered_json cranes = ordered_json::array();
  for (const auto& g : inst.cranes)
    cranes.push_back({{"start", g.start}, {"end", g.end}, {"rate", g.rate}});
  j["cranes"] = std::move(cranes);
  j["uncertainty"] = "budgeted-thirds";
  return j.dump(2) + "\n";
}

Instance from_json_string(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  Instance inst;
  inst.num_sections = j.at("berth_sections").get<int>();
  inst.horizon = j.at("horizon").get<int>();
  inst.safety = j.at("safety").get<int>();
  for (const auto& v : j.at("vessels")) {
    Vessel ves;
    ves.length = v.at("length").get<int>();
    ves.cargo = v.at("cargo").get<double>();
    ves.arrival = v.at("arrival").get<int>();
    ves.max_delay = v.at("max_delay").get<int>();
    ves.max_cranes = v.at("max_cranes").get<int>();
    inst.vessels.push_back(ves);
  }
  for (const auto& g : j.at("cranes")) {
    Crane cr;
    cr.start = g.at("start").get<int>();
    cr.end = g.at("end").get<int>();
    cr.rate = g.at("rate").get<double>();
    inst.cranes.push_back(cr);
  }
  if (inst.num_vessels() >= 3) {
    std::vector<int> nominal, delays;
    for (const auto& v : inst.vessels) {
      nominal.push_back(v.arrival);
      delays.push_back(v.max_delay);
    }
    inst.arrivals = enumerate_scenarios(nominal, delays);
  } else {
    std::vector<int> nominal;
    for (const auto& v : inst.vessels) nominal.push_back(v.arrival);
    inst.arrivals = {nominal};
  }
  inst.validate();
  return inst;
}

void save_json(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("bacasp: cannot write " + path);
  out << to_json_string(inst);
}

Instance load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("bacasp: cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

}  // namespace sam::bacasp
