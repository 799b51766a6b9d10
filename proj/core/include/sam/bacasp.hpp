#ifndef SAM_BACASP_HPP
#define SAM_BACASP_HPP

#include <string>
#include <vector>

#include "sam/two_stage.hpp"

namespace sam::bacasp {

struct Vessel {
  int length = 1;      // H_k, berth sections covered
  double cargo = 0.0;  // Q_k
  int arrival = 0;     // nominal A_k
  int max_delay = 0;   // A-hat_k
  int max_cranes = 1;  // NC_k
};

struct Crane {
  int start = 0;      // S_g, first operable section
  int end = 0;        // E_g, last operable section
  double rate = 1.0;  // P_g, cargo volume per period
};

/// Berth allocation (first stage) plus quay crane assignment and
/// scheduling (second stage) under arrival-time scenarios, minimizing the
/// total completion time sum_k (c_k - A^s_k). Sections are 0..J where
/// num_sections = J + 1; periods are 1..horizon.
struct Instance {
  int num_sections = 0;  // J + 1
  int horizon = 0;       // M
  int safety = 0;        // F, safety periods between departure and berthing
  std::vector<Vessel> vessels;
  std::vector<Crane> cranes;
  std::vector<std::vector<int>> arrivals;  // arrivals[s][k]; derived, never stored

  int num_vessels() const { return static_cast<int>(vessels.size()); }
  void validate() const;
};

/// Enumerates the budgeted uncertainty set: vessels are split into three
/// near-equal groups (round-half-up boundaries) and within each group at
/// most one vessel is delayed, by either its full or half its maximum delay
/// (half delays rounded up to whole periods). Arrival vectors are returned
/// in lexicographic order of the deviation vectors. Requires N >= 3.
std::vector<std::vector<int>> enumerate_scenarios(const std::vector<int>& nominal_arrival,
                                                  const std::vector<int>& max_delay);

/// Scenario of highest expected congestion: minimal total inter-arrival
/// slack, i.e. the smallest sum of gaps between consecutive sorted
/// arrivals. Ties resolve to the lowest scenario id.
int slack_reduction_init(const Instance& inst);

/// Synthetic generator: 10 berth sections, 4 identical full-range cranes of
/// rate 10, vessel lengths in {2,3,4}, cargo in [10,40], nominal arrivals in
/// [0,2N], max delays in [1,4], 2 cranes per vessel, safety 1, and a horizon
/// with enough headroom to schedule every vessel. Deterministic in seed.
Instance generate(int n_vessels, int seed);

/// First-stage canonical order: e_{k,l} (k != l, row-major), u_{k,l}
/// (likewise), b_k, pi_{k,n}, sigma_{k,n}.
struct FirstStageLayout {
  int n = 0;
  int sections = 0;
  explicit FirstStageLayout(const Instance& inst)
      : n(inst.num_vessels()), sections(inst.num_sections) {}
  int pair_index(int k, int l) const { return k * (n - 1) + (l > k ? l - 1 : l); }
  int e(int k, int l) const { return pair_index(k, l); }
  int u(int k, int l) const { return n * (n - 1) + pair_index(k, l); }
  int b(int k) const { return 2 * n * (n - 1) + k; }
  int pi(int k, int sec) const { return 2 * n * (n - 1) + n + k * sections + sec; }
  int sigma(int k, int sec) const {
    return 2 * n * (n - 1) + n + n * sections + k * sections + sec;
  }
  int size() const { return 2 * n * (n - 1) + n + 2 * n * sections; }
};

MasterBuild build_master(const Instance& inst, const std::vector<int>& scenario_subset);
Model build_second_stage(const Instance& inst, const Assignment& x, int scenario);

/// Greedy second-stage construction for a fixed first stage: berth vessels
/// as early as the ordering and safety constraints allow, assign admissible
/// cranes per period (topmost vessel gets the lowest crane index). Returns
/// (+inf, 0) when it cannot complete a schedule; any produced incumbent is
/// validated against the exact model before being reported.
HeuristicResult greedy_heuristic(const Instance& inst, const Assignment& x, int scenario);

/// JSON schema {vessels, cranes, horizon, safety, berth_sections,
/// uncertainty}; scenarios are re-enumerated on load, never stored.
std::string to_json_string(const Instance& inst);
Instance from_json_string(const std::string& text);
void save_json(const Instance& inst, const std::string& path);
Instance load_json(const std::string& path);

class Problem : public TwoStageProblem {
 public:
  /// active: indices into inst.arrivals the engine should see (all when
  /// empty). Engine-facing scenario ids are positions in this list.
  explicit Problem(Instance inst, std::vector<int> active = {},
                   double default_heuristic_budget = 0.1, bool use_greedy_heuristic = false);

  std::vector<int> scenarios() const override;
  MasterBuild build_master(const std::vector<int>& d) const override;
  Model build_second_stage(const Assignment& x, int s) const override;
  double first_stage_cost(const Assignment&) const override { return 0.0; }
  HeuristicResult heuristic(const Assignment& x, int s, double budget, const ClockPtr& clock,
                            double cutoff = -kInf) const override;
  std::optional<std::vector<int>> init_hint() const override;

  const Instance& instance() const { return inst_; }
  int arrival_row(int scenario) const { return active_.at(static_cast<std::size_t>(scenario)); }

 private:
  Instance inst_;
  std::vector<int> active_;
  double default_budget_;
  bool use_greedy_;
};

}  // namespace sam::bacasp

#endif  // SAM_BACASP_HPP
