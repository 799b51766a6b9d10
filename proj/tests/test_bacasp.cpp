#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "doctest.h"
#include "micro_instances.hpp"
#include "sam/bacasp.hpp"
#include "sam/solver.hpp"

using namespace sam;
using namespace sam::bacasp;

TEST_CASE("scenario counts reproduce the published table") {
  const std::vector<long> expected = {125, 175, 245, 343, 441, 567, 729, 891, 1089, 1331};
  for (int n = 6; n <= 15; ++n) {
    std::vector<int> nominal(static_cast<std::size_t>(n), 0);
    std::vector<int> delays(static_cast<std::size_t>(n), 2);
    auto scen = enumerate_scenarios(nominal, delays);
    CHECK_MESSAGE(static_cast<long>(scen.size()) == expected[n - 6], "N = " << n);
  }
  CHECK_THROWS(enumerate_scenarios({0, 1}, {1, 1}));
}

TEST_CASE("every deviation vector respects the per-group budget") {
  for (int n : {6, 7, 9, 11}) {
    std::vector<int> nominal(static_cast<std::size_t>(n), 0);
    std::vector<int> delays(static_cast<std::size_t>(n), 4);  // delta visible in arrivals
    auto scen = enumerate_scenarios(nominal, delays);
    // nominal arrivals all zero, so arr[k] = ceil(4 delta_k): 0, 2, or 4
    const int third = static_cast<int>(std::floor(n / 3.0 + 0.5));
    std::set<std::vector<int>> unique_rows;
    for (const auto& arr : scen) {
      unique_rows.insert(arr);
      int g1 = 0, g2 = 0, g3 = 0;
      for (int k = 0; k < n; ++k) {
        bool delayed = arr[k] > 0;
        if (k < third) g1 += delayed;
        else if (k < 2 * third) g2 += delayed;
        else g3 += delayed;
        CHECK((arr[k] == 0 || arr[k] == 2 || arr[k] == 4));
      }
      CHECK(g1 <= 1);
      CHECK(g2 <= 1);
      CHECK(g3 <= 1);
    }
    CHECK(unique_rows.size() == scen.size());  // all distinct
  }
}

TEST_CASE("nominal scenario is id 0 (lexicographic delta order)") {
  std::vector<int> nominal = {3, 1, 4, 1, 5, 9};
  std::vector<int> delays = {2, 3, 1, 2, 3, 1};
  auto scen = enumerate_scenarios(nominal, delays);
  CHECK(scen[0] == nominal);
  // half delays round up: vessel 1 (max delay 3) delayed by half gives +2
  bool found_half = false;
  for (const auto& arr : scen)
    if (arr[1] == 1 + 2 && arr[0] == 3 && arr[2] == 4) found_half = true;
  CHECK(found_half);
}

TEST_CASE("slack reduction picks the most congested scenario") {
  Instance inst = testutil::bacasp_single();
  SUBCASE("single scenario") { CHECK(slack_reduction_init(inst) == 0); }
  SUBCASE("two handcrafted scenarios") {
    inst.vessels.push_back(inst.vessels[0]);
    inst.vessels[1].arrival = 0;
    inst.horizon = 20;
    inst.arrivals = {{0, 10}, {0, 5}};
    CHECK(slack_reduction_init(inst) == 1);  // gap 5 < gap 10
  }
  SUBCASE("exhaustive rescan agrees on a generated instance") {
    Instance gen = generate(6, 42);
    int picked = slack_reduction_init(gen);
    auto score = [&](const std::vector<int>& arr) {
      std::vector<int> sorted = arr;
      std::sort(sorted.begin(), sorted.end());
      double total = 0;
      for (std::size_t i = 1; i < sorted.size(); ++i) total += sorted[i] - sorted[i - 1];
      return total;
    };
    for (const auto& arr : gen.arrivals) CHECK(score(gen.arrivals[picked]) <= score(arr));
  }
}

TEST_CASE("generator properties") {
  Instance a = generate(6, 7);
  Instance b = generate(6, 7);
  CHECK(to_json_string(a) == to_json_string(b));
  CHECK(a.arrivals.size() == 125);
  for (std::size_t g = 1; g < a.cranes.size(); ++g) CHECK(a.cranes[g].rate == a.cranes[0].rate);
  for (const auto& v : a.vessels) {
    CHECK(v.length >= 2);
    CHECK(v.length <= 4);
    CHECK(v.arrival + v.max_delay <= a.horizon - 1);
  }
}

TEST_CASE("single-vessel second stage: cargo takes two periods") {
  // arrival in period 1: berth at 1, work periods {1,2}, depart at 3
  Instance inst = testutil::bacasp_single(1, 0);
  FirstStageLayout lay(inst);
  Assignment x(static_cast<std::size_t>(lay.size()), 0.0);
  x[lay.pi(0, 0)] = 1.0;
  x[lay.sigma(0, 0)] = 1.0;
  Model q = build_second_stage(inst, x, 0);
  auto r = brute_force_solve(q, 50000000);
  REQUIRE(r.status == BruteStatus::Optimal);
  CHECK(r.objective == doctest::Approx(2.0));
  auto bb = solve(q, SolveParams{});
  REQUIRE(bb.status == SolveEventKind::Optimal);
  CHECK(bb.ub == doctest::Approx(r.objective));
}

TEST_CASE("delayed arrival shifts completion but not service time") {
  Instance inst = testutil::bacasp_single(3, 0);
  FirstStageLayout lay(inst);
  Assignment x(static_cast<std::size_t>(lay.size()), 0.0);
  x[lay.pi(0, 0)] = 1.0;
  x[lay.sigma(0, 0)] = 1.0;
  Model q = build_second_stage(inst, x, 0);
  auto r = solve(q, SolveParams{});
  REQUIRE(r.status == SolveEventKind::Optimal);
  REQUIRE(r.incumbent.has_value());
  CHECK(r.ub == doctest::Approx(2.0));  // c = 5 with A = 3: same two service periods
  CHECK((*r.incumbent)[inst.horizon + 1] == doctest::Approx(5.0));
}

TEST_CASE("zero allowed cranes makes the second stage infeasible") {
  Instance inst = testutil::bacasp_single(0, 0);
  inst.vessels[0].max_cranes = 0;
  FirstStageLayout lay(inst);
  Assignment x(static_cast<std::size_t>(lay.size()), 0.0);
  x[lay.pi(0, 0)] = 1.0;
  x[lay.sigma(0, 0)] = 1.0;
  Model q = build_second_stage(inst, x, 0);
  CHECK(solve(q, SolveParams{}).status == SolveEventKind::Infeasible);
}

TEST_CASE("tiny master equals the oracle and satisfies the disjunction") {
  // two vessels, one crane, one scenario, generous horizon
  Instance inst;
  inst.num_sections = 2;
  inst.horizon = 7;
  inst.safety = 1;
  Vessel v;
  v.length = 1;
  v.cargo = 5.0;
  v.arrival = 0;
  v.max_delay = 0;
  v.max_cranes = 1;
  inst.vessels = {v, v};
  inst.vessels[1].arrival = 1;
  inst.cranes = {{0, 1, 5.0}};
  inst.arrivals = {{0, 1}};

  MasterBuild mb = build_master(inst, {0});
  auto bb = solve(mb.model, SolveParams{});
  REQUIRE(bb.status == SolveEventKind::Optimal);
  auto brute = brute_force_solve(mb.model, 100000000);
  REQUIRE(brute.status == BruteStatus::Optimal);
  CHECK(bb.ub == doctest::Approx(brute.objective));

  // exactly one of the four pair binaries is set
  REQUIRE(bb.incumbent.has_value());
  FirstStageLayout lay(inst);
  double sum = (*bb.incumbent)[lay.e(0, 1)] + (*bb.incumbent)[lay.e(1, 0)] +
               (*bb.incumbent)[lay.u(0, 1)] + (*bb.incumbent)[lay.u(1, 0)];
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("objective equals recomputed total completion time") {
  Instance inst = testutil::bacasp_single(1, 0);
  FirstStageLayout lay(inst);
  Assignment x(static_cast<std::size_t>(lay.size()), 0.0);
  x[lay.pi(0, 0)] = 1.0;
  x[lay.sigma(0, 0)] = 1.0;
  Model q = build_second_stage(inst, x, 0);
  auto r = solve(q, SolveParams{});
  REQUIRE(r.status == SolveEventKind::Optimal);
  REQUIRE(r.incumbent.has_value());
  // var layout: d (g*n*m), then t, c
  int m = inst.horizon;
  double c_val = (*r.incumbent)[m + 1];
  double recomputed = c_val - inst.arrivals[0][0];
  CHECK(recomputed == doctest::Approx(r.ub));
}

TEST_CASE("greedy heuristic produces validated schedules") {
  Instance inst;
  inst.num_sections = 4;
  inst.horizon = 9;
  inst.safety = 1;
  Vessel v;
  v.length = 2;
  v.cargo = 5.0;
  v.arrival = 1;
  v.max_delay = 1;
  v.max_cranes = 1;
  inst.vessels = {v, v, v};
  inst.vessels[1].arrival = 2;
  inst.vessels[2].arrival = 3;
  inst.cranes = {{0, 3, 5.0}, {0, 3, 5.0}};
  std::vector<int> nominal = {1, 2, 3}, delays = {1, 1, 1};
  inst.arrivals = enumerate_scenarios(nominal, delays);

  // any feasible first stage will do for exercising the greedy: stop the
  // master solve at a generous gap
  SolveParams mp;
  mp.target_gap = 0.4;
  MasterBuild mb = build_master(inst, {0});
  auto bb = solve(mb.model, mp);
  REQUIRE((bb.status == SolveEventKind::Optimal || bb.status == SolveEventKind::GapReached));
  Assignment x(mb.x_var_ids.size());
  for (std::size_t i = 0; i < mb.x_var_ids.size(); ++i)
    x[static_cast<int>(i)] = std::round((*bb.incumbent)[mb.x_var_ids[i]]);

  int validated = 0;
  for (int s = 0; s < static_cast<int>(inst.arrivals.size()); ++s) {
    HeuristicResult hr = greedy_heuristic(inst, x, s);
    if (!std::isfinite(hr.ub)) continue;
    ++validated;
    REQUIRE(hr.incumbent.has_value());
    Model q = build_second_stage(inst, x, s);
    CHECK(check_feasible(q, *hr.incumbent, 1e-6).feasible);
    CHECK(evaluate(q.objective(), *hr.incumbent) == doctest::Approx(hr.ub));
  }
  CHECK(validated > 0);
  // heuristic value upper-bounds the exact optimum (spot check)
  HeuristicResult hr0 = greedy_heuristic(inst, x, 0);
  if (std::isfinite(hr0.ub)) {
    auto exact = solve(build_second_stage(inst, x, 0), SolveParams{});
    if (exact.status == SolveEventKind::Optimal) CHECK(hr0.ub >= exact.ub - 1e-6);
  }
}

TEST_CASE("json round trip re-enumerates scenarios") {
  Instance inst = generate(6, 3);
  std::string once = to_json_string(inst);
  Instance reloaded = from_json_string(once);
  CHECK(to_json_string(reloaded) == once);
  CHECK(reloaded.arrivals == inst.arrivals);
  save_json(inst, "bacasp_roundtrip.json");
  Instance from_file = load_json("bacasp_roundtrip.json");
  CHECK(from_file.arrivals == inst.arrivals);
  std::remove("bacasp_roundtrip.json");
}

TEST_CASE("problem subsets map scenario ids onto arrival rows") {
  Instance inst = generate(6, 11);
  Problem prob(inst, {5, 17, 40});
  CHECK(prob.scenarios() == std::vector<int>{0, 1, 2});
  CHECK(prob.arrival_row(1) == 17);
  auto hint = prob.init_hint();
  REQUIRE(hint.has_value());
  CHECK(hint->size() == 1);
  CHECK((*hint)[0] >= 0);
  CHECK((*hint)[0] < 3);
}
