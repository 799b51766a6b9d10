#include <cmath>
#include <random>

#include "doctest.h"
#include "sam/solver.hpp"
#include "test_util.hpp"

using namespace sam;

namespace {

Model two_binary_toy() {
  // min x0 + 2 x1  s.t. x0 + x1 >= 1, both binary -> opt 1 at (1,0)
  Model m;
  int x0 = m.add_binary("x0");
  int x1 = m.add_binary("x1");
  m.add_constraint(LinearExpr::term(x0, 1.0) + LinearExpr::term(x1, 1.0), Sense::GreaterEqual,
                   1.0);
  m.set_objective(LinearExpr::term(x0, 1.0) + LinearExpr::term(x1, 2.0));
  return m;
}

SolveParams ticked(double target_gap = 0.0) {
  SolveParams p;
  p.target_gap = target_gap;
  p.clock = std::make_shared<TickClock>();
  return p;
}

}  // namespace

TEST_CASE("open_session initial state") {
  Model m;
  m.add_binary("x0");
  m.set_objective(LinearExpr::term(0, 1.0));
  SolveSession s = open_session(m, ticked());
  CHECK(s.state() == SessionState::Fresh);
  CHECK(s.upper_bound() == kInf);
  CHECK(s.lower_bound() == 0.0);  // objective provably >= 0 from bounds

  // sessions on the same model are independent
  SolveSession s2 = open_session(m, ticked());
  (void)s2.step(1.0);
  CHECK(s.state() == SessionState::Fresh);

  Model bad;
  CHECK_THROWS(open_session(bad));
}

TEST_CASE("contradictory bounds yield Infeasible") {
  Model m;
  int x = m.add_binary("x0");
  m.add_constraint(LinearExpr::term(x, 1.0), Sense::GreaterEqual, 2.0);
  m.set_objective(LinearExpr::term(x, 1.0));
  SolveSession s = open_session(m, ticked());
  SolveEvent ev = s.step(10.0);
  CHECK(ev.kind == SolveEventKind::Infeasible);
  CHECK(ev.ub == ev.lb);
  // terminal event is idempotent
  CHECK(s.step(1.0).kind == SolveEventKind::Infeasible);
}

TEST_CASE("binary toy solves to optimum") {
  Model m = two_binary_toy();
  auto res = solve(m, ticked());
  REQUIRE(res.status == SolveEventKind::Optimal);
  CHECK(res.ub == doctest::Approx(1.0));
  CHECK(res.lb == doctest::Approx(1.0));
  REQUIRE(res.incumbent.has_value());
  CHECK((*res.incumbent)[0] == doctest::Approx(1.0));
  CHECK((*res.incumbent)[1] == doctest::Approx(0.0));

  auto brute = brute_force_solve(m);
  REQUIRE(brute.status == BruteStatus::Optimal);
  CHECK(brute.objective == doctest::Approx(1.0));
}

TEST_CASE("integer rounding forced by fractional constraint") {
  Model m;
  int x = m.add_integer("x0", 0, 10);
  m.add_constraint(LinearExpr::term(x, 1.0), Sense::GreaterEqual, 3.2);
  m.set_objective(LinearExpr::term(x, 1.0));
  auto res = solve(m, ticked());
  REQUIRE(res.status == SolveEventKind::Optimal);
  CHECK(res.ub == doctest::Approx(4.0));
  auto brute = brute_force_solve(m);
  CHECK(brute.objective == doctest::Approx(4.0));
}

TEST_CASE("target gap stop") {
  Model m = two_binary_toy();
  auto res = solve(m, ticked(0.5));
  CHECK((res.status == SolveEventKind::GapReached || res.status == SolveEventKind::Optimal));
  CHECK(relative_gap(res.ub, std::max(res.lb, 0.0)) <= 0.5 + 1e-12);
}

TEST_CASE("tiny time limit reports TimeLimitReached") {
  // fractional root LP, so the solve cannot finish within the first node
  Model m;
  int x0 = m.add_binary("x0");
  int x1 = m.add_binary("x1");
  m.add_constraint(LinearExpr::term(x0, 1.0) + LinearExpr::term(x1, 1.0), Sense::GreaterEqual,
                   1.5);
  m.set_objective(LinearExpr::term(x0, 1.0) + LinearExpr::term(x1, 2.0));
  SolveParams p = ticked();
  p.time_limit = 1e-9;
  auto res = solve(m, p);
  CHECK(res.status == SolveEventKind::TimeLimitReached);
  CHECK(res.ub == kInf);  // no incumbent yet
}

TEST_CASE("monotone bounds across events") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    Model m = testutil::random_small_mip(rng);
    SolveSession s = open_session(m, ticked());
    double last_ub = kInf, last_lb = -kInf;
    for (int k = 0; k < 10000; ++k) {
      SolveEvent ev = s.step(0.002);
      CHECK(ev.ub <= last_ub + 1e-9);
      CHECK(ev.lb >= last_lb - 1e-9);
      last_ub = ev.ub;
      last_lb = ev.lb;
      if (s.state() == SessionState::Finished) break;
    }
    if (s.incumbent()) {
      CHECK(check_feasible(m, *s.incumbent(), 1e-6).feasible);
      CHECK(std::abs(evaluate(m.objective(), *s.incumbent()) - s.upper_bound()) <= 1e-6);
    }
  }
}

TEST_CASE("resume soundness: interleaved small budgets reach the same answer") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    Model m = testutil::random_small_mip(rng);
    auto full = solve(m, ticked());

    SolveSession s = open_session(m, ticked());
    SolveEvent ev{SolveEventKind::BoundImproved, kInf, -kInf};
    double budget = 0.0003;
    while (s.state() != SessionState::Finished) {
      ev = s.step(budget);
      budget = budget >= 0.001 ? 0.0003 : budget * 2;
    }
    CHECK(ev.kind == full.status);
    if (full.status == SolveEventKind::Optimal)
      CHECK(std::abs(ev.ub - full.ub) <= 1e-6);
  }
}

TEST_CASE("determinism: identical inputs give identical event sequences") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Model m = testutil::random_small_mip(rng);
    auto run = [&](std::vector<SolveEventKind>& kinds) {
      SolveSession s = open_session(m, ticked());
      while (s.state() != SessionState::Finished) {
        SolveEvent ev = s.step(0.0007);
        kinds.push_back(ev.kind);
        if (kinds.size() > 20000) break;
      }
    };
    std::vector<SolveEventKind> a, b;
    run(a);
    run(b);
    CHECK(a == b);
  }
}

TEST_CASE("brute force basics") {
  SUBCASE("mixed toy") {
    // min t s.t. t >= 3 x0, x0 binary, x0 >= 1 -> opt 3
    Model m;
    int x0 = m.add_binary("x0");
    int t = m.add_continuous("t", 0.0, 100.0);
    m.add_constraint(LinearExpr::term(t, 1.0) - LinearExpr::term(x0, 3.0), Sense::GreaterEqual,
                     0.0);
    m.add_constraint(LinearExpr::term(x0, 1.0), Sense::GreaterEqual, 1.0);
    m.set_objective(LinearExpr::term(t, 1.0));
    auto r = brute_force_solve(m);
    REQUIRE(r.status == BruteStatus::Optimal);
    CHECK(r.objective == doctest::Approx(3.0));
  }
  SUBCASE("infeasible") {
    Model m;
    int x = m.add_binary("x");
    m.add_constraint(LinearExpr::term(x, 1.0), Sense::GreaterEqual, 2.0);
    m.set_objective(LinearExpr::term(x, 1.0));
    CHECK(brute_force_solve(m).status == BruteStatus::Infeasible);
  }
  SUBCASE("unbounded integer var is rejected") {
    Model m;
    m.add_integer("x", 0, kInf);
    m.set_objective(LinearExpr::term(0, 1.0));
    CHECK_THROWS_AS(brute_force_solve(m), std::invalid_argument);
  }
  SUBCASE("lattice guard") {
    Model m;
    for (int j = 0; j < 8; ++j) m.add_integer("x" + std::to_string(j), 0, 3);
    m.set_objective(LinearExpr::term(0, 1.0));
    CHECK_THROWS_AS(brute_force_solve(m, 10), std::invalid_argument);
  }
  SUBCASE("lexicographic tie-break") {
    // two symmetric optima, lexicographically smaller integer assignment wins
    Model m;
    int a = m.add_binary("a");
    int b = m.add_binary("b");
    m.add_constraint(LinearExpr::term(a, 1.0) + LinearExpr::term(b, 1.0), Sense::Equal, 1.0);
    m.set_objective(LinearExpr::term(a, 1.0) + LinearExpr::term(b, 1.0));
    auto r = brute_force_solve(m);
    REQUIRE(r.argmin.has_value());
    CHECK((*r.argmin)[0] == 0.0);  // (0,1) beats (1,0)
    CHECK((*r.argmin)[1] == 1.0);
  }
}

TEST_CASE("oracle equivalence: solve vs brute force on 200 random MIPs") {
  std::mt19937_64 rng(31337);
  int feasible_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Model m = testutil::random_small_mip(rng);
    auto brute = brute_force_solve(m, 50000000);
    auto res = solve(m, ticked());
    if (brute.status == BruteStatus::Infeasible) {
      CHECK_MESSAGE(res.status == SolveEventKind::Infeasible, "trial " << trial);
    } else {
      REQUIRE(brute.status == BruteStatus::Optimal);
      REQUIRE_MESSAGE(res.status == SolveEventKind::Optimal, "trial " << trial);
      CHECK_MESSAGE(std::abs(res.ub - brute.objective) <= 1e-6,
                    "trial " << trial << " bb " << res.ub << " brute " << brute.objective);
      ++feasible_count;
    }
  }
  CHECK(feasible_count > 50);
}

TEST_CASE("warm start seeds the incumbent") {
  Model m = two_binary_toy();
  SolveParams p = ticked();
  p.warm_start = Assignment({0.0, 1.0});  // feasible, objective 2
  SolveSession s(m, p);
  CHECK(s.upper_bound() == doctest::Approx(2.0));
  while (s.state() != SessionState::Finished) (void)s.step(1.0);
  CHECK(s.upper_bound() == doctest::Approx(1.0));
}
