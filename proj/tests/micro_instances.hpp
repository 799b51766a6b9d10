#ifndef SAM_TESTS_MICRO_INSTANCES_HPP
#define SAM_TESTS_MICRO_INSTANCES_HPP

#include "sam/bacasp.hpp"
#include "sam/rclrp.hpp"

namespace sam::testutil {

/// One warehouse, one customer, demand 3: opened-with-size-3 second stage
/// costs 12.5, the no-first-stage variant costs 32.0, and the single-
/// scenario master optimum is 25.5.
inline rclrp::Instance rclrp_micro() {
  rclrp::Instance inst;
  inst.num_warehouses = 1;
  inst.num_customers = 1;
  // V = {w, j}; matrices row-major over 2 nodes
  inst.c = {0.0, 2.0, 2.0, 0.0};
  inst.alpha = {0.0, 1.0, 1.0, 0.0};
  inst.gamma = {0.0, 0.5, 0.5, 0.0};
  inst.e = {10.0};
  inst.d = {1.0};
  inst.e_prime = {15.0};
  inst.d_prime = {1.5};
  inst.a_max = {10.0};
  inst.vehicle_capacity = 10.0;
  inst.tour_fixed_cost = 5.0;
  inst.demands = {{3.0}};
  return inst;
}

/// Single vessel, one full-range crane of rate P with cargo 2P: unloading
/// takes two periods, completion time c = t + 2.
inline bacasp::Instance bacasp_single(int arrival = 0, int max_delay = 0) {
  bacasp::Instance inst;
  inst.num_sections = 2;
  inst.horizon = 8;
  inst.safety = 1;
  bacasp::Vessel v;
  v.length = 1;
  v.cargo = 10.0;
  v.arrival = arrival;
  v.max_delay = max_delay;
  v.max_cranes = 1;
  inst.vessels = {v};
  inst.cranes = {{0, 1, 5.0}};  // rate 5, cargo 10 -> two periods
  inst.arrivals = {{arrival}};
  return inst;
}

}  // namespace sam::testutil

#endif
