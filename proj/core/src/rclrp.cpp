#include "sam/rclrp.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sam/rng.hpp"

namespace sam::rclrp {

namespace {

using ordered_json = nlohmann::ordered_json;

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string num(int a, int b) { return std::to_string(a) + "_" + std::to_string(b); }

/// Var ids of one per-scenario second-stage block.
struct BlockIds {
  int w, a, r, t, u;  // base offsets; r/t are VxV row-major, u is IxJ
  int nodes;
  int rr(int v1, int v2) const { return r + v1 * nodes + v2; }
  int tt(int v1, int v2) const { return t + v1 * nodes + v2; }
  int uu(int i, int j, int customers) const { return u + i * customers + j; }
};

/// First-stage values as expressions: either master variables or constants.
struct FirstStage {
  std::vector<LinearExpr> w0, a0;
};

BlockIds add_block_vars(Model& m, const Instance& inst, const std::string& tag) {
  const int n_i = inst.num_warehouses, n_j = inst.num_customers, v = inst.num_nodes();
  BlockIds ids{};
  ids.nodes = v;
  ids.w = m.num_vars();
  for (int i = 0; i < n_i; ++i) m.add_binary("w_" + tag + "_" + std::to_string(i));
  ids.a = m.num_vars();
  for (int i = 0; i < n_i; ++i)
    m.add_continuous("a_" + tag + "_" + std::to_string(i), 0.0, inst.a_max[i]);
  ids.r = m.num_vars();
  for (int v1 = 0; v1 < v; ++v1)
    for (int v2 = 0; v2 < v; ++v2) {
      int id = m.add_binary("r_" + tag + "_" + num(v1, v2));
      if (v1 == v2) m.set_bounds(id, 0.0, 0.0);  // self-loops pinned off
    }
  ids.t = m.num_vars();
  for (int v1 = 0; v1 < v; ++v1)
    for (int v2 = 0; v2 < v; ++v2) {
      int id = m.add_continuous("t_" + tag + "_" + num(v1, v2), 0.0, inst.vehicle_capacity);
      if (v1 == v2) m.set_bounds(id, 0.0, 0.0);
    }
  ids.u = m.num_vars();
  for (int i = 0; i < n_i; ++i)
    for (int j = 0; j < n_j; ++j) m.add_binary("u_" + tag + "_" + num(i, j));
  return ids;
}

/// Emits the second-stage feasible set for one scenario and returns the
/// scenario cost g^s as an expression.
LinearExpr add_block_constraints(Model& m, const Instance& inst, const BlockIds& ids,
                                 const FirstStage& fs, int scenario, const std::string& tag) {
  const int n_i = inst.num_warehouses, n_j = inst.num_customers, v = inst.num_nodes();
  const std::vector<double>& beta = inst.demands[static_cast<std::size_t>(scenario)];

  // degree constraints for customers with positive demand
  for (int j = 0; j < n_j; ++j) {
    if (beta[j] <= 0.0) continue;
    int cj = inst.node_of_customer(j);
    LinearExpr in, out;
    for (int w = 0; w < v; ++w) {
      if (w == cj) continue;
      in.add_term(ids.rr(w, cj), 1.0);
      out.add_term(ids.rr(cj, w), 1.0);
    }
    m.add_constraint(std::move(in), Sense::Equal, 1.0, "deg_in_" + tag + "_" + std::to_string(j));
    m.add_constraint(std::move(out), Sense::Equal, 1.0,
                     "deg_out_" + tag + "_" + std::to_string(j));
  }
  // warehouse in/out balance over customer arcs
  for (int i = 0; i < n_i; ++i) {
    LinearExpr bal;
    for (int j = 0; j < n_j; ++j) {
      int cj = inst.node_of_customer(j);
      bal.add_term(ids.rr(i, cj), 1.0);
      bal.add_term(ids.rr(cj, i), -1.0);
    }
    m.add_constraint(std::move(bal), Sense::Equal, 0.0, "wbal_" + tag + "_" + std::to_string(i));
  }
  // flow conservation at customers
  for (int j = 0; j < n_j; ++j) {
    int cj = inst.node_of_customer(j);
    LinearExpr flow;
    for (int w = 0; w < v; ++w) {
      if (w == cj) continue;
      flow.add_term(ids.tt(w, cj), 1.0);
      flow.add_term(ids.tt(cj, w), -1.0);
    }
    m.add_constraint(std::move(flow), Sense::Equal, beta[j],
                     "flow_" + tag + "_" + std::to_string(j));
  }
  // arc capacity linking
  for (int v1 = 0; v1 < v; ++v1)
    for (int v2 = 0; v2 < v; ++v2) {
      LinearExpr link = LinearExpr::term(ids.tt(v1, v2), 1.0) -
                        LinearExpr::term(ids.rr(v1, v2), inst.vehicle_capacity);
      add_constraint_pruned(m, std::move(link), Sense::LessEqual, 0.0,
                            "cap_" + tag + "_" + num(v1, v2));
    }
  // warehouse output bounded by its size
  for (int i = 0; i < n_i; ++i) {
    LinearExpr outflow;
    for (int j = 0; j < n_j; ++j) outflow.add_term(ids.tt(i, inst.node_of_customer(j)), 1.0);
    outflow.add_term(ids.a + i, -1.0);
    m.add_constraint(std::move(outflow), Sense::LessEqual, 0.0,
                     "size_" + tag + "_" + std::to_string(i));
  }
  // recoverability: sizes cannot shrink, warehouses cannot close
  for (int i = 0; i < n_i; ++i) {
    LinearExpr grow = LinearExpr::term(ids.a + i, 1.0) - fs.a0[i];
    add_constraint_pruned(m, std::move(grow), Sense::GreaterEqual, 0.0,
                          "grow_" + tag + "_" + std::to_string(i));
    LinearExpr capa = LinearExpr::term(ids.a + i, 1.0) -
                      LinearExpr::term(ids.w + i, inst.a_max[i]);
    m.add_constraint(std::move(capa), Sense::LessEqual, 0.0,
                     "amax_" + tag + "_" + std::to_string(i));
    LinearExpr open = fs.w0[i] - LinearExpr::term(ids.w + i, 1.0);
    add_constraint_pruned(m, std::move(open), Sense::LessEqual, 0.0,
                          "open_" + tag + "_" + std::to_string(i));
  }
  // connected customers are served from the same warehouse
  for (int i = 0; i < n_i; ++i)
    for (int j1 = 0; j1 < n_j; ++j1)
      for (int j2 = 0; j2 < n_j; ++j2) {
        if (j1 == j2) continue;
        LinearExpr same = LinearExpr::term(ids.uu(i, j1, n_j), 1.0) -
                          LinearExpr::term(ids.uu(i, j2, n_j), 1.0);
        same.add_term(ids.rr(inst.node_of_customer(j1), inst.node_of_customer(j2)), 1.0);
        same.add_term(ids.rr(inst.node_of_customer(j2), inst.node_of_customer(j1)), 1.0);
        m.add_constraint(std::move(same), Sense::LessEqual, 1.0,
                         "same_" + tag + "_" + num(i, j1) + "_" + std::to_string(j2));
      }
  // tours are anchored at their warehouse
  for (int i = 0; i < n_i; ++i)
    for (int j = 0; j < n_j; ++j) {
      int cj = inst.node_of_customer(j);
      m.add_constraint(LinearExpr::term(ids.rr(i, cj), 1.0) -
                           LinearExpr::term(ids.uu(i, j, n_j), 1.0),
                       Sense::LessEqual, 0.0, "anch_out_" + tag + "_" + num(i, j));
      m.add_constraint(LinearExpr::term(ids.rr(cj, i), 1.0) -
                           LinearExpr::term(ids.uu(i, j, n_j), 1.0),
                       Sense::LessEqual, 0.0, "anch_in_" + tag + "_" + num(i, j));
    }
  // active customers are assigned to exactly one warehouse
  for (int j = 0; j < n_j; ++j) {
    if (beta[j] <= 0.0) continue;
    LinearExpr assign;
    for (int i = 0; i < n_i; ++i) assign.add_term(ids.uu(i, j, n_j), 1.0);
    m.add_constraint(std::move(assign), Sense::Equal, 1.0,
                     "assign_" + tag + "_" + std::to_string(j));
  }

  // scenario cost g^s: recovery + travel + emissions + vehicle fixed costs
  LinearExpr cost;
  for (int i = 0; i < n_i; ++i) {
    cost += LinearExpr::term(ids.w + i, inst.e_prime[i]) - inst.e_prime[i] * fs.w0[i];
    cost += LinearExpr::term(ids.a + i, inst.d_prime[i]) - inst.d_prime[i] * fs.a0[i];
  }
  for (int v1 = 0; v1 < v; ++v1)
    for (int v2 = 0; v2 < v; ++v2) {
      double rc = inst.at(inst.c, v1, v2) + inst.at(inst.alpha, v1, v2);
      if (rc != 0.0) cost.add_term(ids.rr(v1, v2), rc);
      double tc = inst.at(inst.gamma, v1, v2);
      if (tc != 0.0) cost.add_term(ids.tt(v1, v2), tc);
    }
  for (int i = 0; i < n_i; ++i)
    for (int j = 0; j < n_j; ++j)
      cost.add_term(ids.rr(i, inst.node_of_customer(j)), inst.tour_fixed_cost);
  return cost;
}

}  // namespace

void Instance::validate() const {
  if (num_warehouses < 1 || num_customers < 1)
    throw std::invalid_argument("rclrp: need at least one warehouse and one customer");
  const std::size_t v2 = static_cast<std::size_t>(num_nodes()) * num_nodes();
  if (c.size() != v2 || alpha.size() != v2 || gamma.size() != v2)
    throw std::invalid_argument("rclrp: arc matrices must be (I+J)^2");
  auto check_wh = [&](const std::vector<double>& vec, const char* what) {
    if (vec.size() != static_cast<std::size_t>(num_warehouses))
      throw std::invalid_argument(std::string("rclrp: ") + what + " must have one entry per warehouse");
  };
  check_wh(e, "e");
  check_wh(d, "d");
  check_wh(e_prime, "e_prime");
  check_wh(d_prime, "d_prime");
  check_wh(a_max, "a_max");
  for (int i = 0; i < num_warehouses; ++i) {
    if (!(e_prime[i] > e[i]) || !(d_prime[i] > d[i]))
      throw std::invalid_argument("rclrp: recovery costs must exceed first-stage costs");
  }
  for (int v1 = 0; v1 < num_nodes(); ++v1) {
    if (at(c, v1, v1) != 0.0 || at(alpha, v1, v1) != 0.0 || at(gamma, v1, v1) != 0.0)
      throw std::invalid_argument("rclrp: arc matrices must have zero diagonal");
    for (int w = 0; w < num_nodes(); ++w)
      if (at(c, v1, w) < 0.0 || at(alpha, v1, w) < 0.0 || at(gamma, v1, w) < 0.0)
        throw std::invalid_argument("rclrp: arc data must be non-negative");
  }
  if (demands.empty()) throw std::invalid_argument("rclrp: need at least one scenario");
  for (const auto& row : demands) {
    if (row.size() != static_cast<std::size_t>(num_customers))
      throw std::invalid_argument("rclrp: demand rows must have one entry per customer");
    for (double b : row)
      if (b < 0.0 || b > vehicle_capacity)
        throw std::invalid_argument("rclrp: demands must lie in [0, L]");
  }
}

Instance generate(const GenParams& p) {
  if (p.num_warehouses < 1 || p.num_customers < 1 || p.num_scenarios < 1)
    throw std::invalid_argument("rclrp::generate: sizes must be positive");
  std::mt19937_64 rng(mix_seed(
      mix_seed(static_cast<std::uint64_t>(p.instance_number),
               static_cast<std::uint64_t>(p.num_warehouses) * 1000003 + p.num_customers),
      static_cast<std::uint64_t>(p.num_scenarios)));

  Instance inst;
  inst.num_warehouses = p.num_warehouses;
  inst.num_customers = p.num_customers;
  const int v = inst.num_nodes();

  for (int i = 0; i < p.num_warehouses; ++i) {
    inst.wh_x.push_back(round2(uniform_real(rng, 0.0, 100.0)));
    inst.wh_y.push_back(round2(uniform_real(rng, 0.0, 100.0)));
  }
  for (int j = 0; j < p.num_customers; ++j) {
    inst.cust_x.push_back(round2(uniform_real(rng, 0.0, 100.0)));
    inst.cust_y.push_back(round2(uniform_real(rng, 0.0, 100.0)));
  }
  auto coord = [&](int node) {
    return node < p.num_warehouses
               ? std::pair<double, double>{inst.wh_x[node], inst.wh_y[node]}
               : std::pair<double, double>{inst.cust_x[node - p.num_warehouses],
                                           inst.cust_y[node - p.num_warehouses]};
  };
  inst.c.assign(static_cast<std::size_t>(v) * v, 0.0);
  inst.alpha.assign(static_cast<std::size_t>(v) * v, 0.0);
  inst.gamma.assign(static_cast<std::size_t>(v) * v, 0.0);
  for (int v1 = 0; v1 < v; ++v1)
    for (int v2 = 0; v2 < v; ++v2) {
      if (v1 == v2) continue;
      auto [x1, y1] = coord(v1);
      auto [x2, y2] = coord(v2);
      double dist = round2(std::hypot(x1 - x2, y1 - y2));
      inst.c[static_cast<std::size_t>(v1) * v + v2] = dist;
      inst.alpha[static_cast<std::size_t>(v1) * v + v2] = round2(0.1 * dist);
      inst.gamma[static_cast<std::size_t>(v1) * v + v2] = round2(0.05 * dist);
    }

  std::vector<double> nominal(static_cast<std::size_t>(p.num_customers));
  double total_nominal = 0.0, max_nominal = 0.0;
  for (auto& n : nominal) {
    n = static_cast<double>(uniform_int(rng, 5, 25));
    total_nominal += n;
    max_nominal = std::max(max_nominal, n);
  }
  inst.vehicle_capacity = 2.0 * max_nominal;
  // any scenario's total demand is at most 1.2x the nominal total
  double cap = std::ceil(1.2 * total_nominal);
  for (int i = 0; i < p.num_warehouses; ++i) {
    inst.a_max.push_back(cap);
    // base costs drawn on a 20-unit grid and scaled by 1/40, which keeps
    // them dyadic so the 1.5x recovery markup below stays exact
    inst.e.push_back(static_cast<double>(uniform_int(rng, 4000, 12000) / 20 * 20) / 40.0);
    inst.d.push_back(static_cast<double>(uniform_int(rng, 40, 120) / 20 * 20) / 40.0);
  }
  for (int i = 0; i < p.num_warehouses; ++i) {
    inst.e_prime.push_back(1.5 * inst.e[i]);
    inst.d_prime.push_back(1.5 * inst.d[i]);
  }
  inst.tour_fixed_cost = 50.0;

  inst.demands.resize(static_cast<std::size_t>(p.num_scenarios));
  for (auto& row : inst.demands) {
    row.resize(static_cast<std::size_t>(p.num_customers));
    for (int j = 0; j < p.num_customers; ++j) {
      double u1 = uniform01(rng);
      if (u1 < 0.03) {
        row[j] = 0.0;
      } else {
        double u2 = uniform01(rng);
        row[j] = u2 < 0.5 ? round2(1.2 * nominal[j]) : nominal[j];
      }
    }
  }
  inst.validate();
  return inst;
}

MasterBuild build_master(const Instance& inst, const std::vector<int>& scenario_subset) {
  inst.validate();
  MasterBuild mb;
  Model& m = mb.model;
  const int n_i = inst.num_warehouses;

  FirstStage fs;
  for (int i = 0; i < n_i; ++i) {
    int w0 = m.add_binary("w0_" + std::to_string(i));
    fs.w0.push_back(LinearExpr::term(w0, 1.0));
    mb.x_var_ids.push_back(w0);
  }
  for (int i = 0; i < n_i; ++i) {
    int a0 = m.add_continuous("a0_" + std::to_string(i), 0.0, inst.a_max[i]);
    fs.a0.push_back(LinearExpr::term(a0, 1.0));
    mb.x_var_ids.push_back(a0);
  }
  mb.z_var_id = m.add_continuous("z", 0.0, kInf);

  // X: first-stage size only when opened
  for (int i = 0; i < n_i; ++i) {
    LinearExpr link = fs.a0[i] - inst.a_max[i] * fs.w0[i];
    m.add_constraint(std::move(link), Sense::LessEqual, 0.0, "x_link_" + std::to_string(i));
  }

  LinearExpr f;
  for (int i = 0; i < n_i; ++i) {
    f += inst.e[i] * fs.w0[i];
    f += inst.d[i] * fs.a0[i];
  }
  mb.first_stage_cost = f;

  for (int s : scenario_subset) {
    std::string tag = std::to_string(s);
    BlockIds ids = add_block_vars(m, inst, tag);
    LinearExpr cost = add_block_constraints(m, inst, ids, fs, s, tag);
    // z >= g^s
    LinearExpr epi = LinearExpr::term(mb.z_var_id, 1.0) - cost;
    m.add_constraint(std::move(epi), Sense::GreaterEqual, 0.0, "epi_" + tag);
  }

  LinearExpr obj = f;
  obj.add_term(mb.z_var_id, 1.0);
  m.set_objective(std::move(obj));
  return mb;
}

Model build_second_stage(const Instance& inst, const Assignment& x, int scenario) {
  inst.validate();
  const int n_i = inst.num_warehouses;
  if (x.size() != static_cast<std::size_t>(2 * n_i))
    throw std::invalid_argument("rclrp: first-stage assignment must hold w0 then a0");
  if (scenario < 0 || scenario >= static_cast<int>(inst.demands.size()))
    throw std::invalid_argument("rclrp: unknown scenario");

  Model m;
  FirstStage fs;
  for (int i = 0; i < n_i; ++i) fs.w0.push_back(LinearExpr(x[i]));
  for (int i = 0; i < n_i; ++i) fs.a0.push_back(LinearExpr(x[n_i + i]));

  BlockIds ids = add_block_vars(m, inst, "s");
  LinearExpr cost = add_block_constraints(m, inst, ids, fs, scenario, "s");
  m.set_objective(std::move(cost));
  return m;
}

double first_stage_cost(const Instance& inst, const Assignment& x) {
  const int n_i = inst.num_warehouses;
  if (x.size() != static_cast<std::size_t>(2 * n_i))
    throw std::invalid_argument("rclrp: first-stage assignment must hold w0 then a0");
  double f = 0.0;
  for (int i = 0; i < n_i; ++i) f += inst.e[i] * x[i];
  for (int i = 0; i < n_i; ++i) f += inst.d[i] * x[n_i + i];
  return f;
}

std::vector<int> Problem::scenarios() const {
  std::vector<int> s(inst_.demands.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<int>(i);
  return s;
}

namespace {

ordered_json matrix_json(const std::vector<double>& m, int n) {
  ordered_json rows = ordered_json::array();
  for (int v1 = 0; v1 < n; ++v1) {
    ordered_json row = ordered_json::array();
    for (int v2 = 0; v2 < n; ++v2) row.push_back(m[static_cast<std::size_t>(v1) * n + v2]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> matrix_from_json(const ordered_json& rows, int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (int v1 = 0; v1 < n; ++v1)
    for (int v2 = 0; v2 < n; ++v2)
      m[static_cast<std::size_t>(v1) * n + v2] = rows.at(v1).at(v2).get<double>();
  return m;
}

}  // namespace

std::string to_json_string(const Instance& inst) {
  ordered_json j;
  ordered_json whs = ordered_json::array();
  for (int i = 0; i < inst.num_warehouses; ++i) {
    ordered_json w;
    if (!inst.wh_x.empty()) {
      w["x"] = inst.wh_x[i];
      w["y"] = inst.wh_y[i];
    }
    whs.push_back(std::move(w));
  }
  j["warehouses"] = std::move(whs);
  ordered_json custs = ordered_json::array();
  for (int jj = 0; jj < inst.num_customers; ++jj) {
    ordered_json cj;
    if (!inst.cust_x.empty()) {
      cj["x"] = inst.cust_x[jj];
      cj["y"] = inst.cust_y[jj];
    }
    custs.push_back(std::move(cj));
  }
  j["customers"] = std::move(custs);
  j["arcs"] = {{"c", matrix_json(inst.c, inst.num_nodes())},
               {"alpha", matrix_json(inst.alpha, inst.num_nodes())},
               {"gamma", matrix_json(inst.gamma, inst.num_nodes())}};
  j["costs"] = {{"e", inst.e},
                {"d", inst.d},
                {"e_prime", inst.e_prime},
                {"d_prime", inst.d_prime},
                {"tour_fixed", inst.tour_fixed_cost}};
  j["capacities"] = {{"warehouse", inst.a_max}, {"vehicle", inst.vehicle_capacity}};
  j["scenarios"] = inst.demands;
  return j.dump(2) + "\n";
}

Instance from_json_string(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  Instance inst;
  inst.num_warehouses = static_cast<int>(j.at("warehouses").size());
  inst.num_customers = static_cast<int>(j.at("customers").size());
  for (const auto& w : j.at("warehouses")) {
    if (w.contains("x")) {
      inst.wh_x.push_back(w.at("x").get<double>());
      inst.wh_y.push_back(w.at("y").get<double>());
    }
  }
  for (const auto& cj : j.at("customers")) {
    if (cj.contains("x")) {
      inst.cust_x.push_back(cj.at("x").get<double>());
      inst.cust_y.push_back(cj.at("y").get<double>());
    }
  }
  const auto& arcs = j.at("arcs");
  inst.c = matrix_from_json(arcs.at("c"), inst.num_nodes());
  inst.alpha = matrix_from_json(arcs.at("alpha"), inst.num_nodes());
  inst.gamma = matrix_from_json(arcs.at("gamma"), inst.num_nodes());
  const auto& costs = j.at("costs");
  inst.e = costs.at("e").get<std::vector<double>>();
  inst.d = costs.at("d").get<std::vector<double>>();
  inst.e_prime = costs.at("e_prime").get<std::vector<double>>();
  inst.d_prime = costs.at("d_prime").get<std::vector<double>>();
  inst.tour_fixed_cost = costs.at("tour_fixed").get<double>();
  inst.a_max = j.at("capacities").at("warehouse").get<std::vector<double>>();
  inst.vehicle_capacity = j.at("capacities").at("vehicle").get<double>();
  inst.demands = j.at("scenarios").get<std::vector<std::vector<double>>>();
  inst.validate();
  return inst;
}

void save_json(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("rclrp: cannot write " + path);
  out << to_json_string(inst);
}

Instance load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("rclrp: cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

}  // namespace sam::rclrp
