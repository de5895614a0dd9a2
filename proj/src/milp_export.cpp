#include "mpefcs/milp_export.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpefcs {

namespace {

std::string nm(const char* prefix, std::initializer_list<int> idx) {
  std::string s = prefix;
  for (int i : idx) s += "_" + std::to_string(i);
  return s;
}

double max_arc_time(const Instance& inst) {
  double t = 0.0;
  for (int i = 0; i < inst.node_count(); ++i)
    for (int j = 0; j < inst.node_count(); ++j)
      if (inst.arc(i, j)) t = std::max(t, inst.time(i, j));
  return t;
}

double max_charge_time(const Instance& inst) {
  double rate = std::numeric_limits<double>::infinity();
  for (const auto& c : inst.chargers()) rate = std::min(rate, c.rate);
  if (inst.chargers().empty()) return 0.0;
  double e = 0.0;
  for (const auto& v : inst.fleet()) e = std::max(e, v.e_max - v.e_min);
  return e / rate;
}

double max_service(const Instance& inst) {
  double u = 0.0;
  for (const auto& n : inst.nodes()) u = std::max(u, n.service_time);
  return u;
}

}  // namespace

double default_big_m2(const Instance& inst) {
  const double arc = max_arc_time(inst);
  const double charge = max_charge_time(inst);
  const double u = max_service(inst);
  const double latest_begin =
      inst.params().horizon.end + u + 2.0 * arc + static_cast<double>(inst.vehicle_count() + 1) * charge;
  return std::ceil(latest_begin + u + arc + charge + 1.0);
}

MilpExport export_milp(const Instance& inst, const ExportConfig& cfg) {
  if (cfg.format != "lp") throw ExportError("unknown export format '" + cfg.format + "', expected 'lp'");
  MilpExport out;
  const int K = inst.vehicle_count();
  const int N = inst.node_count();
  const int R = inst.request_count();
  const auto& p = inst.params();
  const auto& lam = p.lambda;

  const double m2_min = default_big_m2(inst);
  if (cfg.big_m2 > 0.0 && cfg.big_m2 < m2_min)
    throw ExportError("big_m2 = " + std::to_string(cfg.big_m2) + " is below the time bound " + std::to_string(m2_min));
  if (cfg.big_m1 > 0.0 && cfg.big_m1 < static_cast<double>(R))
    throw ExportError("big_m1 = " + std::to_string(cfg.big_m1) + " is below the request count " + std::to_string(R));
  const double M1 = cfg.big_m1 > 0.0 ? cfg.big_m1 : std::max(1.0, static_cast<double>(R));
  const double M2 = cfg.big_m2 > 0.0 ? cfg.big_m2 : m2_min;
  double max_dist = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (inst.arc(i, j)) max_dist = std::max(max_dist, inst.dist(i, j));
  double ME = 1.0;
  int Mq = R;
  double max_rate = 0.0;
  for (const auto& c : inst.chargers()) max_rate = std::max(max_rate, c.rate);
  for (const auto& v : inst.fleet()) {
    ME = std::max(ME, (v.e_max - v.e_min) + v.consumption * max_dist + max_rate * max_charge_time(inst) + 1.0);
    Mq = std::max(Mq, v.capacity + R);
  }
  out.m1 = M1;
  out.m2 = M2;
  out.m_energy = ME;
  out.m_load = Mq;

  LpModel& m = out.model;
  m.problem_name = "mpefcs_routing";
  json rows = json::array();
  auto row = [&](const std::string& name, const char* fam, const char* group, Sense s, double rhs) -> LpRow& {
    rows.push_back({{"row", name}, {"family", fam}, {"group", group}});
    return m.add_row(name, fam, s, rhs);
  };

  const int one = m.add_variable("one", 1.0, 1.0);
  m.add_objective(one, lam.reject * static_cast<double>(R));

  std::vector<NodeId> mps, stations, chargers, inner;
  for (NodeId i = 0; i < N; ++i) {
    if (inst.is_mp(i)) mps.push_back(i);
    if (inst.is_station(i)) stations.push_back(i);
    if (inst.is_charger(i)) chargers.push_back(i);
    if (i != inst.depot_start() && i != inst.depot_end()) inner.push_back(i);
  }
  const NodeId o = inst.depot_start();
  const NodeId e = inst.depot_end();

  std::vector<std::vector<Candidate>> dom(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) {
    const Request& rq = inst.request(r);
    if (!cfg.full_walk_domain || rq.layer < 0) {
      dom[static_cast<std::size_t>(r)] = rq.candidates;
      continue;
    }
    for (NodeId j : inst.layer(rq.layer).mps) {
      const double km = euclidean(rq.origin, inst.node(j).coord);
      dom[static_cast<std::size_t>(r)].push_back({j, km, walk_minutes(km, p.walk_speed)});
    }
  }

  // Variables.
  std::map<std::tuple<int, int, int>, int> X;
  std::map<std::tuple<int, int, int>, int> Y;  // (k, r, i)
  std::vector<std::vector<int>> q(K), B(K), A(K), W(K), P(K), E(K), T(K);
  for (int k = 0; k < K; ++k) {
    for (NodeId i = 0; i < N; ++i)
      for (NodeId j = 0; j < N; ++j)
        if (inst.arc(i, j)) {
          const int id = m.add_variable(nm("x", {k, i, j}), 0.0, 1.0, true);
          X[{k, i, j}] = id;
          m.add_objective(id, lam.travel * inst.time(i, j));
        }
    for (int r = 0; r < R; ++r)
      for (const auto& c : dom[static_cast<std::size_t>(r)]) {
        const int id = m.add_variable(nm("y", {k, r, c.mp}), 0.0, 1.0, true);
        Y[{k, r, c.mp}] = id;
        m.add_objective(id, lam.walk * c.walk_min - lam.reject);
      }
    q[k].assign(N, -1);
    B[k].assign(N, -1);
    A[k].assign(N, -1);
    W[k].assign(N, -1);
    P[k].assign(N, -1);
    E[k].assign(N, -1);
    T[k].assign(N, -1);
    for (NodeId i = 0; i < N; ++i) {
      q[k][i] = m.add_variable(nm("q", {k, i}));
      B[k][i] = m.add_variable(nm("B", {k, i}));
      if (p.enforce_energy) E[k][i] = m.add_variable(nm("E", {k, i}));
    }
    for (NodeId i : stations) {
      A[k][i] = m.add_variable(nm("A", {k, i}));
      W[k][i] = m.add_variable(nm("W", {k, i}));
      P[k][i] = m.add_variable(nm("p", {k, i}), 0.0, 1.0, true);
      m.add_objective(W[k][i], lam.wait);
    }
    for (NodeId s : chargers) {
      T[k][s] = m.add_variable(nm("tau", {k, s}));
      m.add_objective(T[k][s], lam.travel);
    }
  }
  std::vector<int> V(N, -1);
  for (NodeId s : chargers) V[s] = m.add_variable(nm("v", {s}));

  auto x = [&](int k, int i, int j) {
    auto it = X.find({k, i, j});
    return it == X.end() ? -1 : it->second;
  };
  auto add = [&](LpRow& r, int var, double c) {
    if (var >= 0) m.add_term(r, var, c);
  };

  // Assignment.
  for (int r = 0; r < R; ++r) {
    auto& once = row(nm("assign_once", {r}), family::kAssignment, "assign_once", Sense::LessEqual, 1.0);
    auto& walk = row(nm("walk_range", {r}), family::kAssignment, "walk_range", Sense::LessEqual, p.w_max);
    for (int k = 0; k < K; ++k)
      for (const auto& c : dom[static_cast<std::size_t>(r)]) {
        add(once, Y[{k, r, c.mp}], 1.0);
        add(walk, Y[{k, r, c.mp}], c.walk_km);
      }
  }

  for (int k = 0; k < K; ++k) {
    const VehicleSpec& veh = inst.vehicle(k);
    // Flow.
    auto& dep = row(nm("depart", {k}), family::kFlow, "depart", Sense::Equal, 1.0);
    for (NodeId j = 0; j < N; ++j) add(dep, x(k, o, j), 1.0);
    auto& ret = row(nm("return", {k}), family::kFlow, "return", Sense::Equal, 1.0);
    for (NodeId i = 0; i < N; ++i) add(ret, x(k, i, e), 1.0);
    for (NodeId s : chargers) {
      auto& r = row(nm("charger_out", {k, s}), family::kFlow, "charger_out", Sense::LessEqual, 1.0);
      for (NodeId j = 0; j < N; ++j) add(r, x(k, s, j), 1.0);
    }
    for (NodeId j : mps) {
      auto& r = row(nm("mp_once", {k, j}), family::kFlow, "mp_once", Sense::LessEqual, 1.0);
      for (NodeId i = 0; i < N; ++i) add(r, x(k, i, j), 1.0);
    }
    for (NodeId j : inner) {
      auto& r = row(nm("flow", {k, j}), family::kFlow, "flow", Sense::Equal, 0.0);
      for (NodeId i = 0; i < N; ++i) {
        add(r, x(k, i, j), 1.0);
        add(r, x(k, j, i), -1.0);
      }
    }
    for (NodeId i : mps) {
      auto& r = row(nm("visit", {k, i}), family::kFlow, "visit", Sense::LessEqual, 0.0);
      for (int rq = 0; rq < R; ++rq) {
        auto it = Y.find({k, rq, i});
        if (it != Y.end()) add(r, it->second, 1.0);
      }
      for (NodeId j = 0; j < N; ++j) add(r, x(k, i, j), -M1);
    }

    // Pairing: y = 1 => inflow(i) = inflow(d_r).
    for (int rq = 0; rq < R; ++rq)
      for (const auto& c : dom[static_cast<std::size_t>(rq)]) {
        const NodeId d = inst.request(rq).dropoff;
        const int y = Y[{k, rq, c.mp}];
        auto& hi = row(nm("pair_hi", {k, rq, c.mp}), family::kPairing, "pair", Sense::LessEqual, 1.0);
        auto& lo = row(nm("pair_lo", {k, rq, c.mp}), family::kPairing, "pair", Sense::GreaterEqual, -1.0);
        for (NodeId j = 0; j < N; ++j) {
          add(hi, x(k, j, c.mp), 1.0);
          add(hi, x(k, j, d), -1.0);
          add(lo, x(k, j, c.mp), 1.0);
          add(lo, x(k, j, d), -1.0);
        }
        add(hi, y, 1.0);
        add(lo, y, -1.0);
      }

    // Loads.
    for (NodeId j : mps)
      for (NodeId i = 0; i < N; ++i) {
        const int a = x(k, i, j);
        if (a < 0) continue;
        // q_j - q_i - boarded(j) within +-Mq (1 - x)
        auto& hi = row(nm("board_hi", {k, i, j}), family::kLoad, "board", Sense::LessEqual, Mq);
        auto& lo = row(nm("board_lo", {k, i, j}), family::kLoad, "board", Sense::GreaterEqual, -Mq);
        for (auto* r : {&hi, &lo}) {
          add(*r, q[k][j], 1.0);
          add(*r, q[k][i], -1.0);
          for (int rq = 0; rq < R; ++rq) {
            auto it = Y.find({k, rq, j});
            if (it != Y.end()) add(*r, it->second, -1.0);
          }
        }
        add(hi, a, Mq);
        add(lo, a, -Mq);
      }
    for (NodeId j : stations)
      for (NodeId i : mps) {
        const int a = x(k, i, j);
        if (a < 0) continue;
        auto& hi = row(nm("drop_hi", {k, i, j}), family::kLoad, "drop", Sense::LessEqual, Mq);
        auto& lo = row(nm("drop_lo", {k, i, j}), family::kLoad, "drop", Sense::GreaterEqual, -Mq);
        for (auto* r : {&hi, &lo}) {
          add(*r, q[k][j], 1.0);
          add(*r, q[k][i], -1.0);
          for (int rq = 0; rq < R; ++rq) {
            if (inst.request(rq).dropoff != j) continue;
            for (const auto& c : dom[static_cast<std::size_t>(rq)]) add(*r, Y[{k, rq, c.mp}], 1.0);
          }
        }
        add(hi, a, Mq);
        add(lo, a, -Mq);
      }
    for (NodeId i = 0; i < N; ++i) {
      auto& r = row(nm("capacity", {k, i}), family::kLoad, "capacity", Sense::LessEqual, veh.capacity);
      add(r, q[k][i], 1.0);
    }

    // Timing.
    for (NodeId i = 0; i < N; ++i) {
      if (inst.is_charger(i)) continue;
      for (NodeId j = 0; j < N; ++j) {
        const int a = x(k, i, j);
        if (a < 0) continue;
        auto& r = row(nm("time", {k, i, j}), family::kTiming, "time", Sense::GreaterEqual,
                      inst.node(i).service_time + inst.time(i, j) - M2);
        add(r, B[k][j], 1.0);
        add(r, B[k][i], -1.0);
        add(r, a, -M2);
      }
    }
    for (NodeId s : chargers)
      for (NodeId j = 0; j < N; ++j) {
        const int a = x(k, s, j);
        if (a < 0) continue;
        auto& r = row(nm("time_charge", {k, s, j}), family::kTiming, "time_charge", Sense::GreaterEqual,
                      inst.time(s, j) - M2);
        add(r, B[k][j], 1.0);
        add(r, B[k][s], -1.0);
        add(r, T[k][s], -1.0);
        add(r, a, -M2);
      }
    for (NodeId j : stations)
      for (NodeId i = 0; i < N; ++i) {
        if (!inst.is_mp(i) && !inst.is_station(i)) continue;
        const int a = x(k, i, j);
        if (a < 0) continue;
        const double c = inst.node(i).service_time + inst.time(i, j);
        auto& hi = row(nm("arrive_hi", {k, i, j}), family::kTiming, "arrive", Sense::LessEqual, c + M2);
        auto& lo = row(nm("arrive_lo", {k, i, j}), family::kTiming, "arrive", Sense::GreaterEqual, c - M2);
        for (auto* r : {&hi, &lo}) {
          add(*r, A[k][j], 1.0);
          add(*r, B[k][i], -1.0);
        }
        add(hi, a, M2);
        add(lo, a, -M2);
      }

    // Waits.
    for (NodeId i : stations) {
      auto& w = row(nm("wait", {k, i}), family::kWait, "wait", Sense::GreaterEqual, -M2);
      add(w, W[k][i], 1.0);
      add(w, B[k][i], -1.0);
      add(w, A[k][i], 1.0);
      add(w, P[k][i], -M2);
      auto& f = row(nm("visit_flag", {k, i}), family::kWait, "visit_flag", Sense::Equal, 0.0);
      add(f, P[k][i], 1.0);
      for (NodeId j = 0; j < N; ++j) add(f, x(k, j, i), -1.0);
    }

    // Ride times.
    for (int rq = 0; rq < R; ++rq)
      for (const auto& c : dom[static_cast<std::size_t>(rq)]) {
        const NodeId d = inst.request(rq).dropoff;
        auto& r = row(nm("ride", {k, rq, c.mp}), family::kRideTime, "ride", Sense::LessEqual,
                      inst.ride_limit(c.mp) + inst.node(c.mp).service_time + M2);
        add(r, A[k][d], 1.0);
        add(r, B[k][c.mp], -1.0);
        add(r, Y[{k, rq, c.mp}], M2);
      }

    // Windows.
    for (NodeId i : stations) {
      const auto& w = inst.node(i).window;
      add(row(nm("window_lo", {k, i}), family::kTimeWindow, "window", Sense::GreaterEqual, w.earliest), B[k][i], 1.0);
      add(row(nm("window_hi", {k, i}), family::kTimeWindow, "window", Sense::LessEqual, w.latest), B[k][i], 1.0);
    }

    // Energy.
    if (p.enforce_energy) {
      add(row(nm("soc_init", {k}), family::kEnergy, "soc_init", Sense::Equal, veh.e_init), E[k][o], 1.0);
      for (NodeId i = 0; i < N; ++i) {
        add(row(nm("soc_lo", {k, i}), family::kEnergy, "soc_bounds", Sense::GreaterEqual, veh.e_min), E[k][i], 1.0);
        add(row(nm("soc_hi", {k, i}), family::kEnergy, "soc_bounds", Sense::LessEqual, veh.e_max), E[k][i], 1.0);
      }
      for (NodeId i = 0; i < N; ++i)
        for (NodeId j = 0; j < N; ++j) {
          const int a = x(k, i, j);
          if (a < 0) continue;
          const double use = veh.consumption * inst.dist(i, j);
          const bool charger = inst.is_charger(i);
          const char* g = charger ? "soc_charge" : "soc_arc";
          auto& hi = row(nm(charger ? "soc_charge_hi" : "soc_arc_hi", {k, i, j}), family::kEnergy, g, Sense::LessEqual,
                         -use + ME);
          auto& lo = row(nm(charger ? "soc_charge_lo" : "soc_arc_lo", {k, i, j}), family::kEnergy, g,
                         Sense::GreaterEqual, -use - ME);
          for (auto* r : {&hi, &lo}) {
            add(*r, E[k][j], 1.0);
            add(*r, E[k][i], -1.0);
            if (charger) add(*r, T[k][i], -inst.charger_of(i).rate);
          }
          add(hi, a, ME);
          add(lo, a, -ME);
        }
      for (NodeId s : chargers) {
        auto& r = row(nm("soc_top", {k, s}), family::kEnergy, "soc_top", Sense::LessEqual, veh.e_max);
        add(r, E[k][s], 1.0);
        add(r, T[k][s], inst.charger_of(s).rate);
      }
    }

    // Charger visit link.
    for (NodeId s : chargers) {
      auto& r = row(nm("charge_link", {k, s}), family::kCharging, "charge_link", Sense::LessEqual, 0.0);
      add(r, T[k][s], 1.0);
      add(r, B[k][s], 1.0);
      for (NodeId j = 0; j < N; ++j) add(r, x(k, s, j), -M2);
    }
  }

  // Fleet-wide meeting-point visits.
  for (NodeId j : mps) {
    auto& r = row(nm("mp_once", {j}), family::kFlow, "mp_once_fleet", Sense::LessEqual, 1.0);
    for (int k = 0; k < K; ++k)
      for (NodeId i = 0; i < N; ++i) add(r, x(k, i, j), 1.0);
  }

  // Charger usage and sequencing.
  for (NodeId s : chargers) {
    auto& u = row(nm("usage", {s}), family::kCharging, "usage", Sense::Equal, 0.0);
    add(u, V[s], 1.0);
    for (int k = 0; k < K; ++k)
      for (NodeId j = 0; j < N; ++j) add(u, x(k, s, j), -1.0);
    add(row(nm("usage_cap", {s}), family::kCharging, "usage_cap", Sense::LessEqual, 1.0), V[s], 1.0);
  }
  for (std::size_t c = 0; c < inst.chargers().size(); ++c) {
    const auto& d = inst.charger_dummies(static_cast<int>(c));
    for (std::size_t a = 0; a < d.size(); ++a)
      for (std::size_t b = a + 1; b < d.size(); ++b) {
        const NodeId h = d[a];
        const NodeId l = d[b];
        auto& ord = row(nm("usage_order", {h, l}), family::kCharging, "usage_order", Sense::LessEqual, 0.0);
        add(ord, V[h], 1.0);
        add(ord, V[l], -1.0);
        auto& seq = row(nm("charge_seq", {h, l}), family::kCharging, "charge_seq", Sense::GreaterEqual, -2.0 * M2);
        for (int k = 0; k < K; ++k) {
          add(seq, B[k][h], 1.0);
          add(seq, B[k][l], -1.0);
          add(seq, T[k][l], -1.0);
        }
        add(seq, V[h], -M2);
        add(seq, V[l], -M2);
      }
  }

  out.manifest = {{"format", "lp"},
                  {"problem", m.problem_name},
                  {"big_m", {{"M1", M1}, {"M2", M2}, {"energy", ME}, {"load", Mq}}},
                  {"rows", rows},
                  {"variables",
                   {{"x_k_i_j", "vehicle k traverses bus arc (i, j)"},
                    {"y_k_r_i", "request r boards vehicle k at meeting point i"},
                    {"q_k_i", "load after service at node i"},
                    {"B_k_i", "begin of service at node i"},
                    {"A_k_i", "arrival at station i"},
                    {"W_k_i", "excess wait at station i"},
                    {"p_k_i", "station i visited by vehicle k"},
                    {"E_k_i", "charge on arrival at node i"},
                    {"tau_k_s", "charging duration at charger dummy s"},
                    {"v_s", "number of visits to charger dummy s"},
                    {"one", "constant 1 carrying the rejection offset"}}}};
  return out;
}

std::map<std::string, double> milp_values(const Instance& inst, const Solution& sol) {
  std::map<std::string, double> val;
  const int N = inst.node_count();
  const int K = inst.vehicle_count();
  const bool energy = inst.params().enforce_energy;
  val["one"] = 1.0;
  std::vector<int> visits(static_cast<std::size_t>(N), 0);
  std::vector<int> mp_vehicle(static_cast<std::size_t>(N), -1);
  for (int k = 0; k < K; ++k) {
    const VehicleSpec& v = inst.vehicle(k);
    for (NodeId i = 0; i < N; ++i) {
      val[nm("q", {k, i})] = 0.0;
      val[nm("B", {k, i})] = inst.is_station(i) ? inst.node(i).window.earliest : 0.0;
      if (energy) val[nm("E", {k, i})] = v.e_init;
      if (inst.is_station(i)) {
        val[nm("A", {k, i})] = inst.node(i).window.earliest;
        val[nm("W", {k, i})] = 0.0;
        val[nm("p", {k, i})] = 0.0;
      }
      if (inst.is_charger(i)) val[nm("tau", {k, i})] = 0.0;
    }
    if (static_cast<std::size_t>(k) >= sol.routes.size()) continue;
    const auto& route = sol.routes[static_cast<std::size_t>(k)];
    const auto& st = route.stops;
    for (std::size_t s = 0; s < st.size(); ++s) {
      const NodeId i = st[s];
      if (i < 0 || i >= N) continue;
      if (s < route.schedule.size()) {
        const auto& sc = route.schedule[s];
        val[nm("q", {k, i})] = sc.load;
        val[nm("B", {k, i})] = sc.begin;
        if (energy) val[nm("E", {k, i})] = sc.energy;
        if (inst.is_station(i)) {
          val[nm("A", {k, i})] = sc.arrival;
          val[nm("W", {k, i})] = sc.wait;
          val[nm("p", {k, i})] = 1.0;
        }
      }
      if (inst.is_mp(i) && mp_vehicle[static_cast<std::size_t>(i)] < 0) mp_vehicle[static_cast<std::size_t>(i)] = k;
      if (inst.is_charger(i)) ++visits[static_cast<std::size_t>(i)];
      if (s + 1 < st.size()) val[nm("x", {k, i, st[s + 1]})] += 1.0;
    }
  }
  for (NodeId i = 0; i < N; ++i)
    if (inst.is_charger(i)) val[nm("v", {i})] = visits[static_cast<std::size_t>(i)];
  for (const auto& ev : sol.charging) {
    if (ev.charger_dummy < 0 || ev.charger_dummy >= N) continue;
    val[nm("tau", {ev.vehicle, ev.charger_dummy})] = ev.duration;
    val[nm("B", {ev.vehicle, ev.charger_dummy})] = ev.start;
  }
  for (std::size_t r = 0; r < sol.assignment.size(); ++r) {
    const NodeId m = sol.assignment[r];
    if (m == kNoNode) continue;
    const int k = m >= 0 && m < N && mp_vehicle[static_cast<std::size_t>(m)] >= 0 ? mp_vehicle[static_cast<std::size_t>(m)] : 0;
    val[nm("y", {k, static_cast<int>(r), m})] = 1.0;
  }
  return val;
}

double assignment_rejection_weight(const AssignmentProblem& prob) {
  double w = 1.0;
  for (const auto& opts : prob.options) {
    double worst = 0.0;
    for (const auto& o : opts) worst = std::max(worst, o.walk_min);
    w += prob.lambda_walk * worst;
  }
  double pairs = 0.0;
  for (int i = 0; i < prob.mp_count(); ++i)
    for (int j = 0; j < prob.mp_count(); ++j)
      if (i != j && prob.mp_layer[static_cast<std::size_t>(i)] == prob.mp_layer[static_cast<std::size_t>(j)])
        pairs += prob.mp_time(i, j);
  return w + prob.rho * prob.lambda_travel * pairs;
}

MilpExport export_assignment_milp(const AssignmentProblem& prob) {
  MilpExport out;
  LpModel& m = out.model;
  m.problem_name = "mpefcs_assignment";
  json rows = json::array();
  auto row = [&](const std::string& name, const char* group, Sense s, double rhs) -> LpRow& {
    rows.push_back({{"row", name}, {"family", family::kAssignment}, {"group", group}});
    return m.add_row(name, family::kAssignment, s, rhs);
  };
  const int R = prob.request_count();
  const int M = prob.mp_count();
  const double reject_w = assignment_rejection_weight(prob);
  std::vector<std::vector<int>> y(static_cast<std::size_t>(R));
  std::vector<int> theta(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) theta[static_cast<std::size_t>(j)] = m.add_variable(nm("theta", {j}), 0.0, 1.0, true);
  std::vector<int> slack(static_cast<std::size_t>(R), -1);
  for (int r = 0; r < R; ++r) {
    for (const auto& o : prob.options[static_cast<std::size_t>(r)]) {
      const int id = m.add_variable(nm("y", {r, o.mp}), 0.0, 1.0, true);
      y[static_cast<std::size_t>(r)].push_back(id);
      m.add_objective(id, prob.lambda_walk * o.walk_min);
    }
    if (!prob.options[static_cast<std::size_t>(r)].empty()) {
      slack[static_cast<std::size_t>(r)] = m.add_variable(nm("reject", {r}), 0.0, 1.0, true);
      m.add_objective(slack[static_cast<std::size_t>(r)], reject_w);
    }
  }
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) {
      if (prob.mp_layer[static_cast<std::size_t>(i)] != prob.mp_layer[static_cast<std::size_t>(j)]) continue;
      const int z = m.add_variable(nm("z", {i, j}), 0.0, 1.0);
      m.add_objective(z, prob.rho * prob.lambda_travel * (prob.mp_time(i, j) + prob.mp_time(j, i)));
      auto& r = row(nm("product", {i, j}), "product", Sense::GreaterEqual, -1.0);
      m.add_term(r, z, 1.0);
      m.add_term(r, theta[static_cast<std::size_t>(i)], -1.0);
      m.add_term(r, theta[static_cast<std::size_t>(j)], -1.0);
    }
  for (int r = 0; r < R; ++r) {
    const auto& opts = prob.options[static_cast<std::size_t>(r)];
    for (std::size_t o = 0; o < opts.size(); ++o)
      m.add_term(row(nm("walking_range", {r, opts[o].mp}), "walking_range", Sense::LessEqual, prob.w_max),
                 y[static_cast<std::size_t>(r)][o], opts[o].walk_km);
    if (opts.empty()) continue;
    auto& once = row(nm("single_assignment", {r}), "single_assignment", Sense::Equal, 1.0);
    for (int id : y[static_cast<std::size_t>(r)]) m.add_term(once, id, 1.0);
    m.add_term(once, slack[static_cast<std::size_t>(r)], 1.0);
  }
  for (int j = 0; j < M; ++j) {
    auto& cap = row(nm("mp_capacity", {j}), "mp_capacity", Sense::LessEqual, prob.q_max);
    auto& act = row(nm("activation", {j}), "activation", Sense::LessEqual, 0.0);
    for (int r = 0; r < R; ++r) {
      const auto& opts = prob.options[static_cast<std::size_t>(r)];
      for (std::size_t o = 0; o < opts.size(); ++o)
        if (opts[o].mp == j) {
          m.add_term(cap, y[static_cast<std::size_t>(r)][o], 1.0);
          m.add_term(act, y[static_cast<std::size_t>(r)][o], 1.0);
        }
    }
    m.add_term(act, theta[static_cast<std::size_t>(j)], -std::max(1.0, static_cast<double>(R)));
  }
  if (m.variables().empty()) m.add_variable("one", 1.0, 1.0);
  out.m1 = std::max(1.0, static_cast<double>(R));
  out.manifest = {{"format", "lp"},
                  {"problem", m.problem_name},
                  {"big_m", {{"M", out.m1}, {"rejection_weight", reject_w}}},
                  {"rows", rows},
                  {"variables",
                   {{"y_r_j", "request r walks to meeting point j (local index)"},
                    {"theta_j", "meeting point j activated"},
                    {"z_i_j", "both i and j activated"},
                    {"reject_r", "request r left unassigned for lack of capacity"}}}};
  return out;
}

std::map<std::string, double> assignment_values(const AssignmentProblem& prob, const AssignmentResult& res) {
  std::map<std::string, double> val;
  const int M = prob.mp_count();
  std::vector<int> active(static_cast<std::size_t>(M), 0);
  for (int j : res.activated)
    if (j >= 0 && j < M) active[static_cast<std::size_t>(j)] = 1;
  for (int j = 0; j < M; ++j) val[nm("theta", {j})] = active[static_cast<std::size_t>(j)];
  for (int r = 0; r < prob.request_count(); ++r) {
    const int a = static_cast<std::size_t>(r) < res.assignment.size() ? res.assignment[static_cast<std::size_t>(r)] : -1;
    if (a >= 0) val[nm("y", {r, a})] = 1.0;
    if (!prob.options[static_cast<std::size_t>(r)].empty()) val[nm("reject", {r})] = a < 0 ? 1.0 : 0.0;
  }
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j)
      if (prob.mp_layer[static_cast<std::size_t>(i)] == prob.mp_layer[static_cast<std::size_t>(j)])
        val[nm("z", {i, j})] = active[static_cast<std::size_t>(i)] * active[static_cast<std::size_t>(j)];
  return val;
}

}  // namespace mpefcs
