#include "fixtures.hpp"
#include "mpefcs/charging.hpp"
#include "mpefcs/lns.hpp"
#include "mpefcs/objective.hpp"
#include "mpefcs/propagate.hpp"
#include "mpefcs/validator.hpp"

#include <doctest.h>

#include <set>

using namespace mpefcs;
using namespace fixtures;

namespace {

// Depot and station at the origin, one charger at (2.5, 0), one meeting
// point at (7.5, 0): 5 + 10 + 15 minutes of driving with the charger first.
struct ChargeLine {
  Instance inst;
  NodeId charger, mp, station;
};

ChargeLine charge_line(double e_init) {
  Scenario s = one_station();
  s.params.lambda = {1.0, 0.0, 0.0, 40.0};
  s.chargers = {{0, Coord(2.5, 0.0)}};
  s.meeting_points = {{0, Coord(7.5, 0.0)}};
  s.requests = {request_at(0, Coord(7.5, 0.5))};
  s.vehicles[0].e_min = 0.0;
  s.vehicles[0].e_init = e_init;
  ChargeLine c{build_instance(s), kNoNode, kNoNode, kNoNode};
  c.charger = c.inst.charger_dummies(0).front();
  c.mp = mp_dummy(c.inst, 0);
  c.station = c.inst.layer(0).station_node;
  return c;
}

// Two vehicles meet at one charger after their first round trips; the
// first arrives at 100 and needs 20 minutes, the second arrives at 110 and
// needs 15.
struct Contention {
  Instance inst;
  std::vector<StopList> routes;
  std::vector<NodeId> assignment;
};

Contention contention() {
  Scenario s = one_station();
  s.params.horizon = {60.0, 240.0};
  s.timetable = {{0, 107.5}, {0, 117.5}, {0, 200.0}};
  s.chargers = {{0, Coord(1.0, 0.0)}};
  s.meeting_points = {{0, Coord(0.0, 1.5)}, {1, Coord(8.0, 0.0)}, {2, Coord(0.0, -8.0)}};
  s.requests = {request_at(0, Coord(0.0, 1.6), 107.5), request_at(1, Coord(0.1, 1.5), 117.5),
                request_at(2, Coord(8.0, 0.2), 200.0), request_at(3, Coord(0.2, -8.0), 200.0)};
  const double beta = VehicleSpec{}.consumption;
  const double rate = 50.0 / 60.0;
  const double prefix = 1.5 + 1.5 + 1.0;
  VehicleSpec a;
  a.e_min = 0.0;
  a.e_init = beta * prefix + beta * (7.0 + 8.0) - rate * 20.0;
  VehicleSpec b = a;
  b.id = 1;
  b.e_init = beta * prefix + beta * (std::hypot(1.0, 8.0) + 8.0) - rate * 15.0;
  s.vehicles = {a, b};
  Contention c{build_instance(s), {}, {}};
  const auto& inst = c.inst;
  const auto& d = inst.charger_dummies(0);
  const NodeId st0 = inst.layer(0).station_node, st1 = inst.layer(1).station_node, st2 = inst.layer(2).station_node;
  c.routes = {{0, mp_dummy(inst, 0, 0), st0, d[1], mp_dummy(inst, 1, 2), st2, inst.depot_end()},
              {0, mp_dummy(inst, 0, 1), st1, d[0], mp_dummy(inst, 2, 2), st2, inst.depot_end()}};
  c.assignment = {mp_dummy(inst, 0, 0), mp_dummy(inst, 0, 1), mp_dummy(inst, 1, 2), mp_dummy(inst, 2, 2)};
  return c;
}

Solution by_hand(const Instance& inst, const StopList& stops, const RouteEvaluation& ev,
                 const std::vector<NodeId>& assignment) {
  Solution s;
  s.routes.push_back({0, stops, ev.schedule});
  s.assignment = assignment;
  for (std::size_t r = 0; r < assignment.size(); ++r)
    if (assignment[r] == kNoNode) s.rejected.push_back(static_cast<int>(r));
  return s;
}

std::set<std::string> families(const std::vector<Violation>& v) {
  std::set<std::string> out;
  for (const auto& x : v) out.insert(x.family);
  return out;
}

}  // namespace

TEST_SUITE("schedule") {

TEST_CASE("empty route keeps the battery") {
  const Instance inst = tiny_instance(2);
  const StopList stops{inst.depot_start(), inst.depot_end()};
  const std::vector<int> boarding(static_cast<std::size_t>(inst.node_count()), 0);
  const auto ev = propagate_route(inst, 0, stops, boarding);
  CHECK(ev.feasible);
  CHECK(ev.schedule.size() == 2);
  CHECK(ev.cost == 0.0);
  CHECK(ev.schedule.back().energy == inst.vehicle(0).e_init);
}

TEST_CASE("arrival at the window opening begins without waiting") {
  Scenario s = one_station();
  s.params.horizon = {463.5, 540.0};
  s.meeting_points = {{0, Coord(1.5, 0.0)}};
  s.requests = {request_at(0, Coord(1.5, 0.2))};
  const Instance inst = build_instance(s);
  const StopList stops{0, mp_dummy(inst, 0), inst.layer(0).station_node, inst.depot_end()};
  const auto boarding = boarding_per_node(inst, {mp_dummy(inst, 0)});
  PropagationOptions opt;
  opt.idle = IdlePolicy::Strict;
  const auto ev = propagate_route(inst, 0, stops, boarding, opt);
  REQUIRE(ev.feasible);
  CHECK(ev.schedule[2].arrival == doctest::Approx(470.0));
  CHECK(ev.schedule[2].begin == doctest::Approx(470.0));
  CHECK(ev.schedule[2].wait == doctest::Approx(0.0));
}

TEST_CASE("early arrival waits for the window and is priced") {
  Scenario s = one_station();
  s.params.horizon = {458.5, 540.0};
  s.meeting_points = {{0, Coord(1.5, 0.0)}};
  s.requests = {request_at(0, Coord(1.5, 0.2))};
  const Instance inst = build_instance(s);
  const NodeId mp = mp_dummy(inst, 0);
  const NodeId st = inst.layer(0).station_node;
  const StopList stops{0, mp, st, inst.depot_end()};
  const auto boarding = boarding_per_node(inst, {mp});
  PropagationOptions opt;
  opt.idle = IdlePolicy::Strict;
  const auto ev = propagate_route(inst, 0, stops, boarding, opt);
  REQUIRE(ev.feasible);
  // Straight-line recomputation: 1.5 km at 30 km/h each way, 0.5 min service.
  const double at_mp = 458.5 + 1.5 / 30.0 * 60.0;
  const double at_st = at_mp + 0.5 + 1.5 / 30.0 * 60.0;
  CHECK(ev.schedule[1].begin == doctest::Approx(at_mp));
  CHECK(ev.schedule[2].arrival == doctest::Approx(at_st));
  CHECK(at_st == doctest::Approx(465.0));
  CHECK(ev.schedule[2].begin == doctest::Approx(470.0));
  CHECK(ev.schedule[2].wait == doctest::Approx(5.0));
  CHECK(ev.schedule[1].load == 1);
  CHECK(ev.schedule[2].load == 0);
  const Solution sol = by_hand(inst, stops, ev, {mp});
  CHECK(check_feasibility(sol, inst).empty());
  const auto t = objective_terms(sol, inst);
  CHECK(t.wait == doctest::Approx(5.0));
  CHECK(t.total == doctest::Approx(6.0 + 5.0 + walk_time(inst, 0, mp)));
}

TEST_CASE("just-in-time pickups reach the station at the window opening") {
  Scenario s = one_station();
  s.meeting_points = {{0, Coord(1.5, 0.0)}};
  s.requests = {request_at(0, Coord(1.5, 0.2))};
  const Instance inst = build_instance(s);
  const NodeId mp = mp_dummy(inst, 0);
  const StopList stops{0, mp, inst.layer(0).station_node, inst.depot_end()};
  const auto ev = propagate_route(inst, 0, stops, boarding_per_node(inst, {mp}));
  REQUIRE(ev.feasible);
  CHECK(ev.schedule[2].arrival == doctest::Approx(470.0));
  CHECK(ev.schedule[1].begin == doctest::Approx(470.0 - 3.5));
  CHECK(ev.wait == 0.0);
}

TEST_CASE("minimal recharge for a 10 kWh deficit takes 12 minutes") {
  const double beta = VehicleSpec{}.consumption;
  const auto c = charge_line(beta * 2.5 + beta * 12.5 - 10.0);
  const StopList stops{0, c.charger, c.mp, c.station, c.inst.depot_end()};
  const auto boarding = boarding_per_node(c.inst, {c.mp});
  const auto ev = propagate_route(c.inst, 0, stops, boarding);
  REQUIRE(ev.feasible);
  REQUIRE(ev.charges.size() == 1);
  CHECK(ev.charges[0].duration == doctest::Approx(12.0));
  CHECK(ev.charges[0].energy_added == doctest::Approx(10.0));
  CHECK(ev.schedule.back().energy == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ev.travel_time == doctest::Approx(30.0));

  const auto sol = finalize_solution(c.inst, {stops}, {c.mp});
  REQUIRE(sol);
  CHECK(check_feasibility(*sol, c.inst).empty());
  CHECK(evaluate_objective(*sol, c.inst) == doctest::Approx(42.0));
}

TEST_CASE("energy is conserved along a charging route") {
  const double beta = VehicleSpec{}.consumption;
  const auto c = charge_line(beta * 2.5 + beta * 12.5 - 6.0);
  const StopList stops{0, c.charger, c.mp, c.station, c.inst.depot_end()};
  const auto sol = finalize_solution(c.inst, {stops}, {c.mp});
  REQUIRE(sol);
  const auto& r = sol->routes[0];
  double e = c.inst.vehicle(0).e_init;
  for (std::size_t i = 0; i < r.stops.size(); ++i) {
    CHECK(r.schedule[i].energy == doctest::Approx(e).epsilon(1e-12));
    for (const auto& ev : sol->charging)
      if (ev.stop == static_cast<int>(i)) e += ev.energy_added;
    if (i + 1 < r.stops.size()) e -= beta * c.inst.dist(r.stops[i], r.stops[i + 1]);
  }
}

TEST_CASE("full battery elides the charger visit") {
  const auto c = charge_line(118.0);
  const StopList stops{0, c.charger, c.mp, c.station, c.inst.depot_end()};
  const auto ev = propagate_route(c.inst, 0, stops, boarding_per_node(c.inst, {c.mp}));
  REQUIRE(ev.charges.size() == 1);
  CHECK(ev.charges[0].duration == 0.0);
  const auto sol = finalize_solution(c.inst, {stops}, {c.mp});
  REQUIRE(sol);
  CHECK(sol->charging.empty());
  CHECK(sol->routes[0].stops.size() == 4);
  CHECK(check_feasibility(*sol, c.inst).empty());
}

TEST_CASE("second vehicle at a busy charger waits for it") {
  const auto c = contention();
  const auto boarding = boarding_per_node(c.inst, c.assignment);
  std::vector<RouteEvaluation> alone;
  for (int k = 0; k < 2; ++k) alone.push_back(propagate_route(c.inst, k, c.routes[static_cast<std::size_t>(k)], boarding));
  REQUIRE(alone[0].charges.size() == 1);
  CHECK(alone[0].charges[0].arrival == doctest::Approx(100.0));
  CHECK(alone[0].charges[0].duration == doctest::Approx(20.0));
  CHECK(alone[1].charges[0].arrival == doctest::Approx(110.0));
  CHECK(alone[1].charges[0].duration == doctest::Approx(15.0));

  const auto fcfs = schedule_charging(c.inst, c.routes, boarding);
  REQUIRE(fcfs.feasible);
  CHECK(fcfs.routes[0].charges[0].start == doctest::Approx(100.0));
  CHECK(fcfs.routes[1].charges[0].start == doctest::Approx(120.0));

  // Both sequencings, cheapest kept.
  const ChargerOrder first_a{{{0, 0}, {1, 0}}};
  const ChargerOrder first_b{{{1, 0}, {0, 0}}};
  const auto pa = schedule_charging_ordered(c.inst, c.routes, boarding, first_a);
  const auto pb = schedule_charging_ordered(c.inst, c.routes, boarding, first_b);
  REQUIRE(pa.feasible);
  CHECK(pa.routes[1].charges[0].start == doctest::Approx(120.0));
  if (pb.feasible) {
    CHECK(pb.routes[0].charges[0].start == doctest::Approx(125.0));
    CHECK(fcfs.cost <= pb.cost + 1e-9);
  }
  CHECK(fcfs.cost == doctest::Approx(std::min(pa.cost, pb.feasible ? pb.cost : pa.cost)));

  const auto sol = finalize_solution(c.inst, c.routes, c.assignment);
  REQUIRE(sol);
  CHECK(check_feasibility(*sol, c.inst).empty());
}

TEST_CASE("one minute of charger overlap is a charging violation") {
  const auto c = contention();
  auto sol = finalize_solution(c.inst, c.routes, c.assignment);
  REQUIRE(sol);
  for (auto& ev : sol->charging)
    if (ev.vehicle == 1) {
      ev.start -= 1.0;
      sol->routes[1].schedule[static_cast<std::size_t>(ev.stop)].begin -= 1.0;
    }
  const auto v = check_feasibility(*sol, c.inst);
  CHECK(families(v) == std::set<std::string>{family::kCharging});
}

TEST_CASE("contention that cannot meet the windows is reported") {
  auto c = contention();
  Scenario s = c.inst.scenario();
  // Either vehicle alone reaches the last station by 160; queued, neither does.
  s.timetable[2].departure = 160.0;
  s.requests[2].desired_departure = s.requests[3].desired_departure = 160.0;
  const Instance inst = build_instance(s);
  const auto& d = inst.charger_dummies(0);
  const NodeId st0 = inst.layer(0).station_node, st1 = inst.layer(1).station_node, st2 = inst.layer(2).station_node;
  const std::vector<StopList> routes{
      {0, mp_dummy(inst, 0, 0), st0, d[1], mp_dummy(inst, 1, 2), st2, inst.depot_end()},
      {0, mp_dummy(inst, 0, 1), st1, d[0], mp_dummy(inst, 2, 2), st2, inst.depot_end()}};
  const std::vector<NodeId> assignment{mp_dummy(inst, 0, 0), mp_dummy(inst, 0, 1), mp_dummy(inst, 1, 2),
                                       mp_dummy(inst, 2, 2)};
  const auto plan = schedule_charging(inst, routes, boarding_per_node(inst, assignment));
  CHECK_FALSE(plan.feasible);
  CHECK_FALSE(plan.error.empty());
  CHECK(plan.blocking.first >= 0);
  CHECK(plan.blocking.second >= 0);
}

TEST_CASE("objective terms") {
  SUBCASE("all rejected") {
    Scenario s = one_station();
    s.meeting_points = {{0, Coord(1.0, 0.0)}};
    s.requests = {request_at(0, Coord(1.0, 0.1)), request_at(1, Coord(1.0, 0.2)), request_at(2, Coord(1.0, 0.3))};
    const Instance inst = build_instance(s);
    Solution sol;
    sol.routes = {{0, {inst.depot_start(), inst.depot_end()}, {{}, {}}}};
    sol.routes[0].schedule[0].energy = sol.routes[0].schedule[1].energy = inst.vehicle(0).e_init;
    sol.assignment = {kNoNode, kNoNode, kNoNode};
    sol.rejected = {0, 1, 2};
    CHECK(evaluate_objective(sol, inst) == doctest::Approx(120.0));
    CHECK(check_feasibility(sol, inst).empty());
  }
  SUBCASE("term by term from the schedules") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Instance inst = tiny_instance(seed);
      SearchConfig cfg;
      cfg.iteration_budget = 100;
      cfg.restarts = 1;
      const Solution sol = lns_solve(inst, cfg);
      const auto& l = inst.params().lambda;
      double travel = 0.0, charge = 0.0, walk = 0.0, wait = 0.0;
      for (const auto& r : sol.routes)
        for (std::size_t i = 0; i < r.stops.size(); ++i) {
          if (i + 1 < r.stops.size()) travel += inst.dist(r.stops[i], r.stops[i + 1]) / inst.vehicle(r.vehicle).speed * 60.0;
          if (inst.is_station(r.stops[i])) wait += r.schedule[i].wait;
        }
      for (const auto& e : sol.charging) charge += e.duration;
      for (std::size_t r = 0; r < sol.assignment.size(); ++r)
        if (sol.assignment[r] != kNoNode)
          walk += euclidean(inst.request(static_cast<int>(r)).origin, inst.node(sol.assignment[r]).coord) /
                  inst.params().walk_speed * 60.0;
      const double z = l.travel * (travel + charge) + l.walk * walk + l.wait * wait +
                       l.reject * static_cast<double>(sol.rejected.size());
      CHECK(evaluate_objective(sol, inst) == doctest::Approx(z).epsilon(1e-12));
      CHECK(sol.objective == doctest::Approx(z).epsilon(1e-12));
    }
  }
  SUBCASE("a rejection with routes unchanged costs the penalty less the walk") {
    const Instance inst = tiny_instance(6);
    SearchConfig cfg;
    cfg.iteration_budget = 50;
    cfg.restarts = 1;
    Solution sol = lns_solve(inst, cfg);
    const double z = evaluate_objective(sol, inst);
    for (std::size_t r = 0; r < sol.assignment.size(); ++r) {
      if (sol.assignment[r] == kNoNode) continue;
      Solution s = sol;
      const double w = walk_time(inst, static_cast<int>(r), s.assignment[r]);
      s.assignment[r] = kNoNode;
      s.rejected.push_back(static_cast<int>(r));
      std::sort(s.rejected.begin(), s.rejected.end());
      CHECK(evaluate_objective(s, inst) - z ==
            doctest::Approx(inst.params().lambda.reject - inst.params().lambda.walk * w));
      break;
    }
  }
}

TEST_CASE("25 riders on a 24 seat bus is exactly one load violation") {
  Scenario s = one_station();
  s.meeting_points = {{0, Coord(2.0, 0.0)}};
  for (int r = 0; r < 25; ++r) s.requests.push_back(request_at(r, Coord(2.0, 0.01 * r)));
  const Instance inst = build_instance(s);
  const NodeId mp = mp_dummy(inst, 0);
  Solution draft;
  draft.routes = {{0, {0, mp, inst.layer(0).station_node, inst.depot_end()}, {}}};
  draft.assignment.assign(25, mp);
  const Solution sol = recompute_solution(inst, draft);
  REQUIRE(sol.routes[0].schedule[1].load == 25);
  const auto v = check_feasibility(sol, inst);
  REQUIRE(v.size() == 1);
  CHECK(v[0].family == family::kLoad);
}

TEST_CASE("validator accepts search output and flags structural damage") {
  const Instance inst = tiny_instance(3);
  SearchConfig cfg;
  cfg.iteration_budget = 200;
  const Solution sol = lns_solve(inst, cfg);
  CHECK(check_feasibility(sol, inst).empty());
  Solution bad = sol;
  bad.routes.pop_back();
  CHECK(families(check_feasibility(bad, inst)).count(family::kFlow));
  bad = sol;
  bad.assignment.pop_back();
  CHECK(families(check_feasibility(bad, inst)).count(family::kAssignment));
}

}  // TEST_SUITE
