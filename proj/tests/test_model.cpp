#include "fixtures.hpp"
#include "mpefcs/scenario_io.hpp"

#include <doctest.h>

#include <cmath>

using namespace mpefcs;
using namespace fixtures;

TEST_SUITE("core-model") {

TEST_CASE("one layer per station and departure") {
  Scenario s = one_station();
  s.stations.push_back({1, Coord(6.0, 0.0)});
  s.timetable = {{0, 420.0}, {0, 450.0}, {0, 480.0}, {1, 420.0}, {1, 450.0}, {1, 480.0}};
  s.meeting_points = {{0, Coord(1.0, 0.0)}, {1, Coord(5.0, 0.0)}};
  for (int l = 0; l < 6; ++l) {
    const double dep = 420.0 + 30.0 * (l % 3);
    RequestSpec r = request_at(l, l < 3 ? Coord(1.2, 0.0) : Coord(5.2, 0.0), dep);
    r.station = l < 3 ? 0 : 1;
    s.requests.push_back(r);
  }
  const Instance inst = build_instance(s);
  REQUIRE(inst.layers().size() == 6);
  std::vector<NodeId> seen;
  for (const auto& layer : inst.layers()) {
    CHECK(std::find(seen.begin(), seen.end(), layer.station_node) == seen.end());
    seen.push_back(layer.station_node);
    for (NodeId m : layer.mps) CHECK(inst.node(m).layer == layer.index);
    CHECK(inst.node(layer.station_node).layer == layer.index);
  }
  for (int r = 0; r < inst.request_count(); ++r) {
    const auto& rq = inst.request(r);
    REQUIRE(rq.candidates.size() == 1);
    CHECK(inst.node(rq.candidates[0].mp).layer == rq.layer);
    CHECK(inst.node(rq.dropoff).layer == rq.layer);
  }
}

TEST_CASE("walking candidate at 0.85 km takes 10 minutes") {
  Scenario s = one_station();
  s.meeting_points = {{0, Coord(2.0, 0.0)}};
  s.requests = {request_at(0, Coord(2.85, 0.0))};
  const Instance inst = build_instance(s);
  REQUIRE(inst.request(0).candidates.size() == 1);
  CHECK(inst.request(0).candidates[0].walk_km == doctest::Approx(0.85));
  CHECK(inst.request(0).candidates[0].walk_min == doctest::Approx(10.0));
}

TEST_CASE("request beyond walking range has no candidates") {
  Scenario s = one_station();
  s.meeting_points = {{0, Coord(2.0, 0.0)}};
  s.requests = {request_at(0, Coord(3.3, 0.0))};
  const Instance inst = build_instance(s);
  CHECK(inst.request(0).candidates.empty());
}

TEST_CASE("travel time and arc energy") {
  Scenario s = one_station();
  s.meeting_points = {{0, Coord(5.0, 0.0)}, {1, Coord(7.5, 0.0)}, {2, Coord(3.25, 0.0)}, {3, Coord(10.0, 0.0)}};
  s.requests = {request_at(0, Coord(5.0, 0.1)), request_at(1, Coord(7.5, 0.1)), request_at(2, Coord(3.25, 0.1)),
                request_at(3, Coord(10.0, 0.1))};
  const Instance inst = build_instance(s);
  const VehicleSpec& v = inst.vehicle(0);
  const NodeId st = inst.layer(0).station_node;
  CHECK(travel_time(inst, mp_dummy(inst, 0), st, v) == doctest::Approx(10.0));
  CHECK(travel_time(inst, mp_dummy(inst, 1), st, v) == doctest::Approx(15.0));
  CHECK(travel_time(inst, st, st, v) == 0.0);
  CHECK(arc_energy(inst, mp_dummy(inst, 3), st, v) == doctest::Approx(12.3));
  CHECK(arc_energy(inst, mp_dummy(inst, 2), st, v) == doctest::Approx(3.9975));
  CHECK(arc_energy(inst, st, st, v) == 0.0);
}

TEST_CASE("maximum ride time scales the direct ride by the detour factor") {
  Scenario s = one_station();
  s.meeting_points = {{0, Coord(4.0, 0.0)}, {1, Coord(10.0, 0.0)}, {2, Coord(0.0, 0.0)}};
  s.requests = {request_at(0, Coord(4.0, 0.2)), request_at(1, Coord(10.0, 0.2)), request_at(2, Coord(0.0, 0.3))};
  const Instance inst = build_instance(s);
  CHECK(max_ride_time(inst, 0, mp_dummy(inst, 0)) == doctest::Approx(12.0));
  CHECK(max_ride_time(inst, 1, mp_dummy(inst, 1)) == doctest::Approx(30.0));
  CHECK(max_ride_time(inst, 2, mp_dummy(inst, 2)) == 0.0);
}

TEST_CASE("matrices, windows and arc structure") {
  const Instance inst = build_instance(generate_scenario(desk_config(3)));
  const double speed = inst.vehicle(0).speed;
  for (NodeId i = 0; i < inst.node_count(); ++i)
    for (NodeId j = 0; j < inst.node_count(); ++j) {
      CHECK_MESSAGE(std::abs(inst.time(i, j) - inst.dist(i, j) / speed * 60.0) <= 1e-9, i, " ", j);
      CHECK(inst.dist(i, j) == inst.dist(j, i));
      CHECK(inst.dist(i, j) >= 0.0);
    }
  for (NodeId i = 0; i < inst.node_count(); ++i) {
    CHECK_FALSE(inst.arc(i, inst.depot_start()));
    CHECK_FALSE(inst.arc(inst.depot_end(), i));
    const Node& n = inst.node(i);
    if (n.kind == NodeKind::TransitStation) {
      CHECK(n.window.latest - n.window.earliest == doctest::Approx(inst.params().buffer));
      CHECK(n.window.earliest <= n.window.latest);
    }
    if (n.kind != NodeKind::MeetingPoint) continue;
    for (NodeId j = 0; j < inst.node_count(); ++j) {
      if (!inst.arc(i, j)) continue;
      const Node& m = inst.node(j);
      const bool ok = (m.kind == NodeKind::MeetingPoint && m.layer == n.layer) ||
                      (m.kind == NodeKind::TransitStation && m.layer == n.layer);
      CHECK_MESSAGE(ok, "arc ", i, " -> ", j);
    }
  }
}

TEST_CASE("triangle inequality on distances") {
  const Instance inst = tiny_instance(4);
  for (NodeId i = 0; i < inst.node_count(); ++i)
    for (NodeId j = 0; j < inst.node_count(); ++j)
      for (NodeId k = 0; k < inst.node_count(); ++k)
        CHECK(inst.dist(i, k) <= inst.dist(i, j) + inst.dist(j, k) + 1e-12);
}

TEST_CASE("charger dummies default to one per vehicle") {
  ScenarioConfig cfg = desk_config(1);
  cfg.fleet_size = 4;
  const Instance inst = build_instance(generate_scenario(cfg));
  REQUIRE(inst.chargers().size() == 3);
  for (int c = 0; c < 3; ++c) {
    CHECK(inst.charger_dummies(c).size() == 4);
    for (NodeId d : inst.charger_dummies(c)) CHECK(inst.node(d).physical_id == c);
  }
}

TEST_CASE("construction errors name the entity") {
  Scenario s = one_station();
  s.meeting_points = {{0, Coord(1.0, 0.0)}};
  RequestSpec r = request_at(0, Coord(1.0, 0.0));
  r.station = 7;
  s.requests = {r};
  CHECK_THROWS_AS((void)build_instance(s), InstanceError);
  try {
    (void)build_instance(s);
  } catch (const InstanceError& e) {
    CHECK(std::string(e.what()).find('7') != std::string::npos);
  }
  Scenario h = one_station();
  h.params.horizon = {500.0, 400.0};
  CHECK_THROWS_AS((void)build_instance(h), InstanceError);
  Scenario none = one_station();
  none.stations.clear();
  CHECK_THROWS_AS((void)build_instance(none), InstanceError);
}

TEST_CASE("scenario JSON round trip rebuilds the same instance") {
  const Scenario s = generate_scenario(tiny_config(9));
  const json a = scenario_to_json(s);
  const Scenario back = scenario_from_json(a);
  CHECK(scenario_to_json(back).dump() == a.dump());
  const Instance i1 = build_instance(s);
  const Instance i2 = build_instance(back);
  CHECK(i1.node_count() == i2.node_count());
  CHECK((i1.dist_matrix() - i2.dist_matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((i1.arc_matrix() == i2.arc_matrix()).all());
}

}  // TEST_SUITE
