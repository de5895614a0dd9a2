#include "fixtures.hpp"
#include "mpefcs/scenario_io.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace mpefcs;
using namespace fixtures;

namespace {

double farthest_point_to_grid(const std::vector<Coord>& grid, double inner, double outer) {
  double worst = 0.0;
  const int steps = 240;
  for (int a = 0; a < steps; ++a)
    for (int b = 0; b < steps; ++b) {
      const Coord p(-outer + 2.0 * outer * (a + 0.5) / steps, -outer + 2.0 * outer * (b + 0.5) / steps);
      const double r = p.norm();
      if (r < inner || r > outer) continue;
      double best = 1e9;
      for (const auto& g : grid) best = std::min(best, (g - p).norm());
      worst = std::max(worst, best);
    }
  return worst;
}

}  // namespace

TEST_SUITE("scenario-gen") {

TEST_CASE("grid covers the annulus within half a diagonal") {
  ScenarioConfig cfg;
  cfg.mp_separation = 1.4;
  const auto grid = generate_mp_grid(cfg);
  const double worst = farthest_point_to_grid(grid, cfg.annulus_inner, cfg.annulus_outer);
  CHECK(worst <= 1.4 / std::sqrt(2.0) + 1e-9);
  // The bound is attained at grid-cell centers inside the annulus.
  const Coord center(0.7, 2.1);
  REQUIRE(center.norm() >= cfg.annulus_inner);
  double nearest = 1e9;
  for (const auto& g : grid) nearest = std::min(nearest, (g - center).norm());
  CHECK(nearest == doctest::Approx(1.4 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(worst >= 1.4 / std::sqrt(2.0) - 0.05);
}

TEST_CASE("grid anchored at the station, trimmed to the reachable ring") {
  ScenarioConfig cfg;
  cfg.mp_separation = 1.0;
  const auto grid = generate_mp_grid(cfg);
  const double lo = cfg.annulus_inner - cfg.params.w_max;
  const double hi = cfg.annulus_outer + cfg.params.w_max;
  std::size_t expect = 0;
  const int n = static_cast<int>(std::ceil(hi / cfg.mp_separation)) + 1;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b) {
      const double r = std::hypot(a * cfg.mp_separation, b * cfg.mp_separation);
      if (r >= lo - 1e-9 && r <= hi + 1e-9) ++expect;
    }
  CHECK(grid.size() == expect);
  for (const auto& g : grid) {
    CHECK(g.norm() >= lo - 1e-9);
    CHECK(g.norm() <= hi + 1e-9);
    CHECK(std::abs(g.x() / cfg.mp_separation - std::round(g.x() / cfg.mp_separation)) < 1e-9);
  }
}

TEST_CASE("degenerate spacing keeps at most the station point") {
  ScenarioConfig cfg;
  cfg.mp_separation = 2.0 * (cfg.annulus_outer + cfg.params.w_max);
  const auto grid = generate_mp_grid(cfg);
  CHECK(grid.size() <= 1);
}

TEST_CASE("600 requests snap to the 13 departures") {
  ScenarioConfig cfg;
  const auto tt = generate_timetable(cfg);
  CHECK(tt.size() == 13);
  const auto reqs = generate_requests(cfg, tt);
  REQUIRE(reqs.size() == 600);
  std::set<double> deps;
  for (const auto& e : tt) deps.insert(e.departure);
  for (const auto& r : reqs) {
    CHECK(deps.count(r.desired_departure) == 1);
    const double rad = r.origin.norm();
    CHECK(rad >= cfg.annulus_inner - 1e-12);
    CHECK(rad <= cfg.annulus_outer + 1e-12);
  }
}

TEST_CASE("zero spread snaps to the departure nearest the mean") {
  ScenarioConfig cfg;
  cfg.arrival_stddev = 0.0;
  cfg.arrival_mean = 452.0;
  const auto reqs = generate_requests(cfg, generate_timetable(cfg));
  for (const auto& r : reqs) CHECK(r.desired_departure == 450.0);
}

TEST_CASE("empty timetable is rejected") {
  ScenarioConfig cfg;
  CHECK_THROWS_AS((void)generate_requests(cfg, {}), std::invalid_argument);
}

TEST_CASE("generation is deterministic") {
  const ScenarioConfig cfg = desk_config(11);
  CHECK(scenario_to_json(generate_scenario(cfg)).dump() == scenario_to_json(generate_scenario(cfg)).dump());
  ScenarioConfig other = cfg;
  other.seed = 12;
  CHECK(scenario_to_json(generate_scenario(other)).dump() != scenario_to_json(generate_scenario(cfg)).dump());
}

TEST_CASE("fleet follows the vehicle template") {
  ScenarioConfig cfg;
  const auto fleet = generate_fleet(cfg);
  REQUIRE(fleet.size() == 14);
  for (const auto& v : fleet) {
    CHECK(v.capacity == 24);
    CHECK(v.battery_capacity == 118.0);
    CHECK(v.consumption == doctest::Approx(1.23));
    CHECK(v.speed == 30.0);
    CHECK(v.e_init >= 59.0);
    CHECK(v.e_init <= 118.0);
  }
  cfg.soc_low = cfg.soc_high = 1.0;
  for (const auto& v : generate_fleet(cfg)) CHECK(v.e_init == 118.0);
}

TEST_CASE("origins split evenly between inner and outer half-area") {
  ScenarioConfig cfg;
  cfg.n_requests = 4000;
  const auto reqs = generate_requests(cfg, generate_timetable(cfg));
  const double split = std::sqrt(0.5 * (cfg.annulus_inner * cfg.annulus_inner + cfg.annulus_outer * cfg.annulus_outer));
  int inner = 0;
  for (const auto& r : reqs) inner += r.origin.norm() < split;
  const double n = static_cast<double>(reqs.size());
  CHECK(std::abs(inner - n / 2.0) <= 3.0 * std::sqrt(n) / 2.0);
}

TEST_CASE("invalid configurations are rejected") {
  ScenarioConfig cfg;
  cfg.annulus_inner = 7.0;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.mp_separation = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.soc_low = 0.9;
  cfg.soc_high = 0.5;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}

TEST_CASE("config JSON round trip") {
  ScenarioConfig cfg = desk_config(5);
  cfg.mp_separation = 1.4;
  const ScenarioConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(back).dump() == config_to_json(cfg).dump());
}

}  // TEST_SUITE
