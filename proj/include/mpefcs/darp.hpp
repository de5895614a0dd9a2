#pragma once

#include "mpefcs/kpi.hpp"
#include "mpefcs/lns.hpp"
#include "mpefcs/model.hpp"

namespace mpefcs {

struct DarpConfig {
  SearchConfig search;
  int fleet_cap = 40;  // vehicles available to the door-to-door service
};

/// Door-to-door variant of a scenario: one pickup point at every origin with
/// zero walking range, no chargers, energy unconstrained, `fleet` copies of
/// the first vehicle.
[[nodiscard]] Scenario darp_scenario(const Scenario& base, int fleet);

struct DarpResult {
  Instance instance;  // the door-to-door instance the solution refers to
  Solution solution;
  KpiReport kpis;
};

/// Travel-time minimizing dial-a-ride baseline on the same engine, ride-time
/// limits kept.
[[nodiscard]] DarpResult solve_darp_baseline(const Instance& inst, const DarpConfig& cfg = {});

struct FleetSearchResult {
  int fleet = 0;  // smallest fleet reaching full service; -1 when none up to the cap
  Solution solution;
  KpiReport kpis;
};

/// Smallest fleet in [lo, hi] for which lns_solve serves every request.
[[nodiscard]] FleetSearchResult min_fleet_full_service(const Scenario& base, const SearchConfig& search, int lo,
                                                       int hi);

}  // namespace mpefcs
