#pragma once

#include "mpefcs/model.hpp"
#include "mpefcs/propagate.hpp"
#include "mpefcs/solution.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mpefcs {

using StopList = std::vector<NodeId>;

/// Per physical charger: the (vehicle, visit ordinal within the route) pairs in
/// service order.
using ChargerOrder = std::vector<std::vector<std::pair<int, int>>>;

struct ChargingOptions {
  IdlePolicy idle = IdlePolicy::JustInTime;
  bool try_swaps = true;
};

struct ChargingPlan {
  bool feasible = false;
  std::vector<RouteEvaluation> routes;  // per vehicle
  std::vector<ChargingEvent> events;    // grouped by physical charger, chronological
  ChargerOrder order;
  double cost = 0.0;  // sum of route costs
  std::string error;
  /// Two events (indices into `events`) whose sequencing causes the failure.
  std::pair<int, int> blocking{-1, -1};
};

/// First-come-first-served by arrival at each physical charger; a vehicle
/// finding the charger busy waits and its downstream stops are re-propagated.
/// When that leaves a route infeasible, adjacent swaps in the per-charger
/// sequences are tried and the cheapest feasible sequencing is kept.
[[nodiscard]] ChargingPlan schedule_charging(const Instance& inst, std::span<const StopList> routes,
                                             std::span<const int> boarding, const ChargingOptions& opts = {});

/// Same propagation with a prescribed per-charger sequence. A sequence that
/// contradicts a route's own visit order is reported infeasible.
[[nodiscard]] ChargingPlan schedule_charging_ordered(const Instance& inst, std::span<const StopList> routes,
                                                     std::span<const int> boarding, const ChargerOrder& order,
                                                     const ChargingOptions& opts = {});

/// Tries every sequencing when the total number of charger visits is small
/// (at most `max_visits`), otherwise falls back to schedule_charging.
[[nodiscard]] ChargingPlan schedule_charging_exhaustive(const Instance& inst, std::span<const StopList> routes,
                                                        std::span<const int> boarding, int max_visits = 7,
                                                        const ChargingOptions& opts = {});

/// Removes charger stops whose recharge would be zero, repeating until none
/// is left. Returns the number of stops removed.
int drop_idle_chargers(const Instance& inst, std::vector<StopList>& routes, std::span<const int> boarding);

/// Relabels charger stops onto dummy copies (the latest visit at a charger
/// takes the lowest-numbered used copy) and assembles a solution from a plan,
/// feasible or not.
[[nodiscard]] Solution assemble_solution(const Instance& inst, std::vector<StopList> routes,
                                         const std::vector<NodeId>& assignment, ChargingPlan plan);

/// Drops zero-length charger stops, schedules charging (first-come, all
/// sequencings when `exhaustive_order`, or the given `order`) and assembles
/// the solution. Returns nullopt with `error` set when no schedule is feasible.
[[nodiscard]] std::optional<Solution> finalize_solution(const Instance& inst, std::vector<StopList> routes,
                                                        const std::vector<NodeId>& assignment,
                                                        std::string* error = nullptr,
                                                        const ChargingOptions& opts = {},
                                                        bool exhaustive_order = false,
                                                        const ChargerOrder* order = nullptr);

/// Solution with schedules recomputed from the stop lists and assignment,
/// without any feasibility filtering. Meant for inspection and fault studies.
[[nodiscard]] Solution recompute_solution(const Instance& inst, const Solution& sol);

}  // namespace mpefcs
