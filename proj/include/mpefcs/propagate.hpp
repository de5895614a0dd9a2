#pragma once

#include "mpefcs/model.hpp"
#include "mpefcs/solution.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mpefcs {

/// How a vehicle uses slack ahead of a station window.
///  JustInTime: the first pickup of each block is held back so the vehicle
///  reaches the station exactly at the window opening; no station wait.
///  Strict: leaves the depot at the horizon start and never idles; early
///  arrivals wait at the station.
enum class IdlePolicy { JustInTime, Strict };

/// Busy intervals already booked at each physical charger.
class ChargerCalendar {
 public:
  explicit ChargerCalendar(std::size_t chargers = 0) : busy_(chargers) {}
  void book(int physical, double start, double end);
  /// Earliest start >= ready such that [start, start + duration] is free.
  [[nodiscard]] double earliest_fit(int physical, double ready, double duration) const;
  [[nodiscard]] std::size_t size() const { return busy_.size(); }
  [[nodiscard]] const std::vector<std::pair<double, double>>& busy(int physical) const {
    return busy_[static_cast<std::size_t>(physical)];
  }

 private:
  std::vector<std::vector<std::pair<double, double>>> busy_;  // sorted by start
};

struct PropagationOptions {
  IdlePolicy idle = IdlePolicy::JustInTime;
  bool stop_at_violation = false;
  /// Per charger visit of the route, in route order: earliest allowed start.
  std::span<const double> release{};
  const ChargerCalendar* calendar = nullptr;
};

struct ChargeVisit {
  int stop = 0;
  int physical = 0;
  double arrival = 0.0;
  double start = 0.0;
  double duration = 0.0;
  double energy_added = 0.0;
};

struct RouteEvaluation {
  bool feasible = true;
  std::string family;  // first violation
  int violation_stop = -1;
  double slack = 0.0;

  double travel_time = 0.0;  // minutes on bus arcs
  double distance = 0.0;     // km
  double charge_time = 0.0;
  double wait = 0.0;
  double cost = 0.0;  // lambda1 (travel + charge) + lambda3 wait
  std::vector<StopSchedule> schedule;
  std::vector<ChargeVisit> charges;
};

/// Forward pass over one route: arrival, begin, load and energy per stop,
/// with minimal recharges (or full top-ups when configured) at charger stops.
/// `boarding` holds the number of requests boarding at each node id.
/// Feasibility covers arcs, block structure, capacity, station windows,
/// ride times and energy bounds; the first violation is recorded.
void propagate_route(const Instance& inst, int vehicle, std::span<const NodeId> stops, std::span<const int> boarding,
                     const PropagationOptions& opts, RouteEvaluation& out);

[[nodiscard]] RouteEvaluation propagate_route(const Instance& inst, int vehicle, std::span<const NodeId> stops,
                                              std::span<const int> boarding, const PropagationOptions& opts = {});

}  // namespace mpefcs
