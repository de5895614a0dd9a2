#pragma once

#include "mpefcs/model.hpp"

#include <string>
#include <vector>

namespace mpefcs {

struct StopSchedule {
  double arrival = 0.0;
  double begin = 0.0;
  double wait = 0.0;  // stations only
  int load = 0;
  double energy = 0.0;  // on arrival, before any charging
};

struct ChargingEvent {
  int vehicle = 0;
  NodeId charger_dummy = kNoNode;
  int physical_charger = 0;
  int stop = 0;  // index into the vehicle's route
  double arrival = 0.0;
  double start = 0.0;
  double duration = 0.0;
  double energy_added = 0.0;
  int order_index = 0;  // position in the physical charger's sequence
};

struct Route {
  int vehicle = 0;
  std::vector<NodeId> stops;  // DepotStart ... DepotEnd
  std::vector<StopSchedule> schedule;
};

struct Solution {
  std::vector<Route> routes;  // one per vehicle, indexed by vehicle
  std::vector<ChargingEvent> charging;
  std::vector<NodeId> assignment;  // per request: meeting-point dummy or kNoNode
  std::vector<int> rejected;       // ascending
  double objective = 0.0;
};

/// Constraint families checked by the validator.
namespace family {
inline constexpr const char* kAssignment = "assignment";
inline constexpr const char* kFlow = "flow";
inline constexpr const char* kPairing = "pairing";
inline constexpr const char* kLoad = "load";
inline constexpr const char* kTiming = "timing";
inline constexpr const char* kWait = "wait";
inline constexpr const char* kRideTime = "ride_time";
inline constexpr const char* kTimeWindow = "time_window";
inline constexpr const char* kEnergy = "energy";
inline constexpr const char* kCharging = "charging";
inline constexpr const char* kAll[] = {kAssignment, kFlow, kPairing, kLoad, kTiming,
                                       kWait, kRideTime, kTimeWindow, kEnergy, kCharging};
}  // namespace family

struct Violation {
  std::string family;
  int vehicle = -1;
  int stop = -1;
  int request = -1;
  double slack = 0.0;  // negative amount by which the constraint fails
  std::string detail;
};

[[nodiscard]] std::string describe(const Violation& v);

/// Requests boarding at each node id under `assignment`.
[[nodiscard]] std::vector<int> boarding_per_node(const Instance& inst, const std::vector<NodeId>& assignment);

}  // namespace mpefcs
