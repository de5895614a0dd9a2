#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Domain model of the meeting-point electric feeder service: raw scenario
// description, the layered dummy-node graph built from it, and the
// elementary travel/energy formulas everything else is built on.
//
// Units: kilometers, minutes (since midnight), kWh, km/h for speeds.

namespace mpefcs {

using Coord = Eigen::Vector2d;
using NodeId = int;
inline constexpr NodeId kNoNode = -1;

/// Tolerance used by every feasibility comparison (minutes, kWh, km).
inline constexpr double kFeasTol = 1e-6;

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind { DepotStart, DepotEnd, MeetingPoint, TransitStation, Charger };

[[nodiscard]] const char* to_string(NodeKind kind);

struct TimeWindow {
  double earliest = 0.0;
  double latest = 0.0;
};

struct Horizon {
  double start = 360.0;
  double end = 540.0;
};

/// Objective weights lambda1..lambda4.
struct Weights {
  double travel = 1.0;   // vehicle travel + charging time
  double walk = 1.0;     // customer walking time
  double wait = 1.0;     // excess wait at stations
  double reject = 40.0;  // penalty per unserved customer
};

struct ServiceParams {
  Weights lambda;
  double w_max = 1.0;           // km
  double buffer = 10.0;         // min before train departure
  double detour_factor = 1.5;
  double walk_speed = 5.1;      // km/h
  double bus_speed = 30.0;      // km/h, shared by the whole fleet
  Horizon horizon;
  double service_time_mp = 0.5;       // min
  double service_time_station = 0.5;  // min
  int charger_dummy_count = 0;        // 0: one dummy per vehicle
  Coord depot = Coord::Zero();
  double rho = 0.1;             // assignment compactness weight
  bool enforce_energy = true;   // false for the diesel baseline
  bool charge_to_full = false;  // top up to e_max instead of minimal recharge
};

struct TimetableEntry {
  int station = 0;
  double departure = 0.0;
};

struct StationSpec {
  int id = 0;
  Coord coord = Coord::Zero();
};

struct MeetingPointSpec {
  int id = 0;
  Coord coord = Coord::Zero();
};

struct ChargerSpec {
  int physical_id = 0;
  Coord coord = Coord::Zero();
  double rate = 50.0 / 60.0;  // kWh per minute
  int dummy_count = 0;        // 0: take the instance default
};

struct VehicleSpec {
  int id = 0;
  int capacity = 24;
  double battery_capacity = 118.0;
  double e_min = 0.0;
  double e_max = 118.0;
  double e_init = 118.0;
  double consumption = 1.23;  // kWh per km
  double speed = 30.0;        // km/h
};

struct RequestSpec {
  int id = 0;
  Coord origin = Coord::Zero();
  int station = 0;
  double desired_departure = 0.0;
};

/// Raw scenario, the serialized form of an instance.
struct Scenario {
  ServiceParams params;
  std::vector<TimetableEntry> timetable;
  std::vector<StationSpec> stations;
  std::vector<ChargerSpec> chargers;
  std::vector<VehicleSpec> vehicles;
  std::vector<RequestSpec> requests;
  std::vector<MeetingPointSpec> meeting_points;
};

struct Node {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::DepotStart;
  int physical_id = -1;  // index into meeting points, stations or chargers
  int layer = -1;
  Coord coord = Coord::Zero();
  TimeWindow window{0.0, 0.0};  // meaningful for stations only
  double service_time = 0.0;
};

struct Candidate {
  NodeId mp = kNoNode;
  double walk_km = 0.0;
  double walk_min = 0.0;
};

struct Request {
  int id = 0;
  Coord origin = Coord::Zero();
  int layer = -1;
  NodeId dropoff = kNoNode;
  double desired_departure = 0.0;
  std::vector<Candidate> candidates;  // sorted by mp id
};

/// A (station, departure) pair with its dummy nodes and requests.
struct Layer {
  int index = 0;
  int station = 0;
  double departure = 0.0;
  NodeId station_node = kNoNode;
  std::vector<NodeId> mps;
  std::vector<int> requests;
};

/// The layered directed graph. Immutable after build_instance.
class Instance {
 public:
  [[nodiscard]] const Scenario& scenario() const { return scenario_; }
  [[nodiscard]] const ServiceParams& params() const { return scenario_.params; }
  [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
  [[nodiscard]] const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  [[nodiscard]] int node_count() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const std::vector<Request>& requests() const { return requests_; }
  [[nodiscard]] const Request& request(int r) const { return requests_[static_cast<std::size_t>(r)]; }
  [[nodiscard]] int request_count() const { return static_cast<int>(requests_.size()); }
  [[nodiscard]] const std::vector<VehicleSpec>& fleet() const { return scenario_.vehicles; }
  [[nodiscard]] const VehicleSpec& vehicle(int k) const { return scenario_.vehicles[static_cast<std::size_t>(k)]; }
  [[nodiscard]] int vehicle_count() const { return static_cast<int>(scenario_.vehicles.size()); }
  [[nodiscard]] const std::vector<ChargerSpec>& chargers() const { return chargers_; }
  [[nodiscard]] const std::vector<Layer>& layers() const { return layers_; }
  [[nodiscard]] const Layer& layer(int l) const { return layers_[static_cast<std::size_t>(l)]; }

  [[nodiscard]] NodeId depot_start() const { return 0; }
  [[nodiscard]] NodeId depot_end() const { return node_count() - 1; }
  /// Dummy nodes of a physical charger, ascending.
  [[nodiscard]] const std::vector<NodeId>& charger_dummies(int physical) const {
    return charger_dummies_[static_cast<std::size_t>(physical)];
  }

  [[nodiscard]] double dist(NodeId i, NodeId j) const { return dist_(i, j); }
  [[nodiscard]] double time(NodeId i, NodeId j) const { return time_(i, j); }
  [[nodiscard]] bool arc(NodeId i, NodeId j) const { return arcs_(i, j); }
  [[nodiscard]] const Eigen::MatrixXd& dist_matrix() const { return dist_; }
  [[nodiscard]] const Eigen::MatrixXd& time_matrix() const { return time_; }
  [[nodiscard]] const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& arc_matrix() const { return arcs_; }

  /// Maximum ride time of customers boarding at meeting-point dummy `mp`.
  [[nodiscard]] double ride_limit(NodeId mp) const { return ride_limit_[static_cast<std::size_t>(mp)]; }
  [[nodiscard]] bool is_mp(NodeId i) const { return node(i).kind == NodeKind::MeetingPoint; }
  [[nodiscard]] bool is_station(NodeId i) const { return node(i).kind == NodeKind::TransitStation; }
  [[nodiscard]] bool is_charger(NodeId i) const { return node(i).kind == NodeKind::Charger; }
  /// Station dummy closing the block of a meeting-point dummy.
  [[nodiscard]] NodeId station_of(NodeId mp) const { return layer(node(mp).layer).station_node; }
  [[nodiscard]] const ChargerSpec& charger_of(NodeId c) const {
    return chargers_[static_cast<std::size_t>(node(c).physical_id)];
  }

 private:
  friend Instance build_instance(const Scenario& raw);

  Scenario scenario_;
  std::vector<Node> nodes_;
  std::vector<Request> requests_;
  std::vector<ChargerSpec> chargers_;
  std::vector<Layer> layers_;
  std::vector<std::vector<NodeId>> charger_dummies_;
  std::vector<double> ride_limit_;
  Eigen::MatrixXd dist_;
  Eigen::MatrixXd time_;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> arcs_;
};

/// Builds the layered graph: one layer per (station, departure), meeting-point
/// dummies per layer for every meeting point within walking range of one of
/// the layer's requests, station windows [departure - buffer, departure],
/// charger dummies, distance/time matrices and the trimmed bus-arc set.
/// Throws InstanceError naming the offending entity.
[[nodiscard]] Instance build_instance(const Scenario& raw);

[[nodiscard]] inline double euclidean(const Coord& a, const Coord& b) { return (a - b).norm(); }

/// Minutes needed to drive between two nodes.
[[nodiscard]] double travel_time(const Instance& inst, NodeId i, NodeId j, const VehicleSpec& v);

/// kWh consumed on the arc (i, j).
[[nodiscard]] double arc_energy(const Instance& inst, NodeId i, NodeId j, const VehicleSpec& v);

/// Walking minutes for a distance in km.
[[nodiscard]] inline double walk_minutes(double km, double walk_speed) { return km / walk_speed * 60.0; }

/// Maximum ride time for request r when picked up at candidate `mp`.
[[nodiscard]] double max_ride_time(const Instance& inst, int r, NodeId mp);

}  // namespace mpefcs
