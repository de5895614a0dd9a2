#include "mpefcs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace mpefcs {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::DepotStart: return "depot_start";
    case NodeKind::DepotEnd: return "depot_end";
    case NodeKind::MeetingPoint: return "meeting_point";
    case NodeKind::TransitStation: return "station";
    case NodeKind::Charger: return "charger";
  }
  return "unknown";
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw InstanceError(what); }

void validate_scenario(const Scenario& s) {
  const auto& p = s.params;
  if (!(p.horizon.end > p.horizon.start)) {
    std::ostringstream os;
    os << "horizon is empty: [" << p.horizon.start << ", " << p.horizon.end << "]";
    fail(os.str());
  }
  if (s.stations.empty()) fail("scenario has no transit station");
  if (s.timetable.empty()) fail("scenario has an empty timetable");
  if (p.bus_speed <= 0.0) fail("bus speed must be positive");
  if (p.walk_speed <= 0.0) fail("walking speed must be positive");
  if (p.detour_factor < 1.0) fail("detour factor must be >= 1");
  if (p.buffer < 0.0) fail("buffer time must be nonnegative");
  if (p.w_max < 0.0) fail("maximum walking distance must be nonnegative");

  for (std::size_t i = 0; i < s.stations.size(); ++i)
    if (s.stations[i].id != static_cast<int>(i)) fail("station ids must be 0..n-1 in order");
  for (std::size_t i = 0; i < s.meeting_points.size(); ++i)
    if (s.meeting_points[i].id != static_cast<int>(i)) fail("meeting point ids must be 0..n-1 in order");
  for (std::size_t i = 0; i < s.chargers.size(); ++i) {
    const auto& c = s.chargers[i];
    if (c.physical_id != static_cast<int>(i)) fail("charger ids must be 0..n-1 in order");
    if (!(c.rate > 0.0)) fail("charger " + std::to_string(i) + " has a nonpositive rate");
  }

  std::map<int, double> last_departure;
  for (const auto& e : s.timetable) {
    if (e.station < 0 || e.station >= static_cast<int>(s.stations.size()))
      fail("timetable references unknown station " + std::to_string(e.station));
    if (e.departure < p.horizon.start - kFeasTol || e.departure > p.horizon.end + kFeasTol) {
      std::ostringstream os;
      os << "departure " << e.departure << " at station " << e.station << " lies outside the horizon";
      fail(os.str());
    }
    auto it = last_departure.find(e.station);
    if (it != last_departure.end() && !(e.departure > it->second)) {
      std::ostringstream os;
      os << "departures at station " << e.station << " are not strictly increasing at " << e.departure;
      fail(os.str());
    }
    last_departure[e.station] = e.departure;
  }

  for (std::size_t k = 0; k < s.vehicles.size(); ++k) {
    const auto& v = s.vehicles[k];
    const std::string name = "vehicle " + std::to_string(k);
    if (v.id != static_cast<int>(k)) fail("vehicle ids must be 0..n-1 in order");
    if (v.capacity <= 0) fail(name + " has nonpositive capacity");
    if (!(v.consumption > 0.0)) fail(name + " has nonpositive consumption");
    if (!(0.0 <= v.e_min && v.e_min <= v.e_init + kFeasTol && v.e_init <= v.e_max + kFeasTol &&
          v.e_max <= v.battery_capacity + kFeasTol))
      fail(name + " violates 0 <= e_min <= e_init <= e_max <= battery");
    if (std::abs(v.speed - p.bus_speed) > 1e-9) fail(name + " speed differs from the fleet bus speed");
  }

  for (std::size_t r = 0; r < s.requests.size(); ++r) {
    const auto& q = s.requests[r];
    if (q.id != static_cast<int>(r)) fail("request ids must be 0..n-1 in order");
    if (q.station < 0 || q.station >= static_cast<int>(s.stations.size()))
      fail("request " + std::to_string(r) + " references absent station " + std::to_string(q.station));
  }
}

}  // namespace

Instance build_instance(const Scenario& raw) {
  validate_scenario(raw);
  Instance inst;
  inst.scenario_ = raw;
  const auto& p = raw.params;
  auto& nodes = inst.nodes_;

  // Layers ordered by departure, then station.
  std::vector<TimetableEntry> entries = raw.timetable;
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.departure != b.departure ? a.departure < b.departure : a.station < b.station;
  });
  for (std::size_t l = 0; l < entries.size(); ++l) {
    Layer layer;
    layer.index = static_cast<int>(l);
    layer.station = entries[l].station;
    layer.departure = entries[l].departure;
    inst.layers_.push_back(layer);
  }
  auto find_layer = [&](int station, double departure) -> int {
    for (const auto& layer : inst.layers_)
      if (layer.station == station && std::abs(layer.departure - departure) <= 1e-6) return layer.index;
    return -1;
  };

  inst.requests_.resize(raw.requests.size());
  for (std::size_t r = 0; r < raw.requests.size(); ++r) {
    const auto& q = raw.requests[r];
    const int l = find_layer(q.station, q.desired_departure);
    if (l < 0) {
      std::ostringstream os;
      os << "request " << r << " wants departure " << q.desired_departure << " at station " << q.station
         << " which is absent from the timetable";
      fail(os.str());
    }
    auto& req = inst.requests_[r];
    req.id = static_cast<int>(r);
    req.origin = q.origin;
    req.layer = l;
    req.desired_departure = q.desired_departure;
    inst.layers_[static_cast<std::size_t>(l)].requests.push_back(req.id);
  }

  Node start;
  start.id = 0;
  start.kind = NodeKind::DepotStart;
  start.coord = p.depot;
  start.window = {0.0, std::numeric_limits<double>::infinity()};
  nodes.push_back(start);

  const double reach = p.w_max + 1e-9;
  for (auto& layer : inst.layers_) {
    for (const auto& mp : raw.meeting_points) {
      const bool useful = std::any_of(layer.requests.begin(), layer.requests.end(), [&](int r) {
        return euclidean(inst.requests_[static_cast<std::size_t>(r)].origin, mp.coord) <= reach;
      });
      if (!useful) continue;
      Node n;
      n.id = static_cast<NodeId>(nodes.size());
      n.kind = NodeKind::MeetingPoint;
      n.physical_id = mp.id;
      n.layer = layer.index;
      n.coord = mp.coord;
      n.window = {0.0, layer.departure};
      n.service_time = p.service_time_mp;
      layer.mps.push_back(n.id);
      nodes.push_back(n);
    }
    Node st;
    st.id = static_cast<NodeId>(nodes.size());
    st.kind = NodeKind::TransitStation;
    st.physical_id = layer.station;
    st.layer = layer.index;
    st.coord = raw.stations[static_cast<std::size_t>(layer.station)].coord;
    st.window = {layer.departure - p.buffer, layer.departure};
    st.service_time = p.service_time_station;
    layer.station_node = st.id;
    nodes.push_back(st);
  }

  const int default_dummies =
      p.charger_dummy_count > 0 ? p.charger_dummy_count : std::max(1, static_cast<int>(raw.vehicles.size()));
  inst.chargers_ = raw.chargers;
  inst.charger_dummies_.resize(raw.chargers.size());
  for (auto& c : inst.chargers_) {
    if (c.dummy_count <= 0) c.dummy_count = default_dummies;
    for (int d = 0; d < c.dummy_count; ++d) {
      Node n;
      n.id = static_cast<NodeId>(nodes.size());
      n.kind = NodeKind::Charger;
      n.physical_id = c.physical_id;
      n.coord = c.coord;
      n.window = {0.0, std::numeric_limits<double>::infinity()};
      inst.charger_dummies_[static_cast<std::size_t>(c.physical_id)].push_back(n.id);
      nodes.push_back(n);
    }
  }

  Node end = start;
  end.id = static_cast<NodeId>(nodes.size());
  end.kind = NodeKind::DepotEnd;
  nodes.push_back(end);

  const auto n = static_cast<Eigen::Index>(nodes.size());
  inst.dist_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      inst.dist_(i, j) = i == j ? 0.0 : euclidean(nodes[static_cast<std::size_t>(i)].coord,
                                                  nodes[static_cast<std::size_t>(j)].coord);
  inst.time_ = inst.dist_ / p.bus_speed * 60.0;

  // Candidates: every meeting-point dummy of the request's layer within w_max.
  for (auto& req : inst.requests_) {
    const auto& layer = inst.layers_[static_cast<std::size_t>(req.layer)];
    req.dropoff = layer.station_node;
    for (NodeId mp : layer.mps) {
      const double w = euclidean(req.origin, nodes[static_cast<std::size_t>(mp)].coord);
      if (w <= reach) req.candidates.push_back({mp, w, walk_minutes(w, p.walk_speed)});
    }
  }

  inst.ride_limit_.assign(nodes.size(), std::numeric_limits<double>::infinity());
  for (const auto& layer : inst.layers_)
    for (NodeId mp : layer.mps)
      inst.ride_limit_[static_cast<std::size_t>(mp)] = inst.time_(mp, layer.station_node) * p.detour_factor;

  // Bus arcs, following the round-trip structure: depot/station/charger lead
  // into a block of same-layer meeting points that closes at the layer's
  // station; chargers sit between blocks.
  auto& arcs = inst.arcs_;
  arcs.setConstant(n, n, false);
  const NodeId s0 = 0;
  const NodeId s_end = static_cast<NodeId>(n - 1);
  auto kind = [&](NodeId i) { return nodes[static_cast<std::size_t>(i)].kind; };
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i == j || j == s0 || i == s_end) continue;
      const NodeKind ki = kind(i);
      const NodeKind kj = kind(j);
      const Node& ni = nodes[static_cast<std::size_t>(i)];
      const Node& nj = nodes[static_cast<std::size_t>(j)];
      bool ok = false;
      switch (ki) {
        case NodeKind::DepotStart:
          ok = kj == NodeKind::MeetingPoint || kj == NodeKind::Charger || kj == NodeKind::DepotEnd;
          break;
        case NodeKind::MeetingPoint:
          if (kj == NodeKind::MeetingPoint && nj.layer == ni.layer) {
            const NodeId st = inst.layers_[static_cast<std::size_t>(ni.layer)].station_node;
            ok = inst.time_(i, j) + nj.service_time + inst.time_(j, st) <= inst.ride_limit_[static_cast<std::size_t>(i)] + kFeasTol;
          } else if (kj == NodeKind::TransitStation) {
            ok = nj.layer == ni.layer;
          }
          break;
        case NodeKind::TransitStation:
          if (kj == NodeKind::MeetingPoint) {
            const auto& from = inst.layers_[static_cast<std::size_t>(ni.layer)];
            const auto& to = inst.layers_[static_cast<std::size_t>(nj.layer)];
            const double reach_station =
                ni.window.earliest + ni.service_time + inst.time_(i, j) + nj.service_time + inst.time_(j, to.station_node);
            ok = to.departure > from.departure && reach_station <= to.departure + kFeasTol;
          } else {
            ok = kj == NodeKind::Charger || kj == NodeKind::DepotEnd;
          }
          break;
        case NodeKind::Charger:
          ok = kj == NodeKind::MeetingPoint || kj == NodeKind::DepotEnd;
          break;
        case NodeKind::DepotEnd:
          break;
      }
      arcs(i, j) = ok;
    }
  }
  return inst;
}

double travel_time(const Instance& inst, NodeId i, NodeId j, const VehicleSpec& v) {
  return inst.dist(i, j) / v.speed * 60.0;
}

double arc_energy(const Instance& inst, NodeId i, NodeId j, const VehicleSpec& v) {
  return v.consumption * inst.dist(i, j);
}

double max_ride_time(const Instance& inst, int r, NodeId mp) {
  const auto& req = inst.request(r);
  return inst.time(mp, req.dropoff) * inst.params().detour_factor;
}

}  // namespace mpefcs
