#include "mpefcs/validator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mpefcs {

namespace {

class Report {
 public:
  void add(const char* fam, int vehicle, int stop, double slack, std::string detail, int request = -1) {
    Violation v;
    v.family = fam;
    v.vehicle = vehicle;
    v.stop = stop;
    v.request = request;
    v.slack = slack;
    v.detail = std::move(detail);
    out.push_back(std::move(v));
  }
  std::vector<Violation> out;
};

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

std::vector<Violation> check_feasibility(const Solution& sol, const Instance& inst) {
  Report rep;
  const auto& p = inst.params();
  const int n_nodes = inst.node_count();
  const int n_req = inst.request_count();
  const double tol = kFeasTol;

  // ---- assignment
  bool assignment_ok = static_cast<int>(sol.assignment.size()) == n_req;
  if (!assignment_ok)
    rep.add(family::kAssignment, -1, -1, 0.0,
            "assignment lists " + std::to_string(sol.assignment.size()) + " requests, instance has " +
                std::to_string(n_req));
  std::vector<int> rejected_mark(static_cast<std::size_t>(n_req), 0);
  for (int r : sol.rejected) {
    if (r < 0 || r >= n_req) {
      rep.add(family::kAssignment, -1, -1, 0.0, "rejected set names unknown request " + std::to_string(r));
      continue;
    }
    if (rejected_mark[static_cast<std::size_t>(r)]++)
      rep.add(family::kAssignment, -1, -1, 0.0, "request rejected twice", r);
  }
  if (assignment_ok) {
    for (int r = 0; r < n_req; ++r) {
      const NodeId mp = sol.assignment[static_cast<std::size_t>(r)];
      const bool rej = rejected_mark[static_cast<std::size_t>(r)] > 0;
      if (mp == kNoNode) {
        if (!rej) rep.add(family::kAssignment, -1, -1, 0.0, "request neither served nor rejected", r);
        continue;
      }
      if (rej) rep.add(family::kAssignment, -1, -1, 0.0, "request both served and rejected", r);
      if (mp < 0 || mp >= n_nodes || !inst.is_mp(mp)) {
        rep.add(family::kAssignment, -1, -1, 0.0, "assigned to non meeting-point node " + std::to_string(mp), r);
        continue;
      }
      const double w = euclidean(inst.request(r).origin, inst.node(mp).coord);
      if (w > p.w_max + tol)
        rep.add(family::kAssignment, -1, -1, p.w_max - w,
                "walking distance " + fmt(w) + " km to node " + std::to_string(mp) + " exceeds the limit", r);
    }
  }

  // ---- flow
  const int n_vehicles = inst.vehicle_count();
  if (static_cast<int>(sol.routes.size()) != n_vehicles)
    rep.add(family::kFlow, -1, -1, 0.0,
            std::to_string(sol.routes.size()) + " routes for " + std::to_string(n_vehicles) + " vehicles");
  std::vector<int> mp_vehicle(static_cast<std::size_t>(n_nodes), -1);
  std::vector<int> mp_stop(static_cast<std::size_t>(n_nodes), -1);
  std::vector<int> charger_uses(static_cast<std::size_t>(n_nodes), 0);
  std::vector<char> route_ok(sol.routes.size(), 1);
  for (std::size_t k = 0; k < sol.routes.size(); ++k) {
    const auto& route = sol.routes[k];
    const int kk = static_cast<int>(k);
    const auto& st = route.stops;
    if (route.vehicle != kk)
      rep.add(family::kFlow, kk, -1, 0.0, "route slot " + std::to_string(k) + " holds vehicle " + std::to_string(route.vehicle));
    if (st.size() < 2 || st.front() != inst.depot_start() || st.back() != inst.depot_end()) {
      rep.add(family::kFlow, kk, -1, 0.0, "route must start at the depot and end at the depot copy");
      route_ok[k] = 0;
      continue;
    }
    if (route.schedule.size() != st.size()) {
      rep.add(family::kFlow, kk, -1, 0.0, "schedule length differs from the stop list");
      route_ok[k] = 0;
      continue;
    }
    std::vector<int> seen(static_cast<std::size_t>(n_nodes), 0);
    for (std::size_t i = 0; i < st.size(); ++i) {
      const NodeId n = st[i];
      const int si = static_cast<int>(i);
      if (n < 0 || n >= n_nodes) {
        rep.add(family::kFlow, kk, si, 0.0, "unknown node " + std::to_string(n));
        route_ok[k] = 0;
        continue;
      }
      if (i > 0 && i + 1 < st.size() && (n == inst.depot_start() || n == inst.depot_end()))
        rep.add(family::kFlow, kk, si, 0.0, "depot inside the route");
      if (seen[static_cast<std::size_t>(n)]++)
        rep.add(family::kFlow, kk, si, 0.0, "node " + std::to_string(n) + " visited twice by the vehicle");
      if (i + 1 < st.size()) {
        const NodeId m = st[i + 1];
        if (m >= 0 && m < n_nodes && !inst.arc(n, m))
          rep.add(family::kFlow, kk, si, 0.0, "arc " + std::to_string(n) + " -> " + std::to_string(m) + " is not a bus arc");
      }
      if (inst.is_mp(n)) {
        if (mp_vehicle[static_cast<std::size_t>(n)] >= 0 && mp_vehicle[static_cast<std::size_t>(n)] != kk)
          rep.add(family::kFlow, kk, si, 0.0, "meeting point " + std::to_string(n) + " visited by two vehicles");
        mp_vehicle[static_cast<std::size_t>(n)] = kk;
        mp_stop[static_cast<std::size_t>(n)] = si;
      }
      if (inst.is_charger(n)) ++charger_uses[static_cast<std::size_t>(n)];
    }
  }
  if (assignment_ok) {
    for (int r = 0; r < n_req; ++r) {
      const NodeId mp = sol.assignment[static_cast<std::size_t>(r)];
      if (mp >= 0 && mp < n_nodes && inst.is_mp(mp) && mp_vehicle[static_cast<std::size_t>(mp)] < 0)
        rep.add(family::kFlow, -1, -1, 0.0, "assigned meeting point " + std::to_string(mp) + " is never visited", r);
    }
  }

  // ---- pairing: the layer station following the pickup is the drop-off
  std::vector<std::vector<int>> riders(static_cast<std::size_t>(n_nodes));
  if (assignment_ok) {
    for (int r = 0; r < n_req; ++r) {
      const NodeId mp = sol.assignment[static_cast<std::size_t>(r)];
      if (mp < 0 || mp >= n_nodes || !inst.is_mp(mp)) continue;
      riders[static_cast<std::size_t>(mp)].push_back(r);
      const int k = mp_vehicle[static_cast<std::size_t>(mp)];
      if (k < 0 || !route_ok[static_cast<std::size_t>(k)]) continue;
      const auto& st = sol.routes[static_cast<std::size_t>(k)].stops;
      NodeId next_station = kNoNode;
      for (std::size_t i = static_cast<std::size_t>(mp_stop[static_cast<std::size_t>(mp)]) + 1; i < st.size(); ++i)
        if (st[i] >= 0 && st[i] < n_nodes && inst.is_station(st[i])) {
          next_station = st[i];
          break;
        }
      if (next_station != inst.request(r).dropoff)
        rep.add(family::kPairing, k, mp_stop[static_cast<std::size_t>(mp)], 0.0,
                "drop-off station " + std::to_string(inst.request(r).dropoff) + " does not close the pickup block", r);
    }
  }

  // Charging events indexed by (vehicle, stop).
  std::map<std::pair<int, int>, int> event_at;
  for (std::size_t e = 0; e < sol.charging.size(); ++e) {
    const auto& ev = sol.charging[e];
    const auto key = std::make_pair(ev.vehicle, ev.stop);
    if (event_at.count(key)) {
      rep.add(family::kCharging, ev.vehicle, ev.stop, 0.0, "two charging events at one stop");
      continue;
    }
    event_at[key] = static_cast<int>(e);
  }

  for (std::size_t k = 0; k < sol.routes.size(); ++k) {
    if (!route_ok[k]) continue;
    const auto& route = sol.routes[k];
    const auto& st = route.stops;
    const auto& sc = route.schedule;
    const int kk = static_cast<int>(k);
    if (kk >= n_vehicles) continue;
    const VehicleSpec& v = inst.vehicle(kk);

    // ---- loads
    std::vector<int> block_riders;
    for (std::size_t i = 0; i < st.size(); ++i) {
      const NodeId n = st[i];
      const int si = static_cast<int>(i);
      const int q = sc[i].load;
      if (q < 0 || q > v.capacity)
        rep.add(family::kLoad, kk, si, static_cast<double>(q < 0 ? q : v.capacity - q),
                "load " + std::to_string(q) + " outside [0, " + std::to_string(v.capacity) + "]");
      if (i == 0) {
        if (q != 0) rep.add(family::kLoad, kk, si, 0.0, "vehicle leaves the depot carrying " + std::to_string(q));
        continue;
      }
      const int prev = sc[i - 1].load;
      if (inst.is_mp(n)) {
        const int board = static_cast<int>(riders[static_cast<std::size_t>(n)].size());
        for (int r : riders[static_cast<std::size_t>(n)]) block_riders.push_back(r);
        if (q != prev + board)
          rep.add(family::kLoad, kk, si, 0.0,
                  "load " + std::to_string(q) + " after boarding " + std::to_string(board) + " from " + std::to_string(prev));
      } else if (inst.is_station(n) && inst.is_mp(st[i - 1])) {
        int drop = 0;
        for (int r : block_riders)
          if (inst.request(r).dropoff == n) ++drop;
        if (q != prev - drop)
          rep.add(family::kLoad, kk, si, 0.0,
                  "load " + std::to_string(q) + " after dropping " + std::to_string(drop) + " from " + std::to_string(prev));
        block_riders.clear();
      } else if (q != prev) {
        rep.add(family::kLoad, kk, si, 0.0,
                "load changes from " + std::to_string(prev) + " to " + std::to_string(q) + " without boarding");
      }
    }

    // ---- timing, waits, windows, ride times
    if (sc[0].begin < -tol) rep.add(family::kTiming, kk, 0, sc[0].begin, "negative start time");
    for (std::size_t i = 1; i < st.size(); ++i) {
      const NodeId a = st[i - 1];
      const NodeId b = st[i];
      const int si = static_cast<int>(i);
      double depart = sc[i - 1].begin + inst.node(a).service_time;
      if (inst.is_charger(a)) {
        auto it = event_at.find({kk, si - 1});
        if (it != event_at.end()) depart = sc[i - 1].begin + sol.charging[static_cast<std::size_t>(it->second)].duration;
      }
      const double expect = depart + inst.time(a, b);
      if (sc[i].begin < expect - tol)
        rep.add(family::kTiming, kk, si, sc[i].begin - expect,
                "begins at " + fmt(sc[i].begin) + " before it can be reached at " + fmt(expect));
      if (sc[i].arrival < -tol || sc[i].begin < -tol) rep.add(family::kTiming, kk, si, 0.0, "negative time");
      if (inst.is_station(b)) {
        if (std::abs(sc[i].arrival - expect) > tol)
          rep.add(family::kTiming, kk, si, -std::abs(sc[i].arrival - expect),
                  "station arrival " + fmt(sc[i].arrival) + " differs from " + fmt(expect));
        const double need = sc[i].begin - sc[i].arrival;
        if (sc[i].wait < need - tol || sc[i].wait < -tol)
          rep.add(family::kWait, kk, si, sc[i].wait - std::max(need, 0.0),
                  "wait " + fmt(sc[i].wait) + " below begin - arrival " + fmt(need));
        const auto& w = inst.node(b).window;
        if (sc[i].begin < w.earliest - tol || sc[i].begin > w.latest + tol)
          rep.add(family::kTimeWindow, kk, si,
                  sc[i].begin < w.earliest ? sc[i].begin - w.earliest : w.latest - sc[i].begin,
                  "begins at " + fmt(sc[i].begin) + " outside [" + fmt(w.earliest) + ", " + fmt(w.latest) + "]");
      } else if (std::abs(sc[i].wait) > tol) {
        rep.add(family::kWait, kk, si, -std::abs(sc[i].wait), "waiting time recorded away from a station");
      }
    }
    for (std::size_t i = 1; i < st.size(); ++i) {
      const NodeId mp = st[i];
      if (!inst.is_mp(mp)) continue;
      for (int r : riders[static_cast<std::size_t>(mp)]) {
        const NodeId d = inst.request(r).dropoff;
        for (std::size_t j = i + 1; j < st.size(); ++j) {
          if (st[j] != d) continue;
          const double ride = sc[j].arrival - sc[i].begin - inst.node(mp).service_time;
          const double limit = inst.ride_limit(mp);
          if (ride > limit + tol)
            rep.add(family::kRideTime, kk, static_cast<int>(i), limit - ride,
                    "ride " + fmt(ride) + " min exceeds " + fmt(limit), r);
          break;
        }
      }
    }

    // ---- energy
    if (p.enforce_energy) {
      if (std::abs(sc[0].energy - v.e_init) > tol)
        rep.add(family::kEnergy, kk, 0, -std::abs(sc[0].energy - v.e_init), "initial charge differs from the vehicle state");
      for (std::size_t i = 0; i < st.size(); ++i) {
        const int si = static_cast<int>(i);
        const double e = sc[i].energy;
        if (e < v.e_min - tol || e > v.e_max + tol)
          rep.add(family::kEnergy, kk, si, e < v.e_min ? e - v.e_min : v.e_max - e,
                  "charge " + fmt(e) + " kWh outside [" + fmt(v.e_min) + ", " + fmt(v.e_max) + "]");
        double after = e;
        if (inst.is_charger(st[i])) {
          auto it = event_at.find({kk, si});
          if (it != event_at.end()) {
            after += inst.charger_of(st[i]).rate * sol.charging[static_cast<std::size_t>(it->second)].duration;
            if (after > v.e_max + tol)
              rep.add(family::kEnergy, kk, si, v.e_max - after, "recharge to " + fmt(after) + " kWh exceeds the upper bound");
          }
        }
        if (i + 1 < st.size()) {
          const double expect = after - v.consumption * inst.dist(st[i], st[i + 1]);
          if (std::abs(sc[i + 1].energy - expect) > tol)
            rep.add(family::kEnergy, kk, si + 1, -std::abs(sc[i + 1].energy - expect),
                    "charge " + fmt(sc[i + 1].energy) + " kWh, energy balance gives " + fmt(expect));
        }
      }
    }
  }

  // ---- charging events
  for (std::size_t k = 0; k < sol.routes.size(); ++k) {
    if (!route_ok[k]) continue;
    const auto& st = sol.routes[k].stops;
    for (std::size_t i = 0; i < st.size(); ++i)
      if (inst.is_charger(st[i]) && !event_at.count({static_cast<int>(k), static_cast<int>(i)}))
        rep.add(family::kCharging, static_cast<int>(k), static_cast<int>(i), 0.0, "charger stop without a charging event");
  }
  std::map<NodeId, int> dummy_event;
  for (std::size_t e = 0; e < sol.charging.size(); ++e) {
    const auto& ev = sol.charging[e];
    const bool vehicle_ok = ev.vehicle >= 0 && ev.vehicle < static_cast<int>(sol.routes.size());
    const auto* route = vehicle_ok ? &sol.routes[static_cast<std::size_t>(ev.vehicle)] : nullptr;
    if (!route || ev.stop < 0 || ev.stop >= static_cast<int>(route->stops.size()) ||
        route->schedule.size() != route->stops.size()) {
      rep.add(family::kCharging, ev.vehicle, ev.stop, 0.0, "charging event points outside its route");
      continue;
    }
    const NodeId node = route->stops[static_cast<std::size_t>(ev.stop)];
    if (node < 0 || node >= n_nodes || !inst.is_charger(node)) {
      rep.add(family::kCharging, ev.vehicle, ev.stop, 0.0, "charging event at a non-charger stop");
      continue;
    }
    if (node != ev.charger_dummy || inst.node(node).physical_id != ev.physical_charger)
      rep.add(family::kCharging, ev.vehicle, ev.stop, 0.0, "event charger differs from the visited dummy");
    if (ev.duration < -tol) rep.add(family::kCharging, ev.vehicle, ev.stop, ev.duration, "negative charging duration");
    const auto& s = route->schedule[static_cast<std::size_t>(ev.stop)];
    if (std::abs(ev.start - s.begin) > tol)
      rep.add(family::kCharging, ev.vehicle, ev.stop, -std::abs(ev.start - s.begin),
              "event start " + fmt(ev.start) + " differs from stop begin " + fmt(s.begin));
    if (std::abs(ev.energy_added - inst.charger_of(node).rate * ev.duration) > tol)
      rep.add(family::kCharging, ev.vehicle, ev.stop, 0.0, "energy added disagrees with rate times duration");
    if (dummy_event.count(node))
      rep.add(family::kCharging, ev.vehicle, ev.stop, 0.0, "charger dummy " + std::to_string(node) + " used twice");
    else
      dummy_event[node] = static_cast<int>(e);
  }
  for (std::size_t c = 0; c < inst.chargers().size(); ++c) {
    const auto& dummies = inst.charger_dummies(static_cast<int>(c));
    for (NodeId d : dummies)
      if (charger_uses[static_cast<std::size_t>(d)] > 1)
        rep.add(family::kCharging, -1, -1, 0.0, "charger dummy " + std::to_string(d) + " visited more than once");
    // Used copies are a suffix and lower copies start after higher ones end.
    for (std::size_t h = 0; h < dummies.size(); ++h) {
      const bool uh = charger_uses[static_cast<std::size_t>(dummies[h])] > 0;
      for (std::size_t l = h + 1; l < dummies.size(); ++l) {
        const bool ul = charger_uses[static_cast<std::size_t>(dummies[l])] > 0;
        if (uh && !ul)
          rep.add(family::kCharging, -1, -1, 0.0,
                  "dummy " + std::to_string(dummies[h]) + " used while higher copy " + std::to_string(dummies[l]) + " is idle");
        if (!uh || !ul) continue;
        auto ih = dummy_event.find(dummies[h]);
        auto il = dummy_event.find(dummies[l]);
        if (ih == dummy_event.end() || il == dummy_event.end()) continue;
        const auto& eh = sol.charging[static_cast<std::size_t>(ih->second)];
        const auto& el = sol.charging[static_cast<std::size_t>(il->second)];
        if (eh.start < el.start + el.duration - tol)
          rep.add(family::kCharging, eh.vehicle, eh.stop, eh.start - el.start - el.duration,
                  "copy " + std::to_string(dummies[h]) + " starts before copy " + std::to_string(dummies[l]) + " ends");
      }
    }
    // Direct pairwise overlap, independent of the copy labels.
    std::vector<const ChargingEvent*> at;
    for (const auto& ev : sol.charging)
      if (ev.physical_charger == static_cast<int>(c)) at.push_back(&ev);
    std::sort(at.begin(), at.end(), [](const auto* a, const auto* b) { return a->start < b->start; });
    for (std::size_t i = 0; i + 1 < at.size(); ++i) {
      const double gap = at[i + 1]->start - (at[i]->start + at[i]->duration);
      if (gap < -1e-9 && at[i]->duration > 0.0 && at[i + 1]->duration > 0.0)
        rep.add(family::kCharging, at[i + 1]->vehicle, at[i + 1]->stop, gap,
                "overlaps the event of vehicle " + std::to_string(at[i]->vehicle) + " at charger " + std::to_string(c));
    }
  }
  return std::move(rep.out);
}

}  // namespace mpefcs
