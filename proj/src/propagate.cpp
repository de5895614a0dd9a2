#include "mpefcs/propagate.hpp"

#include <algorithm>
#include <cmath>

namespace mpefcs {

void ChargerCalendar::book(int physical, double start, double end) {
  auto& list = busy_[static_cast<std::size_t>(physical)];
  const std::pair<double, double> slot{start, end};
  list.insert(std::upper_bound(list.begin(), list.end(), slot), slot);
}

double ChargerCalendar::earliest_fit(int physical, double ready, double duration) const {
  double t = ready;
  for (const auto& [s, e] : busy_[static_cast<std::size_t>(physical)]) {
    if (e <= t) continue;
    if (t + duration <= s) return t;
    t = std::max(t, e);
  }
  return t;
}

namespace {

struct Fail {
  RouteEvaluation& out;
  bool stop;
  // Returns true when propagation must stop.
  bool operator()(const char* family, int stop_idx, double slack) const {
    if (out.feasible) {
      out.feasible = false;
      out.family = family;
      out.violation_stop = stop_idx;
      out.slack = slack;
    }
    return stop;
  }
};

}  // namespace

void propagate_route(const Instance& inst, int vehicle, std::span<const NodeId> stops, std::span<const int> boarding,
                     const PropagationOptions& opts, RouteEvaluation& out) {
  out.feasible = true;
  out.family.clear();
  out.violation_stop = -1;
  out.slack = 0.0;
  out.travel_time = out.distance = out.charge_time = out.wait = out.cost = 0.0;
  out.charges.clear();
  const std::size_t n = stops.size();
  out.schedule.assign(n, StopSchedule{});
  const Fail fail{out, opts.stop_at_violation};

  const auto& p = inst.params();
  const VehicleSpec& v = inst.vehicle(vehicle);
  const bool energy = p.enforce_energy;
  if (n < 2 || stops.front() != inst.depot_start() || stops.back() != inst.depot_end()) {
    fail(family::kFlow, 0, -1.0);
    return;
  }

  std::vector<int> seen_layer(inst.layers().size(), 0);
  const double t0 = opts.idle == IdlePolicy::Strict ? p.horizon.start : 0.0;
  out.schedule[0] = {t0, t0, 0.0, 0, v.e_init};
  double depart = t0;
  double energy_after = v.e_init;
  int load = 0;
  int block_start = -1;
  int block_layer = -1;
  std::size_t ordinal = 0;

  for (std::size_t idx = 1; idx < n; ++idx) {
    const NodeId i = stops[idx - 1];
    const NodeId j = stops[idx];
    const int si = static_cast<int>(idx);
    if (!inst.arc(i, j) && fail(family::kFlow, si, -1.0)) return;
    const double t = inst.time(i, j);
    const double d = inst.dist(i, j);
    out.travel_time += t;
    out.distance += d;
    StopSchedule& s = out.schedule[idx];
    s.arrival = depart + t;
    s.energy = energy_after - v.consumption * d;
    if (energy && s.energy < v.e_min - kFeasTol && fail(family::kEnergy, si, s.energy - v.e_min)) return;
    energy_after = s.energy;
    const Node& node = inst.node(j);

    switch (node.kind) {
      case NodeKind::MeetingPoint: {
        if (block_start < 0) {
          block_start = si;
          block_layer = node.layer;
          if (seen_layer[static_cast<std::size_t>(node.layer)]++ && fail(family::kFlow, si, -1.0)) return;
        } else if (node.layer != block_layer && fail(family::kFlow, si, -1.0)) {
          return;
        }
        load += boarding[static_cast<std::size_t>(j)];
        if (load > v.capacity && fail(family::kLoad, si, static_cast<double>(v.capacity - load))) return;
        s.begin = s.arrival;
        s.load = load;
        depart = s.begin + node.service_time;
        break;
      }
      case NodeKind::TransitStation: {
        if ((block_start < 0 || node.layer != block_layer) && fail(family::kFlow, si, -1.0)) return;
        const double e = node.window.earliest;
        if (block_start >= 0 && opts.idle == IdlePolicy::JustInTime && s.arrival < e) {
          const double delta = e - s.arrival;
          for (int m = block_start; m < si; ++m) {
            auto& ms = out.schedule[static_cast<std::size_t>(m)];
            if (m > block_start) ms.arrival += delta;
            ms.begin += delta;
          }
          s.arrival = e;
        }
        s.begin = std::max(s.arrival, e);
        s.wait = s.begin - s.arrival;
        out.wait += s.wait;
        if (s.begin > node.window.latest + kFeasTol && fail(family::kTimeWindow, si, node.window.latest - s.begin))
          return;
        for (int m = std::max(block_start, 1); block_start >= 0 && m < si; ++m) {
          const NodeId mp = stops[static_cast<std::size_t>(m)];
          if (boarding[static_cast<std::size_t>(mp)] == 0) continue;
          const auto& ms = out.schedule[static_cast<std::size_t>(m)];
          const double ride = s.arrival - ms.begin - inst.node(mp).service_time;
          if (ride > inst.ride_limit(mp) + kFeasTol && fail(family::kRideTime, m, inst.ride_limit(mp) - ride)) return;
        }
        load = 0;
        s.load = 0;
        block_start = -1;
        depart = s.begin + node.service_time;
        break;
      }
      case NodeKind::Charger: {
        const ChargerSpec& c = inst.charger_of(j);
        double start = s.arrival;
        if (ordinal < opts.release.size()) start = std::max(start, opts.release[ordinal]);
        ++ordinal;
        double tau = 0.0;
        if (energy) {
          double target = v.e_max;
          if (!p.charge_to_full) {
            double need = 0.0;
            for (std::size_t k = idx; k + 1 < n; ++k) {
              need += v.consumption * inst.dist(stops[k], stops[k + 1]);
              if (inst.is_charger(stops[k + 1])) break;
            }
            target = std::min(v.e_max, need + v.e_min);
            if (need + v.e_min > v.e_max + kFeasTol && fail(family::kEnergy, si, v.e_max - need - v.e_min)) return;
          }
          tau = std::max(0.0, (target - s.energy) / c.rate);
        }
        if (opts.calendar) start = opts.calendar->earliest_fit(c.physical_id, start, tau);
        s.begin = start;
        s.load = 0;
        energy_after = s.energy + c.rate * tau;
        out.charge_time += tau;
        out.charges.push_back({si, c.physical_id, s.arrival, start, tau, c.rate * tau});
        depart = start + tau;
        break;
      }
      case NodeKind::DepotEnd:
        s.begin = s.arrival;
        break;
      case NodeKind::DepotStart:
        if (fail(family::kFlow, si, -1.0)) return;
        break;
    }
  }
  if (block_start >= 0) fail(family::kFlow, static_cast<int>(n) - 1, -1.0);
  out.cost = p.lambda.travel * (out.travel_time + out.charge_time) + p.lambda.wait * out.wait;
}

RouteEvaluation propagate_route(const Instance& inst, int vehicle, std::span<const NodeId> stops,
                                std::span<const int> boarding, const PropagationOptions& opts) {
  RouteEvaluation out;
  propagate_route(inst, vehicle, stops, boarding, opts, out);
  return out;
}

}  // namespace mpefcs
