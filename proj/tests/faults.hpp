#pragma once

// Targeted corruptions of a feasible solution, one per constraint family,
// plus random mutations for the soundness sweep.

#include "mpefcs/model.hpp"
#include "mpefcs/solution.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace faults {

using namespace mpefcs;

inline bool used(const Route& r) { return r.stops.size() > 2; }

inline int last_station(const Instance& inst, const Route& r) {
  for (int i = static_cast<int>(r.stops.size()) - 1; i >= 0; --i)
    if (inst.is_station(r.stops[static_cast<std::size_t>(i)])) return i;
  return -1;
}

inline void erase_stop(Solution& s, int k, int idx) {
  auto& r = s.routes[static_cast<std::size_t>(k)];
  r.stops.erase(r.stops.begin() + idx);
  r.schedule.erase(r.schedule.begin() + idx);
  for (auto it = s.charging.begin(); it != s.charging.end();) {
    if (it->vehicle == k && it->stop == idx) {
      it = s.charging.erase(it);
      continue;
    }
    if (it->vehicle == k && it->stop > idx) --it->stop;
    ++it;
  }
}

/// Corrupts `sol` so that the given family is violated; nullopt when the
/// solution lacks the structure the corruption needs.
inline std::optional<Solution> inject(const Solution& sol, const Instance& inst, const std::string& fam) {
  Solution s = sol;
  const double tol = 1.0;
  auto first_used = [&]() -> int {
    for (std::size_t k = 0; k < s.routes.size(); ++k)
      if (used(s.routes[k])) return static_cast<int>(k);
    return -1;
  };
  const int k = first_used();
  if (k < 0) return std::nullopt;
  Route& route = s.routes[static_cast<std::size_t>(k)];

  if (fam == family::kAssignment) {
    // Served request moved to a point of its layer beyond walking range.
    for (std::size_t r = 0; r < s.assignment.size(); ++r) {
      if (s.assignment[r] == kNoNode) continue;
      const Request& rq = inst.request(static_cast<int>(r));
      for (NodeId m : inst.layer(rq.layer).mps)
        if (euclidean(rq.origin, inst.node(m).coord) > inst.params().w_max + 0.05) {
          s.assignment[r] = m;
          return s;
        }
    }
    return std::nullopt;
  }
  if (fam == family::kFlow) {
    // A visited meeting point dropped from its route.
    for (std::size_t i = 1; i + 1 < route.stops.size(); ++i)
      if (inst.is_mp(route.stops[i])) {
        erase_stop(s, k, static_cast<int>(i));
        return s;
      }
    return std::nullopt;
  }
  if (fam == family::kPairing) {
    // Station closing a block removed.
    const int st = last_station(inst, route);
    if (st < 0) return std::nullopt;
    erase_stop(s, k, st);
    return s;
  }
  if (fam == family::kLoad) {
    for (std::size_t i = 1; i < route.stops.size(); ++i)
      if (inst.is_mp(route.stops[i])) {
        route.schedule[i].load += 1;
        return s;
      }
    return std::nullopt;
  }
  if (fam == family::kTiming) {
    // Return to the depot earlier than the last leg allows.
    const std::size_t e = route.stops.size() - 1;
    const NodeId prev = route.stops[e - 1];
    double depart = route.schedule[e - 1].begin + inst.node(prev).service_time;
    for (const auto& ev : s.charging)
      if (ev.vehicle == k && ev.stop == static_cast<int>(e - 1)) depart = ev.start + ev.duration;
    const double t = depart + inst.time(prev, route.stops[e]) - tol;
    route.schedule[e].arrival = route.schedule[e].begin = t;
    return s;
  }
  if (fam == family::kWait) {
    const int st = last_station(inst, route);
    if (st < 0) return std::nullopt;
    route.schedule[static_cast<std::size_t>(st)].wait = -tol;
    return s;
  }
  if (fam == family::kRideTime) {
    // First pickup of the last block served far too early.
    const int st = last_station(inst, route);
    if (st < 0) return std::nullopt;
    int first = st;
    while (first > 1 && inst.is_mp(route.stops[static_cast<std::size_t>(first - 1)])) --first;
    if (first == st) return std::nullopt;
    const NodeId mp = route.stops[static_cast<std::size_t>(first)];
    const auto& sc = route.schedule;
    const double ride = sc[static_cast<std::size_t>(st)].arrival - sc[static_cast<std::size_t>(first)].begin -
                        inst.node(mp).service_time;
    auto& b = route.schedule[static_cast<std::size_t>(first)];
    b.begin -= inst.ride_limit(mp) - ride + tol;
    b.arrival = std::min(b.arrival, b.begin);
    return s;
  }
  if (fam == family::kTimeWindow) {
    // Last station served after its window, everything downstream shifted.
    const int st = last_station(inst, route);
    if (st < 0) return std::nullopt;
    auto& sc = route.schedule[static_cast<std::size_t>(st)];
    const double delta = inst.node(route.stops[static_cast<std::size_t>(st)]).window.latest + tol - sc.begin;
    sc.begin += delta;
    sc.wait += delta;
    for (std::size_t i = static_cast<std::size_t>(st) + 1; i < route.stops.size(); ++i) {
      route.schedule[i].arrival += delta;
      route.schedule[i].begin += delta;
    }
    for (auto& ev : s.charging)
      if (ev.vehicle == k && ev.stop > st) {
        ev.arrival += delta;
        ev.start += delta;
      }
    return s;
  }
  if (fam == family::kEnergy) {
    route.schedule.back().energy -= tol;
    return s;
  }
  if (fam == family::kCharging) {
    // Event moved onto another copy of its charger, breaking the copy order.
    if (s.charging.empty()) return std::nullopt;
    ChargingEvent& ev = s.charging.front();
    const auto& dummies = inst.charger_dummies(ev.physical_charger);
    std::vector<char> taken(static_cast<std::size_t>(inst.node_count()), 0);
    for (const auto& r : s.routes)
      for (NodeId n : r.stops)
        if (inst.is_charger(n)) taken[static_cast<std::size_t>(n)] = 1;
    auto relabel = [&](ChargingEvent& e, NodeId to) {
      s.routes[static_cast<std::size_t>(e.vehicle)].stops[static_cast<std::size_t>(e.stop)] = to;
      e.charger_dummy = to;
    };
    for (NodeId d : dummies)
      if (!taken[static_cast<std::size_t>(d)] && d < ev.charger_dummy) {
        relabel(ev, d);
        return s;
      }
    for (auto& other : s.charging)
      if (&other != &ev && other.physical_charger == ev.physical_charger) {
        const NodeId a = ev.charger_dummy;
        relabel(ev, other.charger_dummy);
        relabel(other, a);
        return s;
      }
    return std::nullopt;
  }
  return std::nullopt;
}

/// Kind of the last mutation, for failure messages.
inline thread_local int last_kind = -1;

/// Random corruption guaranteed to break at least one relation.
inline Solution mutate(const Solution& sol, const Instance& inst, std::mt19937_64& rng) {
  for (;;) {
    Solution s = sol;
    std::vector<int> ks;
    for (std::size_t k = 0; k < s.routes.size(); ++k)
      if (used(s.routes[k])) ks.push_back(static_cast<int>(k));
    if (ks.empty()) return s;
    const int k = ks[rng() % ks.size()];
    Route& r = s.routes[static_cast<std::size_t>(k)];
    const std::size_t n = r.stops.size();
    std::uniform_real_distribution<double> mag(0.01, 5.0);
    const std::size_t i = 1 + rng() % (n - 1);
    auto& sc = r.schedule[i];
    last_kind = static_cast<int>(rng() % 10);
    switch (last_kind) {
      case 0: {  // earlier begin than reachable
        const NodeId prev = r.stops[i - 1];
        double depart = r.schedule[i - 1].begin + inst.node(prev).service_time;
        for (const auto& ev : s.charging)
          if (ev.vehicle == k && ev.stop == static_cast<int>(i - 1)) depart = ev.start + ev.duration;
        sc.begin = depart + inst.time(prev, r.stops[i]) - mag(rng);
        break;
      }
      case 1:  // load off by some passengers
        sc.load += (rng() % 2 ? 1 : -1) * static_cast<int>(1 + rng() % 3);
        break;
      case 2:  // energy balance broken
        sc.energy += (rng() % 2 ? 1.0 : -1.0) * mag(rng);
        break;
      case 3: {  // station arrival claimed differently
        if (!inst.is_station(r.stops[i])) continue;
        sc.arrival += (rng() % 2 ? 1.0 : -1.0) * mag(rng);
        break;
      }
      case 4: {  // station wait below begin - arrival
        if (!inst.is_station(r.stops[i])) continue;
        sc.wait = sc.begin - sc.arrival - mag(rng);
        break;
      }
      case 5: {  // two adjacent inner stops swapped
        if (i + 1 >= n - 1 || i < 1) continue;
        if (r.stops[i] == r.stops[i + 1]) continue;
        const NodeId a = r.stops[i], b = r.stops[i + 1];
        if (inst.is_mp(a) && inst.is_mp(b) && inst.node(a).layer == inst.node(b).layer) continue;
        std::swap(r.stops[i], r.stops[i + 1]);
        break;
      }
      case 6: {  // an inner stop removed
        if (i >= n - 1) continue;
        const NodeId a = r.stops[i];
        if (inst.is_charger(a)) continue;  // removing a charger can stay feasible
        if (inst.is_mp(a)) {
          bool riders = false;
          for (NodeId m : s.assignment) riders |= m == a;
          if (!riders) continue;
        }
        erase_stop(s, k, static_cast<int>(i));
        break;
      }
      case 7: {  // request moved to another candidate without touching routes
        std::vector<int> served;
        for (std::size_t q = 0; q < s.assignment.size(); ++q)
          if (s.assignment[q] != kNoNode && inst.request(static_cast<int>(q)).candidates.size() > 1)
            served.push_back(static_cast<int>(q));
        if (served.empty()) continue;
        const int q = served[rng() % served.size()];
        const auto& c = inst.request(q).candidates;
        NodeId to = c[rng() % c.size()].mp;
        if (to == s.assignment[static_cast<std::size_t>(q)]) continue;
        s.assignment[static_cast<std::size_t>(q)] = to;
        break;
      }
      case 8: {  // charging duration changed
        if (s.charging.empty()) continue;
        auto& ev = s.charging[rng() % s.charging.size()];
        const double d = ev.duration + (rng() % 2 ? 1.0 : -1.0) * mag(rng);
        if (d < 0.0 || std::abs(d - ev.duration) < 1e-3) continue;
        ev.duration = d;
        break;
      }
      default: {  // station begin pushed outside its window
        if (!inst.is_station(r.stops[i])) continue;
        const auto& w = inst.node(r.stops[i]).window;
        sc.begin = rng() % 2 ? w.latest + mag(rng) : w.earliest - mag(rng);
        break;
      }
    }
    return s;
  }
}

}  // namespace faults
