#include "mpefcs/objective.hpp"

namespace mpefcs {

double walk_time(const Instance& inst, int r, NodeId mp) {
  const auto& req = inst.request(r);
  for (const auto& c : req.candidates)
    if (c.mp == mp) return c.walk_min;
  return walk_minutes(euclidean(req.origin, inst.node(mp).coord), inst.params().walk_speed);
}

ObjectiveTerms objective_terms(const Solution& sol, const Instance& inst) {
  ObjectiveTerms t;
  for (const auto& route : sol.routes) {
    for (std::size_t i = 0; i + 1 < route.stops.size(); ++i) t.travel += inst.time(route.stops[i], route.stops[i + 1]);
    for (std::size_t i = 0; i < route.schedule.size() && i < route.stops.size(); ++i)
      if (inst.is_station(route.stops[i])) t.wait += route.schedule[i].wait;
  }
  for (const auto& ev : sol.charging) t.charging += ev.duration;
  for (std::size_t r = 0; r < sol.assignment.size(); ++r)
    if (sol.assignment[r] != kNoNode) t.walk += walk_time(inst, static_cast<int>(r), sol.assignment[r]);
  t.rejected = static_cast<int>(sol.rejected.size());
  const auto& l = inst.params().lambda;
  t.total = l.travel * (t.travel + t.charging) + l.walk * t.walk + l.wait * t.wait + l.reject * t.rejected;
  return t;
}

}  // namespace mpefcs
