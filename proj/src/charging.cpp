#include "mpefcs/charging.hpp"

#include "mpefcs/objective.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>

namespace mpefcs {

namespace {

constexpr double kNoRelease = std::numeric_limits<double>::lowest();

struct Simulation {
  const Instance& inst;
  std::span<const StopList> routes;
  std::span<const int> boarding;
  PropagationOptions base;
  std::vector<std::vector<double>> release;
  std::vector<std::size_t> resolved;
  std::vector<RouteEvaluation> evals;
  std::vector<double> free_at;
  ChargerOrder order;

  Simulation(const Instance& i, std::span<const StopList> r, std::span<const int> b, const ChargingOptions& opts)
      : inst(i), routes(r), boarding(b), release(r.size()), resolved(r.size(), 0), evals(r.size()),
        free_at(i.chargers().size(), kNoRelease), order(i.chargers().size()) {
    base.idle = opts.idle;
    for (std::size_t k = 0; k < routes.size(); ++k) {
      const auto visits = std::count_if(routes[k].begin(), routes[k].end(), [&](NodeId n) { return inst.is_charger(n); });
      release[k].assign(static_cast<std::size_t>(visits), kNoRelease);
      run(k);
    }
  }

  void run(std::size_t k) {
    PropagationOptions opts = base;
    opts.release = release[k];
    propagate_route(inst, static_cast<int>(k), routes[k], boarding, opts, evals[k]);
  }

  [[nodiscard]] bool pending(std::size_t k) const { return resolved[k] < evals[k].charges.size(); }

  void serve(std::size_t k) {
    const auto& c = evals[k].charges[resolved[k]];
    const auto phys = static_cast<std::size_t>(c.physical);
    const double start = std::max(c.arrival, free_at[phys]);
    release[k][resolved[k]] = start;
    free_at[phys] = start + c.duration;
    order[phys].emplace_back(static_cast<int>(k), static_cast<int>(resolved[k]));
    ++resolved[k];
    run(k);
  }

  void fcfs() {
    for (;;) {
      std::size_t pick = routes.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < routes.size(); ++k) {
        if (!pending(k)) continue;
        const double a = evals[k].charges[resolved[k]].arrival;
        if (a < best) {
          best = a;
          pick = k;
        }
      }
      if (pick == routes.size()) return;
      serve(pick);
    }
  }

  // Returns false on a deadlock.
  bool ordered(const ChargerOrder& wanted) {
    std::vector<std::size_t> pos(wanted.size(), 0);
    for (;;) {
      bool progress = false;
      bool left = false;
      for (std::size_t k = 0; k < routes.size(); ++k) {
        while (pending(k)) {
          left = true;
          const auto phys = static_cast<std::size_t>(evals[k].charges[resolved[k]].physical);
          if (phys >= wanted.size() || pos[phys] >= wanted[phys].size()) return false;
          const auto [vk, visit] = wanted[phys][pos[phys]];
          if (vk != static_cast<int>(k) || visit != static_cast<int>(resolved[k])) break;
          serve(k);
          ++pos[phys];
          progress = true;
        }
      }
      if (!left) break;
      if (!progress) return false;
    }
    for (std::size_t phys = 0; phys < wanted.size(); ++phys)
      if (pos[phys] != wanted[phys].size()) return false;
    return true;
  }
};

ChargingPlan to_plan(const Instance& inst, Simulation& sim) {
  ChargingPlan plan;
  plan.routes = std::move(sim.evals);
  plan.order = std::move(sim.order);
  plan.feasible = true;
  for (const auto& r : plan.routes) {
    plan.cost += r.cost;
    if (!r.feasible) plan.feasible = false;
  }
  for (std::size_t phys = 0; phys < plan.order.size(); ++phys) {
    const auto& dummies = inst.charger_dummies(static_cast<int>(phys));
    const auto& seq = plan.order[phys];
    for (std::size_t pos = 0; pos < seq.size(); ++pos) {
      const auto [k, visit] = seq[pos];
      const auto& c = plan.routes[static_cast<std::size_t>(k)].charges[static_cast<std::size_t>(visit)];
      ChargingEvent ev;
      ev.vehicle = k;
      ev.physical_charger = static_cast<int>(phys);
      ev.charger_dummy = pos < dummies.size() ? dummies[dummies.size() - 1 - pos] : kNoNode;
      ev.stop = c.stop;
      ev.arrival = c.arrival;
      ev.start = c.start;
      ev.duration = c.duration;
      ev.energy_added = c.energy_added;
      ev.order_index = static_cast<int>(pos);
      plan.events.push_back(ev);
    }
    if (seq.size() > dummies.size() && plan.feasible) {
      plan.feasible = false;
      plan.error = "charger " + std::to_string(phys) + " has " + std::to_string(seq.size()) +
                   " visits but only " + std::to_string(dummies.size()) + " dummy copies";
    }
  }
  return plan;
}

void explain_failure(ChargingPlan& plan) {
  if (plan.feasible || !plan.error.empty()) return;
  for (std::size_t k = 0; k < plan.routes.size(); ++k) {
    const auto& r = plan.routes[k];
    if (r.feasible) continue;
    // Latest delayed event of this vehicle before the violation.
    int delayed = -1;
    for (std::size_t e = 0; e < plan.events.size(); ++e) {
      const auto& ev = plan.events[e];
      if (ev.vehicle == static_cast<int>(k) && ev.start > ev.arrival + kFeasTol &&
          (r.violation_stop < 0 || ev.stop < r.violation_stop))
        delayed = static_cast<int>(e);
    }
    std::ostringstream os;
    if (delayed >= 0 && delayed > 0 &&
        plan.events[static_cast<std::size_t>(delayed - 1)].physical_charger ==
            plan.events[static_cast<std::size_t>(delayed)].physical_charger) {
      const auto& b = plan.events[static_cast<std::size_t>(delayed)];
      const auto& a = plan.events[static_cast<std::size_t>(delayed - 1)];
      plan.blocking = {delayed - 1, delayed};
      os << "charger contention infeasible: vehicle " << b.vehicle << " waits at charger " << b.physical_charger
         << " until " << b.start << " behind vehicle " << a.vehicle << " [" << a.start << ", "
         << a.start + a.duration << "], then violates " << r.family << " at stop " << r.violation_stop;
    } else {
      os << "route of vehicle " << k << " violates " << r.family << " at stop " << r.violation_stop;
    }
    plan.error = os.str();
    return;
  }
}

}  // namespace

ChargingPlan schedule_charging_ordered(const Instance& inst, std::span<const StopList> routes,
                                       std::span<const int> boarding, const ChargerOrder& order,
                                       const ChargingOptions& opts) {
  Simulation sim(inst, routes, boarding, opts);
  const bool complete = sim.ordered(order);
  ChargingPlan plan = to_plan(inst, sim);
  if (!complete) {
    plan.feasible = false;
    plan.error = "charger sequence deadlocks against the route visit order";
  }
  explain_failure(plan);
  return plan;
}

ChargingPlan schedule_charging(const Instance& inst, std::span<const StopList> routes, std::span<const int> boarding,
                               const ChargingOptions& opts) {
  Simulation sim(inst, routes, boarding, opts);
  sim.fcfs();
  ChargingPlan plan = to_plan(inst, sim);
  const bool contention_only = plan.error.empty();
  if (plan.feasible || !opts.try_swaps || !contention_only) {
    explain_failure(plan);
    return plan;
  }
  ChargingPlan best;
  bool found = false;
  for (std::size_t phys = 0; phys < plan.order.size(); ++phys) {
    for (std::size_t pos = 0; pos + 1 < plan.order[phys].size(); ++pos) {
      ChargerOrder swapped = plan.order;
      auto& seq = swapped[phys];
      if (seq[pos].first == seq[pos + 1].first) continue;
      std::swap(seq[pos], seq[pos + 1]);
      ChargingPlan alt = schedule_charging_ordered(inst, routes, boarding, swapped, opts);
      if (alt.feasible && (!found || alt.cost < best.cost - 1e-9)) {
        best = std::move(alt);
        found = true;
      }
    }
  }
  if (found) return best;
  explain_failure(plan);
  return plan;
}

ChargingPlan schedule_charging_exhaustive(const Instance& inst, std::span<const StopList> routes,
                                          std::span<const int> boarding, int max_visits, const ChargingOptions& opts) {
  ChargingPlan first = schedule_charging(inst, routes, boarding, opts);
  if (first.order.empty()) return first;
  int visits = 0;
  for (const auto& seq : first.order) visits += static_cast<int>(seq.size());
  bool shared = false;
  for (const auto& seq : first.order) shared = shared || seq.size() > 1;
  if (!shared || visits > max_visits) return first;
  // With idle-free stations every feasible sequencing has the same cost, so
  // the search only matters when the first-come plan fails or waits count.
  if (first.feasible && opts.idle == IdlePolicy::JustInTime) return first;

  ChargingPlan best = first;
  bool found = first.feasible;
  ChargerOrder order = first.order;
  for (auto& seq : order) std::sort(seq.begin(), seq.end());
  std::function<void(std::size_t)> rec = [&](std::size_t phys) {
    if (phys == order.size()) {
      ChargingPlan alt = schedule_charging_ordered(inst, routes, boarding, order, opts);
      if (alt.feasible && (!found || alt.cost < best.cost - 1e-9)) {
        best = std::move(alt);
        found = true;
      }
      return;
    }
    auto& seq = order[phys];
    std::sort(seq.begin(), seq.end());
    do {
      rec(phys + 1);
    } while (std::next_permutation(seq.begin(), seq.end()));
  };
  rec(0);
  return best;
}

int drop_idle_chargers(const Instance& inst, std::vector<StopList>& routes, std::span<const int> boarding) {
  int removed = 0;
  RouteEvaluation eval;
  for (std::size_t k = 0; k < routes.size(); ++k) {
    for (;;) {
      propagate_route(inst, static_cast<int>(k), routes[k], boarding, {}, eval);
      int victim = -1;
      for (const auto& c : eval.charges)
        if (c.duration <= 1e-12) {
          victim = c.stop;
          break;
        }
      if (victim < 0) break;
      routes[k].erase(routes[k].begin() + victim);
      ++removed;
    }
  }
  return removed;
}

Solution assemble_solution(const Instance& inst, std::vector<StopList> routes, const std::vector<NodeId>& assignment,
                           ChargingPlan plan) {
  Solution sol;
  sol.assignment = assignment;
  for (std::size_t r = 0; r < assignment.size(); ++r)
    if (assignment[r] == kNoNode) sol.rejected.push_back(static_cast<int>(r));
  for (const auto& ev : plan.events)
    if (ev.charger_dummy != kNoNode)
      routes[static_cast<std::size_t>(ev.vehicle)][static_cast<std::size_t>(ev.stop)] = ev.charger_dummy;
  for (std::size_t k = 0; k < routes.size(); ++k) {
    Route r;
    r.vehicle = static_cast<int>(k);
    r.stops = std::move(routes[k]);
    if (k < plan.routes.size()) r.schedule = std::move(plan.routes[k].schedule);
    sol.routes.push_back(std::move(r));
  }
  sol.charging = std::move(plan.events);
  sol.objective = evaluate_objective(sol, inst);
  return sol;
}

std::optional<Solution> finalize_solution(const Instance& inst, std::vector<StopList> routes,
                                          const std::vector<NodeId>& assignment, std::string* error,
                                          const ChargingOptions& opts, bool exhaustive_order,
                                          const ChargerOrder* order) {
  const auto boarding = boarding_per_node(inst, assignment);
  if (!order) drop_idle_chargers(inst, routes, boarding);
  ChargingPlan plan = order              ? schedule_charging_ordered(inst, routes, boarding, *order, opts)
                      : exhaustive_order ? schedule_charging_exhaustive(inst, routes, boarding, 7, opts)
                                         : schedule_charging(inst, routes, boarding, opts);
  if (!plan.feasible) {
    if (error) *error = plan.error.empty() ? "infeasible" : plan.error;
    return std::nullopt;
  }
  return assemble_solution(inst, std::move(routes), assignment, std::move(plan));
}

Solution recompute_solution(const Instance& inst, const Solution& sol) {
  std::vector<StopList> routes;
  for (const auto& r : sol.routes) routes.push_back(r.stops);
  const auto boarding = boarding_per_node(inst, sol.assignment);
  ChargingPlan plan = schedule_charging(inst, routes, boarding, {.idle = IdlePolicy::JustInTime, .try_swaps = false});
  Solution out = assemble_solution(inst, std::move(routes), sol.assignment, std::move(plan));
  // Keep the caller's dummy labels.
  for (std::size_t k = 0; k < out.routes.size() && k < sol.routes.size(); ++k) out.routes[k].stops = sol.routes[k].stops;
  for (auto& ev : out.charging) ev.charger_dummy = out.routes[static_cast<std::size_t>(ev.vehicle)].stops[static_cast<std::size_t>(ev.stop)];
  return out;
}

}  // namespace mpefcs
