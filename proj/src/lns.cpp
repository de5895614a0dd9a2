#include "mpefcs/lns.hpp"

#include "mpefcs/charging.hpp"
#include "mpefcs/objective.hpp"
#include "mpefcs/propagate.hpp"
#include "mpefcs/validator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace mpefcs {

void validate_search_config(const SearchConfig& cfg) {
  if (cfg.iteration_budget < 0) throw std::invalid_argument("iteration_budget must be >= 0");
  if (!(cfg.da_decay > 0.0 && cfg.da_decay < 1.0)) throw std::invalid_argument("da_decay must lie in (0, 1)");
  if (cfg.da_threshold_init < 0.0) throw std::invalid_argument("da_threshold_init must be >= 0");
  if (!(cfg.destroy_min > 0.0 && cfg.destroy_min <= cfg.destroy_max && cfg.destroy_max < 1.0))
    throw std::invalid_argument("destroy fractions must satisfy 0 < min <= max < 1");
  if (cfg.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  for (double w : cfg.destroy_weights)
    if (w < 0.0) throw std::invalid_argument("operator weights must be >= 0");
  for (double w : cfg.repair_weights)
    if (w < 0.0) throw std::invalid_argument("operator weights must be >= 0");
}

namespace {

const char* method_name(AssignmentMethod m) {
  switch (m) {
    case AssignmentMethod::Exact: return "exact";
    case AssignmentMethod::Heuristic: return "heuristic";
    case AssignmentMethod::Auto: break;
  }
  return "auto";
}

AssignmentMethod method_from(const std::string& s) {
  if (s == "exact") return AssignmentMethod::Exact;
  if (s == "heuristic") return AssignmentMethod::Heuristic;
  if (s == "auto") return AssignmentMethod::Auto;
  throw std::invalid_argument("unknown assignment method " + s);
}

}  // namespace

json search_config_to_json(const SearchConfig& cfg) {
  return {{"seed", cfg.seed},
          {"iteration_budget", cfg.iteration_budget},
          {"da_threshold_init", cfg.da_threshold_init},
          {"da_decay", cfg.da_decay},
          {"destroy_fraction_range", {cfg.destroy_min, cfg.destroy_max}},
          {"destroy_weights", cfg.destroy_weights},
          {"repair_weights", cfg.repair_weights},
          {"restarts", cfg.restarts},
          {"time_limit", cfg.time_limit},
          {"rho", cfg.rho},
          {"assignment", method_name(cfg.assignment)}};
}

SearchConfig search_config_from_json(const json& j) {
  SearchConfig cfg;
  try {
    cfg.seed = j.value("seed", cfg.seed);
    cfg.iteration_budget = j.value("iteration_budget", cfg.iteration_budget);
    cfg.da_threshold_init = j.value("da_threshold_init", cfg.da_threshold_init);
    cfg.da_decay = j.value("da_decay", cfg.da_decay);
    if (j.contains("destroy_fraction_range")) {
      cfg.destroy_min = j["destroy_fraction_range"].at(0).get<double>();
      cfg.destroy_max = j["destroy_fraction_range"].at(1).get<double>();
    }
    if (j.contains("destroy_weights")) cfg.destroy_weights = j["destroy_weights"].get<std::array<double, 4>>();
    if (j.contains("repair_weights")) cfg.repair_weights = j["repair_weights"].get<std::array<double, 2>>();
    cfg.restarts = j.value("restarts", cfg.restarts);
    cfg.time_limit = j.value("time_limit", cfg.time_limit);
    cfg.rho = j.value("rho", cfg.rho);
    if (j.contains("assignment")) cfg.assignment = method_from(j["assignment"].get<std::string>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed search config: ") + e.what());
  }
  validate_search_config(cfg);
  return cfg;
}

AssignmentResult stage_one_assignment(const Instance& inst, const SearchConfig& cfg, AssignmentProblem* problem) {
  AssignmentProblem prob = make_assignment_problem(inst, cfg.rho >= 0.0 ? cfg.rho : inst.params().rho);
  AssignmentResult res;
  if (cfg.assignment == AssignmentMethod::Heuristic) {
    res = solve_assignment_heuristic(prob);
  } else {
    try {
      res = solve_assignment_exact(prob);
    } catch (const AssignmentTooLarge&) {
      if (cfg.assignment == AssignmentMethod::Exact) throw;
      res = solve_assignment_heuristic(prob);
    }
  }
  if (problem) *problem = std::move(prob);
  return res;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::min(static_cast<int>(uniform01(rng) * static_cast<double>(n)), static_cast<int>(n) - 1);
}

template <std::size_t N>
int roulette(std::mt19937_64& rng, const std::array<double, N>& w, const std::array<bool, N>& allowed) {
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    if (allowed[i]) total += w[i];
  if (total <= 0.0) {
    for (std::size_t i = 0; i < N; ++i)
      if (allowed[i]) return static_cast<int>(i);
    return 0;
  }
  double x = uniform01(rng) * total;
  for (std::size_t i = 0; i < N; ++i) {
    if (!allowed[i]) continue;
    if (x < w[i]) return static_cast<int>(i);
    x -= w[i];
  }
  for (std::size_t i = N; i-- > 0;)
    if (allowed[i]) return static_cast<int>(i);
  return 0;
}

struct Option {
  bool feasible = false;
  bool join = false;
  double delta = kInf;  // change in route cost
  int vehicle = -1;
  NodeId mp = kNoNode;
  StopList stops;
};

class State {
 public:
  explicit State(const Instance& inst)
      : inst_(&inst),
        routes(static_cast<std::size_t>(inst.vehicle_count()), StopList{inst.depot_start(), inst.depot_end()}),
        assign(static_cast<std::size_t>(inst.request_count()), kNoNode),
        boarding(static_cast<std::size_t>(inst.node_count()), 0),
        mp_route(static_cast<std::size_t>(inst.node_count()), -1),
        evals(static_cast<std::size_t>(inst.vehicle_count())) {
    for (int k = 0; k < inst.vehicle_count(); ++k) reevaluate(k);
  }

  [[nodiscard]] const Instance& inst() const { return *inst_; }
  [[nodiscard]] int vehicles() const { return static_cast<int>(routes.size()); }

  [[nodiscard]] ChargerCalendar calendar_except(int k) const {
    ChargerCalendar cal(inst().chargers().size());
    for (std::size_t o = 0; o < evals.size(); ++o) {
      if (static_cast<int>(o) == k) continue;
      for (const auto& c : evals[o].charges)
        if (c.duration > 0.0) cal.book(c.physical, c.start, c.start + c.duration);
    }
    return cal;
  }

  void evaluate(int k, const StopList& stops, const ChargerCalendar& cal, RouteEvaluation& out) const {
    PropagationOptions opts;
    opts.stop_at_violation = true;
    opts.calendar = &cal;
    propagate_route(inst(), k, stops, boarding, opts, out);
  }

  bool reevaluate(int k) {
    const ChargerCalendar cal = calendar_except(k);
    evaluate(k, routes[static_cast<std::size_t>(k)], cal, evals[static_cast<std::size_t>(k)]);
    return evals[static_cast<std::size_t>(k)].feasible;
  }

  [[nodiscard]] std::vector<int> charger_visits() const {
    std::vector<int> count(inst().chargers().size(), 0);
    for (const auto& r : routes)
      for (NodeId n : r)
        if (inst().is_charger(n)) ++count[static_cast<std::size_t>(inst().node(n).physical_id)];
    return count;
  }

  // Cheapest single charger stop making `stops` feasible.
  bool add_charger(int k, const StopList& stops, const ChargerCalendar& cal, double base, Option& best) {
    if (inst().chargers().empty()) return false;
    const auto visits = charger_visits();
    bool found = false;
    StopList cand;
    for (std::size_t p = 1; p < stops.size(); ++p) {
      const NodeKind prev = inst().node(stops[p - 1]).kind;
      const NodeKind next = inst().node(stops[p]).kind;
      if (!(prev == NodeKind::DepotStart || prev == NodeKind::TransitStation)) continue;
      if (!(next == NodeKind::MeetingPoint || next == NodeKind::DepotEnd)) continue;
      for (std::size_t c = 0; c < inst().chargers().size(); ++c) {
        const auto& dummies = inst().charger_dummies(static_cast<int>(c));
        if (visits[c] >= static_cast<int>(dummies.size())) continue;
        cand = stops;
        cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(p), dummies.front());
        evaluate(k, cand, cal, scratch_);
        if (!scratch_.feasible) continue;
        const double delta = scratch_.cost - base;
        if (delta < best.delta - 1e-9) {
          best.feasible = true;
          best.delta = delta;
          best.vehicle = k;
          best.stops = cand;
          found = true;
        }
      }
    }
    return found;
  }

  Option best_join(int k, NodeId m, int add) {
    Option best;
    best.join = true;
    best.mp = m;
    const ChargerCalendar cal = calendar_except(k);
    const auto& stops = routes[static_cast<std::size_t>(k)];
    const double base = evals[static_cast<std::size_t>(k)].cost;
    boarding[static_cast<std::size_t>(m)] += add;
    evaluate(k, stops, cal, scratch_);
    if (scratch_.feasible) {
      best.feasible = true;
      best.delta = scratch_.cost - base;
      best.vehicle = k;
      best.stops = stops;
    } else if (scratch_.family == family::kEnergy) {
      add_charger(k, stops, cal, base, best);
    }
    boarding[static_cast<std::size_t>(m)] -= add;
    return best;
  }

  Option best_open(int k, NodeId m, int add) {
    Option best;
    best.mp = m;
    const NodeId st = inst().station_of(m);
    const auto& stops = routes[static_cast<std::size_t>(k)];
    const auto it = std::find(stops.begin(), stops.end(), st);
    std::vector<std::pair<double, std::size_t>> energy_fail;
    const ChargerCalendar cal = calendar_except(k);
    const double base = evals[static_cast<std::size_t>(k)].cost;
    boarding[static_cast<std::size_t>(m)] += add;
    StopList cand;
    auto consider = [&](std::size_t p, bool with_station) {
      cand = stops;
      cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(p), m);
      if (with_station) cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(p) + 1, st);
      evaluate(k, cand, cal, scratch_);
      if (scratch_.feasible) {
        const double delta = scratch_.cost - base;
        if (delta < best.delta - 1e-9) {
          best.feasible = true;
          best.delta = delta;
          best.vehicle = k;
          best.stops = cand;
        }
      } else if (scratch_.family == family::kEnergy) {
        const NodeId prev = stops[p - 1];
        const NodeId next = stops[p];
        const NodeId tail = with_station ? st : m;
        energy_fail.emplace_back(inst().dist(prev, m) + inst().dist(tail, next) - inst().dist(prev, next) +
                                     (with_station ? inst().dist(m, st) : 0.0),
                                 p);
      }
    };
    if (it != stops.end()) {
      const auto idx = static_cast<std::size_t>(it - stops.begin());
      std::size_t b0 = idx;
      while (b0 > 0 && inst().is_mp(stops[b0 - 1])) --b0;
      for (std::size_t p = b0; p <= idx; ++p) {
        if (!inst().arc(stops[p - 1], m) || !inst().arc(m, stops[p])) continue;
        consider(p, false);
      }
    } else {
      for (std::size_t p = 1; p < stops.size(); ++p) {
        const NodeKind prev = inst().node(stops[p - 1]).kind;
        const NodeKind next = inst().node(stops[p]).kind;
        if (prev == NodeKind::MeetingPoint || next == NodeKind::TransitStation) continue;
        if (!inst().arc(stops[p - 1], m) || !inst().arc(st, stops[p])) continue;
        consider(p, true);
      }
    }
    if (!best.feasible && !energy_fail.empty() && inst().params().enforce_energy) {
      std::stable_sort(energy_fail.begin(), energy_fail.end());
      const bool with_station = it == stops.end();
      for (std::size_t t = 0; t < std::min<std::size_t>(2, energy_fail.size()); ++t) {
        const std::size_t p = energy_fail[t].second;
        StopList grown = stops;
        grown.insert(grown.begin() + static_cast<std::ptrdiff_t>(p), m);
        if (with_station) grown.insert(grown.begin() + static_cast<std::ptrdiff_t>(p) + 1, st);
        add_charger(k, grown, cal, base, best);
      }
    }
    boarding[static_cast<std::size_t>(m)] -= add;
    return best;
  }

  // Applies an option for the given requests; false (and no change) when the
  // option no longer holds.
  bool apply(const Option& opt, const std::vector<int>& requests) {
    const int k = opt.vehicle;
    const auto uk = static_cast<std::size_t>(k);
    StopList old_stops = routes[uk];
    RouteEvaluation old_eval = evals[uk];
    routes[uk] = opt.stops;
    boarding[static_cast<std::size_t>(opt.mp)] += static_cast<int>(requests.size());
    if (!reevaluate(k)) {
      boarding[static_cast<std::size_t>(opt.mp)] -= static_cast<int>(requests.size());
      routes[uk] = std::move(old_stops);
      evals[uk] = std::move(old_eval);
      return false;
    }
    mp_route[static_cast<std::size_t>(opt.mp)] = k;
    for (int r : requests) assign[static_cast<std::size_t>(r)] = opt.mp;
    return true;
  }

  // Unassigns r, dropping its meeting point (and an emptied station) from the
  // route. Returns the touched vehicle.
  int remove_request(int r) {
    const NodeId m = assign[static_cast<std::size_t>(r)];
    if (m == kNoNode) return -1;
    const int k = mp_route[static_cast<std::size_t>(m)];
    assign[static_cast<std::size_t>(r)] = kNoNode;
    if (--boarding[static_cast<std::size_t>(m)] == 0) {
      auto& stops = routes[static_cast<std::size_t>(k)];
      auto it = std::find(stops.begin(), stops.end(), m);
      const auto idx = it - stops.begin();
      stops.erase(it);
      mp_route[static_cast<std::size_t>(m)] = -1;
      // Block emptied: prev is not a meeting point and next is the station.
      const auto i = static_cast<std::size_t>(idx);
      if (i < stops.size() && inst().is_station(stops[i]) && !inst().is_mp(stops[i - 1])) stops.erase(stops.begin() + idx);
    }
    return k;
  }

  [[nodiscard]] double walk_total() const {
    double w = 0.0;
    for (std::size_t r = 0; r < assign.size(); ++r)
      if (assign[r] != kNoNode) w += walk_time(inst(), static_cast<int>(r), assign[r]);
    return w;
  }

  [[nodiscard]] int rejected_count() const {
    return static_cast<int>(std::count(assign.begin(), assign.end(), kNoNode));
  }

  [[nodiscard]] double objective() const {
    double z = 0.0;
    for (const auto& e : evals) z += e.cost;
    const auto& l = inst().params().lambda;
    return z + l.walk * walk_total() + l.reject * rejected_count();
  }

  [[nodiscard]] ChargerOrder charger_order() const {
    std::vector<std::vector<std::tuple<double, int, int>>> seq(inst().chargers().size());
    for (std::size_t k = 0; k < evals.size(); ++k)
      for (std::size_t v = 0; v < evals[k].charges.size(); ++v) {
        const auto& c = evals[k].charges[v];
        seq[static_cast<std::size_t>(c.physical)].emplace_back(c.start, static_cast<int>(k), static_cast<int>(v));
      }
    ChargerOrder order(seq.size());
    for (std::size_t c = 0; c < seq.size(); ++c) {
      std::sort(seq[c].begin(), seq[c].end());
      for (const auto& [s, k, v] : seq[c]) order[c].emplace_back(k, v);
    }
    return order;
  }

  // Removes zero-length charger stops and rebuilds charger starts from the
  // booked sequence. False when the state cannot be scheduled.
  bool settle() {
    for (int k = 0; k < vehicles(); ++k) {
      for (;;) {
        const auto& ev = evals[static_cast<std::size_t>(k)];
        int victim = -1;
        for (const auto& c : ev.charges)
          if (c.duration <= 1e-12) {
            victim = c.stop;
            break;
          }
        if (victim < 0) break;
        auto& stops = routes[static_cast<std::size_t>(k)];
        const NodeId removed = stops[static_cast<std::size_t>(victim)];
        stops.erase(stops.begin() + victim);
        if (!reevaluate(k)) {
          stops.insert(stops.begin() + victim, removed);
          reevaluate(k);
          break;
        }
      }
    }
    const ChargerOrder order = charger_order();
    ChargingPlan plan = schedule_charging_ordered(inst(), routes, boarding, order);
    if (!plan.feasible) plan = schedule_charging(inst(), routes, boarding);
    if (!plan.feasible) return false;
    evals = std::move(plan.routes);
    z = objective();
    return true;
  }

  [[nodiscard]] int served_on(int k) const {
    int n = 0;
    for (NodeId s : routes[static_cast<std::size_t>(k)])
      if (inst().is_mp(s)) n += boarding[static_cast<std::size_t>(s)];
    return n;
  }

 private:
  const Instance* inst_;

 public:
  std::vector<StopList> routes;
  std::vector<NodeId> assign;
  std::vector<int> boarding;
  std::vector<int> mp_route;
  std::vector<RouteEvaluation> evals;
  double z = 0.0;

 private:
  RouteEvaluation scratch_;
};

// ------------------------------------------------------------- repair

class Repairer {
 public:
  explicit Repairer(State& s) : s_(s), cache_(static_cast<std::size_t>(s.vehicles())) {}

  void invalidate(int k) { cache_[static_cast<std::size_t>(k)].clear(); }

  const Option& option(int k, NodeId m, int add = 1) {
    auto& c = cache_[static_cast<std::size_t>(k)];
    const bool join = s_.boarding[static_cast<std::size_t>(m)] > 0;
    auto it = c.find({m, add});
    if (it != c.end() && it->second.join == join) return it->second;
    Option o = join ? s_.best_join(k, m, add) : s_.best_open(k, m, add);
    o.join = join;
    return c[{m, add}] = std::move(o);
  }

  struct Choice {
    double cost = kInf;
    double second = kInf;
    int vehicle = -1;
    NodeId mp = kNoNode;
  };

  // Empty routes of interchangeable vehicles give identical options; only
  // the first of each class is tried.
  void refresh_twins() {
    const auto& inst = s_.inst();
    const bool energy = inst.params().enforce_energy;
    twin_.assign(static_cast<std::size_t>(s_.vehicles()), 0);
    auto same = [&](const VehicleSpec& a, const VehicleSpec& b) {
      if (a.capacity != b.capacity || a.speed != b.speed || a.consumption != b.consumption) return false;
      return !energy || (a.e_init == b.e_init && a.e_min == b.e_min && a.e_max == b.e_max);
    };
    for (int k = 0; k < s_.vehicles(); ++k) {
      if (s_.routes[static_cast<std::size_t>(k)].size() != 2) continue;
      for (int o = 0; o < k; ++o)
        if (s_.routes[static_cast<std::size_t>(o)].size() == 2 && !twin_[static_cast<std::size_t>(o)] &&
            same(inst.vehicle(o), inst.vehicle(k))) {
          twin_[static_cast<std::size_t>(k)] = 1;
          twin_[static_cast<std::size_t>(o)] = 2;
          break;
        }
    }
  }

  Choice evaluate(int r) {
    Choice ch;
    const auto& inst = s_.inst();
    const double lw = inst.params().lambda.walk;
    std::vector<double> per_vehicle(static_cast<std::size_t>(s_.vehicles()), kInf);
    for (const auto& cand : inst.request(r).candidates) {
      const NodeId m = cand.mp;
      const int owner = s_.mp_route[static_cast<std::size_t>(m)];
      for (int k = 0; k < s_.vehicles(); ++k) {
        if (owner >= 0 && k != owner) continue;
        if (twin_[static_cast<std::size_t>(k)] == 1) continue;
        const Option& o = option(k, m);
        if (!o.feasible) continue;
        const double cost = o.delta + lw * cand.walk_min;
        if (cost < per_vehicle[static_cast<std::size_t>(k)]) per_vehicle[static_cast<std::size_t>(k)] = cost;
        if (cost < ch.cost - 1e-9) {
          ch.cost = cost;
          ch.vehicle = k;
          ch.mp = m;
        }
      }
    }
    for (int k = 0; k < s_.vehicles(); ++k)
      if (k != ch.vehicle) ch.second = std::min(ch.second, per_vehicle[static_cast<std::size_t>(k)]);
    if (ch.vehicle >= 0 && twin_[static_cast<std::size_t>(ch.vehicle)] == 2) ch.second = ch.cost;
    return ch;
  }

  struct Group {
    double cost = kInf;
    int vehicle = -1;
    NodeId mp = kNoNode;
    std::vector<int> requests;
  };

  // Opens one closed meeting point for every pool request that can walk to
  // it, nearest walkers first up to the seat count.
  Group best_group(const std::vector<int>& pool) {
    const auto& inst = s_.inst();
    const auto& l = inst.params().lambda;
    std::map<NodeId, std::vector<std::pair<double, int>>> walkers;
    for (int r : pool)
      for (const auto& c : inst.request(r).candidates)
        if (s_.boarding[static_cast<std::size_t>(c.mp)] == 0) walkers[c.mp].emplace_back(c.walk_min, r);
    Group best;
    double best_avg = kInf;
    for (auto& [m, list] : walkers) {
      if (list.size() < 2) continue;
      std::sort(list.begin(), list.end());
      int seats = 0;
      for (const auto& v : inst.fleet()) seats = std::max(seats, v.capacity);
      const auto g = std::min<std::size_t>(list.size(), static_cast<std::size_t>(seats));
      double walk = 0.0;
      for (std::size_t i = 0; i < g; ++i) walk += list[i].first;
      for (int k = 0; k < s_.vehicles(); ++k) {
        if (twin_[static_cast<std::size_t>(k)] == 1) continue;
        const Option& o = option(k, m, static_cast<int>(g));
        if (!o.feasible) continue;
        const double cost = o.delta + l.walk * walk;
        const double avg = cost / static_cast<double>(g);
        if (cost < l.reject * static_cast<double>(g) - 1e-9 && avg < best_avg - 1e-9) {
          best_avg = avg;
          best.cost = cost;
          best.vehicle = k;
          best.mp = m;
          best.requests.clear();
          for (std::size_t i = 0; i < g; ++i) best.requests.push_back(list[i].second);
        }
      }
    }
    return best;
  }

  // Inserts pool requests while serving beats rejecting; leaves the rest in
  // the pool. Greedy mode also weighs opening a point for a whole group.
  void run(std::vector<int>& pool, bool regret, bool groups = false) {
    const double reject = s_.inst().params().lambda.reject;
    std::sort(pool.begin(), pool.end());
    pool.erase(std::remove_if(pool.begin(), pool.end(),
                              [&](int r) { return s_.inst().request(r).candidates.empty(); }),
               pool.end());
    int failures = 0;
    while (!pool.empty()) {
      refresh_twins();
      int pick = -1;
      Choice best;
      double best_key = kInf;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const Choice ch = evaluate(pool[i]);
        if (ch.vehicle < 0 || ch.cost >= reject - 1e-9) continue;
        const double key = regret ? -(std::min(ch.second, reject) - ch.cost) : ch.cost;
        if (key < best_key - 1e-9) {
          best_key = key;
          best = ch;
          pick = static_cast<int>(i);
        }
      }
      if (groups && !regret && pool.size() > 1) {
        Group g = best_group(pool);
        if (g.vehicle >= 0 && g.cost / static_cast<double>(g.requests.size()) < best_key - 1e-9) {
          const Option opt = option(g.vehicle, g.mp, static_cast<int>(g.requests.size()));
          invalidate(g.vehicle);
          if (s_.apply(opt, g.requests)) {
            std::vector<int> rest;
            for (int r : pool)
              if (std::find(g.requests.begin(), g.requests.end(), r) == g.requests.end()) rest.push_back(r);
            pool = std::move(rest);
          } else if (++failures > 4 * static_cast<int>(pool.size()) + 8) {
            return;
          }
          continue;
        }
      }
      if (pick < 0) return;
      const int r = pool[static_cast<std::size_t>(pick)];
      const Option opt = option(best.vehicle, best.mp);
      if (!s_.apply(opt, {r})) {
        invalidate(best.vehicle);
        if (++failures > 4 * static_cast<int>(pool.size()) + 8) return;
        continue;
      }
      invalidate(best.vehicle);
      pool.erase(pool.begin() + pick);
    }
  }

 private:
  State& s_;
  std::vector<std::map<std::pair<NodeId, int>, Option>> cache_;
  std::vector<char> twin_;
};

// ------------------------------------------------------------ destroy

std::vector<int> served_requests(const State& s) {
  std::vector<int> out;
  for (std::size_t r = 0; r < s.assign.size(); ++r)
    if (s.assign[r] != kNoNode) out.push_back(static_cast<int>(r));
  return out;
}

bool remove_all(State& s, const std::vector<int>& victims, std::vector<int>& pool) {
  std::vector<char> dirty(static_cast<std::size_t>(s.vehicles()), 0);
  for (int r : victims) {
    const int k = s.remove_request(r);
    if (k >= 0) {
      dirty[static_cast<std::size_t>(k)] = 1;
      pool.push_back(r);
    }
  }
  for (int k = 0; k < s.vehicles(); ++k)
    if (dirty[static_cast<std::size_t>(k)] && !s.reevaluate(k)) return false;
  return true;
}

std::vector<int> pick_random(std::mt19937_64& rng, std::vector<int> served, int q) {
  std::vector<int> out;
  for (int i = 0; i < q && !served.empty(); ++i) {
    const int idx = uniform_index(rng, served.size());
    out.push_back(served[static_cast<std::size_t>(idx)]);
    served.erase(served.begin() + idx);
  }
  return out;
}

// q meeting points with all of their riders.
std::vector<int> pick_random_points(std::mt19937_64& rng, const State& s, int q) {
  auto served = served_requests(s);
  std::vector<int> out;
  for (int i = 0; i < q && !served.empty(); ++i) {
    const NodeId m = s.assign[static_cast<std::size_t>(served[static_cast<std::size_t>(uniform_index(rng, served.size()))])];
    for (int r : served)
      if (s.assign[static_cast<std::size_t>(r)] == m) out.push_back(r);
    served.erase(std::remove_if(served.begin(), served.end(),
                                [&](int r) { return s.assign[static_cast<std::size_t>(r)] == m; }),
                 served.end());
  }
  return out;
}

std::vector<int> pick_worst(std::mt19937_64& rng, const State& s, int q) {
  const auto& inst = s.inst();
  const auto& l = inst.params().lambda;
  std::vector<std::pair<double, int>> score;
  for (int r : served_requests(s)) {
    const NodeId m = s.assign[static_cast<std::size_t>(r)];
    const auto& stops = s.routes[static_cast<std::size_t>(s.mp_route[static_cast<std::size_t>(m)])];
    const auto idx = static_cast<std::size_t>(std::find(stops.begin(), stops.end(), m) - stops.begin());
    const NodeId prev = stops[idx - 1];
    const NodeId next = stops[idx + 1];
    const double detour = inst.time(prev, m) + inst.time(m, next) - inst.time(prev, next) + inst.node(m).service_time;
    const double c = l.walk * walk_time(inst, r, m) +
                     l.travel * detour / static_cast<double>(s.boarding[static_cast<std::size_t>(m)]);
    score.emplace_back(-c, r);
  }
  std::sort(score.begin(), score.end());
  std::vector<int> out;
  for (int i = 0; i < q && !score.empty(); ++i) {
    const double y = uniform01(rng);
    const auto idx = std::min(static_cast<std::size_t>(y * y * y * static_cast<double>(score.size())), score.size() - 1);
    out.push_back(score[idx].second);
    score.erase(score.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return out;
}

// Route removal, biased toward the route with the fewest passengers.
bool destroy_route(std::mt19937_64& rng, State& s, std::vector<int>& pool) {
  std::vector<std::pair<int, int>> used;
  for (int k = 0; k < s.vehicles(); ++k) {
    const int n = s.served_on(k);
    if (n > 0) used.emplace_back(n, k);
  }
  if (used.empty()) return true;
  std::sort(used.begin(), used.end());
  const int pick = uniform01(rng) < 0.5 ? 0 : uniform_index(rng, used.size());
  const int k = used[static_cast<std::size_t>(pick)].second;
  std::vector<int> victims;
  for (std::size_t r = 0; r < s.assign.size(); ++r)
    if (s.assign[r] != kNoNode && s.mp_route[static_cast<std::size_t>(s.assign[r])] == k)
      victims.push_back(static_cast<int>(r));
  if (!remove_all(s, victims, pool)) return false;
  s.routes[static_cast<std::size_t>(k)] = {s.inst().depot_start(), s.inst().depot_end()};
  return s.reevaluate(k);
}

// Drops one charger stop, then unloads blocks after it until the route is
// feasible again.
bool destroy_charger(std::mt19937_64& rng, State& s, std::vector<int>& pool, int extra) {
  std::vector<std::pair<int, int>> visits;
  for (int k = 0; k < s.vehicles(); ++k) {
    const auto& st = s.routes[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < st.size(); ++i)
      if (s.inst().is_charger(st[i])) visits.emplace_back(k, static_cast<int>(i));
  }
  if (visits.empty()) return remove_all(s, pick_random(rng, served_requests(s), extra), pool);
  const auto [k, idx] = visits[static_cast<std::size_t>(uniform_index(rng, visits.size()))];
  auto& stops = s.routes[static_cast<std::size_t>(k)];
  stops.erase(stops.begin() + idx);
  while (!s.reevaluate(k)) {
    // Requests of the last block after the removed stop.
    std::vector<int> victims;
    NodeId last_block_mp = kNoNode;
    for (std::size_t i = stops.size(); i-- > static_cast<std::size_t>(idx);)
      if (s.inst().is_mp(stops[i])) {
        last_block_mp = stops[i];
        break;
      }
    if (last_block_mp == kNoNode) {
      for (std::size_t i = stops.size(); i-- > 0;)
        if (s.inst().is_mp(stops[i])) {
          last_block_mp = stops[i];
          break;
        }
    }
    if (last_block_mp == kNoNode) return false;
    const int layer = s.inst().node(last_block_mp).layer;
    for (std::size_t r = 0; r < s.assign.size(); ++r) {
      const NodeId m = s.assign[r];
      if (m != kNoNode && s.mp_route[static_cast<std::size_t>(m)] == k && s.inst().node(m).layer == layer)
        victims.push_back(static_cast<int>(r));
    }
    for (int r : victims) {
      s.remove_request(r);
      pool.push_back(r);
    }
  }
  if (extra > 0) return remove_all(s, pick_random(rng, served_requests(s), extra), pool);
  return true;
}

// ------------------------------------------------------------ construction

State build_initial(const Instance& inst, const AssignmentProblem& prob, const AssignmentResult& res) {
  State s(inst);
  if (inst.vehicle_count() == 0) return s;
  const auto nodes = assignment_nodes(prob, res);
  std::map<NodeId, std::vector<int>> riders;  // ordered by node id, i.e. by layer
  for (std::size_t r = 0; r < nodes.size(); ++r)
    if (nodes[r] != kNoNode) riders[nodes[r]].push_back(static_cast<int>(r));
  const auto& l = inst.params().lambda;
  for (auto& [m, group] : riders) {
    for (int count = static_cast<int>(group.size()); count > 0; --count) {
      Option best;
      for (int k = 0; k < s.vehicles(); ++k) {
        Option o = s.best_open(k, m, count);
        if (o.feasible && o.delta < best.delta - 1e-9) best = std::move(o);
      }
      if (!best.feasible) continue;
      double walk = 0.0;
      for (int i = 0; i < count; ++i) walk += walk_time(inst, group[static_cast<std::size_t>(i)], m);
      if (best.delta + l.walk * walk >= l.reject * count) continue;
      std::vector<int> board(group.begin(), group.begin() + count);
      if (s.apply(best, board)) break;
    }
  }
  s.settle();
  return s;
}

Solution to_solution(const State& s) {
  const ChargerOrder order = s.charger_order();
  std::string err;
  auto sol = finalize_solution(s.inst(), s.routes, s.assign, &err, {}, false, &order);
  if (!sol) sol = finalize_solution(s.inst(), s.routes, s.assign, &err);
  if (!sol) throw std::logic_error("search state cannot be scheduled: " + err);
  const auto violations = check_feasibility(*sol, s.inst());
  if (!violations.empty()) throw std::logic_error("search produced an infeasible solution: " + describe(violations.front()));
  return *sol;
}

State search(const Instance& inst, const State& start, const SearchConfig& cfg, std::uint64_t stream,
             SearchStats& stats) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::mt19937_64 rng(seq);
  const auto t0 = std::chrono::steady_clock::now();
  State cur = start;
  State best = start;
  if (cfg.iteration_budget == 0 || inst.vehicle_count() == 0) return best;

  auto reinsert = [&](State& st) {
    State trial = st;
    std::vector<int> pool;
    for (std::size_t r = 0; r < trial.assign.size(); ++r)
      if (trial.assign[r] == kNoNode) pool.push_back(static_cast<int>(r));
    if (pool.empty()) return;
    Repairer rep(trial);
    rep.run(pool, false, true);
    if (trial.settle() && trial.z < st.z - 1e-9) st = std::move(trial);
  };
  reinsert(cur);
  if (cur.z < best.z - 1e-9) best = cur;

  double threshold = cfg.da_threshold_init;
  for (int it = 0; it < cfg.iteration_budget; ++it) {
    if (cfg.time_limit > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > cfg.time_limit)
      break;
    ++stats.iterations;
    State cand = cur;
    const auto served = served_requests(cand);
    std::vector<int> pool;
    for (std::size_t r = 0; r < cand.assign.size(); ++r)
      if (cand.assign[r] == kNoNode) pool.push_back(static_cast<int>(r));
    const double frac = cfg.destroy_min + uniform01(rng) * (cfg.destroy_max - cfg.destroy_min);
    const int q_floor = std::min(static_cast<int>(served.size()), 1 + static_cast<int>(uniform01(rng) < 0.5));
    const int q = std::max(q_floor, static_cast<int>(std::lround(frac * static_cast<double>(served.size()))));
    const int op = roulette<4>(rng, cfg.destroy_weights, {true, true, true, true});
    bool ok = true;
    if (!served.empty() || op == 3) {
      switch (op) {
        case 0:
          ok = remove_all(cand, uniform01(rng) < 0.5 ? pick_random(rng, served, q) : pick_random_points(rng, cand, q),
                          pool);
          break;
        case 1: ok = remove_all(cand, pick_worst(rng, cand, q), pool); break;
        case 2: ok = destroy_route(rng, cand, pool); break;
        default: ok = destroy_charger(rng, cand, pool, q / 2); break;
      }
    }
    const int rep_op = roulette<2>(rng, cfg.repair_weights, {true, true});
    if (ok) {
      Repairer rep(cand);
      rep.run(pool, rep_op == 1, uniform01(rng) < 0.5);
      ok = cand.settle();
    }
    if (ok && cand.z <= cur.z * (1.0 + threshold) + 1e-9) {
      ++stats.accepted;
      cur = std::move(cand);
      if (cur.z < best.z - 1e-9) {
        ++stats.improvements;
        reinsert(cur);
        best = cur;
      }
    }
    threshold *= cfg.da_decay;
  }
  return best;
}

}  // namespace

Solution initial_solution(const Instance& inst, const AssignmentProblem& prob, const AssignmentResult& assignment) {
  return to_solution(build_initial(inst, prob, assignment));
}

Solution lns_solve(const Instance& inst, const SearchConfig& cfg, SearchStats* stats) {
  validate_search_config(cfg);
  AssignmentProblem prob;
  const AssignmentResult res = stage_one_assignment(inst, cfg, &prob);
  const State start = build_initial(inst, prob, res);
  SearchStats local;
  local.initial_objective = start.z;
  std::optional<State> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    State found = search(inst, start, cfg, static_cast<std::uint64_t>(r), local);
    ++local.restarts;
    if (!best || found.z < best->z - 1e-9) best = std::move(found);
  }
  local.best_objective = best->z;
  if (stats) *stats = local;
  return to_solution(*best);
}

}  // namespace mpefcs
