#include "mpefcs/oracle.hpp"

#include "mpefcs/objective.hpp"
#include "mpefcs/validator.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace mpefcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_idle_charger(const RouteEvaluation& ev) {
  return std::any_of(ev.charges.begin(), ev.charges.end(), [](const ChargeVisit& c) { return c.duration <= 1e-12; });
}

}  // namespace

RouteEnumeration enumerate_vehicle_routes(const Instance& inst, int vehicle, std::vector<NodeId> mps,
                                          std::span<const int> boarding) {
  RouteEnumeration out;
  std::sort(mps.begin(), mps.end());
  std::map<int, std::vector<NodeId>> by_layer;
  for (NodeId m : mps) by_layer[inst.node(m).layer].push_back(m);
  std::vector<std::vector<NodeId>> blocks;
  for (auto& [l, v] : by_layer) blocks.push_back(v);
  std::vector<int> block_order(blocks.size());
  std::iota(block_order.begin(), block_order.end(), 0);

  const int n_chargers = static_cast<int>(inst.chargers().size());
  const std::size_t gaps = blocks.size() + (blocks.empty() ? 0 : 1);
  RouteEvaluation ev;
  StopList stops;

  // Recursion over blocks in the chosen order, each one permuted in place.
  std::vector<std::vector<NodeId>> perm(blocks.size());
  auto emit = [&]() {
    ++out.orderings;
    std::vector<int> choice(gaps, -1);  // -1: no charger in that gap
    for (;;) {
      ++out.candidates;
      stops.assign(1, inst.depot_start());
      for (std::size_t b = 0; b < perm.size(); ++b) {
        if (choice[b] >= 0) stops.push_back(inst.charger_dummies(choice[b]).front());
        for (NodeId m : perm[b]) stops.push_back(m);
        stops.push_back(inst.station_of(perm[b].front()));
      }
      if (gaps > 0 && choice[gaps - 1] >= 0) stops.push_back(inst.charger_dummies(choice[gaps - 1]).front());
      stops.push_back(inst.depot_end());
      propagate_route(inst, vehicle, stops, boarding, PropagationOptions{}, ev);
      if (ev.feasible && !has_idle_charger(ev)) out.feasible.emplace_back(stops, ev);
      std::size_t g = 0;
      while (g < gaps && ++choice[g] >= n_chargers) choice[g++] = -1;
      if (g == gaps) break;
    }
  };
  auto recurse = [&](auto&& self, std::size_t b) -> void {
    if (b == blocks.size()) {
      emit();
      return;
    }
    auto& cur = perm[b];
    cur = blocks[static_cast<std::size_t>(block_order[b])];
    std::sort(cur.begin(), cur.end());
    do {
      self(self, b + 1);
    } while (std::next_permutation(cur.begin(), cur.end()));
  };
  do {
    recurse(recurse, 0);
  } while (std::next_permutation(block_order.begin(), block_order.end()));

  std::stable_sort(out.feasible.begin(), out.feasible.end(),
                   [](const auto& a, const auto& b) { return a.second.cost < b.second.cost; });
  return out;
}

namespace {

struct Encoding {
  std::vector<NodeId> assignment;
  std::vector<StopList> routes;
  bool operator<(const Encoding& o) const {
    return std::tie(assignment, routes) < std::tie(o.assignment, o.routes);
  }
};

class ExactSearch {
 public:
  ExactSearch(const Instance& inst, std::uint64_t budget)
      : inst_(inst),
        budget_(budget),
        assign_(static_cast<std::size_t>(inst.request_count()), kNoNode),
        boarding_(static_cast<std::size_t>(inst.node_count()), 0) {}

  void run() { assign_dfs(0, 0.0); }

  double best_z = kInf;
  Encoding best;
  std::uint64_t leaves = 0;
  std::uint64_t assignments = 0;

 private:
  using Key = std::pair<int, std::vector<std::pair<NodeId, int>>>;

  void assign_dfs(int r, double partial) {
    if (partial > best_z + 1e-9) return;
    if (r == inst_.request_count()) {
      ++assignments;
      evaluate_assignment(partial);
      return;
    }
    const auto& l = inst_.params().lambda;
    const auto ur = static_cast<std::size_t>(r);
    for (const auto& c : inst_.request(r).candidates) {
      if (boarding_[static_cast<std::size_t>(c.mp)] >= max_capacity()) continue;
      assign_[ur] = c.mp;
      ++boarding_[static_cast<std::size_t>(c.mp)];
      assign_dfs(r + 1, partial + l.walk * c.walk_min);
      --boarding_[static_cast<std::size_t>(c.mp)];
    }
    assign_[ur] = kNoNode;
    assign_dfs(r + 1, partial + l.reject);
  }

  int max_capacity() const {
    int q = 0;
    for (const auto& v : inst_.fleet()) q = std::max(q, v.capacity);
    return q;
  }

  const std::vector<std::pair<StopList, RouteEvaluation>>& routes_for(int k, const std::vector<NodeId>& mps) {
    Key key{k, {}};
    for (NodeId m : mps) key.second.emplace_back(m, boarding_[static_cast<std::size_t>(m)]);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto en = enumerate_vehicle_routes(inst_, k, mps, boarding_);
    return cache_.emplace(std::move(key), std::move(en.feasible)).first->second;
  }

  void evaluate_assignment(double fixed) {
    std::vector<NodeId> active;
    for (NodeId n = 0; n < inst_.node_count(); ++n)
      if (boarding_[static_cast<std::size_t>(n)] > 0) active.push_back(n);
    const int K = inst_.vehicle_count();
    if (active.empty()) {
      offer(fixed, std::vector<StopList>(static_cast<std::size_t>(K), StopList{inst_.depot_start(), inst_.depot_end()}));
      return;
    }
    if (K == 0) return;
    // Every map of active meeting points to vehicles.
    std::vector<int> owner(active.size(), 0);
    for (;;) {
      std::vector<std::vector<NodeId>> subsets(static_cast<std::size_t>(K));
      for (std::size_t i = 0; i < active.size(); ++i) subsets[static_cast<std::size_t>(owner[i])].push_back(active[i]);
      combine(fixed, subsets);
      std::size_t i = 0;
      while (i < owner.size() && ++owner[i] >= K) owner[i++] = 0;
      if (i == owner.size()) break;
    }
  }

  void combine(double fixed, const std::vector<std::vector<NodeId>>& subsets) {
    const int K = inst_.vehicle_count();
    std::vector<const std::vector<std::pair<StopList, RouteEvaluation>>*> lists(static_cast<std::size_t>(K), nullptr);
    std::vector<double> min_cost(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
      if (subsets[static_cast<std::size_t>(k)].empty()) continue;
      lists[static_cast<std::size_t>(k)] = &routes_for(k, subsets[static_cast<std::size_t>(k)]);
      if (lists[static_cast<std::size_t>(k)]->empty()) return;
      min_cost[static_cast<std::size_t>(k)] = lists[static_cast<std::size_t>(k)]->front().second.cost;
    }
    std::vector<double> suffix(static_cast<std::size_t>(K) + 1, 0.0);
    for (int k = K - 1; k >= 0; --k) suffix[static_cast<std::size_t>(k)] = suffix[static_cast<std::size_t>(k) + 1] + min_cost[static_cast<std::size_t>(k)];
    std::vector<StopList> chosen(static_cast<std::size_t>(K), StopList{inst_.depot_start(), inst_.depot_end()});
    std::vector<bool> charges(static_cast<std::size_t>(K), false);
    auto dfs = [&](auto&& self, int k, double acc) -> void {
      if (fixed + acc + suffix[static_cast<std::size_t>(k)] > best_z + 1e-9) return;
      if (k == K) {
        if (++leaves > budget_)
          throw OracleLimitError("exact search exceeded its leaf budget after " + std::to_string(leaves - 1) +
                                     " leaves",
                                 leaves - 1);
        leaf(fixed, acc, chosen, charges);
        return;
      }
      const auto* list = lists[static_cast<std::size_t>(k)];
      if (!list) {
        chosen[static_cast<std::size_t>(k)] = {inst_.depot_start(), inst_.depot_end()};
        charges[static_cast<std::size_t>(k)] = false;
        self(self, k + 1, acc);
        return;
      }
      for (const auto& [stops, ev] : *list) {
        if (fixed + acc + ev.cost + suffix[static_cast<std::size_t>(k) + 1] > best_z + 1e-9) break;
        chosen[static_cast<std::size_t>(k)] = stops;
        charges[static_cast<std::size_t>(k)] = !ev.charges.empty();
        self(self, k + 1, acc + ev.cost);
      }
    };
    dfs(dfs, 0, 0.0);
  }

  void leaf(double fixed, double acc, const std::vector<StopList>& routes, const std::vector<bool>& charges) {
    const int charging_routes = static_cast<int>(std::count(charges.begin(), charges.end(), true));
    double z = fixed + acc;
    if (charging_routes > 1) {
      const ChargingPlan plan = schedule_charging_exhaustive(inst_, routes, boarding_);
      if (!plan.feasible) return;
      z = fixed + plan.cost;
    }
    offer(z, routes);
  }

  void offer(double z, std::vector<StopList> routes) {
    if (z > best_z + 1e-9) return;
    Encoding enc{assign_, std::move(routes)};
    if (z < best_z - 1e-9 || enc < best) {
      best_z = std::min(best_z, z);
      best = std::move(enc);
    }
  }

  const Instance& inst_;
  std::uint64_t budget_;
  std::vector<NodeId> assign_;
  std::vector<int> boarding_;
  std::map<Key, std::vector<std::pair<StopList, RouteEvaluation>>> cache_;
};

}  // namespace

ExactResult solve_exact_tiny(const Instance& inst, std::uint64_t leaf_budget) {
  if (inst.request_count() > 6)
    throw OracleLimitError("exact search supports at most 6 requests, got " + std::to_string(inst.request_count()), 0);
  if (inst.vehicle_count() > 2)
    throw OracleLimitError("exact search supports at most 2 vehicles, got " + std::to_string(inst.vehicle_count()), 0);
  if (inst.chargers().size() > 2)
    throw OracleLimitError(
        "exact search supports at most 2 physical chargers, got " + std::to_string(inst.chargers().size()), 0);
  ExactSearch search(inst, leaf_budget);
  search.run();
  ExactResult res;
  res.leaves = search.leaves;
  res.assignments = search.assignments;
  std::string err;
  auto sol = finalize_solution(inst, search.best.routes, search.best.assignment, &err, {}, true);
  if (!sol) throw std::logic_error("exact optimum cannot be scheduled: " + err);
  const auto violations = check_feasibility(*sol, inst);
  if (!violations.empty()) throw std::logic_error("exact optimum fails validation: " + describe(violations.front()));
  res.solution = std::move(*sol);
  res.objective = res.solution.objective;
  return res;
}

}  // namespace mpefcs
