#include "mpefcs/assignment.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

namespace mpefcs {

AssignmentProblem make_assignment_problem(const Instance& inst, double rho) {
  AssignmentProblem prob;
  prob.w_max = inst.params().w_max;
  prob.rho = rho;
  prob.lambda_travel = inst.params().lambda.travel;
  prob.lambda_walk = inst.params().lambda.walk;
  prob.q_max = 0;
  for (const auto& v : inst.fleet()) prob.q_max = prob.q_max == 0 ? v.capacity : std::min(prob.q_max, v.capacity);
  if (prob.q_max == 0) prob.q_max = VehicleSpec{}.capacity;

  std::vector<int> local(static_cast<std::size_t>(inst.node_count()), -1);
  for (const auto& layer : inst.layers()) {
    for (NodeId mp : layer.mps) {
      local[static_cast<std::size_t>(mp)] = prob.mp_count();
      prob.mp_node.push_back(mp);
      prob.mp_layer.push_back(layer.index);
    }
  }
  const auto m = static_cast<Eigen::Index>(prob.mp_count());
  prob.mp_time.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      prob.mp_time(a, b) = inst.time(prob.mp_node[static_cast<std::size_t>(a)], prob.mp_node[static_cast<std::size_t>(b)]);

  for (const auto& req : inst.requests()) {
    prob.request_layer.push_back(req.layer);
    std::vector<AssignmentProblem::Option> opts;
    for (const auto& c : req.candidates) opts.push_back({local[static_cast<std::size_t>(c.mp)], c.walk_min, c.walk_km});
    std::sort(opts.begin(), opts.end(), [](const auto& a, const auto& b) { return a.mp < b.mp; });
    prob.options.push_back(std::move(opts));
  }
  return prob;
}

std::vector<NodeId> assignment_nodes(const AssignmentProblem& prob, const AssignmentResult& result) {
  std::vector<NodeId> out(result.assignment.size(), kNoNode);
  for (std::size_t r = 0; r < result.assignment.size(); ++r)
    if (result.assignment[r] >= 0) out[r] = prob.mp_node[static_cast<std::size_t>(result.assignment[r])];
  return out;
}

namespace {

const AssignmentProblem::Option* find_option(const AssignmentProblem& prob, int r, int mp) {
  for (const auto& o : prob.options[static_cast<std::size_t>(r)])
    if (o.mp == mp) return &o;
  return nullptr;
}

double pair_weight(const AssignmentProblem& prob) { return prob.rho * prob.lambda_travel; }

/// Ordered-pair sum of bus times between the active points of one layer.
double pair_cost(const AssignmentProblem& prob, const std::vector<int>& active) {
  double total = 0.0;
  for (int i : active)
    for (int j : active)
      if (i != j) total += prob.mp_time(i, j);
  return pair_weight(prob) * total;
}

// Marginal compactness cost of activating `j` next to `active`.
double activation_delta(const AssignmentProblem& prob, const std::vector<char>& is_active,
                        const std::vector<int>& layer_mps, int j) {
  double d = 0.0;
  for (int i : layer_mps)
    if (i != j && is_active[static_cast<std::size_t>(i)]) d += prob.mp_time(i, j) + prob.mp_time(j, i);
  return pair_weight(prob) * d;
}

struct LayerView {
  std::vector<int> requests;  // ascending
  std::vector<int> mps;       // ascending
};

std::vector<LayerView> split_layers(const AssignmentProblem& prob) {
  int n_layers = 0;
  for (int l : prob.request_layer) n_layers = std::max(n_layers, l + 1);
  for (int l : prob.mp_layer) n_layers = std::max(n_layers, l + 1);
  std::vector<LayerView> views(static_cast<std::size_t>(n_layers));
  for (int r = 0; r < prob.request_count(); ++r) views[static_cast<std::size_t>(prob.request_layer[static_cast<std::size_t>(r)])].requests.push_back(r);
  for (int j = 0; j < prob.mp_count(); ++j) views[static_cast<std::size_t>(prob.mp_layer[static_cast<std::size_t>(j)])].mps.push_back(j);
  return views;
}

// Maximum number of layer requests that fit under the per-point cap.
int max_assignable(const AssignmentProblem& prob, const LayerView& view) {
  std::vector<int> at(static_cast<std::size_t>(prob.request_count()), -1);
  std::vector<int> load(static_cast<std::size_t>(prob.mp_count()), 0);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(prob.mp_count()));
  int matched = 0;
  for (int r : view.requests) {
    // BFS over meeting points for an augmenting path.
    std::vector<int> parent_mp(static_cast<std::size_t>(prob.mp_count()), -2);
    std::vector<int> via_request(static_cast<std::size_t>(prob.mp_count()), -1);
    std::deque<int> queue;
    for (const auto& o : prob.options[static_cast<std::size_t>(r)]) {
      if (parent_mp[static_cast<std::size_t>(o.mp)] != -2) continue;
      parent_mp[static_cast<std::size_t>(o.mp)] = -1;
      via_request[static_cast<std::size_t>(o.mp)] = r;
      queue.push_back(o.mp);
    }
    int sink = -1;
    while (!queue.empty() && sink < 0) {
      const int j = queue.front();
      queue.pop_front();
      if (load[static_cast<std::size_t>(j)] < prob.q_max) {
        sink = j;
        break;
      }
      for (int moved : members[static_cast<std::size_t>(j)]) {
        for (const auto& o : prob.options[static_cast<std::size_t>(moved)]) {
          if (parent_mp[static_cast<std::size_t>(o.mp)] != -2) continue;
          parent_mp[static_cast<std::size_t>(o.mp)] = j;
          via_request[static_cast<std::size_t>(o.mp)] = moved;
          queue.push_back(o.mp);
        }
      }
    }
    if (sink < 0) continue;
    for (int j = sink; j >= 0;) {
      const int moved = via_request[static_cast<std::size_t>(j)];
      const int from = at[static_cast<std::size_t>(moved)];
      if (from >= 0) {
        auto& mem = members[static_cast<std::size_t>(from)];
        mem.erase(std::find(mem.begin(), mem.end(), moved));
        --load[static_cast<std::size_t>(from)];
      }
      at[static_cast<std::size_t>(moved)] = j;
      members[static_cast<std::size_t>(j)].push_back(moved);
      ++load[static_cast<std::size_t>(j)];
      j = parent_mp[static_cast<std::size_t>(j)];
    }
    ++matched;
  }
  return matched;
}

void finish_result(const AssignmentProblem& prob, AssignmentResult& res) {
  res.activated.clear();
  res.rejected.clear();
  std::vector<char> used(static_cast<std::size_t>(prob.mp_count()), 0);
  for (int r = 0; r < prob.request_count(); ++r) {
    const int j = res.assignment[static_cast<std::size_t>(r)];
    if (j < 0)
      res.rejected.push_back(r);
    else
      used[static_cast<std::size_t>(j)] = 1;
  }
  for (int j = 0; j < prob.mp_count(); ++j)
    if (used[static_cast<std::size_t>(j)]) res.activated.push_back(j);
  res.cost = assignment_cost(prob, res);
}

// ---------------------------------------------------------------- exact

struct ExactSearch {
  const AssignmentProblem& prob;
  const LayerView& view;
  int rejections_allowed = 0;
  std::vector<int> current;
  std::vector<int> best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> load;
  std::vector<char> active;

  void run(std::size_t idx, int rejections, double cost) {
    if (cost >= best_cost - 1e-9) return;
    if (idx == view.requests.size()) {
      best_cost = cost;
      best = current;
      return;
    }
    const int r = view.requests[idx];
    for (const auto& o : prob.options[static_cast<std::size_t>(r)]) {
      auto& ld = load[static_cast<std::size_t>(o.mp)];
      if (ld >= prob.q_max) continue;
      const bool opens = ld == 0;
      const double extra = prob.lambda_walk * o.walk_min + (opens ? activation_delta(prob, active, view.mps, o.mp) : 0.0);
      ++ld;
      if (opens) active[static_cast<std::size_t>(o.mp)] = 1;
      current[idx] = o.mp;
      run(idx + 1, rejections, cost + extra);
      --ld;
      if (opens) active[static_cast<std::size_t>(o.mp)] = 0;
    }
    if (rejections < rejections_allowed) {
      current[idx] = -1;
      run(idx + 1, rejections + 1, cost);
    }
  }
};

// ------------------------------------------------------------ heuristic

struct LayerState {
  const AssignmentProblem& prob;
  const LayerView& view;
  std::vector<int>& at;       // global per request
  std::vector<int> load;      // global per mp
  std::vector<char> active;   // global per mp
  std::vector<char> allowed;  // points the walking stages may use

  LayerState(const AssignmentProblem& p, const LayerView& v, std::vector<int>& assignment)
      : prob(p), view(v), at(assignment),
        load(static_cast<std::size_t>(p.mp_count()), 0), active(static_cast<std::size_t>(p.mp_count()), 0),
        allowed(static_cast<std::size_t>(p.mp_count()), 1) {}

  bool usable(int j) const { return allowed[static_cast<std::size_t>(j)] != 0; }

  void recount() {
    for (int j : view.mps) load[static_cast<std::size_t>(j)] = 0;
    for (int r : view.requests)
      if (at[static_cast<std::size_t>(r)] >= 0) ++load[static_cast<std::size_t>(at[static_cast<std::size_t>(r)])];
    for (int j : view.mps) active[static_cast<std::size_t>(j)] = load[static_cast<std::size_t>(j)] > 0;
  }

  double walk(int r, int j) const { return prob.lambda_walk * find_option(prob, r, j)->walk_min; }

  void move(int r, int to) {
    const int from = at[static_cast<std::size_t>(r)];
    if (from >= 0 && --load[static_cast<std::size_t>(from)] == 0) active[static_cast<std::size_t>(from)] = 0;
    at[static_cast<std::size_t>(r)] = to;
    if (to >= 0 && load[static_cast<std::size_t>(to)]++ == 0) active[static_cast<std::size_t>(to)] = 1;
  }

  void greedy() {
    for (int r : view.requests) {
      int best = -1;
      double best_walk = std::numeric_limits<double>::infinity();
      for (const auto& o : prob.options[static_cast<std::size_t>(r)]) {
        if (!usable(o.mp) || load[static_cast<std::size_t>(o.mp)] >= prob.q_max) continue;
        if (o.walk_min < best_walk - 1e-12) {
          best_walk = o.walk_min;
          best = o.mp;
        }
      }
      at[static_cast<std::size_t>(r)] = -1;
      if (best >= 0) move(r, best);
    }
  }

  // Capacity repair: shift assigned requests along an augmenting path so an
  // unplaced request finds room.
  void augment() {
    for (int r : view.requests) {
      if (at[static_cast<std::size_t>(r)] >= 0 || prob.options[static_cast<std::size_t>(r)].empty()) continue;
      std::vector<int> parent(static_cast<std::size_t>(prob.mp_count()), -2);
      std::vector<int> via(static_cast<std::size_t>(prob.mp_count()), -1);
      std::deque<int> queue;
      for (const auto& o : prob.options[static_cast<std::size_t>(r)]) {
        if (!usable(o.mp) || parent[static_cast<std::size_t>(o.mp)] != -2) continue;
        parent[static_cast<std::size_t>(o.mp)] = -1;
        via[static_cast<std::size_t>(o.mp)] = r;
        queue.push_back(o.mp);
      }
      int sink = -1;
      while (!queue.empty()) {
        const int j = queue.front();
        queue.pop_front();
        if (load[static_cast<std::size_t>(j)] < prob.q_max) {
          sink = j;
          break;
        }
        for (int other : view.requests) {
          if (at[static_cast<std::size_t>(other)] != j) continue;
          for (const auto& o : prob.options[static_cast<std::size_t>(other)]) {
            if (!usable(o.mp) || parent[static_cast<std::size_t>(o.mp)] != -2) continue;
            parent[static_cast<std::size_t>(o.mp)] = j;
            via[static_cast<std::size_t>(o.mp)] = other;
            queue.push_back(o.mp);
          }
        }
      }
      if (sink < 0) continue;
      for (int j = sink; j >= 0; j = parent[static_cast<std::size_t>(j)]) move(via[static_cast<std::size_t>(j)], j);
    }
  }

  // Negative-cycle cancelling on the walking term at fixed per-point counts
  // and a fixed number of rejections. Node m stands for spare room, node
  // m + 1 for the pool of unplaced requests. Exact for rho = 0.
  void cancel_walking_cycles() {
    const int m = static_cast<int>(view.mps.size());
    if (m < 1) return;
    std::vector<int> local(static_cast<std::size_t>(prob.mp_count()), -1);
    for (int a = 0; a < m; ++a) local[static_cast<std::size_t>(view.mps[static_cast<std::size_t>(a)])] = a;
    const int free_node = m;
    const int pool = m + 1;
    const int n = m + 2;
    for (int round = 0; round < 10000; ++round) {
      struct Edge {
        int from, to;
        double cost;
        int request;
      };
      std::vector<Edge> edges;
      // Cheapest request per ordered node pair.
      std::vector<double> cost(static_cast<std::size_t>(n * n), std::numeric_limits<double>::infinity());
      std::vector<int> who(static_cast<std::size_t>(n * n), -1);
      auto offer = [&](int a, int b, double c, int r) {
        const auto idx = static_cast<std::size_t>(a * n + b);
        if (c < cost[idx] - 1e-12) {
          cost[idx] = c;
          who[idx] = r;
        }
      };
      for (int r : view.requests) {
        if (prob.options[static_cast<std::size_t>(r)].empty()) continue;
        const int j = at[static_cast<std::size_t>(r)];
        const int a = j < 0 ? pool : local[static_cast<std::size_t>(j)];
        const double here = j < 0 ? 0.0 : walk(r, j);
        if (j >= 0) offer(a, pool, -here, r);
        for (const auto& o : prob.options[static_cast<std::size_t>(r)])
          if (o.mp != j && usable(o.mp))
            offer(a, local[static_cast<std::size_t>(o.mp)], prob.lambda_walk * o.walk_min - here, r);
      }
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (who[static_cast<std::size_t>(a * n + b)] >= 0)
            edges.push_back({a, b, cost[static_cast<std::size_t>(a * n + b)], who[static_cast<std::size_t>(a * n + b)]});
      for (int a = 0; a < m; ++a) {
        const int j = view.mps[static_cast<std::size_t>(a)];
        if (usable(j) && load[static_cast<std::size_t>(j)] < prob.q_max) edges.push_back({a, free_node, 0.0, -1});
        if (load[static_cast<std::size_t>(j)] > 0) edges.push_back({free_node, a, 0.0, -1});
      }
      // Bellman-Ford from a virtual source connected to every node.
      const int nodes = n;
      std::vector<double> dist(static_cast<std::size_t>(nodes), 0.0);
      std::vector<int> pred(static_cast<std::size_t>(nodes), -1);
      int touched = -1;
      for (int it = 0; it <= nodes; ++it) {
        touched = -1;
        for (std::size_t e = 0; e < edges.size(); ++e) {
          const auto& ed = edges[e];
          if (dist[static_cast<std::size_t>(ed.from)] + ed.cost < dist[static_cast<std::size_t>(ed.to)] - 1e-9) {
            dist[static_cast<std::size_t>(ed.to)] = dist[static_cast<std::size_t>(ed.from)] + ed.cost;
            pred[static_cast<std::size_t>(ed.to)] = static_cast<int>(e);
            touched = ed.to;
          }
        }
        if (touched < 0) break;
      }
      if (touched < 0) return;
      int v = touched;
      for (int i = 0; i < nodes; ++i) {
        if (pred[static_cast<std::size_t>(v)] < 0) return;
        v = edges[static_cast<std::size_t>(pred[static_cast<std::size_t>(v)])].from;
      }
      std::vector<int> cycle;
      for (int u = v;;) {
        const int e = pred[static_cast<std::size_t>(u)];
        cycle.push_back(e);
        u = edges[static_cast<std::size_t>(e)].from;
        if (u == v) break;
      }
      double total = 0.0;
      for (int e : cycle) total += edges[static_cast<std::size_t>(e)].cost;
      if (total > -1e-9) return;
      for (int e : cycle) {
        const auto& ed = edges[static_cast<std::size_t>(e)];
        if (ed.request >= 0) move(ed.request, ed.to == pool ? -1 : view.mps[static_cast<std::size_t>(ed.to)]);
      }
    }
  }

  double total_cost() const {
    double c = 0.0;
    std::vector<int> act;
    for (int r : view.requests)
      if (at[static_cast<std::size_t>(r)] >= 0) c += walk(r, at[static_cast<std::size_t>(r)]);
    for (int j : view.mps)
      if (active[static_cast<std::size_t>(j)]) act.push_back(j);
    return c + pair_cost(prob, act);
  }

  int placed() const {
    int n = 0;
    for (int r : view.requests) n += at[static_cast<std::size_t>(r)] >= 0;
    return n;
  }

  // Walking-optimal assignment onto the allowed points.
  void solve_walking() {
    for (int r : view.requests) at[static_cast<std::size_t>(r)] = -1;
    recount();
    greedy();
    augment();
    cancel_walking_cycles();
  }

  // Drop / add / swap search over the set of usable points, each set priced
  // by its walking-optimal assignment plus compactness. Sets placing fewer
  // requests than the current one are refused.
  // With `from_all` the search starts over from every point of the layer.
  void search_point_sets(bool from_all) {
    const int target = placed();
    double best = total_cost();
    std::fill(allowed.begin(), allowed.end(), 0);
    for (int j : view.mps) allowed[static_cast<std::size_t>(j)] = from_all ? 1 : active[static_cast<std::size_t>(j)];
    if (from_all) {
      const std::vector<int> keep(at.begin(), at.end());
      solve_walking();
      if (placed() >= target) {
        best = total_cost();
      } else {
        at = keep;
        recount();
      }
    }
    std::vector<int> best_at;
    for (int r : view.requests) best_at.push_back(at[static_cast<std::size_t>(r)]);
    auto restore = [&] {
      for (std::size_t i = 0; i < view.requests.size(); ++i) at[static_cast<std::size_t>(view.requests[i])] = best_at[i];
      recount();
    };
    auto try_set = [&]() -> bool {
      solve_walking();
      const double c = total_cost();
      if (placed() >= target && c < best - 1e-9) {
        best = c;
        for (std::size_t i = 0; i < view.requests.size(); ++i) best_at[i] = at[static_cast<std::size_t>(view.requests[i])];
        return true;
      }
      return false;
    };
    const std::size_t near = 6;
    for (int round = 0; round < 200; ++round) {
      bool improved = false;
      std::vector<int> in, out;
      for (int j : view.mps) (allowed[static_cast<std::size_t>(j)] ? in : out).push_back(j);
      auto flip = [&](int j) { allowed[static_cast<std::size_t>(j)] ^= 1; };
      // Best improvement over every drop, add and nearby swap.
      for (int j : in) {
        flip(j);
        improved |= try_set();
        flip(j);
      }
      for (int k : out) {
        flip(k);
        improved |= try_set();
        flip(k);
      }
      for (int j : in) {
        std::vector<int> cand = out;
        std::sort(cand.begin(), cand.end(), [&](int x, int y) { return prob.mp_time(j, x) < prob.mp_time(j, y); });
        if (cand.size() > near) cand.resize(near);
        flip(j);
        for (int k : cand) {
          flip(k);
          improved |= try_set();
          flip(k);
        }
        flip(j);
      }
      // Keep only the points the best assignment uses.
      restore();
      for (int j : view.mps) allowed[static_cast<std::size_t>(j)] = active[static_cast<std::size_t>(j)];
      if (!improved) break;
    }
    std::fill(allowed.begin(), allowed.end(), 1);
  }

  // Change in compactness when `j` is deactivated (negative: saving).
  double deactivation_delta(int j) const {
    return -activation_delta(prob, active, view.mps, j);
  }

  void descend() {
    for (int guard = 0; guard < 100000; ++guard) {
      double best_gain = 1e-9;
      std::vector<std::pair<int, int>> best_moves;
      // Relocate.
      for (int r : view.requests) {
        const int from = at[static_cast<std::size_t>(r)];
        if (from < 0) continue;
        for (const auto& o : prob.options[static_cast<std::size_t>(r)]) {
          const int to = o.mp;
          if (to == from || load[static_cast<std::size_t>(to)] >= prob.q_max) continue;
          double delta = walk(r, to) - walk(r, from);
          const bool closes = load[static_cast<std::size_t>(from)] == 1;
          const bool opens = load[static_cast<std::size_t>(to)] == 0;
          if (closes) delta += deactivation_delta(from);
          if (opens) {
            double open = 0.0;
            for (int i : view.mps)
              if (i != to && (active[static_cast<std::size_t>(i)] && !(closes && i == from)))
                open += prob.mp_time(i, to) + prob.mp_time(to, i);
            delta += pair_weight(prob) * open;
          }
          if (-delta > best_gain) {
            best_gain = -delta;
            best_moves = {{r, to}};
          }
        }
      }
      // Swap.
      for (std::size_t a = 0; a < view.requests.size(); ++a) {
        const int r1 = view.requests[a];
        const int j1 = at[static_cast<std::size_t>(r1)];
        if (j1 < 0) continue;
        for (std::size_t b = a + 1; b < view.requests.size(); ++b) {
          const int r2 = view.requests[b];
          const int j2 = at[static_cast<std::size_t>(r2)];
          if (j2 < 0 || j2 == j1) continue;
          if (!find_option(prob, r1, j2) || !find_option(prob, r2, j1)) continue;
          const double delta = walk(r1, j2) + walk(r2, j1) - walk(r1, j1) - walk(r2, j2);
          if (-delta > best_gain) {
            best_gain = -delta;
            best_moves = {{r1, j2}, {r2, j1}};
          }
        }
      }
      // Close a point: move all its requests to other active points.
      for (int j : view.mps) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        std::vector<int> extra(static_cast<std::size_t>(prob.mp_count()), 0);
        std::vector<std::pair<int, int>> moves;
        double delta = deactivation_delta(j);
        bool ok = true;
        for (int r : view.requests) {
          if (at[static_cast<std::size_t>(r)] != j) continue;
          int best = -1;
          double best_walk = std::numeric_limits<double>::infinity();
          for (const auto& o : prob.options[static_cast<std::size_t>(r)]) {
            if (o.mp == j || !active[static_cast<std::size_t>(o.mp)]) continue;
            if (load[static_cast<std::size_t>(o.mp)] + extra[static_cast<std::size_t>(o.mp)] >= prob.q_max) continue;
            if (walk(r, o.mp) < best_walk - 1e-12) {
              best_walk = walk(r, o.mp);
              best = o.mp;
            }
          }
          if (best < 0) {
            ok = false;
            break;
          }
          ++extra[static_cast<std::size_t>(best)];
          delta += best_walk - walk(r, j);
          moves.emplace_back(r, best);
        }
        if (ok && !moves.empty() && -delta > best_gain) {
          best_gain = -delta;
          best_moves = moves;
        }
      }
      if (best_moves.empty()) return;
      for (auto [r, to] : best_moves) move(r, to);
    }
  }
};

}  // namespace

double assignment_cost(const AssignmentProblem& prob, const AssignmentResult& result) {
  if (static_cast<int>(result.assignment.size()) != prob.request_count())
    throw AssignmentError("single_assignment", "assignment size does not match the request count");
  std::vector<char> rejected(static_cast<std::size_t>(prob.request_count()), 0);
  for (int r : result.rejected) {
    if (r < 0 || r >= prob.request_count()) throw AssignmentError("single_assignment", "rejected set names an unknown request");
    rejected[static_cast<std::size_t>(r)] = 1;
  }
  std::vector<int> load(static_cast<std::size_t>(prob.mp_count()), 0);
  double walk = 0.0;
  for (int r = 0; r < prob.request_count(); ++r) {
    const int j = result.assignment[static_cast<std::size_t>(r)];
    if (j < 0) {
      if (!rejected[static_cast<std::size_t>(r)])
        throw AssignmentError("single_assignment", "request " + std::to_string(r) + " is neither assigned nor rejected");
      continue;
    }
    if (rejected[static_cast<std::size_t>(r)])
      throw AssignmentError("single_assignment", "request " + std::to_string(r) + " is both assigned and rejected");
    const auto* opt = find_option(prob, r, j);
    if (!opt || opt->walk_km > prob.w_max + kFeasTol)
      throw AssignmentError("walking_range", "request " + std::to_string(r) + " assigned to meeting point " + std::to_string(j) +
                                      " outside its walking range or layer");
    walk += opt->walk_min;
    ++load[static_cast<std::size_t>(j)];
  }
  std::vector<char> active(static_cast<std::size_t>(prob.mp_count()), 0);
  for (int j : result.activated) {
    if (j < 0 || j >= prob.mp_count()) throw AssignmentError("activation", "activated set names an unknown meeting point");
    active[static_cast<std::size_t>(j)] = 1;
  }
  for (int j = 0; j < prob.mp_count(); ++j) {
    if (load[static_cast<std::size_t>(j)] > prob.q_max)
      throw AssignmentError("mp_capacity", "meeting point " + std::to_string(j) + " carries " +
                                      std::to_string(load[static_cast<std::size_t>(j)]) + " requests");
    if ((load[static_cast<std::size_t>(j)] > 0) != static_cast<bool>(active[static_cast<std::size_t>(j)]))
      throw AssignmentError("activation", "activation flag of meeting point " + std::to_string(j) + " disagrees with its load");
  }
  double pairs = 0.0;
  for (int i : result.activated)
    for (int j : result.activated)
      if (i != j && prob.mp_layer[static_cast<std::size_t>(i)] == prob.mp_layer[static_cast<std::size_t>(j)])
        pairs += prob.mp_time(i, j);
  return prob.lambda_walk * walk + pair_weight(prob) * pairs;
}

AssignmentResult solve_assignment_exact(const AssignmentProblem& prob, std::uint64_t leaf_budget) {
  const auto views = split_layers(prob);
  // Budget check before searching.
  double leaves = 0.0;
  std::vector<int> allowed(views.size(), 0);
  for (std::size_t l = 0; l < views.size(); ++l) {
    const auto& view = views[l];
    int with_options = 0;
    for (int r : view.requests) with_options += !prob.options[static_cast<std::size_t>(r)].empty();
    allowed[l] = with_options - max_assignable(prob, view);
    double product = 1.0;
    for (int r : view.requests) product *= static_cast<double>(prob.options[static_cast<std::size_t>(r)].size() + (allowed[l] > 0 ? 1 : 0));
    leaves += product;
  }
  if (leaves > static_cast<double>(leaf_budget)) {
    std::ostringstream os;
    os << "instance too large for exact assignment (" << leaves << " leaves > budget " << leaf_budget
       << "); use the heuristic method";
    throw AssignmentTooLarge(os.str());
  }

  AssignmentResult res;
  res.assignment.assign(static_cast<std::size_t>(prob.request_count()), -1);
  for (std::size_t l = 0; l < views.size(); ++l) {
    const auto& view = views[l];
    if (view.requests.empty()) continue;
    // Requests without options are rejected before the search.
    LayerView searchable{{}, view.mps};
    for (int r : view.requests)
      if (!prob.options[static_cast<std::size_t>(r)].empty()) searchable.requests.push_back(r);
    ExactSearch search{prob, searchable, allowed[l], std::vector<int>(searchable.requests.size(), -1), {},
                       std::numeric_limits<double>::infinity(),
                       std::vector<int>(static_cast<std::size_t>(prob.mp_count()), 0),
                       std::vector<char>(static_cast<std::size_t>(prob.mp_count()), 0)};
    search.run(0, 0, 0.0);
    for (std::size_t i = 0; i < searchable.requests.size(); ++i)
      res.assignment[static_cast<std::size_t>(searchable.requests[i])] = search.best.empty() ? -1 : search.best[i];
  }
  finish_result(prob, res);
  return res;
}

AssignmentResult solve_assignment_heuristic(const AssignmentProblem& prob) {
  AssignmentResult res;
  res.assignment.assign(static_cast<std::size_t>(prob.request_count()), -1);
  for (const auto& view : split_layers(prob)) {
    if (view.requests.empty()) continue;
    LayerState state(prob, view, res.assignment);
    state.greedy();
    state.augment();
    state.cancel_walking_cycles();
    state.descend();
    state.search_point_sets(false);
    state.descend();
    // Second start from the full point set; the better outcome is kept.
    std::vector<int> first;
    for (int r : view.requests) first.push_back(res.assignment[static_cast<std::size_t>(r)]);
    const double first_cost = state.total_cost();
    state.search_point_sets(true);
    state.descend();
    if (state.placed() < static_cast<int>(std::count_if(first.begin(), first.end(), [](int j) { return j >= 0; })) ||
        state.total_cost() > first_cost - 1e-9) {
      for (std::size_t i = 0; i < view.requests.size(); ++i) res.assignment[static_cast<std::size_t>(view.requests[i])] = first[i];
    }
  }
  finish_result(prob, res);
  return res;
}

}  // namespace mpefcs
