#include "fixtures.hpp"
#include "mpefcs/assignment.hpp"

#include <doctest.h>

#include <functional>
#include <limits>
#include <random>
#include <set>

using namespace mpefcs;
using namespace fixtures;

namespace {

// Meeting points on a line per layer; request options carry explicit walking
// minutes.
AssignmentProblem line_problem(const std::vector<std::vector<std::pair<int, double>>>& options,
                               const std::vector<double>& mp_x, int layers = 1, double rho = 0.0, int q_max = 24) {
  AssignmentProblem p;
  p.rho = rho;
  p.q_max = q_max;
  const int m = static_cast<int>(mp_x.size());
  for (int j = 0; j < m; ++j) {
    p.mp_node.push_back(j + 1);
    p.mp_layer.push_back(j * layers / m);
  }
  p.mp_time.resize(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) p.mp_time(a, b) = std::abs(mp_x[a] - mp_x[b]) * 2.0;
  for (const auto& o : options) {
    std::vector<AssignmentProblem::Option> opts;
    for (auto [j, w] : o) opts.push_back({j, w, w * 5.1 / 60.0});
    std::sort(opts.begin(), opts.end(), [](auto& a, auto& b) { return a.mp < b.mp; });
    p.options.push_back(opts);
    p.request_layer.push_back(o.empty() ? 0 : p.mp_layer[static_cast<std::size_t>(o.front().first)]);
  }
  return p;
}

AssignmentResult make_result(const AssignmentProblem& p, const std::vector<int>& a) {
  AssignmentResult r;
  r.assignment = a;
  std::set<int> act;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0)
      r.rejected.push_back(static_cast<int>(i));
    else
      act.insert(a[i]);
  }
  r.activated.assign(act.begin(), act.end());
  (void)p;
  return r;
}

// Direct evaluation of the weighted walking plus ordered-pair compactness.
double direct_cost(const AssignmentProblem& p, const std::vector<int>& a) {
  double walk = 0.0;
  std::set<int> act;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r] < 0) continue;
    for (const auto& o : p.options[r])
      if (o.mp == a[r]) walk += o.walk_min;
    act.insert(a[r]);
  }
  double pairs = 0.0;
  for (int i : act)
    for (int j : act)
      if (i != j && p.mp_layer[static_cast<std::size_t>(i)] == p.mp_layer[static_cast<std::size_t>(j)])
        pairs += p.mp_time(i, j);
  return p.lambda_walk * walk + p.rho * p.lambda_travel * pairs;
}

// Fewest rejections first, then cost.
std::pair<int, double> brute_force(const AssignmentProblem& p) {
  const int n = p.request_count();
  std::pair<int, double> best{std::numeric_limits<int>::max(), std::numeric_limits<double>::infinity()};
  std::vector<int> a(static_cast<std::size_t>(n), -1);
  std::function<void(int)> rec = [&](int r) {
    if (r == n) {
      std::map<int, int> load;
      int rej = 0;
      for (int j : a) {
        if (j < 0) ++rej;
        else if (++load[j] > p.q_max) return;
      }
      const std::pair<int, double> v{rej, direct_cost(p, a)};
      if (v.first < best.first || (v.first == best.first && v.second < best.second)) best = v;
      return;
    }
    a[static_cast<std::size_t>(r)] = -1;
    rec(r + 1);
    for (const auto& o : p.options[static_cast<std::size_t>(r)]) {
      a[static_cast<std::size_t>(r)] = o.mp;
      rec(r + 1);
    }
  };
  rec(0);
  return best;
}

AssignmentProblem random_problem(std::mt19937_64& rng, int n_req, int n_mp, int layers, double rho, int q_max) {
  std::uniform_real_distribution<double> pos(0.0, 4.0), walk(0.5, 11.0);
  std::vector<double> xs;
  for (int j = 0; j < n_mp; ++j) xs.push_back(pos(rng));
  std::vector<std::vector<std::pair<int, double>>> options;
  for (int r = 0; r < n_req; ++r) {
    const int layer = static_cast<int>(rng() % static_cast<unsigned>(layers));
    std::vector<std::pair<int, double>> o;
    for (int j = 0; j < n_mp; ++j)
      if (j * layers / n_mp == layer && rng() % 3 != 0) o.emplace_back(j, walk(rng));
    options.push_back(o);
  }
  auto p = line_problem(options, xs, layers, rho, q_max);
  for (int r = 0; r < n_req; ++r)
    if (options[static_cast<std::size_t>(r)].empty()) p.request_layer[static_cast<std::size_t>(r)] = 0;
  return p;
}

int rejections(const AssignmentResult& r) { return static_cast<int>(r.rejected.size()); }

}  // namespace

TEST_SUITE("assignment") {

TEST_CASE("single walking term") {
  const auto p = line_problem({{{0, 10.0}}}, {0.0});
  CHECK(assignment_cost(p, make_result(p, {0})) == doctest::Approx(10.0));
}

TEST_CASE("inactive point contributes no pair term") {
  const auto p = line_problem({{{0, 2.0}, {1, 3.0}}, {{0, 4.0}, {1, 1.0}}}, {0.0, 2.0}, 1, 1.0);
  CHECK(assignment_cost(p, make_result(p, {0, 0})) == doctest::Approx(6.0));
  CHECK(assignment_cost(p, make_result(p, {0, 1})) == doctest::Approx(3.0 + 8.0));
}

TEST_CASE("cost matches enumeration of every map") {
  const auto p = line_problem({{{0, 2.0}, {1, 5.0}}, {{0, 6.0}, {1, 1.0}}, {{0, 3.0}, {1, 3.5}}}, {0.0, 1.5}, 1, 0.5);
  for (int a = 0; a < 8; ++a) {
    const std::vector<int> m{a & 1, (a >> 1) & 1, (a >> 2) & 1};
    CHECK(assignment_cost(p, make_result(p, m)) == doctest::Approx(direct_cost(p, m)));
  }
}

TEST_CASE("infeasible results name the constraint") {
  const auto p = line_problem({{{0, 2.0}}, {{0, 3.0}}}, {0.0, 1.0}, 1, 0.0, 1);
  auto expect = [&](const AssignmentResult& r, const std::string& c) {
    try {
      (void)assignment_cost(p, r);
      FAIL("accepted an infeasible result");
    } catch (const AssignmentError& e) {
      CHECK(e.constraint() == c);
    }
  };
  expect(make_result(p, {0, 0}), "mp_capacity");
  expect(make_result(p, {1, -1}), "walking_range");
  AssignmentResult r = make_result(p, {0, -1});
  r.rejected.clear();
  expect(r, "single_assignment");
  r = make_result(p, {0, -1});
  r.activated = {0, 1};
  expect(r, "activation");
}

TEST_CASE("single candidates are taken unless capacity binds") {
  const auto p = line_problem({{{0, 2.0}}, {{1, 3.0}}, {{1, 4.0}}}, {0.0, 1.0}, 1, 0.3);
  const auto res = solve_assignment_exact(p);
  CHECK(res.assignment == std::vector<int>{0, 1, 1});
  const auto tight = line_problem({{{0, 2.0}}, {{1, 3.0}}, {{1, 4.0}}}, {0.0, 1.0}, 1, 0.3, 1);
  const auto t = solve_assignment_exact(tight);
  CHECK(rejections(t) == 1);
  CHECK(t.assignment[0] == 0);
}

TEST_CASE("separable case picks the nearest feasible point") {
  const auto p = line_problem({{{0, 1.0}, {1, 4.0}, {2, 6.0}},
                               {{0, 2.0}, {1, 3.0}, {2, 9.0}},
                               {{0, 1.5}, {1, 2.5}, {2, 2.0}},
                               {{0, 7.0}, {1, 8.0}, {2, 0.5}}},
                              {0.0, 1.0, 2.0}, 1, 0.0, 2);
  const auto res = solve_assignment_exact(p);
  CHECK(res.assignment == std::vector<int>{0, 0, 2, 2});
  CHECK(res.cost == doctest::Approx(1.0 + 2.0 + 2.0 + 0.5));
}

TEST_CASE("exact optimum equals brute force") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 40; ++t) {
    const double rho = t % 2 ? 1.0 : 0.25;
    const auto p = random_problem(rng, 5, 4, 1 + t % 2, rho, 1 + t % 3);
    const auto res = solve_assignment_exact(p);
    const auto bf = brute_force(p);
    CHECK(rejections(res) == bf.first);
    CHECK(res.cost == doctest::Approx(bf.second).epsilon(1e-12));
    CHECK(assignment_cost(p, res) == doctest::Approx(res.cost));
  }
}

TEST_CASE("heuristic stays within ten percent of the optimum") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_problem(rng, 6, 5, 1 + t % 2, 1.0, 2 + t % 3);
    const auto ex = solve_assignment_exact(p);
    const auto h = solve_assignment_heuristic(p);
    CHECK(assignment_cost(p, h) == doctest::Approx(h.cost));
    CHECK(rejections(h) == rejections(ex));
    CHECK(h.cost >= ex.cost - 1e-9);
    CHECK(h.cost <= 1.10 * ex.cost + 1e-9);
  }
}

TEST_CASE("heuristic is optimal without compactness") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_problem(rng, 6, 5, 1 + t % 2, 0.0, 1 + t % 3);
    const auto ex = solve_assignment_exact(p);
    const auto h = solve_assignment_heuristic(p);
    CHECK(rejections(h) == rejections(ex));
    CHECK(h.cost == doctest::Approx(ex.cost));
  }
}

TEST_CASE("empty request set") {
  const auto p = line_problem({}, {0.0, 1.0});
  const auto ex = solve_assignment_exact(p);
  const auto h = solve_assignment_heuristic(p);
  CHECK(ex.assignment.empty());
  CHECK(ex.cost == 0.0);
  CHECK(h.cost == 0.0);
}

TEST_CASE("requests without candidates are rejected") {
  const auto p = line_problem({{}, {{0, 1.0}}}, {0.0});
  const auto res = solve_assignment_exact(p);
  CHECK(res.rejected == std::vector<int>{0});
  CHECK(res.assignment[1] == 0);
}

TEST_CASE("budget overflow asks for the heuristic") {
  std::mt19937_64 rng(3);
  std::vector<std::vector<std::pair<int, double>>> options;
  for (int r = 0; r < 30; ++r) options.push_back({{0, 1.0 + r}, {1, 2.0}, {2, 3.0 + r % 4}});
  const auto p = line_problem(options, {0.0, 1.0, 2.0}, 1, 1.0);
  CHECK_THROWS_AS((void)solve_assignment_exact(p, 1000), AssignmentTooLarge);
}

TEST_CASE("layers solve independently") {
  std::mt19937_64 rng(41);
  const auto p = random_problem(rng, 6, 6, 2, 1.0, 3);
  const auto whole = solve_assignment_exact(p);
  double sum = 0.0;
  for (int layer = 0; layer < 2; ++layer) {
    AssignmentProblem q = p;
    for (int r = 0; r < q.request_count(); ++r)
      if (q.request_layer[static_cast<std::size_t>(r)] != layer) q.options[static_cast<std::size_t>(r)].clear();
    const auto part = solve_assignment_exact(q);
    sum += part.cost;
  }
  CHECK(whole.cost == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("wider walking range never raises the optimum") {
  double prev = std::numeric_limits<double>::infinity();
  int prev_rej = std::numeric_limits<int>::max();
  for (double w : {0.6, 0.8, 1.0, 1.3}) {
    ScenarioConfig cfg = tiny_config(8);
    cfg.n_requests = 6;
    cfg.params.w_max = w;
    const Instance inst = build_instance(generate_scenario(cfg));
    const auto res = solve_assignment_exact(make_assignment_problem(inst, 0.1));
    CHECK(rejections(res) <= prev_rej);
    if (rejections(res) == prev_rej) CHECK(res.cost <= prev + 1e-9);
    prev = res.cost;
    prev_rej = rejections(res);
  }
}

TEST_CASE("activation matches distinct assigned points") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto p = random_problem(rng, 6, 5, 2, 0.5, 2);
    for (const auto& res : {solve_assignment_exact(p), solve_assignment_heuristic(p)}) {
      std::set<int> used;
      for (int j : res.assignment)
        if (j >= 0) used.insert(j);
      CHECK(res.activated == std::vector<int>(used.begin(), used.end()));
    }
  }
}

}  // TEST_SUITE
