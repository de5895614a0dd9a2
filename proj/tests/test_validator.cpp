#include "faults.hpp"
#include "fixtures.hpp"
#include "mpefcs/lns.hpp"
#include "mpefcs/oracle.hpp"
#include "mpefcs/validator.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <string>

using namespace mpefcs;
using namespace fixtures;

namespace {

bool reports(const std::vector<Violation>& v, const std::string& fam) {
  for (const auto& x : v)
    if (x.family == fam) return true;
  return false;
}

std::vector<std::pair<Instance, Solution>> feasible_pool() {
  std::vector<std::pair<Instance, Solution>> pool;
  SearchConfig cfg;
  cfg.iteration_budget = 150;
  cfg.restarts = 1;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Instance inst = tiny_instance(seed);
    Solution sol = lns_solve(inst, cfg);
    pool.emplace_back(std::move(inst), std::move(sol));
  }
  return pool;
}

}  // namespace

TEST_SUITE("validator") {

TEST_CASE("search and oracle output is feasible") {
  for (const auto& [inst, sol] : feasible_pool()) {
    const auto v = check_feasibility(sol, inst);
    CHECK_MESSAGE(v.empty(), (v.empty() ? std::string() : describe(v.front())));
  }
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Instance inst = tiny_instance(seed);
    const auto ex = solve_exact_tiny(inst);
    CHECK(check_feasibility(ex.solution, inst).empty());
  }
}

TEST_CASE("each injected fault is labelled with its family") {
  const auto pool = feasible_pool();
  std::map<std::string, int> hits;
  for (const char* fam : family::kAll) {
    for (const auto& [inst, sol] : pool) {
      const auto bad = faults::inject(sol, inst, fam);
      if (!bad) continue;
      ++hits[fam];
      const auto v = check_feasibility(*bad, inst);
      CHECK_MESSAGE(reports(v, fam), fam);
    }
  }
  for (const char* fam : family::kAll) CHECK_MESSAGE(hits[fam] > 0, fam);
}

TEST_CASE("random mutations never pass as feasible") {
  const auto pool = feasible_pool();
  std::mt19937_64 rng(2024);
  int flagged = 0;
  for (int i = 0; i < 300; ++i) {
    const auto& [inst, sol] = pool[static_cast<std::size_t>(i) % pool.size()];
    const Solution bad = faults::mutate(sol, inst, rng);
    const bool caught = !check_feasibility(bad, inst).empty();
    CHECK_MESSAGE(caught, "mutation kind " << faults::last_kind << " on pool entry " << i % pool.size());
    flagged += caught;
  }
  CHECK(flagged == 300);
}

TEST_CASE("violations are described") {
  const auto pool = feasible_pool();
  const auto bad = faults::inject(pool[0].second, pool[0].first, family::kEnergy);
  REQUIRE(bad);
  const auto v = check_feasibility(*bad, pool[0].first);
  REQUIRE_FALSE(v.empty());
  CHECK(describe(v.front()).find("energy") != std::string::npos);
}

}  // TEST_SUITE
