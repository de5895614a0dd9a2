#pragma once

#include "mpefcs/assignment.hpp"
#include "mpefcs/model.hpp"
#include "mpefcs/scenario_io.hpp"
#include "mpefcs/solution.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace mpefcs {

enum class AssignmentMethod { Auto, Exact, Heuristic };

struct SearchConfig {
  std::uint64_t seed = 1;
  int iteration_budget = 1000;
  double da_threshold_init = 0.05;  // fraction of the current objective
  double da_decay = 0.999;
  double destroy_min = 0.1;  // fraction of served requests
  double destroy_max = 0.3;
  // random, worst, route, charger
  std::array<double, 4> destroy_weights{1.0, 1.0, 1.0, 0.5};
  // greedy, regret-2
  std::array<double, 2> repair_weights{1.0, 1.0};
  int restarts = 3;
  double time_limit = 0.0;  // seconds per restart; 0 disables the limit
  double rho = -1.0;        // negative: take the instance value
  AssignmentMethod assignment = AssignmentMethod::Auto;
};

/// Throws std::invalid_argument on out-of-range fields.
void validate_search_config(const SearchConfig& cfg);
[[nodiscard]] json search_config_to_json(const SearchConfig& cfg);
[[nodiscard]] SearchConfig search_config_from_json(const json& j);

struct SearchStats {
  int iterations = 0;
  int accepted = 0;
  int improvements = 0;
  int restarts = 0;
  double initial_objective = 0.0;
  double best_objective = 0.0;
};

/// Stage 1 under the configured method.
[[nodiscard]] AssignmentResult stage_one_assignment(const Instance& inst, const SearchConfig& cfg,
                                                    AssignmentProblem* problem = nullptr);

/// Cheapest insertion of the activated meeting points, layer by layer, with
/// a charger stop added when a route would run out of energy. Requests
/// that fit nowhere are rejected.
[[nodiscard]] Solution initial_solution(const Instance& inst, const AssignmentProblem& prob,
                                        const AssignmentResult& assignment);

/// Stage 1 assignment, construction, then destroy/repair with threshold
/// acceptance and reinsertion of rejected requests. Returns the best of
/// cfg.restarts independent runs.
[[nodiscard]] Solution lns_solve(const Instance& inst, const SearchConfig& cfg, SearchStats* stats = nullptr);

}  // namespace mpefcs
