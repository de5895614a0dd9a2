#pragma once

#include "mpefcs/model.hpp"
#include "mpefcs/solution.hpp"

#include <vector>

namespace mpefcs {

/// Re-verifies every constraint family on the stored routes, schedules,
/// assignment and charging events. Stored values are treated as claims: each
/// relation between them is checked, nothing is recomputed in their place.
/// Returns every violation found; empty means feasible.
[[nodiscard]] std::vector<Violation> check_feasibility(const Solution& sol, const Instance& inst);

[[nodiscard]] inline bool is_feasible(const Solution& sol, const Instance& inst) {
  return check_feasibility(sol, inst).empty();
}

}  // namespace mpefcs
