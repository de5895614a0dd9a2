#pragma once

#include "mpefcs/model.hpp"
#include "mpefcs/solution.hpp"

namespace mpefcs {

struct ObjectiveTerms {
  double travel = 0.0;    // bus arc minutes
  double charging = 0.0;  // charging minutes
  double walk = 0.0;      // walking minutes of served requests
  double wait = 0.0;      // station waits
  int rejected = 0;
  double total = 0.0;
};

/// Term-by-term objective from the stored routes, schedules and events.
[[nodiscard]] ObjectiveTerms objective_terms(const Solution& sol, const Instance& inst);

[[nodiscard]] inline double evaluate_objective(const Solution& sol, const Instance& inst) {
  return objective_terms(sol, inst).total;
}

/// Walking minutes of request r when boarding at dummy `mp`.
[[nodiscard]] double walk_time(const Instance& inst, int r, NodeId mp);

}  // namespace mpefcs
