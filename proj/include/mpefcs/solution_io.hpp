#pragma once

#include "mpefcs/assignment.hpp"
#include "mpefcs/scenario_io.hpp"
#include "mpefcs/solution.hpp"

namespace mpefcs {

/// {routes:[{vehicle, stops:[{node, arrival, begin, wait, load, energy}]}],
///  charging:[{vehicle, physical_charger, charger_dummy, stop, start, duration,
///  energy_added, order_index}], assignment:[{request, node}], rejected, objective}
[[nodiscard]] json solution_to_json(const Solution& sol);
[[nodiscard]] Solution solution_from_json(const json& j);

[[nodiscard]] json assignment_to_json(const AssignmentProblem& prob, const AssignmentResult& res);

}  // namespace mpefcs
