#pragma once

#include "mpefcs/charging.hpp"
#include "mpefcs/model.hpp"
#include "mpefcs/propagate.hpp"
#include "mpefcs/solution.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mpefcs {

class OracleLimitError : public std::runtime_error {
 public:
  OracleLimitError(const std::string& what, std::uint64_t leaves) : std::runtime_error(what), leaves_(leaves) {}
  [[nodiscard]] std::uint64_t leaves() const { return leaves_; }

 private:
  std::uint64_t leaves_;
};

struct ExactResult {
  Solution solution;
  double objective = 0.0;
  std::uint64_t leaves = 0;       // route combinations evaluated
  std::uint64_t assignments = 0;  // request-to-candidate maps reached
  bool optimal = true;
};

struct RouteEnumeration {
  std::uint64_t orderings = 0;   // block orders times in-block permutations
  std::uint64_t candidates = 0;  // orderings times charger placements
  /// Feasible stop lists with their standalone evaluation, ascending cost.
  std::vector<std::pair<StopList, RouteEvaluation>> feasible;
};

/// Every route of `vehicle` visiting exactly the meeting-point dummies `mps`
/// (each with its station), with at most one charger stop in each gap
/// between blocks. `boarding` is indexed by node id.
[[nodiscard]] RouteEnumeration enumerate_vehicle_routes(const Instance& inst, int vehicle, std::vector<NodeId> mps,
                                                        std::span<const int> boarding);

/// Exhaustive optimum over request-to-candidate maps (rejection included),
/// meeting-point-to-vehicle partitions, route orderings, charger placements
/// and charger sequences, with bound pruning. Charging durations are the
/// minimal sufficient ones. Ties go to the lexicographically smallest
/// (assignment, stop lists) encoding. Throws OracleLimitError beyond six
/// requests, two vehicles, two physical chargers, or `leaf_budget`.
[[nodiscard]] ExactResult solve_exact_tiny(const Instance& inst, std::uint64_t leaf_budget = 50'000'000);

}  // namespace mpefcs
