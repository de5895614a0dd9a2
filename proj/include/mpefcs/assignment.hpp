#pragma once

#include "mpefcs/model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpefcs {

/// Customer-to-meeting-point assignment. Meeting points are addressed by a
/// dense local index; `mp_node` maps them back to instance dummy nodes.
struct AssignmentProblem {
  struct Option {
    int mp = -1;           // local index
    double walk_min = 0.0;
    double walk_km = 0.0;
  };
  std::vector<int> request_layer;
  std::vector<std::vector<Option>> options;  // per request, ascending mp
  std::vector<int> mp_layer;
  std::vector<NodeId> mp_node;
  Eigen::MatrixXd mp_time;  // bus minutes between local meeting points
  double w_max = 1.0;
  double rho = 0.1;
  int q_max = 24;
  double lambda_travel = 1.0;
  double lambda_walk = 1.0;

  [[nodiscard]] int request_count() const { return static_cast<int>(options.size()); }
  [[nodiscard]] int mp_count() const { return static_cast<int>(mp_node.size()); }
};

struct AssignmentResult {
  std::vector<int> assignment;  // per request: local mp index or -1
  std::vector<int> activated;   // ascending local indices
  std::vector<int> rejected;    // ascending request ids
  double cost = 0.0;
};

class AssignmentError : public std::runtime_error {
 public:
  AssignmentError(std::string constraint, const std::string& what)
      : std::runtime_error(what), constraint_(std::move(constraint)) {}
  [[nodiscard]] const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

class AssignmentTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] AssignmentProblem make_assignment_problem(const Instance& inst, double rho);

/// Weighted walking time plus rho-weighted compactness of activated meeting
/// points per layer. Throws AssignmentError naming the violated constraint
/// (walking_range, single_assignment, mp_capacity, activation).
[[nodiscard]] double assignment_cost(const AssignmentProblem& prob, const AssignmentResult& result);

/// Exhaustive search per layer with bound pruning. Minimizes the number of
/// capacity-forced rejections first, then cost; ties go to the
/// lexicographically smallest (request id, mp id) map. Throws
/// AssignmentTooLarge when the per-layer leaf counts exceed `leaf_budget`.
[[nodiscard]] AssignmentResult solve_assignment_exact(const AssignmentProblem& prob,
                                                      std::uint64_t leaf_budget = 1'000'000);

/// Nearest-candidate greedy with capacity repair, walking-optimal cycle
/// cancelling, then relocate / swap / close-point descent on the full cost.
[[nodiscard]] AssignmentResult solve_assignment_heuristic(const AssignmentProblem& prob);

/// Per-request dummy node (kNoNode when rejected).
[[nodiscard]] std::vector<NodeId> assignment_nodes(const AssignmentProblem& prob, const AssignmentResult& result);

}  // namespace mpefcs
