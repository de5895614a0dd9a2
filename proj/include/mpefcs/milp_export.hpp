#pragma once

#include "mpefcs/assignment.hpp"
#include "mpefcs/lp_model.hpp"
#include "mpefcs/model.hpp"
#include "mpefcs/scenario_io.hpp"
#include "mpefcs/solution.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace mpefcs {

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExportConfig {
  double big_m1 = 0.0;  // <= 0: |R|
  double big_m2 = 0.0;  // <= 0: derived time bound, see default_big_m2
  std::string format = "lp";
  bool linearize_indicators = true;
  /// Assignment variables for every meeting point of the request's layer
  /// instead of the trimmed candidate list, so walking range is a real row.
  bool full_walk_domain = false;
};

struct MilpExport {
  LpModel model;
  json manifest;  // {format, big_m:{...}, rows:[{row, family, group}], variables:{prefix: meaning}}
  double m1 = 0.0;
  double m2 = 0.0;
  double m_energy = 0.0;
  double m_load = 0.0;
};

/// Smallest time constant the exporter accepts: the latest begin time any
/// schedule can reach plus one arc, one service and one full recharge.
[[nodiscard]] double default_big_m2(const Instance& inst);

/// Routing model over the bus arcs: binary arc (x), assignment (y) and
/// visit (p) variables; continuous load (q), begin (B), station arrival (A),
/// wait (W), charge (E), charging duration (tau) and dummy usage (v).
/// Conditional rows are written in big-M form. The objective constant comes
/// through the variable `one`, fixed to 1. Throws ExportError when a
/// configured big-M is below the required bound or the format is unknown.
[[nodiscard]] MilpExport export_milp(const Instance& inst, const ExportConfig& cfg = {});

/// Variable values of a solution under export_milp's naming. Entries for
/// arcs or assignments outside the model are kept so evaluation reports them.
[[nodiscard]] std::map<std::string, double> milp_values(const Instance& inst, const Solution& sol);

/// Assignment model with product variables z >= theta_i + theta_j - 1 for the
/// compactness term and a slack per request for capacity-forced rejection,
/// priced above any assignment cost.
[[nodiscard]] MilpExport export_assignment_milp(const AssignmentProblem& prob);

[[nodiscard]] std::map<std::string, double> assignment_values(const AssignmentProblem& prob,
                                                              const AssignmentResult& res);

/// Weight on the rejection slack of export_assignment_milp.
[[nodiscard]] double assignment_rejection_weight(const AssignmentProblem& prob);

}  // namespace mpefcs
