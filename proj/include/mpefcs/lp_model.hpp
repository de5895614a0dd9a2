#pragma once

#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mpefcs {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = 1e30;  // >= 1e30 means unbounded
  bool binary = false;
};

struct LpTerm {
  int var = 0;
  double coef = 0.0;
};

struct LpRow {
  std::string name;
  std::vector<LpTerm> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string family;  // constraint family, see family::kAll
};

/// Linear model with named variables and rows. Minimization only.
class LpModel {
 public:
  int add_variable(const std::string& name, double lower = 0.0, double upper = 1e30, bool binary = false);
  [[nodiscard]] int find(const std::string& name) const;  // -1 when absent
  void add_objective(int var, double coef);
  LpRow& add_row(std::string name, std::string family, Sense sense, double rhs);
  void add_term(LpRow& row, int var, double coef);

  [[nodiscard]] LpVariable& variable(int id) { return vars_[static_cast<std::size_t>(id)]; }
  [[nodiscard]] const std::vector<LpVariable>& variables() const { return vars_; }
  [[nodiscard]] const std::deque<LpRow>& rows() const { return rows_; }
  [[nodiscard]] const std::vector<LpTerm>& objective() const { return objective_; }
  std::string problem_name = "model";

 private:
  std::vector<LpVariable> vars_;
  std::map<std::string, int> index_;
  std::vector<LpTerm> objective_;
  std::deque<LpRow> rows_;  // stable references while rows are built
};

/// "\Problem name / Minimize / Subject To / Bounds / Binary / End" text.
/// Coefficients are printed with 17 significant digits.
[[nodiscard]] std::string write_lp(const LpModel& model);

/// Reads the dialect produced by write_lp. Row families are not part of the
/// text and come back empty. Throws std::runtime_error with a line number on
/// malformed input.
[[nodiscard]] LpModel parse_lp(const std::string& text);

struct RowViolation {
  std::string row;
  std::string family;
  double amount = 0.0;  // positive: how far the row is violated
};

struct LpEvaluation {
  double objective = 0.0;
  std::vector<RowViolation> violations;    // rows and variable domains
  std::vector<std::string> unknown;        // assigned names absent from the model
  [[nodiscard]] bool satisfied() const { return violations.empty() && unknown.empty(); }
};

/// Substitutes `values` (missing variables read as 0) into every row, bound
/// and integrality requirement. Domain violations carry family "domain".
[[nodiscard]] LpEvaluation evaluate_lp(const LpModel& model, const std::map<std::string, double>& values,
                                       double tol = 1e-6);

}  // namespace mpefcs
