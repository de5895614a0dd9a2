#include "mpefcs/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mpefcs {

int LpModel::add_variable(const std::string& name, double lower, double upper, bool binary) {
  if (index_.count(name)) throw std::invalid_argument("duplicate variable " + name);
  const int id = static_cast<int>(vars_.size());
  vars_.push_back({name, lower, binary ? std::min(upper, 1.0) : upper, binary});
  index_[name] = id;
  return id;
}

int LpModel::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

void LpModel::add_objective(int var, double coef) {
  if (coef != 0.0) objective_.push_back({var, coef});
}

LpRow& LpModel::add_row(std::string name, std::string family, Sense sense, double rhs) {
  rows_.push_back({std::move(name), {}, sense, rhs, std::move(family)});
  return rows_.back();
}

void LpModel::add_term(LpRow& row, int var, double coef) {
  if (coef == 0.0) return;
  for (auto& t : row.terms)
    if (t.var == var) {
      t.coef += coef;
      return;
    }
  row.terms.push_back({var, coef});
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_terms(std::ostringstream& os, const std::vector<LpTerm>& terms, const std::vector<LpVariable>& vars,
                 std::size_t width) {
  if (terms.empty()) {
    os << " 0 " << vars.front().name;
    return;
  }
  std::size_t col = width;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::string piece = (terms[i].coef < 0 ? " - " : (i == 0 ? " " : " + ")) + num(std::abs(terms[i].coef)) + " " +
                        vars[static_cast<std::size_t>(terms[i].var)].name;
    if (col + piece.size() > 200) {
      os << "\n  ";
      col = 2;
    }
    os << piece;
    col += piece.size();
  }
}

}  // namespace

std::string write_lp(const LpModel& model) {
  std::ostringstream os;
  const auto& vars = model.variables();
  if (vars.empty()) throw std::invalid_argument("model has no variables");
  os << "\\Problem name: " << model.problem_name << "\n\nMinimize\n obj:";
  write_terms(os, model.objective(), vars, 5);
  os << "\nSubject To\n";
  for (const auto& row : model.rows()) {
    os << " " << row.name << ":";
    write_terms(os, row.terms, vars, row.name.size() + 2);
    os << (row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::GreaterEqual ? " >= " : " = ") << num(row.rhs)
       << "\n";
  }
  // Name order keeps the text stable under a parse / write round trip.
  std::vector<const LpVariable*> sorted;
  for (const auto& v : vars) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(), [](const LpVariable* a, const LpVariable* b) { return a->name < b->name; });
  os << "Bounds\n";
  for (const LpVariable* vp : sorted) {
    const auto& v = *vp;
    if (v.binary) continue;
    if (v.lower == v.upper) {
      os << " " << v.name << " = " << num(v.lower) << "\n";
    } else if (v.upper >= 1e30) {
      if (v.lower != 0.0) os << " " << v.name << " >= " << num(v.lower) << "\n";
    } else {
      os << " " << num(v.lower) << " <= " << v.name << " <= " << num(v.upper) << "\n";
    }
  }
  os << "Binary\n";
  for (const LpVariable* v : sorted)
    if (v->binary) os << " " << v->name << "\n";
  os << "End\n";
  return os.str();
}

namespace {

enum class Section { None, Objective, Constraints, Bounds, Binary, End };

bool is_number(const std::string& t) {
  if (t.empty()) return false;
  char* end = nullptr;
  std::strtod(t.c_str(), &end);
  return end && *end == '\0';
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("LP parse error at line " + std::to_string(line) + ": " + what);
}

}  // namespace

LpModel parse_lp(const std::string& text) {
  LpModel model;
  std::istringstream in(text);
  std::string line;
  Section sec = Section::None;
  int lineno = 0;
  // Statements may span lines; gather tokens until the next "name:" label or
  // section keyword.
  struct Statement {
    std::string label;
    std::vector<std::string> tokens;
    int line = 0;
  };
  std::vector<std::pair<Section, Statement>> stmts;
  Statement cur;
  bool open = false;
  auto flush = [&]() {
    if (open) stmts.emplace_back(sec, cur);
    cur = {};
    open = false;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("\\Problem name:", 0) == 0) {
      std::string name = line.substr(14);
      const auto b = name.find_first_not_of(' ');
      model.problem_name = b == std::string::npos ? "" : name.substr(b);
      continue;
    }
    if (line.empty() || line[0] == '\\') continue;
    if (line == "Minimize" || line == "Subject To" || line == "Bounds" || line == "Binary" || line == "End") {
      flush();
      sec = line == "Minimize"     ? Section::Objective
            : line == "Subject To" ? Section::Constraints
            : line == "Bounds"     ? Section::Bounds
            : line == "Binary"     ? Section::Binary
                                   : Section::End;
      continue;
    }
    if (sec == Section::None || sec == Section::End) fail(lineno, "content outside a section");
    const bool continuation = line.size() > 1 && line[0] == ' ' && line[1] == ' ';
    std::istringstream ls(line);
    std::string tok;
    bool first = true;
    while (ls >> tok) {
      if (first && !continuation && (sec == Section::Objective || sec == Section::Constraints)) {
        flush();
        if (tok.back() != ':') fail(lineno, "expected a row label");
        cur.label = tok.substr(0, tok.size() - 1);
        cur.line = lineno;
        open = true;
      } else if (first && !continuation) {
        flush();
        cur.line = lineno;
        open = true;
        cur.tokens.push_back(tok);
      } else {
        if (!open) fail(lineno, "continuation without a statement");
        cur.tokens.push_back(tok);
      }
      first = false;
    }
  }
  flush();
  if (sec != Section::End) fail(lineno, "missing End");

  // Variables appear in order of first mention; bounds default to [0, inf).
  auto var = [&](const std::string& name) {
    const int id = model.find(name);
    return id >= 0 ? id : model.add_variable(name);
  };
  auto parse_expr = [&](const Statement& st, std::size_t from, std::size_t to, std::vector<LpTerm>& out) {
    double sign = 1.0;
    for (std::size_t i = from; i < to; ++i) {
      const std::string& t = st.tokens[i];
      if (t == "+") {
        sign = 1.0;
      } else if (t == "-") {
        sign = -1.0;
      } else if (is_number(t)) {
        if (i + 1 >= to) fail(st.line, "coefficient without a variable");
        out.push_back({var(st.tokens[i + 1]), sign * std::strtod(t.c_str(), nullptr)});
        ++i;
        sign = 1.0;
      } else {
        out.push_back({var(t), sign});
        sign = 1.0;
      }
    }
  };
  std::vector<std::pair<std::string, std::string>> bounds;
  std::vector<std::string> binaries;
  for (auto& [section, st] : stmts) {
    if (section == Section::Objective) {
      std::vector<LpTerm> terms;
      parse_expr(st, 0, st.tokens.size(), terms);
      for (const auto& t : terms) model.add_objective(t.var, t.coef);
    } else if (section == Section::Constraints) {
      if (st.tokens.size() < 2) fail(st.line, "incomplete row");
      const std::string& op = st.tokens[st.tokens.size() - 2];
      const std::string& rhs = st.tokens.back();
      if (!is_number(rhs)) fail(st.line, "right-hand side is not a number");
      if (op != "<=" && op != ">=" && op != "=") fail(st.line, "unknown relation " + op);
      const Sense sense = op == "<=" ? Sense::LessEqual : op == ">=" ? Sense::GreaterEqual : Sense::Equal;
      std::vector<LpTerm> terms;
      parse_expr(st, 0, st.tokens.size() - 2, terms);
      LpRow& row = model.add_row(st.label, "", sense, std::strtod(rhs.c_str(), nullptr));
      for (const auto& t : terms) model.add_term(row, t.var, t.coef);
    } else if (section == Section::Bounds) {
      std::string joined;
      for (const auto& t : st.tokens) joined += t + " ";
      bounds.emplace_back(joined, std::to_string(st.line));
    } else if (section == Section::Binary) {
      for (const auto& t : st.tokens) binaries.push_back(t);
    }
  }
  for (const auto& [b, line_str] : bounds) {
    std::istringstream bs(b);
    std::vector<std::string> t;
    std::string x;
    while (bs >> x) t.push_back(x);
    const int ln = std::stoi(line_str);
    if (t.size() == 3 && t[1] == "=" && is_number(t[2])) {
      auto& v = model.variable(var(t[0]));
      v.lower = v.upper = std::strtod(t[2].c_str(), nullptr);
    } else if (t.size() == 3 && t[1] == ">=" && is_number(t[2])) {
      model.variable(var(t[0])).lower = std::strtod(t[2].c_str(), nullptr);
    } else if (t.size() == 3 && t[1] == "<=" && is_number(t[2])) {
      model.variable(var(t[0])).upper = std::strtod(t[2].c_str(), nullptr);
    } else if (t.size() == 5 && t[1] == "<=" && t[3] == "<=" && is_number(t[0]) && is_number(t[4])) {
      auto& v = model.variable(var(t[2]));
      v.lower = std::strtod(t[0].c_str(), nullptr);
      v.upper = std::strtod(t[4].c_str(), nullptr);
    } else {
      fail(ln, "unsupported bound '" + b + "'");
    }
  }
  for (const auto& name : binaries) {
    auto& v = model.variable(var(name));
    v.binary = true;
    v.lower = 0.0;
    v.upper = 1.0;
  }
  return model;
}

LpEvaluation evaluate_lp(const LpModel& model, const std::map<std::string, double>& values, double tol) {
  LpEvaluation ev;
  const auto& vars = model.variables();
  std::vector<double> x(vars.size(), 0.0);
  for (const auto& [name, v] : values) {
    const int id = model.find(name);
    if (id < 0) {
      ev.unknown.push_back(name);
      continue;
    }
    x[static_cast<std::size_t>(id)] = v;
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto& v = vars[i];
    if (x[i] < v.lower - tol) ev.violations.push_back({v.name, "domain", v.lower - x[i]});
    if (v.upper < 1e30 && x[i] > v.upper + tol) ev.violations.push_back({v.name, "domain", x[i] - v.upper});
    if (v.binary && std::abs(x[i] - std::round(x[i])) > tol)
      ev.violations.push_back({v.name, "domain", std::abs(x[i] - std::round(x[i]))});
  }
  for (const auto& t : model.objective()) ev.objective += t.coef * x[static_cast<std::size_t>(t.var)];
  for (const auto& row : model.rows()) {
    double lhs = 0.0;
    double scale = 1.0;
    for (const auto& t : row.terms) {
      lhs += t.coef * x[static_cast<std::size_t>(t.var)];
      scale = std::max(scale, std::abs(t.coef * x[static_cast<std::size_t>(t.var)]));
    }
    const double slack = row.sense == Sense::LessEqual      ? row.rhs - lhs
                         : row.sense == Sense::GreaterEqual ? lhs - row.rhs
                                                            : -std::abs(lhs - row.rhs);
    if (slack < -tol * scale) ev.violations.push_back({row.name, row.family, -slack});
  }
  return ev;
}

}  // namespace mpefcs
