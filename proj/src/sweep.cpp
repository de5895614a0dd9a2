#include "mpefcs/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <thread>

namespace mpefcs {

namespace {

template <class T>
std::vector<T> or_base(const std::vector<T>& v, T base) {
  return v.empty() ? std::vector<T>{base} : v;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool same_cell(const SweepCell& a, const SweepCell& b) {
  return a.fleet_size == b.fleet_size && a.mp_separation == b.mp_separation && a.lambda_travel == b.lambda_travel &&
         a.lambda_walk == b.lambda_walk && a.lambda_wait == b.lambda_wait;
}

ScenarioConfig cell_config(const SweepSpec& spec, const SweepCell& c, std::uint64_t seed) {
  ScenarioConfig cfg = spec.base;
  cfg.seed = seed;
  cfg.fleet_size = c.fleet_size;
  cfg.mp_separation = c.mp_separation;
  cfg.params.lambda.travel = c.lambda_travel;
  cfg.params.lambda.walk = c.lambda_walk;
  cfg.params.lambda.wait = c.lambda_wait;
  return cfg;
}

}  // namespace

void validate_sweep_spec(const SweepSpec& spec) {
  validate_config(spec.base);
  validate_search_config(spec.search);
  if (spec.seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
  if (spec.runs_per_cell < 1) throw std::invalid_argument("runs_per_cell must be positive");
  if (spec.workers < 0) throw std::invalid_argument("workers must be nonnegative");
}

SweepSpec sweep_spec_from_json(const json& j) {
  static const std::set<std::string> keys = {"base",  "search",     "grid",       "one_at_a_time", "seeds",
                                             "runs_per_cell", "record_cpu", "workers"};
  static const std::set<std::string> grid_keys = {"fleet_size", "mp_separation", "lambda_travel", "lambda_walk",
                                                  "lambda_wait"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw std::invalid_argument("unknown sweep key '" + k + "'");
  if (j.contains("grid"))
    for (const auto& [k, v] : j.at("grid").items())
      if (!grid_keys.count(k)) throw std::invalid_argument("unknown grid key '" + k + "'");
  SweepSpec s;
  if (j.contains("base")) s.base = config_from_json(j.at("base"));
  if (j.contains("search")) s.search = search_config_from_json(j.at("search"));
  const json& g = j.contains("grid") ? j.at("grid") : json::object();
  if (g.contains("fleet_size")) s.fleet_sizes = g.at("fleet_size").get<std::vector<int>>();
  if (g.contains("mp_separation")) s.mp_separations = g.at("mp_separation").get<std::vector<double>>();
  if (g.contains("lambda_travel")) s.lambda_travel = g.at("lambda_travel").get<std::vector<double>>();
  if (g.contains("lambda_walk")) s.lambda_walk = g.at("lambda_walk").get<std::vector<double>>();
  if (g.contains("lambda_wait")) s.lambda_wait = g.at("lambda_wait").get<std::vector<double>>();
  s.one_at_a_time = j.value("one_at_a_time", s.one_at_a_time);
  if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  s.runs_per_cell = j.value("runs_per_cell", s.runs_per_cell);
  s.record_cpu = j.value("record_cpu", s.record_cpu);
  s.workers = j.value("workers", s.workers);
  validate_sweep_spec(s);
  return s;
}

json sweep_spec_to_json(const SweepSpec& s) {
  return {{"base", config_to_json(s.base)},
          {"search", search_config_to_json(s.search)},
          {"grid",
           {{"fleet_size", s.fleet_sizes},
            {"mp_separation", s.mp_separations},
            {"lambda_travel", s.lambda_travel},
            {"lambda_walk", s.lambda_walk},
            {"lambda_wait", s.lambda_wait}}},
          {"one_at_a_time", s.one_at_a_time},
          {"seeds", s.seeds},
          {"runs_per_cell", s.runs_per_cell},
          {"record_cpu", s.record_cpu},
          {"workers", s.workers}};
}

std::vector<SweepCell> sweep_cells(const SweepSpec& spec) {
  const auto& b = spec.base;
  SweepCell base{b.fleet_size, b.mp_separation, b.params.lambda.travel, b.params.lambda.walk, b.params.lambda.wait, true};
  std::vector<SweepCell> cells;
  auto push = [&](SweepCell c) {
    c.base = same_cell(c, base);
    for (const auto& o : cells)
      if (same_cell(o, c)) return;
    cells.push_back(c);
  };
  if (spec.one_at_a_time) {
    push(base);
    for (int f : spec.fleet_sizes) push({f, base.mp_separation, base.lambda_travel, base.lambda_walk, base.lambda_wait});
    for (double s : spec.mp_separations)
      push({base.fleet_size, s, base.lambda_travel, base.lambda_walk, base.lambda_wait});
    for (double v : spec.lambda_travel) push({base.fleet_size, base.mp_separation, v, base.lambda_walk, base.lambda_wait});
    for (double v : spec.lambda_walk) push({base.fleet_size, base.mp_separation, base.lambda_travel, v, base.lambda_wait});
    for (double v : spec.lambda_wait) push({base.fleet_size, base.mp_separation, base.lambda_travel, base.lambda_walk, v});
    return cells;
  }
  for (int f : or_base(spec.fleet_sizes, base.fleet_size))
    for (double s : or_base(spec.mp_separations, base.mp_separation))
      for (double l1 : or_base(spec.lambda_travel, base.lambda_travel))
        for (double l2 : or_base(spec.lambda_walk, base.lambda_walk))
          for (double l3 : or_base(spec.lambda_wait, base.lambda_wait)) push({f, s, l1, l2, l3});
  if (std::none_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.base; })) push(base);
  return cells;
}

const std::vector<std::string>& kpi_column_names() {
  static const std::vector<std::string> names{"used_vehicles",   "served",          "requests",
                                              "service_rate",    "avg_walk_km",     "avg_ivt_min",
                                              "total_charging_min", "kmt_km",       "cus_per_kmt",
                                              "cus_per_mp",      "excess_wait_min", "cpu_seconds",
                                              "objective"};
  return names;
}

std::vector<std::optional<double>> kpi_columns(const KpiReport& k) {
  return {static_cast<double>(k.used_vehicles),
          static_cast<double>(k.served),
          static_cast<double>(k.requests),
          k.service_rate,
          k.avg_walk_km,
          k.avg_ivt_min,
          k.total_charging_min,
          k.kmt_km,
          k.cus_per_kmt,
          k.cus_per_mp,
          k.excess_wait_min,
          k.cpu_seconds,
          k.objective};
}

int sweep_worker_count(const SweepSpec& spec) {
  if (spec.workers > 0) return spec.workers;
  if (const char* env = std::getenv("MPEFCS_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate_sweep_spec(spec);
  SweepResult res;
  res.cells = sweep_cells(spec);
  for (std::size_t c = 0; c < res.cells.size(); ++c)
    for (auto seed : spec.seeds)
      for (int r = 0; r < spec.runs_per_cell; ++r) res.runs.push_back({static_cast<int>(c), seed, r, std::nullopt, {}});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < res.runs.size(); i = next++) {
      SweepRun& run = res.runs[i];
      try {
        const ScenarioConfig cfg = cell_config(spec, res.cells[static_cast<std::size_t>(run.cell)], run.seed);
        validate_config(cfg);
        const Instance inst = build_instance(generate_scenario(cfg));
        SearchConfig sc = spec.search;
        sc.seed = spec.search.seed + static_cast<std::uint64_t>(run.run);
        const auto t0 = std::chrono::steady_clock::now();
        const Solution sol = lns_solve(inst, sc);
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        run.kpis = compute_kpis(sol, inst, sec);
      } catch (const std::exception& e) {
        run.error = e.what();
      }
    }
  };
  const int n = std::min<int>(sweep_worker_count(spec), static_cast<int>(res.runs.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const std::size_t ncol = kpi_column_names().size();
  for (std::size_t c = 0; c < res.cells.size(); ++c) {
    SweepSummary sum;
    std::vector<double> total(ncol, 0.0);
    std::vector<int> count(ncol, 0);
    for (auto seed : spec.seeds) {
      const KpiReport* best = nullptr;
      std::string err;
      for (const auto& run : res.runs) {
        if (run.cell != static_cast<int>(c) || run.seed != seed) continue;
        if (!run.kpis) {
          if (err.empty()) err = run.error;
          continue;
        }
        if (!best || run.kpis->objective < best->objective) best = &*run.kpis;
      }
      if (!best) {
        if (!sum.error.empty()) sum.error += "; ";
        sum.error += "seed " + std::to_string(seed) + ": " + err;
        continue;
      }
      ++sum.seeds_ok;
      const auto cols = kpi_columns(*best);
      for (std::size_t i = 0; i < ncol; ++i)
        if (cols[i]) {
          total[i] += *cols[i];
          ++count[i];
        }
    }
    sum.values.resize(ncol);
    for (std::size_t i = 0; i < ncol; ++i)
      if (count[i] > 0) sum.values[i] = total[i] / count[i];
    res.summaries.push_back(std::move(sum));
  }
  return res;
}

void write_sweep_csv(std::ostream& os, const SweepSpec& spec, const SweepResult& result) {
  const auto& names = kpi_column_names();
  const auto cpu = static_cast<std::size_t>(std::find(names.begin(), names.end(), "cpu_seconds") - names.begin());
  os << "schema_version,row_type,cell,is_base,seed,run,fleet_size,mp_separation,lambda_travel,lambda_walk,"
        "lambda_wait,lambda_reject";
  for (const auto& n : names) os << ',' << n;
  os << ",error\n";
  auto prefix = [&](const char* type, int c, const std::string& seed, const std::string& run) {
    const SweepCell& cell = result.cells[static_cast<std::size_t>(c)];
    os << kSweepSchemaVersion << ',' << type << ',' << c << ',' << (cell.base ? 1 : 0) << ',' << seed << ',' << run
       << ',' << cell.fleet_size << ',' << num(cell.mp_separation) << ',' << num(cell.lambda_travel) << ','
       << num(cell.lambda_walk) << ',' << num(cell.lambda_wait) << ',' << num(spec.base.params.lambda.reject);
  };
  auto values = [&](const std::vector<std::optional<double>>& v) {
    for (std::size_t i = 0; i < names.size(); ++i) os << ',' << (i == cpu && !spec.record_cpu ? "" : opt_num(v[i]));
  };
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto& s = result.summaries[c];
    prefix("cell", static_cast<int>(c), "", "");
    values(s.values);
    os << ',' << csv_escape(s.error) << '\n';
  }
  for (const auto& run : result.runs) {
    prefix("run", run.cell, std::to_string(run.seed), std::to_string(run.run));
    values(run.kpis ? kpi_columns(*run.kpis) : std::vector<std::optional<double>>(names.size()));
    os << ',' << csv_escape(run.error) << '\n';
  }
}

}  // namespace mpefcs
