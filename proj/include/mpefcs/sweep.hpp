#pragma once

#include "mpefcs/generator.hpp"
#include "mpefcs/kpi.hpp"
#include "mpefcs/lns.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mpefcs {

inline constexpr int kSweepSchemaVersion = 1;

/// Parameter grid. An empty list stands for the base value only.
struct SweepSpec {
  ScenarioConfig base;
  std::vector<int> fleet_sizes;
  std::vector<double> mp_separations;
  std::vector<double> lambda_travel;
  std::vector<double> lambda_walk;
  std::vector<double> lambda_wait;
  bool one_at_a_time = false;  // vary one list at a time around the base instead of the full product
  std::vector<std::uint64_t> seeds{1};
  int runs_per_cell = 1;  // independent searches per seed; the best one counts
  SearchConfig search;
  bool record_cpu = false;  // cpu column stays empty otherwise so output is reproducible
  int workers = 0;          // 0: MPEFCS_WORKERS or the hardware thread count
};

void validate_sweep_spec(const SweepSpec& spec);
[[nodiscard]] SweepSpec sweep_spec_from_json(const json& j);
[[nodiscard]] json sweep_spec_to_json(const SweepSpec& spec);

struct SweepCell {
  int fleet_size = 0;
  double mp_separation = 0.0;
  double lambda_travel = 0.0;
  double lambda_walk = 0.0;
  double lambda_wait = 0.0;
  bool base = false;
};

struct SweepRun {
  int cell = 0;
  std::uint64_t seed = 0;
  int run = 0;
  std::optional<KpiReport> kpis;
  std::string error;
};

/// KPI means over seeds, each seed contributing its best run.
struct SweepSummary {
  std::vector<std::optional<double>> values;  // in kpi_column_names() order
  int seeds_ok = 0;
  std::string error;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepRun> runs;
  std::vector<SweepSummary> summaries;  // one per cell
};

[[nodiscard]] std::vector<SweepCell> sweep_cells(const SweepSpec& spec);
[[nodiscard]] const std::vector<std::string>& kpi_column_names();
[[nodiscard]] std::vector<std::optional<double>> kpi_columns(const KpiReport& k);

[[nodiscard]] int sweep_worker_count(const SweepSpec& spec);
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec);

/// Header, one "cell" row per cell, then one "run" row per search.
void write_sweep_csv(std::ostream& os, const SweepSpec& spec, const SweepResult& result);

}  // namespace mpefcs
