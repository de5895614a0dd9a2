#pragma once

#include "mpefcs/model.hpp"
#include "mpefcs/scenario_io.hpp"
#include "mpefcs/solution.hpp"

#include <optional>

namespace mpefcs {

struct KpiReport {
  int used_vehicles = 0;  // routes with at least one pickup
  int served = 0;
  int requests = 0;
  double service_rate = 0.0;  // percent
  double avg_walk_km = 0.0;
  double avg_ivt_min = 0.0;
  double total_charging_min = 0.0;
  double kmt_km = 0.0;
  std::optional<double> cus_per_kmt;  // absent when nothing is driven
  std::optional<double> cus_per_mp;   // absent when no point is activated
  double excess_wait_min = 0.0;
  double cpu_seconds = 0.0;
  double objective = 0.0;
};

[[nodiscard]] KpiReport compute_kpis(const Solution& sol, const Instance& inst, double wall_clock = 0.0);

[[nodiscard]] json kpis_to_json(const KpiReport& k);

/// Served customers per kilometer traveled; nullopt for zero distance.
[[nodiscard]] std::optional<double> cus_per_kmt(int served, double kmt);

/// Tonnes of CO2 for a daily distance over a number of days.
[[nodiscard]] double co2_savings(double km_per_day, double days, double kg_per_km);

}  // namespace mpefcs
