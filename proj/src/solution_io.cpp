#include "mpefcs/solution_io.hpp"

namespace mpefcs {

json solution_to_json(const Solution& sol) {
  json routes = json::array();
  for (const auto& r : sol.routes) {
    json stops = json::array();
    for (std::size_t i = 0; i < r.stops.size(); ++i) {
      const StopSchedule s = i < r.schedule.size() ? r.schedule[i] : StopSchedule{};
      stops.push_back({{"node", r.stops[i]},
                       {"arrival", s.arrival},
                       {"begin", s.begin},
                       {"wait", s.wait},
                       {"load", s.load},
                       {"energy", s.energy}});
    }
    routes.push_back({{"vehicle", r.vehicle}, {"stops", std::move(stops)}});
  }
  json charging = json::array();
  for (const auto& e : sol.charging)
    charging.push_back({{"vehicle", e.vehicle},
                        {"physical_charger", e.physical_charger},
                        {"charger_dummy", e.charger_dummy},
                        {"stop", e.stop},
                        {"arrival", e.arrival},
                        {"start", e.start},
                        {"duration", e.duration},
                        {"energy_added", e.energy_added},
                        {"order_index", e.order_index}});
  json assignment = json::array();
  for (std::size_t r = 0; r < sol.assignment.size(); ++r)
    assignment.push_back({{"request", r}, {"node", sol.assignment[r]}});
  return {{"routes", std::move(routes)},
          {"charging", std::move(charging)},
          {"assignment", std::move(assignment)},
          {"rejected", sol.rejected},
          {"objective", sol.objective}};
}

Solution solution_from_json(const json& j) {
  Solution sol;
  try {
    for (const auto& jr : j.at("routes")) {
      Route r;
      r.vehicle = jr.at("vehicle").get<int>();
      for (const auto& js : jr.at("stops")) {
        r.stops.push_back(js.at("node").get<NodeId>());
        StopSchedule s;
        s.arrival = js.value("arrival", 0.0);
        s.begin = js.value("begin", 0.0);
        s.wait = js.value("wait", 0.0);
        s.load = js.value("load", 0);
        s.energy = js.value("energy", 0.0);
        r.schedule.push_back(s);
      }
      sol.routes.push_back(std::move(r));
    }
    for (const auto& je : j.value("charging", json::array())) {
      ChargingEvent e;
      e.vehicle = je.at("vehicle").get<int>();
      e.physical_charger = je.at("physical_charger").get<int>();
      e.charger_dummy = je.value("charger_dummy", kNoNode);
      e.stop = je.value("stop", -1);
      e.arrival = je.value("arrival", 0.0);
      e.start = je.at("start").get<double>();
      e.duration = je.at("duration").get<double>();
      e.energy_added = je.value("energy_added", 0.0);
      e.order_index = je.value("order_index", 0);
      sol.charging.push_back(e);
    }
    const auto& ja = j.at("assignment");
    sol.assignment.assign(ja.size(), kNoNode);
    for (const auto& a : ja) {
      const auto r = a.at("request").get<std::size_t>();
      if (r >= sol.assignment.size()) sol.assignment.resize(r + 1, kNoNode);
      sol.assignment[r] = a.at("node").get<NodeId>();
    }
    sol.rejected = j.value("rejected", std::vector<int>{});
    sol.objective = j.value("objective", 0.0);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed solution document: ") + e.what());
  }
  return sol;
}

json assignment_to_json(const AssignmentProblem& prob, const AssignmentResult& res) {
  json rows = json::array();
  for (std::size_t r = 0; r < res.assignment.size(); ++r) {
    const int j = res.assignment[r];
    rows.push_back({{"request", r}, {"node", j < 0 ? kNoNode : prob.mp_node[static_cast<std::size_t>(j)]}});
  }
  json activated = json::array();
  for (int j : res.activated) activated.push_back(prob.mp_node[static_cast<std::size_t>(j)]);
  return {{"assignment", std::move(rows)}, {"activated", std::move(activated)}, {"rejected", res.rejected}, {"cost", res.cost}};
}

}  // namespace mpefcs
