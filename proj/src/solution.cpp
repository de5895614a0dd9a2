#include "mpefcs/solution.hpp"

#include <sstream>

namespace mpefcs {

std::string describe(const Violation& v) {
  std::ostringstream os;
  os << v.family;
  if (v.vehicle >= 0) os << " vehicle " << v.vehicle;
  if (v.stop >= 0) os << " stop " << v.stop;
  if (v.request >= 0) os << " request " << v.request;
  if (v.slack != 0.0) os << " slack " << v.slack;
  if (!v.detail.empty()) os << ": " << v.detail;
  return os.str();
}

std::vector<int> boarding_per_node(const Instance& inst, const std::vector<NodeId>& assignment) {
  std::vector<int> count(static_cast<std::size_t>(inst.node_count()), 0);
  for (NodeId mp : assignment)
    if (mp >= 0 && mp < inst.node_count()) ++count[static_cast<std::size_t>(mp)];
  return count;
}

}  // namespace mpefcs
