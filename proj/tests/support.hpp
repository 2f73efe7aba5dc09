#pragma once

#include <string>
#include <vector>

#include "ccamr/solomon.hpp"

namespace ccamr::testing {

inline std::string data_path(const std::string& name) { return std::string(CCAMR_DATA_DIR) + "/" + name; }

/// Builds a Solomon instance from (x, y, demand, ready, due) rows.
struct Row {
  double x, y, demand, ready, due;
};

inline SolomonInstance make_base(double capacity, Depot depot, const std::vector<Row>& rows) {
  SolomonInstance s;
  s.name = "toy";
  s.vehicle_capacity = capacity;
  s.depot = depot;
  int id = 0;
  for (const Row& r : rows) s.customers.push_back({++id, r.x, r.y, r.demand, r.ready, r.due, 0});
  return s;
}

inline AugmentConfig deterministic() {
  AugmentConfig c;
  c.demand_var_ratio = 0;
  c.travel_var_ratio = 0;
  return c;
}

}  // namespace ccamr::testing
