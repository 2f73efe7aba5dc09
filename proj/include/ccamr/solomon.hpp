#pragma once

// Solomon VRPTW instances and their stochastic augmentation: Gaussian
// demands, Gaussian travel times proportional to Euclidean distance, and a
// demand-driven service time S = w*q + b.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccamr/errors.hpp"
#include "ccamr/normal.hpp"

namespace ccamr {

struct Depot {
  double x = 0, y = 0;
  double ready = 0, due = 0;
};

struct Customer {
  int id = 0;
  double x = 0, y = 0;
  double demand = 0;
  double ready = 0, due = 0;
  double service = 0;  // Solomon's column; superseded by the w*q + b model
};

struct SolomonInstance {
  std::string name;
  double vehicle_capacity = 0;
  Depot depot;
  std::vector<Customer> customers;  // customers[i].id == i + 1

  int size() const { return static_cast<int>(customers.size()); }
};

/// Knobs for turning a deterministic Solomon instance into a stochastic one.
struct AugmentConfig {
  double speed_factor = 1.0;  // time units per distance unit
  double demand_var_ratio = 0.1;
  double travel_var_ratio = 0.2;
  double service_slope = 2.0;
  double service_bias = 10.0;
  double xi1 = 1000.0;
  double xi2 = 1.0;
  double xi3 = 1.0;
  double eps1 = 0.05;
  double eps2 = 0.05;

  void validate() const {
    if (!(speed_factor > 0)) throw ConfigError("speed factor must be positive");
    if (demand_var_ratio < 0 || travel_var_ratio < 0)
      throw ConfigError("variance ratios must be non-negative");
    if (!(xi1 > xi2)) throw ConfigError("xi1 must exceed xi2");
    if (xi2 < 0 || xi3 < 0) throw ConfigError("cost coefficients must be non-negative");
    for (double eps : {eps1, eps2})
      if (!(eps > 0 && eps <= 0.5)) throw ConfigError("confidence epsilons must lie in (0, 0.5]");
  }
};

/// A Solomon instance with Gaussian demands and travel times. Node 0 is the
/// depot, nodes 1..n are requests.
struct StochasticInstance {
  SolomonInstance base;
  std::vector<NormalVar> demand;  // size n+1, demand[0] is the zero depot demand
  std::vector<NormalVar> travel;  // (n+1)x(n+1), row-major
  double service_slope = 2.0;
  double service_bias = 10.0;
  double xi1 = 1000.0, xi2 = 1.0, xi3 = 1.0;
  double eps1 = 0.05, eps2 = 0.05;
  double speed_factor = 1.0;

  int size() const { return base.size(); }
  double capacity() const { return base.vehicle_capacity; }

  double ready(int node) const {
    return node == 0 ? base.depot.ready : base.customers[node - 1].ready;
  }
  double due(int node) const { return node == 0 ? base.depot.due : base.customers[node - 1].due; }
  double x(int node) const { return node == 0 ? base.depot.x : base.customers[node - 1].x; }
  double y(int node) const { return node == 0 ? base.depot.y : base.customers[node - 1].y; }

  const NormalVar& travel_time(int from, int to) const {
    return travel[static_cast<std::size_t>(from) * (size() + 1) + to];
  }

  // The depot has zero service time.
  NormalVar service(int node) const {
    if (node == 0) return {};
    const NormalVar& q = demand[node];
    return {service_slope * q.mu + service_bias, service_slope * service_slope * q.var};
  }
};

namespace solomon {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double to_number(std::string_view tok, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError("non-numeric field '" + std::string(tok) + "'", line);
  return v;
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  return true;
}

}  // namespace detail

/// Parses the standard Solomon layout: name line, VEHICLE block with
/// NUMBER/CAPACITY, CUSTOMER block with a 7-column table whose row 0 is the depot.
inline SolomonInstance parse(std::istream& in) {
  enum class Stage { name, vehicle, vehicle_header, vehicle_row, customer, customer_header, rows };
  Stage stage = Stage::name;
  SolomonInstance inst;
  bool have_depot = false;
  std::vector<std::size_t> row_line;
  std::string raw;
  std::size_t lineno = 0;

  while (std::getline(in, raw)) {
    ++lineno;
    auto toks = detail::split_ws(raw);
    if (toks.empty()) continue;
    switch (stage) {
      case Stage::name:
        inst.name = std::string(toks.front());
        stage = Stage::vehicle;
        break;
      case Stage::vehicle:
        if (!detail::starts_with_ci(toks.front(), "VEHICLE"))
          throw ParseError("expected VEHICLE section", lineno);
        stage = Stage::vehicle_header;
        break;
      case Stage::vehicle_header:
        if (!detail::starts_with_ci(toks.front(), "NUMBER"))
          throw ParseError("expected NUMBER/CAPACITY header", lineno);
        stage = Stage::vehicle_row;
        break;
      case Stage::vehicle_row: {
        if (toks.size() != 2) throw ParseError("expected vehicle number and capacity", lineno);
        detail::to_number(toks[0], lineno);
        inst.vehicle_capacity = detail::to_number(toks[1], lineno);
        if (!(inst.vehicle_capacity > 0)) throw ParseError("capacity must be positive", lineno);
        stage = Stage::customer;
        break;
      }
      case Stage::customer:
        if (!detail::starts_with_ci(toks.front(), "CUSTOMER"))
          throw ParseError("expected CUSTOMER section", lineno);
        stage = Stage::customer_header;
        break;
      case Stage::customer_header:
        if (!detail::starts_with_ci(toks.front(), "CUST"))
          throw ParseError("expected customer table header", lineno);
        stage = Stage::rows;
        break;
      case Stage::rows: {
        if (toks.size() != 7) throw ParseError("expected 7 columns, got " + std::to_string(toks.size()), lineno);
        double f[7];
        for (int k = 0; k < 7; ++k) f[k] = detail::to_number(toks[k], lineno);
        if (f[0] != std::floor(f[0]) || f[0] < 0) throw ParseError("invalid customer id", lineno);
        const int id = static_cast<int>(f[0]);
        if (f[4] > f[5]) throw ParseError("window inverted at line " + std::to_string(lineno), lineno);
        if (f[3] < 0) throw ParseError("negative demand", lineno);
        if (id == 0) {
          if (have_depot) throw ParseError("duplicate id 0", lineno);
          inst.depot = {f[1], f[2], f[4], f[5]};
          have_depot = true;
          break;
        }
        if (id > static_cast<int>(inst.customers.size()) && id > 0) {
          inst.customers.resize(id);
          row_line.resize(id, 0);
        }
        if (row_line[id - 1] != 0) throw ParseError("duplicate id " + std::to_string(id), lineno);
        row_line[id - 1] = lineno;
        inst.customers[id - 1] = {id, f[1], f[2], f[3], f[4], f[5], f[6]};
        break;
      }
    }
  }
  if (stage != Stage::rows) throw ParseError("truncated file: customer table missing", lineno);
  if (!have_depot) throw ParseError("depot row (id 0) missing", lineno);
  for (std::size_t i = 0; i < row_line.size(); ++i)
    if (row_line[i] == 0) throw ParseError("customer ids not contiguous: missing " + std::to_string(i + 1), lineno);
  return inst;
}

inline SolomonInstance parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

inline SolomonInstance load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  try {
    return parse(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

/// Keeps only customers 1..first_n.
inline SolomonInstance first_n(SolomonInstance inst, int first_n) {
  if (first_n < 0 || first_n > inst.size())
    throw ConfigError("subset size " + std::to_string(first_n) + " exceeds instance size " +
                      std::to_string(inst.size()));
  inst.customers.resize(first_n);
  return inst;
}

inline StochasticInstance augment(const SolomonInstance& base, const AugmentConfig& cfg = {}) {
  cfg.validate();
  StochasticInstance out;
  out.base = base;
  out.service_slope = cfg.service_slope;
  out.service_bias = cfg.service_bias;
  out.xi1 = cfg.xi1;
  out.xi2 = cfg.xi2;
  out.xi3 = cfg.xi3;
  out.eps1 = cfg.eps1;
  out.eps2 = cfg.eps2;
  out.speed_factor = cfg.speed_factor;

  const int n = base.size();
  out.demand.assign(n + 1, NormalVar{});
  for (const Customer& c : base.customers)
    out.demand[c.id] = {c.demand, cfg.demand_var_ratio * c.demand};

  out.travel.assign(static_cast<std::size_t>(n + 1) * (n + 1), NormalVar{});
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const double d = std::hypot(out.x(i) - out.x(j), out.y(i) - out.y(j));
      const double mu = d * cfg.speed_factor;
      const NormalVar t{mu, cfg.travel_var_ratio * mu};
      out.travel[static_cast<std::size_t>(i) * (n + 1) + j] = t;
      out.travel[static_cast<std::size_t>(j) * (n + 1) + i] = t;
    }
  }
  return out;
}

}  // namespace solomon

// JSON (field names follow the type definitions).

inline void to_json(nlohmann::json& j, const NormalVar& v) { j = {{"mu", v.mu}, {"var", v.var}}; }
inline void from_json(const nlohmann::json& j, NormalVar& v) {
  j.at("mu").get_to(v.mu);
  j.at("var").get_to(v.var);
}

inline void to_json(nlohmann::json& j, const SolomonInstance& s) {
  nlohmann::json customers = nlohmann::json::array();
  for (const Customer& c : s.customers)
    customers.push_back({{"id", c.id}, {"x", c.x}, {"y", c.y}, {"demand", c.demand},
                         {"ready", c.ready}, {"due", c.due}, {"service", c.service}});
  j = {{"name", s.name},
       {"vehicle_capacity", s.vehicle_capacity},
       {"depot", {{"x", s.depot.x}, {"y", s.depot.y}, {"ready", s.depot.ready}, {"due", s.depot.due}}},
       {"customers", customers}};
}

inline void from_json(const nlohmann::json& j, SolomonInstance& s) {
  j.at("name").get_to(s.name);
  j.at("vehicle_capacity").get_to(s.vehicle_capacity);
  const auto& d = j.at("depot");
  s.depot = {d.at("x"), d.at("y"), d.at("ready"), d.at("due")};
  s.customers.clear();
  for (const auto& c : j.at("customers"))
    s.customers.push_back({c.at("id"), c.at("x"), c.at("y"), c.at("demand"), c.at("ready"),
                           c.at("due"), c.at("service")});
}

inline void to_json(nlohmann::json& j, const StochasticInstance& s) {
  const int n = s.size();
  nlohmann::json travel = nlohmann::json::array();
  for (int i = 0; i <= n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k <= n; ++k) row.push_back(s.travel_time(i, k));
    travel.push_back(std::move(row));
  }
  j = {{"base", s.base},
       {"demand", s.demand},
       {"travel", travel},
       {"service_slope", s.service_slope},
       {"service_bias", s.service_bias},
       {"xi1", s.xi1},
       {"xi2", s.xi2},
       {"xi3", s.xi3},
       {"eps1", s.eps1},
       {"eps2", s.eps2},
       {"speed_factor", s.speed_factor}};
}

inline void from_json(const nlohmann::json& j, StochasticInstance& s) {
  j.at("base").get_to(s.base);
  j.at("demand").get_to(s.demand);
  s.travel.clear();
  for (const auto& row : j.at("travel"))
    for (const auto& cell : row) s.travel.push_back(cell.get<NormalVar>());
  j.at("service_slope").get_to(s.service_slope);
  j.at("service_bias").get_to(s.service_bias);
  j.at("xi1").get_to(s.xi1);
  j.at("xi2").get_to(s.xi2);
  j.at("xi3").get_to(s.xi3);
  j.at("eps1").get_to(s.eps1);
  j.at("eps2").get_to(s.eps2);
  j.at("speed_factor").get_to(s.speed_factor);
  const std::size_t nodes = s.base.customers.size() + 1;
  if (s.demand.size() != nodes || s.travel.size() != nodes * nodes)
    throw ParseError("instance JSON: matrix sizes do not match customer count", 0);
}

}  // namespace ccamr
