#pragma once

// Multi-trip AMR solutions under Gaussian uncertainty: forward moment
// propagation, objective evaluation, chance-constraint checks and the
// depot-insertion repair that turns a giant tour into a feasible solution.

#include <algorithm>
#include <cmath>
#include <compare>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccamr/errors.hpp"
#include "ccamr/normal.hpp"
#include "ccamr/solomon.hpp"

namespace ccamr {

/// Request ids visited between two depot visits.
using Trip = std::vector<int>;
/// Trips of one AMR in execution order.
using AmrRoute = std::vector<Trip>;

struct Solution {
  std::vector<AmrRoute> amrs;

  int fleet_size() const { return static_cast<int>(amrs.size()); }
  int trip_count() const {
    int c = 0;
    for (const auto& a : amrs) c += static_cast<int>(a.size());
    return c;
  }

  friend bool operator==(const Solution&, const Solution&) = default;
  friend auto operator<=>(const Solution& a, const Solution& b) { return a.amrs <=> b.amrs; }
};

struct VisitMoments {
  int node = 0;
  NormalVar arrival;
  NormalVar waiting;
  NormalVar start;
};

struct TripProfile {
  // Depot state when the trip leaves: arrival (first trip: ready time e0,
  // later trips: previous trip's return), waiting, and departure = start.
  VisitMoments departure;
  std::vector<VisitMoments> visits;
  NormalVar return_arrival;
};

struct AmrProfile {
  std::vector<TripProfile> trips;
};

struct TimeProfile {
  std::vector<AmrProfile> amrs;
};

struct Objective {
  double f1 = 0;     // fixed + expected time cost
  double f2 = 0;     // total expected earliness, sum E[(h - A)+]
  double delay = 0;  // total expected delay, sum E[(A - h)+]
  double scalar = 0; // f1 + xi3 * delay
  int m = 0;
};

struct ChanceCheck {
  bool ok = true;
  double margin = 0;  // probability minus the required confidence
};

struct TimeWindowCheck {
  bool ok = true;
  std::vector<double> margins;  // one per checked leg, in visiting order
};

namespace model {

/// Moments at `to` when leaving `from` after starting service there at `from_start`.
inline VisitMoments arrive(const StochasticInstance& inst, int from, const NormalVar& from_start, int to) {
  VisitMoments v;
  v.node = to;
  v.arrival = from_start + inst.service(from) + inst.travel_time(from, to);
  v.waiting = gauss::waiting_moments(v.arrival, inst.ready(to));
  v.start = v.arrival + v.waiting;
  return v;
}

inline VisitMoments depot_start(const StochasticInstance& inst) {
  const double e0 = inst.ready(0);
  return {0, {e0, 0.0}, {0.0, 0.0}, {e0, 0.0}};
}

/// P{Y_i + S_i + T_ij <= h_j} under the normal approximation.
inline double leg_probability(const StochasticInstance& inst, int from, const NormalVar& from_start, int to) {
  return gauss::prob_at_most(from_start + inst.service(from) + inst.travel_time(from, to), inst.due(to));
}

inline double load_probability(const StochasticInstance& inst, const NormalVar& load) {
  return gauss::prob_at_most(load, inst.capacity());
}

/// Checks ids, duplicates and empty trips. With `complete`, also that every
/// request 1..n appears.
inline void validate(const StochasticInstance& inst, const Solution& sol, bool complete = true) {
  const int n = inst.size();
  std::vector<char> seen(n + 1, 0);
  int count = 0;
  for (const auto& amr : sol.amrs) {
    if (amr.empty()) throw StructuralError("AMR without trips");
    for (const auto& trip : amr) {
      if (trip.empty()) throw StructuralError("empty trip");
      for (int id : trip) {
        if (id < 1 || id > n) throw StructuralError("request id " + std::to_string(id) + " out of range");
        if (seen[id]) throw StructuralError("request " + std::to_string(id) + " visited twice");
        seen[id] = 1;
        ++count;
      }
    }
  }
  if (complete && count != n)
    throw StructuralError("solution covers " + std::to_string(count) + " of " + std::to_string(n) + " requests");
}

inline TimeProfile propagate(const StochasticInstance& inst, const Solution& sol) {
  validate(inst, sol, false);
  TimeProfile prof;
  prof.amrs.reserve(sol.amrs.size());
  for (const auto& amr : sol.amrs) {
    AmrProfile ap;
    VisitMoments depart = depot_start(inst);
    for (const auto& trip : amr) {
      TripProfile tp;
      tp.departure = depart;
      int last = 0;
      NormalVar start = depart.start;
      for (int id : trip) {
        VisitMoments v = arrive(inst, last, start, id);
        start = v.start;
        last = id;
        tp.visits.push_back(v);
      }
      depart = arrive(inst, last, start, 0);
      tp.return_arrival = depart.arrival;
      ap.trips.push_back(std::move(tp));
    }
    prof.amrs.push_back(std::move(ap));
  }
  return prof;
}

inline Objective evaluate(const StochasticInstance& inst, const Solution& sol, const TimeProfile& prof) {
  Objective obj;
  obj.m = sol.fleet_size();
  double time_cost = 0;
  for (std::size_t k = 0; k < sol.amrs.size(); ++k) {
    for (std::size_t p = 0; p < sol.amrs[k].size(); ++p) {
      const TripProfile& tp = prof.amrs[k].trips[p];
      int last = 0;
      time_cost += tp.departure.waiting.mu;
      for (const VisitMoments& v : tp.visits) {
        time_cost += inst.travel_time(last, v.node).mu + inst.service(v.node).mu + v.waiting.mu;
        obj.f2 += gauss::expected_earliness(v.arrival, inst.due(v.node));
        obj.delay += gauss::expected_delay(v.arrival, inst.due(v.node));
        last = v.node;
      }
      time_cost += inst.travel_time(last, 0).mu;
    }
  }
  obj.f1 = inst.xi1 * obj.m + inst.xi2 * time_cost;
  obj.scalar = obj.f1 + inst.xi3 * obj.delay;
  return obj;
}

inline Objective evaluate(const StochasticInstance& inst, const Solution& sol) {
  validate(inst, sol);
  return evaluate(inst, sol, propagate(inst, sol));
}

/// Whole-trip capacity chance constraint.
inline ChanceCheck capacity_chance_ok(const StochasticInstance& inst, std::span<const int> trip) {
  NormalVar load;
  for (int id : trip) load += inst.demand[id];
  const double p = load_probability(inst, load);
  const double need = 1.0 - inst.eps1;
  return {p >= need, p - need};
}

/// Capacity chance constraint at every prefix boundary of the trip.
inline bool prefix_capacity_chance_ok(const StochasticInstance& inst, std::span<const int> trip) {
  NormalVar load;
  for (int id : trip) {
    load += inst.demand[id];
    if (load_probability(inst, load) < 1.0 - inst.eps1) return false;
  }
  return true;
}

/// Time-window chance constraint on every depot->request and
/// request->request leg, in visiting order.
inline TimeWindowCheck timewindow_chance_ok(const StochasticInstance& inst, const TimeProfile& prof) {
  TimeWindowCheck out;
  const double need = 1.0 - inst.eps2;
  for (const auto& ap : prof.amrs) {
    for (const auto& tp : ap.trips) {
      const VisitMoments* prev = &tp.departure;
      for (const VisitMoments& v : tp.visits) {
        const double p = leg_probability(inst, prev->node, prev->start, v.node);
        out.margins.push_back(p - need);
        if (p < need) out.ok = false;
        prev = &v;
      }
    }
  }
  return out;
}

inline bool is_feasible(const StochasticInstance& inst, const Solution& sol) {
  for (const auto& amr : sol.amrs)
    for (const auto& trip : amr)
      if (!capacity_chance_ok(inst, trip).ok || !prefix_capacity_chance_ok(inst, trip)) return false;
  return timewindow_chance_ok(inst, propagate(inst, sol)).ok;
}

/// Depot-insertion repair. Scans the giant tour left to right; when the
/// next request would break a capacity or time-window chance constraint,
/// a depot visit is inserted before it. The new trip stays on the current
/// AMR if the request is still reachable in time after the return,
/// otherwise a new AMR is opened.
inline Solution repair(const StochasticInstance& inst, std::span<const int> giant) {
  const int n = inst.size();
  std::vector<char> seen(n + 1, 0);
  for (int id : giant) {
    if (id < 1 || id > n) throw StructuralError("request id " + std::to_string(id) + " out of range");
    if (seen[id]) throw StructuralError("request " + std::to_string(id) + " repeated in giant tour");
    seen[id] = 1;
  }

  const double cap_need = 1.0 - inst.eps1;
  const double tw_need = 1.0 - inst.eps2;
  Solution sol;
  int last = 0;
  NormalVar start, load;

  auto fits = [&](int from, const NormalVar& from_start, const NormalVar& new_load, int id) {
    return load_probability(inst, new_load) >= cap_need &&
           leg_probability(inst, from, from_start, id) >= tw_need;
  };

  for (int id : giant) {
    const NormalVar& q = inst.demand[id];
    if (!sol.amrs.empty()) {
      const NormalVar extended = load + q;
      if (fits(last, start, extended, id)) {
        sol.amrs.back().back().push_back(id);
        start = arrive(inst, last, start, id).start;
        load = extended;
        last = id;
        continue;
      }
      const VisitMoments depot = arrive(inst, last, start, 0);
      if (fits(0, depot.start, q, id)) {
        sol.amrs.back().push_back({id});
        start = arrive(inst, 0, depot.start, id).start;
        load = q;
        last = id;
        continue;
      }
    }
    const VisitMoments depot = depot_start(inst);
    if (!fits(0, depot.start, q, id)) throw UnrepairableError(id);
    sol.amrs.push_back({{id}});
    start = arrive(inst, 0, depot.start, id).start;
    load = q;
    last = id;
  }
  return sol;
}

/// Strict preference: lower scalar (beyond 1e-9 relative), then fewer
/// AMRs, then the lexicographically smaller trip structure.
inline bool better(const Objective& a, const Solution& sa, const Objective& b, const Solution& sb) {
  const double tol = 1e-9 * std::max({1.0, std::abs(a.scalar), std::abs(b.scalar)});
  if (a.scalar < b.scalar - tol) return true;
  if (b.scalar < a.scalar - tol) return false;
  if (a.m != b.m) return a.m < b.m;
  return sa < sb;
}

inline bool same_value(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace model

inline void to_json(nlohmann::json& j, const Solution& s) { j = {{"amrs", s.amrs}}; }
inline void from_json(const nlohmann::json& j, Solution& s) { j.at("amrs").get_to(s.amrs); }

inline void to_json(nlohmann::json& j, const Objective& o) {
  j = {{"f1", o.f1}, {"f2", o.f2}, {"delay", o.delay}, {"scalar", o.scalar}, {"m", o.m}};
}
inline void from_json(const nlohmann::json& j, Objective& o) {
  j.at("f1").get_to(o.f1);
  j.at("f2").get_to(o.f2);
  j.at("delay").get_to(o.delay);
  j.at("scalar").get_to(o.scalar);
  j.at("m").get_to(o.m);
}

/// {"amrs": [[[ids...], ...], ...], "objective": {...}}
inline nlohmann::json solution_json(const Solution& sol, const Objective& obj) {
  return {{"amrs", sol.amrs}, {"objective", obj}};
}

}  // namespace ccamr
