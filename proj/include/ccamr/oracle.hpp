#pragma once

// Ground truth for the analytic model and the search: Monte-Carlo replay
// of a solution under sampled demands and travel times, exhaustive
// enumeration of tiny instances, and a generator for such instances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccamr/errors.hpp"
#include "ccamr/model.hpp"
#include "ccamr/solomon.hpp"

namespace ccamr {

/// Running mean/variance (Welford).
class Accumulator {
public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

private:
  std::int64_t n_ = 0;
  double mean_ = 0, m2_ = 0;
};

struct SampleStat {
  double mean = 0;
  double var = 0;
  double se = 0;  // standard error of the mean

  static SampleStat from(const Accumulator& a) { return {a.mean(), a.variance(), a.std_error()}; }
};

struct VisitReport {
  int amr = 0, trip = 0, node = 0;
  SampleStat arrival, waiting, start;
  SampleStat earliness, delay;  // (h - A)+ and (A - h)+
  double window_violation = 0;  // P(A > h)
  double load_violation = 0;    // P(load through this visit > Q)
};

struct TripReport {
  int amr = 0, trip = 0;
  double capacity_violation = 0;
  SampleStat return_arrival;
};

struct SimReport {
  std::int64_t samples = 0;
  std::int64_t truncated_draws = 0;  // negative normal draws clipped to 0
  std::vector<VisitReport> visits;
  std::vector<TripReport> trips;
  SampleStat f1, f2, delay;
};

enum class TinyProfile { type1, type2 };

namespace oracle {

/// Replays `sol` `samples` times with q ~ N(mu_q, var_q), T ~ N(mu_T, var_T)
/// (negatives clipped to 0), S = w*q + b and exact waits max(0, e - A).
inline SimReport simulate(const StochasticInstance& inst, const Solution& sol, std::int64_t samples,
                          std::uint64_t seed) {
  if (samples < 1) throw ConfigError("samples must be at least 1");
  model::validate(inst, sol, false);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);

  SimReport rep;
  rep.samples = samples;
  std::size_t nvisits = 0, ntrips = 0;
  for (const auto& amr : sol.amrs) {
    ntrips += amr.size();
    for (const auto& trip : amr) nvisits += trip.size();
  }
  std::vector<Accumulator> acc_a(nvisits), acc_w(nvisits), acc_y(nvisits), acc_e(nvisits), acc_d(nvisits);
  std::vector<std::int64_t> tw_viol(nvisits, 0), load_viol(nvisits, 0), cap_viol(ntrips, 0);
  std::vector<Accumulator> acc_ret(ntrips);
  Accumulator acc_f1, acc_f2, acc_delay;

  auto draw = [&](const NormalVar& v) {
    double x = v.mu + std::sqrt(v.var) * z(rng);
    if (x < 0) {
      ++rep.truncated_draws;
      x = 0;
    }
    return x;
  };

  for (std::int64_t s = 0; s < samples; ++s) {
    std::size_t vi = 0, ti = 0;
    double time_cost = 0, f2 = 0, delay = 0;
    for (const auto& amr : sol.amrs) {
      double depart = inst.ready(0);
      for (const auto& trip : amr) {
        int last = 0;
        double start = depart, service = 0, load = 0;
        for (int id : trip) {
          const double t = draw(inst.travel_time(last, id));
          const double q = draw(inst.demand[id]);
          const double a = start + service + t;
          const double w = std::max(0.0, inst.ready(id) - a);
          const double h = inst.due(id);
          load += q;
          acc_a[vi].add(a);
          acc_w[vi].add(w);
          acc_y[vi].add(a + w);
          acc_e[vi].add(std::max(0.0, h - a));
          acc_d[vi].add(std::max(0.0, a - h));
          if (a > h) ++tw_viol[vi];
          if (load > inst.capacity()) ++load_viol[vi];
          time_cost += t + w;
          f2 += std::max(0.0, h - a);
          delay += std::max(0.0, a - h);
          service = inst.service_slope * q + inst.service_bias;
          time_cost += service;
          start = a + w;
          last = id;
          ++vi;
        }
        const double t = draw(inst.travel_time(last, 0));
        const double ret = start + service + t;
        const double w0 = std::max(0.0, inst.ready(0) - ret);
        acc_ret[ti].add(ret);
        if (load > inst.capacity()) ++cap_viol[ti];
        time_cost += t;
        depart = ret + w0;
        // The wait before the next departure sits on the next outgoing arc.
        if (&trip != &amr.back()) time_cost += w0;
        ++ti;
      }
    }
    acc_f1.add(inst.xi1 * sol.fleet_size() + inst.xi2 * time_cost);
    acc_f2.add(f2);
    acc_delay.add(delay);
  }

  const double ns = static_cast<double>(samples);
  std::size_t vi = 0, ti = 0;
  for (std::size_t k = 0; k < sol.amrs.size(); ++k) {
    for (std::size_t p = 0; p < sol.amrs[k].size(); ++p) {
      for (int id : sol.amrs[k][p]) {
        VisitReport v;
        v.amr = static_cast<int>(k);
        v.trip = static_cast<int>(p);
        v.node = id;
        v.arrival = SampleStat::from(acc_a[vi]);
        v.waiting = SampleStat::from(acc_w[vi]);
        v.start = SampleStat::from(acc_y[vi]);
        v.earliness = SampleStat::from(acc_e[vi]);
        v.delay = SampleStat::from(acc_d[vi]);
        v.window_violation = static_cast<double>(tw_viol[vi]) / ns;
        v.load_violation = static_cast<double>(load_viol[vi]) / ns;
        rep.visits.push_back(v);
        ++vi;
      }
      rep.trips.push_back({static_cast<int>(k), static_cast<int>(p), static_cast<double>(cap_viol[ti]) / ns,
                           SampleStat::from(acc_ret[ti])});
      ++ti;
    }
  }
  rep.f1 = SampleStat::from(acc_f1);
  rep.f2 = SampleStat::from(acc_f2);
  rep.delay = SampleStat::from(acc_delay);
  return rep;
}

struct ExhaustiveResult {
  Solution solution;
  Objective objective;
  std::int64_t feasible_count = 0;
};

namespace detail {

class Enumerator {
public:
  explicit Enumerator(const StochasticInstance& inst) : inst_(inst), used_(inst.size() + 1, 0) {}

  std::optional<ExhaustiveResult> run() {
    recurse(0, 0, {}, {}, 0);
    if (!best_) return std::nullopt;
    best_->feasible_count = feasible_;
    return best_;
  }

private:
  struct Cursor {
    int last;
    NormalVar start, load;
  };

  void recurse(int placed, int last, NormalVar start, NormalVar load, int first_of_last_amr) {
    const int n = inst_.size();
    if (placed == n) {
      leaf();
      return;
    }
    if (best_ && inst_.xi1 * partial_.fleet_size() > best_->objective.scalar) return;
    const double cap_need = 1.0 - inst_.eps1, tw_need = 1.0 - inst_.eps2;
    for (int j = 1; j <= n; ++j) {
      if (used_[j]) continue;
      const NormalVar& q = inst_.demand[j];
      used_[j] = 1;
      if (!partial_.amrs.empty()) {
        // Append to the open trip.
        const NormalVar ext = load + q;
        if (model::load_probability(inst_, ext) >= cap_need &&
            model::leg_probability(inst_, last, start, j) >= tw_need) {
          partial_.amrs.back().back().push_back(j);
          recurse(placed + 1, j, model::arrive(inst_, last, start, j).start, ext, first_of_last_amr);
          partial_.amrs.back().back().pop_back();
        }
        // Close the trip and start a new one on the same AMR.
        const NormalVar dep = model::arrive(inst_, last, start, 0).start;
        if (model::load_probability(inst_, q) >= cap_need && model::leg_probability(inst_, 0, dep, j) >= tw_need) {
          partial_.amrs.back().push_back({j});
          recurse(placed + 1, j, model::arrive(inst_, 0, dep, j).start, q, first_of_last_amr);
          partial_.amrs.back().pop_back();
        }
      }
      // Open a new AMR; AMRs are kept in increasing order of their first request.
      if (j > first_of_last_amr) {
        const NormalVar dep = model::depot_start(inst_).start;
        if (model::load_probability(inst_, q) >= cap_need && model::leg_probability(inst_, 0, dep, j) >= tw_need) {
          partial_.amrs.push_back({{j}});
          recurse(placed + 1, j, model::arrive(inst_, 0, dep, j).start, q, j);
          partial_.amrs.pop_back();
        }
      }
      used_[j] = 0;
    }
  }

  void leaf() {
    if (!model::is_feasible(inst_, partial_)) return;
    ++feasible_;
    const Objective obj = model::evaluate(inst_, partial_);
    if (!best_ || model::better(obj, partial_, best_->objective, best_->solution)) best_ = ExhaustiveResult{partial_, obj, 0};
  }

  const StochasticInstance& inst_;
  std::vector<char> used_;
  Solution partial_;
  std::optional<ExhaustiveResult> best_;
  std::int64_t feasible_ = 0;
};

}  // namespace detail

/// Minimum-scalar feasible solution over every split of every request
/// order into trips and of the trip sequence into AMR chains. n <= 8.
inline ExhaustiveResult exhaustive(const StochasticInstance& inst) {
  if (inst.size() > 8) throw ConfigError("exhaustive search supports at most 8 requests");
  if (inst.size() == 0) return {{}, model::evaluate(inst, Solution{}), 1};
  auto res = detail::Enumerator(inst).run();
  if (!res) throw InfeasibleInstance("no chance-feasible solution exists");
  return *res;
}

/// Random Solomon-like instance with n requests: coordinates uniform in
/// [0,100]^2, depot at the centre, integer demands and windows. Type 1 uses
/// the type-1 Solomon capacity and demand range with half of the windows
/// narrow; type 2 the wider type-2 counterparts. Every request is
/// individually reachable in time from the depot.
inline StochasticInstance gen_tiny(int n, std::uint64_t seed, TinyProfile profile = TinyProfile::type1,
                                   const AugmentConfig& cfg = {}) {
  if (n < 1 || n > 10) throw ConfigError("tiny instances need 1 <= n <= 10");
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto uint_ = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  const bool t1 = profile == TinyProfile::type1;
  const double capacity = t1 ? 200 : 700;
  const double horizon = t1 ? 1000 : 2000;
  const double narrow_lo = t1 ? 10 : 55, narrow_hi = t1 ? 80 : 210;
  const double wide_lo = t1 ? 100 : 300;

  SolomonInstance base;
  base.name = std::string(t1 ? "tiny1-" : "tiny2-") + std::to_string(n) + "-" + std::to_string(seed);
  base.vehicle_capacity = capacity;
  base.depot = {50, 50, 0, horizon};
  for (int id = 1; id <= n; ++id) {
    Customer c;
    c.id = id;
    c.x = std::round(uni(0, 100));
    c.y = std::round(uni(0, 100));
    c.demand = uint_(2, 40);
    const bool narrow = uni(0, 1) < 0.5;
    const double width = std::round(narrow ? uni(narrow_lo, narrow_hi) : uni(wide_lo, horizon / 2));
    c.ready = std::round(uni(0, horizon - width));
    c.due = c.ready + width;
    const double mu = std::hypot(c.x - 50, c.y - 50) * cfg.speed_factor;
    const double reach = std::ceil(mu + 3.0 * std::sqrt(cfg.travel_var_ratio * mu) + 1.0);
    if (c.due < reach) {
      c.ready += reach - c.due;
      c.due = reach;
    }
    c.service = cfg.service_slope * c.demand + cfg.service_bias;
    base.customers.push_back(c);
  }
  return solomon::augment(base, cfg);
}

}  // namespace oracle

inline void to_json(nlohmann::json& j, const SampleStat& s) { j = {{"mean", s.mean}, {"var", s.var}, {"se", s.se}}; }
inline void from_json(const nlohmann::json& j, SampleStat& s) {
  j.at("mean").get_to(s.mean);
  j.at("var").get_to(s.var);
  j.at("se").get_to(s.se);
}

inline void to_json(nlohmann::json& j, const SimReport& r) {
  nlohmann::json visits = nlohmann::json::array(), trips = nlohmann::json::array();
  for (const auto& v : r.visits)
    visits.push_back({{"amr", v.amr}, {"trip", v.trip}, {"node", v.node}, {"arrival", v.arrival},
                      {"waiting", v.waiting}, {"start", v.start}, {"earliness", v.earliness}, {"delay", v.delay},
                      {"window_violation", v.window_violation}, {"load_violation", v.load_violation}});
  for (const auto& t : r.trips)
    trips.push_back({{"amr", t.amr}, {"trip", t.trip}, {"capacity_violation", t.capacity_violation},
                     {"return_arrival", t.return_arrival}});
  j = {{"samples", r.samples}, {"truncated_draws", r.truncated_draws}, {"visits", visits}, {"trips", trips},
       {"f1", r.f1}, {"f2", r.f2}, {"delay", r.delay}};
}

}  // namespace ccamr
