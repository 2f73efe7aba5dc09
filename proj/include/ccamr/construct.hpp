#pragma once

// Initial solutions: k-means clustering of request locations, ordering
// by window opening time inside each cluster, concatenation into a giant
// tour and depot-insertion repair (the Gk heuristic), plus the two
// single-ingredient baselines used for ablations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "ccamr/errors.hpp"
#include "ccamr/model.hpp"
#include "ccamr/solomon.hpp"

namespace ccamr {

struct Clustering {
  int k = 0;
  std::vector<std::pair<double, double>> centroids;
  std::vector<int> assignment;  // assignment[id - 1] = cluster index
  double rss = 0;

  std::vector<std::vector<int>> members() const {
    std::vector<std::vector<int>> out(k);
    for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(static_cast<int>(i) + 1);
    return out;
  }
};

struct ConstructParams {
  int k = 0;  // 0 selects default_cluster_count()
  int kiter = 30;
  double tau = 0.0002;
  int restarts = 5;
  std::uint64_t seed = 1;
};

namespace construct {

/// One cluster per expected trip-load: ceil(sum mu_q / (0.9 Q)), clamped to [1, n].
inline int default_cluster_count(const StochasticInstance& inst) {
  const int n = inst.size();
  if (n == 0) return 0;
  double total = 0;
  for (int i = 1; i <= n; ++i) total += inst.demand[i].mu;
  const int k = static_cast<int>(std::ceil(total / (0.9 * inst.capacity())));
  return std::clamp(k, 1, n);
}

namespace detail {

inline double sq_dist(double ax, double ay, double bx, double by) {
  return (ax - bx) * (ax - bx) + (ay - by) * (ay - by);
}

// Lloyd iterations from the given seeds. Stops when RSS < 1/tau, when the
// assignment no longer changes, or after kiter assignment rounds. The
// returned assignment is always nearest-centroid for the returned centroids.
inline Clustering lloyd(const StochasticInstance& inst, std::vector<std::pair<double, double>> centroids,
                        int kiter, double tau) {
  const int n = inst.size();
  const int k = static_cast<int>(centroids.size());
  Clustering c;
  c.k = k;
  c.assignment.assign(n, -1);
  for (int it = 1;; ++it) {
    bool changed = false;
    c.rss = 0;
    for (int i = 1; i <= n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        const double d = sq_dist(inst.x(i), inst.y(i), centroids[j].first, centroids[j].second);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (c.assignment[i - 1] != best) changed = true;
      c.assignment[i - 1] = best;
      c.rss += best_d;
    }
    if (c.rss < 1.0 / tau || it >= kiter || !changed) break;

    std::vector<double> sx(k, 0.0), sy(k, 0.0);
    std::vector<int> cnt(k, 0);
    for (int i = 1; i <= n; ++i) {
      const int j = c.assignment[i - 1];
      sx[j] += inst.x(i);
      sy[j] += inst.y(i);
      ++cnt[j];
    }
    for (int j = 0; j < k; ++j)
      if (cnt[j] > 0) centroids[j] = {sx[j] / cnt[j], sy[j] / cnt[j]};
  }
  c.centroids = std::move(centroids);
  return c;
}

}  // namespace detail

/// Best-RSS clustering over `restarts` random seedings with k distinct requests.
inline Clustering kmeans(const StochasticInstance& inst, int k, int kiter, double tau, std::uint64_t seed,
                         int restarts = 5) {
  const int n = inst.size();
  if (k < 1 || k > n) throw ConfigError("k must lie in [1, n]");
  if (kiter < 1) throw ConfigError("kiter must be at least 1");
  if (!(tau > 0)) throw ConfigError("tau must be positive");
  if (restarts < 1) throw ConfigError("restarts must be at least 1");

  std::mt19937_64 rng(seed);
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  Clustering best;
  for (int r = 0; r < restarts; ++r) {
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<std::pair<double, double>> seeds;
    for (int j = 0; j < k; ++j) seeds.emplace_back(inst.x(ids[j]), inst.y(ids[j]));
    Clustering c = detail::lloyd(inst, std::move(seeds), kiter, tau);
    if (r == 0 || c.rss < best.rss) best = std::move(c);
  }
  return best;
}

/// Orders requests by window opening e_i, then closing h_i, then id.
inline std::vector<int> greedy_insert(const StochasticInstance& inst, std::vector<int> cluster) {
  std::sort(cluster.begin(), cluster.end(), [&](int a, int b) {
    if (inst.ready(a) != inst.ready(b)) return inst.ready(a) < inst.ready(b);
    if (inst.due(a) != inst.due(b)) return inst.due(a) < inst.due(b);
    return a < b;
  });
  return cluster;
}

/// Gk giant tour: clusters sorted by their earliest e_i, each greedily ordered.
inline std::vector<int> gk_giant(const StochasticInstance& inst, const Clustering& clustering) {
  std::vector<std::vector<int>> routes;
  for (auto& members : clustering.members())
    if (!members.empty()) routes.push_back(greedy_insert(inst, std::move(members)));
  std::stable_sort(routes.begin(), routes.end(),
                   [&](const auto& a, const auto& b) { return inst.ready(a.front()) < inst.ready(b.front()); });
  std::vector<int> giant;
  for (const auto& r : routes) giant.insert(giant.end(), r.begin(), r.end());
  return giant;
}

inline Clustering cluster_for(const StochasticInstance& inst, const ConstructParams& params) {
  const int k = params.k > 0 ? params.k : default_cluster_count(inst);
  return kmeans(inst, k, params.kiter, params.tau, params.seed, params.restarts);
}

/// Gk: k-means + greedy ordering + repair.
inline Solution build_initial(const StochasticInstance& inst, const ConstructParams& params) {
  if (inst.size() == 0) return {};
  return model::repair(inst, gk_giant(inst, cluster_for(inst, params)));
}

/// Ablation baseline: k-means clusters in cluster-index order, requests by id
/// inside a cluster, then repair. No time-window ordering.
inline Solution build_kmeans_only(const StochasticInstance& inst, const ConstructParams& params) {
  if (inst.size() == 0) return {};
  std::vector<int> giant;
  for (const auto& members : cluster_for(inst, params).members())
    giant.insert(giant.end(), members.begin(), members.end());
  return model::repair(inst, giant);
}

/// Ablation baseline: all requests as one cluster in window order, then repair.
/// Deterministic.
inline Solution build_greedy(const StochasticInstance& inst) {
  std::vector<int> all(inst.size());
  std::iota(all.begin(), all.end(), 1);
  return model::repair(inst, greedy_insert(inst, std::move(all)));
}

}  // namespace construct
}  // namespace ccamr
