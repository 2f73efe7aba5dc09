#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "ccamr/construct.hpp"
#include "support.hpp"

using namespace ccamr;
using ccamr::testing::data_path;
using ccamr::testing::deterministic;
using ccamr::testing::make_base;
using ccamr::testing::Row;

namespace {

StochasticInstance c101_25() {
  return solomon::augment(solomon::first_n(solomon::load(data_path("C101.txt")), 25));
}

double rss_of(const StochasticInstance& inst, const std::vector<int>& assignment, int k) {
  std::vector<double> sx(k, 0), sy(k, 0), cnt(k, 0);
  for (int i = 1; i <= inst.size(); ++i) {
    sx[assignment[i - 1]] += inst.x(i);
    sy[assignment[i - 1]] += inst.y(i);
    ++cnt[assignment[i - 1]];
  }
  double rss = 0;
  for (int i = 1; i <= inst.size(); ++i) {
    const int c = assignment[i - 1];
    rss += std::pow(inst.x(i) - sx[c] / cnt[c], 2) + std::pow(inst.y(i) - sy[c] / cnt[c], 2);
  }
  return rss;
}

}  // namespace

TEST(DefaultClusterCount, CapacityBased) {
  EXPECT_EQ(construct::default_cluster_count(c101_25()), 3);  // ceil(460 / 180)
  const StochasticInstance r = solomon::augment(solomon::first_n(solomon::load(data_path("R201.txt")), 25));
  EXPECT_EQ(construct::default_cluster_count(r), 1);  // ceil(332 / 900)
}

TEST(Kmeans, OneClusterPerRequest) {
  const StochasticInstance inst = c101_25();
  const Clustering c = construct::kmeans(inst, 25, 30, 0.0002, 1);
  EXPECT_DOUBLE_EQ(c.rss, 0.0);
  for (const auto& m : c.members()) EXPECT_EQ(m.size(), 1u);
}

TEST(Kmeans, SeparatedCloudsMatchBruteForce) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> jitter(0, 2);
  std::vector<Row> rows;
  for (int i = 0; i < 5; ++i) rows.push_back({10 + jitter(rng), 10 + jitter(rng), 1, 0, 100});
  for (int i = 0; i < 5; ++i) rows.push_back({80 + jitter(rng), 70 + jitter(rng), 1, 0, 100});
  const StochasticInstance inst = solomon::augment(make_base(200, {50, 50, 0, 1000}, rows));

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_assign;
  for (int mask = 1; mask < (1 << 10) - 1; ++mask) {
    std::vector<int> a(10);
    for (int i = 0; i < 10; ++i) a[i] = (mask >> i) & 1;
    const double r = rss_of(inst, a, 2);
    if (r < best) {
      best = r;
      best_assign = a;
    }
  }
  const Clustering c = construct::kmeans(inst, 2, 30, 1e9, 3);
  EXPECT_NEAR(c.rss, best, 1e-9);
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(c.assignment[i] == c.assignment[0], best_assign[i] == best_assign[0]) << i;
}

TEST(Kmeans, NearestCentroidAndRss) {
  const StochasticInstance inst = solomon::augment(solomon::first_n(solomon::load(data_path("RC101.txt")), 25));
  const Clustering c = construct::kmeans(inst, 4, 30, 0.0002, 7);
  double rss = 0;
  for (int i = 1; i <= inst.size(); ++i) {
    const auto d = [&](int j) {
      return std::pow(inst.x(i) - c.centroids[j].first, 2) + std::pow(inst.y(i) - c.centroids[j].second, 2);
    };
    for (int j = 0; j < c.k; ++j) EXPECT_LE(d(c.assignment[i - 1]), d(j));
    rss += d(c.assignment[i - 1]);
  }
  EXPECT_NEAR(c.rss, rss, 1e-9);
}

TEST(Kmeans, Errors) {
  const StochasticInstance inst = c101_25();
  EXPECT_THROW(construct::kmeans(inst, 26, 30, 0.0002, 1), ConfigError);
  EXPECT_THROW(construct::kmeans(inst, 0, 30, 0.0002, 1), ConfigError);
  EXPECT_THROW(construct::kmeans(inst, 2, 0, 0.0002, 1), ConfigError);
  EXPECT_THROW(construct::kmeans(inst, 2, 30, 0.0, 1), ConfigError);
}

TEST(GreedyInsert, OrdersByWindow) {
  const StochasticInstance inst = solomon::augment(make_base(
      200, {0, 0, 0, 1000}, {{1, 0, 1, 5, 50}, {2, 0, 1, 1, 50}, {3, 0, 1, 3, 50}, {4, 0, 1, 3, 40}}));
  EXPECT_EQ(construct::greedy_insert(inst, {1, 2, 3}), (std::vector<int>{2, 3, 1}));
  EXPECT_EQ(construct::greedy_insert(inst, {3, 4}), (std::vector<int>{4, 3}));
  EXPECT_EQ(construct::greedy_insert(inst, {1}), (std::vector<int>{1}));
}

TEST(BuildInitial, GenerousWindowsSingleTrip) {
  const StochasticInstance inst = solomon::augment(make_base(
      200, {0, 0, 0, 1000}, {{5, 0, 10, 40, 900}, {0, 5, 10, 10, 900}, {5, 5, 10, 30, 900}, {3, 3, 10, 20, 900}}));
  const Solution s = construct::build_initial(inst, ConstructParams{});
  EXPECT_EQ(s, (Solution{{{{2, 4, 3, 1}}}}));
}

TEST(BuildInitial, C101RegressionBaseline) {
  const StochasticInstance inst = c101_25();
  ConstructParams cp;
  cp.seed = 1;
  const Solution s = construct::build_initial(inst, cp);
  EXPECT_TRUE(model::is_feasible(inst, s));
  EXPECT_NEAR(model::evaluate(inst, s).scalar, 7595.588449168636, 1e-9);
  EXPECT_EQ(s, construct::build_initial(inst, cp));
}

TEST(BuildInitial, AlwaysFeasibleAndDeterministic) {
  for (const char* name : {"C102", "R101", "RC102", "C201", "R202", "RC201"}) {
    const StochasticInstance inst = solomon::augment(solomon::first_n(solomon::load(data_path(std::string(name) + ".txt")), 25));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ConstructParams cp;
      cp.seed = seed;
      const Solution s = construct::build_initial(inst, cp);
      EXPECT_TRUE(model::is_feasible(inst, s)) << name;
      EXPECT_EQ(s, construct::build_initial(inst, cp));
      EXPECT_TRUE(model::is_feasible(inst, construct::build_kmeans_only(inst, cp)));
    }
    EXPECT_TRUE(model::is_feasible(inst, construct::build_greedy(inst)));
  }
}

TEST(BuildInitial, OneClusterEqualsGreedyOnZeroVariance) {
  const StochasticInstance inst =
      solomon::augment(solomon::first_n(solomon::load(data_path("RC202.txt")), 25), deterministic());
  ConstructParams cp;
  cp.k = 1;
  EXPECT_EQ(construct::build_initial(inst, cp), construct::build_greedy(inst));
}
