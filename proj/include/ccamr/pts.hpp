#pragma once

// Population-based tabu search over giant-tour chromosomes. Each iteration
// runs one tabu neighborhood step (2-opt or relocation, picked by roulette
// over adaptive weights) followed by a population phase (fill from the
// incumbent, crossover, mutation, dedup, repair). Every chromosome is
// decoded by depot-insertion repair, so every evaluated solution is feasible.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ccamr/construct.hpp"
#include "ccamr/errors.hpp"
#include "ccamr/model.hpp"

namespace ccamr {

/// Depot-free permutation of request ids.
using Chromosome = std::vector<int>;

enum class SearchMode { pts, ts, ga };

enum class Move { two_opt = 0, relocate = 1, none = 2 };

inline const char* move_name(Move m) {
  switch (m) {
    case Move::two_opt: return "2opt";
    case Move::relocate: return "relocate";
    default: return "none";
  }
}

struct SearchParams {
  int iterations = 50;
  int population = 120;
  double crossover = 0.7;
  double mutation = 0.15;
  double fill_ratio = 1.0;  // share of the population copied from the incumbent
  int tenure = 7;
  int candidates = 40;
  double initial_weight = 50;
  int weight_period = 10;
  ConstructParams construct;

  void validate() const {
    if (iterations < 0) throw ConfigError("iterations must be non-negative");
    if (population < 1) throw ConfigError("population must be positive");
    if (crossover < 0 || crossover > 1 || mutation < 0 || mutation > 1)
      throw ConfigError("crossover/mutation probabilities must lie in [0, 1]");
    if (fill_ratio < 0 || fill_ratio > 1) throw ConfigError("fill ratio must lie in [0, 1]");
    if (tenure < 0) throw ConfigError("tenure must be non-negative");
    if (candidates < 1) throw ConfigError("candidate count must be positive");
  }
};

/// n x n symmetric matrix of remaining tabu tenures, indexed by request id.
class TabuMatrix {
public:
  TabuMatrix() = default;
  explicit TabuMatrix(int n) : n_(n), cells_(static_cast<std::size_t>(n) * n, 0) {}

  int at(int j1, int j2) const { return cells_[index(j1, j2)]; }

  void mark(int j1, int j2, int tenure) {
    cells_[index(j1, j2)] = tenure;
    cells_[index(j2, j1)] = tenure;
  }

  void tick() {
    for (int& c : cells_)
      if (c > 0) --c;
  }

  bool symmetric() const {
    for (int a = 1; a <= n_; ++a)
      for (int b = a + 1; b <= n_; ++b)
        if (at(a, b) != at(b, a)) return false;
    return true;
  }

  int size() const { return n_; }

private:
  std::size_t index(int j1, int j2) const { return static_cast<std::size_t>(j1 - 1) * n_ + (j2 - 1); }

  int n_ = 0;
  std::vector<int> cells_;
};

struct OperatorWeights {
  double two_opt = 50;
  double relocate = 50;

  double& operator[](Move m) { return m == Move::two_opt ? two_opt : relocate; }

  // Rescale to sum 100, keeping the ratio.
  void renormalize() {
    const double s = two_opt + relocate;
    two_opt *= 100.0 / s;
    relocate *= 100.0 / s;
  }
};

struct Candidate {
  Chromosome chrom;
  Solution sol;
  Objective obj;
};

struct SearchState {
  Candidate current;
  Candidate best;
  TabuMatrix tabu_two_opt;
  TabuMatrix tabu_relocate;
  OperatorWeights weights;

  TabuMatrix& tabu(Move m) { return m == Move::two_opt ? tabu_two_opt : tabu_relocate; }
};

struct TraceRow {
  int iteration = 0;
  double incumbent_scalar = 0;
  double current_scalar = 0;
  Move op = Move::none;
  double p1 = 0, p2 = 0;
};

struct SearchResult {
  Solution best;
  Objective objective;
  Solution initial;
  Objective initial_objective;
  std::vector<TraceRow> trace;
};

namespace pts {

inline Chromosome encode(const Solution& sol) {
  Chromosome out;
  for (const auto& amr : sol.amrs)
    for (const auto& trip : amr) out.insert(out.end(), trip.begin(), trip.end());
  return out;
}

inline Solution decode(const StochasticInstance& inst, const Chromosome& chrom) {
  return model::repair(inst, chrom);
}

inline Candidate make_candidate(const StochasticInstance& inst, Chromosome chrom) {
  Candidate c;
  c.sol = decode(inst, chrom);
  c.obj = model::evaluate(inst, c.sol);
  c.chrom = std::move(chrom);
  return c;
}

inline bool better(const Candidate& a, const Candidate& b) { return model::better(a.obj, a.sol, b.obj, b.sol); }

namespace detail {

inline std::size_t position(const Chromosome& c, int id) {
  auto it = std::find(c.begin(), c.end(), id);
  if (it == c.end()) throw StructuralError("request " + std::to_string(id) + " not in chromosome");
  return static_cast<std::size_t>(it - c.begin());
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace detail

/// Reverses the segment between the positions of j1 and j2, inclusive.
inline Chromosome two_opt(Chromosome c, int j1, int j2) {
  auto a = detail::position(c, j1), b = detail::position(c, j2);
  if (a > b) std::swap(a, b);
  std::reverse(c.begin() + static_cast<std::ptrdiff_t>(a), c.begin() + static_cast<std::ptrdiff_t>(b) + 1);
  return c;
}

/// Moves j1 to immediately before j2.
inline Chromosome relocate(Chromosome c, int j1, int j2) {
  c.erase(c.begin() + static_cast<std::ptrdiff_t>(detail::position(c, j1)));
  c.insert(c.begin() + static_cast<std::ptrdiff_t>(detail::position(c, j2)), j1);
  return c;
}

inline Chromosome apply(Move m, const Chromosome& c, int j1, int j2) {
  return m == Move::two_opt ? two_opt(c, j1, j2) : relocate(c, j1, j2);
}

// fragment + rest, keeping first occurrences.
inline Chromosome prepend_dedup(std::span<const int> fragment, const Chromosome& rest) {
  Chromosome out;
  out.reserve(rest.size());
  std::vector<char> seen(rest.size() + 1, 0);
  auto push = [&](int id) {
    if (static_cast<std::size_t>(id) >= seen.size()) seen.resize(id + 1, 0);
    if (!seen[id]) {
      seen[id] = 1;
      out.push_back(id);
    }
  };
  for (int id : fragment) push(id);
  for (int id : rest) push(id);
  return out;
}

/// Fragment [a1, a1+len1) of p1 goes in front of p2 and fragment
/// [a2, a2+len2) of p2 in front of p1; duplicates are dropped.
inline std::pair<Chromosome, Chromosome> crossover_with(const Chromosome& p1, const Chromosome& p2, std::size_t a1,
                                                        std::size_t len1, std::size_t a2, std::size_t len2) {
  std::span<const int> f1(p1.data() + a1, len1), f2(p2.data() + a2, len2);
  return {prepend_dedup(f1, p2), prepend_dedup(f2, p1)};
}

inline std::pair<Chromosome, Chromosome> crossover(const Chromosome& p1, const Chromosome& p2,
                                                   std::mt19937_64& rng) {
  if (p1.empty()) return {p1, p2};
  const int n = static_cast<int>(p1.size());
  auto fragment = [&](std::size_t& a, std::size_t& len) {
    int x = detail::uniform_int(rng, 0, n - 1), y = detail::uniform_int(rng, 0, n - 1);
    if (x > y) std::swap(x, y);
    a = static_cast<std::size_t>(x);
    len = static_cast<std::size_t>(y - x + 1);
  };
  std::size_t a1, l1, a2, l2;
  fragment(a1, l1);
  fragment(a2, l2);
  return crossover_with(p1, p2, a1, l1, a2, l2);
}

/// Exchanges the disjoint segments [a, a+la) and [b, b+lb), a + la <= b.
inline Chromosome arc_swap(const Chromosome& c, std::size_t a, std::size_t la, std::size_t b, std::size_t lb) {
  assert(a + la <= b && b + lb <= c.size());
  Chromosome out;
  out.reserve(c.size());
  out.insert(out.end(), c.begin(), c.begin() + a);
  out.insert(out.end(), c.begin() + b, c.begin() + b + lb);
  out.insert(out.end(), c.begin() + a + la, c.begin() + b);
  out.insert(out.end(), c.begin() + a, c.begin() + a + la);
  out.insert(out.end(), c.begin() + b + lb, c.end());
  return out;
}

inline Chromosome node_swap(Chromosome c, std::size_t i, std::size_t j) {
  std::swap(c[i], c[j]);
  return c;
}

/// Arc swap or node swap with equal probability.
inline Chromosome mutate(const Chromosome& c, std::mt19937_64& rng) {
  const int n = static_cast<int>(c.size());
  if (n < 2) return c;
  if (detail::uniform01(rng) < 0.5) {
    // Four cut points 0 <= a < a_end <= b < b_end <= n.
    std::vector<int> cuts(4);
    for (;;) {
      for (int& x : cuts) x = detail::uniform_int(rng, 0, n);
      std::sort(cuts.begin(), cuts.end());
      if (cuts[0] < cuts[1] && cuts[2] < cuts[3]) break;
    }
    return arc_swap(c, cuts[0], cuts[1] - cuts[0], cuts[2], cuts[3] - cuts[2]);
  }
  const int i = detail::uniform_int(rng, 0, n - 1);
  int j = detail::uniform_int(rng, 0, n - 2);
  if (j >= i) ++j;
  return node_swap(c, i, j);
}

inline Move roulette(const OperatorWeights& w, std::mt19937_64& rng) {
  const double u = detail::uniform01(rng) * (w.two_opt + w.relocate);
  return u < w.two_opt ? Move::two_opt : Move::relocate;
}

inline SearchState init_state(const StochasticInstance& inst, const SearchParams& params, Candidate start) {
  SearchState s;
  s.current = start;
  s.best = std::move(start);
  s.tabu_two_opt = TabuMatrix(inst.size());
  s.tabu_relocate = TabuMatrix(inst.size());
  s.weights = {params.initial_weight, params.initial_weight};
  return s;
}

struct StepOutcome {
  Move op = Move::none;
  int j1 = 0, j2 = 0;
  bool improved = false;
};

/// One tabu iteration: sample candidate pairs for the roulette-selected
/// operator, take the best admissible neighbor (tabu unless it beats the
/// incumbent) as the new current even if it is worse, reward the operator
/// (+5 on a new incumbent, +2 otherwise) and mark the pair tabu.
inline StepOutcome neighborhood_step(const StochasticInstance& inst, const SearchParams& params, SearchState& state,
                                     std::mt19937_64& rng) {
  StepOutcome out;
  const int n = static_cast<int>(state.current.chrom.size());
  if (n < 2) return out;
  const Move op = roulette(state.weights, rng);
  TabuMatrix& tabu = state.tabu(op);

  Candidate chosen;
  int cj1 = 0, cj2 = 0;
  bool found = false;
  auto consider = [&](int j1, int j2, Candidate&& cand) {
    if (!found || better(cand, chosen)) {
      chosen = std::move(cand);
      cj1 = j1;
      cj2 = j2;
      found = true;
    }
  };

  std::vector<std::pair<int, int>> tabu_pairs;
  for (int c = 0; c < params.candidates; ++c) {
    const int a = detail::uniform_int(rng, 0, n - 1);
    int b = detail::uniform_int(rng, 0, n - 2);
    if (b >= a) ++b;
    const int j1 = state.current.chrom[a], j2 = state.current.chrom[b];
    Candidate cand = make_candidate(inst, apply(op, state.current.chrom, j1, j2));
    if (tabu.at(j1, j2) > 0 && !better(cand, state.best)) {
      tabu_pairs.emplace_back(j1, j2);
      continue;
    }
    consider(j1, j2, std::move(cand));
  }

  if (!found) {
    // Every sampled move is tabu: take a move that respects the tabu table,
    // or the least-tabu sampled move when the whole table is locked.
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) pairs.emplace_back(state.current.chrom[a], state.current.chrom[b]);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    for (auto [j1, j2] : pairs) {
      if (tabu.at(j1, j2) == 0) {
        consider(j1, j2, make_candidate(inst, apply(op, state.current.chrom, j1, j2)));
        break;
      }
    }
    if (!found) {
      auto least = *std::min_element(tabu_pairs.begin(), tabu_pairs.end(), [&](auto x, auto y) {
        return tabu.at(x.first, x.second) < tabu.at(y.first, y.second);
      });
      consider(least.first, least.second, make_candidate(inst, apply(op, state.current.chrom, least.first, least.second)));
    }
  }

  state.tabu_two_opt.tick();
  state.tabu_relocate.tick();
  out.op = op;
  out.j1 = cj1;
  out.j2 = cj2;
  if (better(chosen, state.best)) {
    state.best = chosen;
    state.weights[op] += 5;
    out.improved = true;
  } else {
    state.weights[op] += 2;
  }
  tabu.mark(cj1, cj2, params.tenure);
  state.current = std::move(chosen);
  assert(state.tabu_two_opt.symmetric() && state.tabu_relocate.symmetric());
  return out;
}

/// Population phase: fill from the incumbent (and random permutations for
/// the 1 - r share), pairwise crossover with probability mu, per-chromosome
/// mutation with probability rho, dedup, repair. The best member becomes the
/// current solution (and the incumbent if it improves on it). Returns the
/// deduplicated, evaluated population.
inline std::vector<Candidate> population_step(const StochasticInstance& inst, const SearchParams& params,
                                              SearchState& state, std::mt19937_64& rng) {
  const int size = params.population;
  const int copies = static_cast<int>(std::lround(params.fill_ratio * size));
  std::vector<Chromosome> pop;
  pop.reserve(size);
  for (int i = 0; i < copies; ++i) pop.push_back(state.best.chrom);
  Chromosome ids = state.best.chrom;
  std::sort(ids.begin(), ids.end());
  for (int i = copies; i < size; ++i) {
    std::shuffle(ids.begin(), ids.end(), rng);
    pop.push_back(ids);
  }
  std::shuffle(pop.begin(), pop.end(), rng);

  for (std::size_t i = 0; i + 1 < pop.size(); i += 2) {
    if (detail::uniform01(rng) < params.crossover) {
      auto [c1, c2] = crossover(pop[i], pop[i + 1], rng);
      pop[i] = std::move(c1);
      pop[i + 1] = std::move(c2);
    }
  }
  for (auto& c : pop)
    if (detail::uniform01(rng) < params.mutation) c = mutate(c, rng);

  std::set<Chromosome> seen;
  std::vector<Candidate> evaluated;
  for (auto& c : pop) {
    if (!seen.insert(c).second) continue;
    if (c == state.best.chrom)
      evaluated.push_back(state.best);
    else
      evaluated.push_back(make_candidate(inst, std::move(c)));
  }

  const Candidate* top = &evaluated.front();
  for (const auto& c : evaluated)
    if (better(c, *top)) top = &c;
  state.current = *top;
  if (better(state.current, state.best)) state.best = state.current;
  return evaluated;
}

/// Runs the search. `ts` disables the population phase, `ga` disables the
/// tabu step; `pts` runs both.
inline SearchResult run(const StochasticInstance& inst, const SearchParams& params, std::uint64_t seed,
                        SearchMode mode = SearchMode::pts) {
  params.validate();
  SearchResult result;
  ConstructParams cp = params.construct;
  cp.seed = seed;
  result.initial = construct::build_initial(inst, cp);
  result.initial_objective = model::evaluate(inst, result.initial);
  if (inst.size() == 0) {
    result.best = result.initial;
    result.objective = result.initial_objective;
    return result;
  }

  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL);
  SearchState state = init_state(inst, params, {encode(result.initial), result.initial, result.initial_objective});

  for (int ite = 0; ite < params.iterations; ++ite) {
    TraceRow row;
    row.iteration = ite + 1;
    if (mode != SearchMode::ga) row.op = neighborhood_step(inst, params, state, rng).op;
    if (params.weight_period > 0 && (ite + 1) % params.weight_period == 0) state.weights.renormalize();
    if (mode != SearchMode::ts) population_step(inst, params, state, rng);
    row.incumbent_scalar = state.best.obj.scalar;
    row.current_scalar = state.current.obj.scalar;
    row.p1 = state.weights.two_opt;
    row.p2 = state.weights.relocate;
    result.trace.push_back(row);
  }
  result.best = state.best.sol;
  result.objective = state.best.obj;
  return result;
}

}  // namespace pts
}  // namespace ccamr
