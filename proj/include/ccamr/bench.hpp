#pragma once

// Experimental protocol: repeated seeded runs over a set of instances,
// construction and search ablations, confidence-level sweeps, and the
// report tables they produce (CSV or JSON, losslessly interchangeable).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccamr/construct.hpp"
#include "ccamr/errors.hpp"
#include "ccamr/model.hpp"
#include "ccamr/pts.hpp"
#include "ccamr/solomon.hpp"

namespace ccamr {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(const std::string& col) const {
    auto it = std::find(columns.begin(), columns.end(), col);
    if (it == columns.end()) throw ConfigError("no column '" + col + "' in table " + name);
    return static_cast<std::size_t>(it - columns.begin());
  }
};

struct Report {
  std::vector<Table> tables;

  const Table& table(const std::string& name) const {
    for (const auto& t : tables)
      if (t.name == name) return t;
    throw ConfigError("no table '" + name + "' in report");
  }
};

inline bool cells_equal(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return false;
  if (const double* x = std::get_if<double>(&a)) {
    const double y = std::get<double>(b);
    return (std::isnan(*x) && std::isnan(y)) || *x == y;
  }
  return a == b;
}

inline bool reports_equal(const Report& a, const Report& b) {
  if (a.tables.size() != b.tables.size()) return false;
  for (std::size_t t = 0; t < a.tables.size(); ++t) {
    const Table &x = a.tables[t], &y = b.tables[t];
    if (x.name != y.name || x.columns != y.columns || x.rows.size() != y.rows.size()) return false;
    for (std::size_t r = 0; r < x.rows.size(); ++r) {
      if (x.rows[r].size() != y.rows[r].size()) return false;
      for (std::size_t c = 0; c < x.rows[r].size(); ++c)
        if (!cells_equal(x.rows[r][c], y.rows[r][c])) return false;
    }
  }
  return true;
}

namespace report {

// Shortest round-trip representation, always marked as floating point.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

inline std::string format_cell(const Cell& c) {
  if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (auto d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

inline Cell parse_cell(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!s.empty()) {
    char* end = nullptr;
    if (s.find_first_of(".eE") == std::string::npos) {
      const long long v = std::strtoll(s.c_str(), &end, 10);
      if (end && *end == '\0') return static_cast<std::int64_t>(v);
    } else {
      const double v = std::strtod(s.c_str(), &end);
      if (end && *end == '\0') return v;
    }
  }
  return s;
}

/// Each table is written as "# <name>", a header row and data rows; tables
/// are separated by a blank line.
inline void write_csv(std::ostream& os, const Report& rep) {
  bool first = true;
  for (const auto& t : rep.tables) {
    if (!first) os << '\n';
    first = false;
    os << "# " << t.name << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_cell(row[c]);
      os << '\n';
    }
  }
}

inline Report read_csv(std::istream& is) {
  Report rep;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      rep.tables.push_back({line.substr(2), {}, {}});
      if (!std::getline(is, line)) throw ParseError("table header missing", 0);
      rep.tables.back().columns = split(line);
      continue;
    }
    if (rep.tables.empty()) throw ParseError("data row before any table", 0);
    std::vector<Cell> row;
    for (const auto& tok : split(line)) row.push_back(parse_cell(tok));
    rep.tables.back().rows.push_back(std::move(row));
  }
  return rep;
}

inline nlohmann::json to_json(const Report& rep) {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : rep.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& c : row)
        std::visit([&](const auto& v) { r.push_back(v); }, c);
      rows.push_back(std::move(r));
    }
    tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
  }
  return {{"tables", tables}};
}

inline Report from_json(const nlohmann::json& j) {
  Report rep;
  for (const auto& t : j.at("tables")) {
    Table tab{t.at("name"), t.at("columns").get<std::vector<std::string>>(), {}};
    for (const auto& r : t.at("rows")) {
      std::vector<Cell> row;
      for (const auto& c : r) {
        if (c.is_null()) row.emplace_back(std::numeric_limits<double>::quiet_NaN());
        else if (c.is_number_integer()) row.emplace_back(c.get<std::int64_t>());
        else if (c.is_number()) row.emplace_back(c.get<double>());
        else row.emplace_back(c.get<std::string>());
      }
      tab.rows.push_back(std::move(row));
    }
    rep.tables.push_back(std::move(tab));
  }
  return rep;
}

}  // namespace report

enum class Algorithm { pts, ts, ga, gk, kmeans, greedy };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::pts: return "pts";
    case Algorithm::ts: return "ts";
    case Algorithm::ga: return "ga";
    case Algorithm::gk: return "gk";
    case Algorithm::kmeans: return "kmeans";
    case Algorithm::greedy: return "greedy";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  for (Algorithm a : {Algorithm::pts, Algorithm::ts, Algorithm::ga, Algorithm::gk, Algorithm::kmeans,
                      Algorithm::greedy})
    if (s == algorithm_name(a)) return a;
  throw ConfigError("unknown algorithm '" + s + "'");
}

struct NamedInstance {
  std::string name;
  StochasticInstance inst;
};

struct RunRecord {
  std::string instance;
  Algorithm algo = Algorithm::pts;
  int run = 0;
  std::uint64_t seed = 0;
  Solution solution;
  Objective objective;
  double cpu_seconds = 0;
  std::vector<TraceRow> trace;
};

namespace bench {

/// Loads a Solomon file, keeps the first `first_n` customers (0 = all) and
/// augments it.
inline NamedInstance load_instance(const std::string& path, int first_n, const AugmentConfig& cfg) {
  SolomonInstance base = solomon::load(path);
  if (first_n > 0) base = solomon::first_n(std::move(base), first_n);
  std::string name = base.name.empty() ? std::filesystem::path(path).stem().string() : base.name;
  return {std::move(name), solomon::augment(base, cfg)};
}

/// Expands directories into their *.txt files; result is sorted by path
/// within each directory argument.
inline std::vector<std::string> expand_paths(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    if (std::filesystem::is_directory(a)) {
      std::vector<std::string> files;
      for (const auto& e : std::filesystem::directory_iterator(a))
        if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path().string());
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(a);
    }
  }
  return out;
}

inline RunRecord run_once(const NamedInstance& ni, Algorithm algo, const SearchParams& params, std::uint64_t seed,
                          int run) {
  RunRecord rec;
  rec.instance = ni.name;
  rec.algo = algo;
  rec.run = run;
  rec.seed = seed;
  ConstructParams cp = params.construct;
  cp.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  switch (algo) {
    case Algorithm::pts:
    case Algorithm::ts:
    case Algorithm::ga: {
      const SearchMode mode = algo == Algorithm::pts ? SearchMode::pts
                              : algo == Algorithm::ts ? SearchMode::ts
                                                      : SearchMode::ga;
      SearchResult res = pts::run(ni.inst, params, seed, mode);
      rec.solution = std::move(res.best);
      rec.trace = std::move(res.trace);
      break;
    }
    case Algorithm::gk: rec.solution = construct::build_initial(ni.inst, cp); break;
    case Algorithm::kmeans: rec.solution = construct::build_kmeans_only(ni.inst, cp); break;
    case Algorithm::greedy: rec.solution = construct::build_greedy(ni.inst); break;
  }
  rec.objective = model::evaluate(ni.inst, rec.solution);
  rec.cpu_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

struct Aggregate {
  double best = std::numeric_limits<double>::infinity();
  double mean = 0, cpu = 0, m = 0, delay = 0;
  int count = 0;
};

inline Aggregate aggregate(const std::vector<RunRecord>& recs, const std::string& instance, Algorithm algo) {
  Aggregate a;
  for (const auto& r : recs) {
    if (r.instance != instance || r.algo != algo) continue;
    a.best = std::min(a.best, r.objective.scalar);
    a.mean += r.objective.scalar;
    a.cpu += r.cpu_seconds;
    a.m += r.objective.m;
    a.delay += r.objective.delay;
    ++a.count;
  }
  if (a.count) {
    a.mean /= a.count;
    a.cpu /= a.count;
    a.m /= a.count;
    a.delay /= a.count;
  }
  return a;
}

inline double relative_gap(double reference, double value) { return (reference - value) / reference * 100.0; }

/// Spearman rank correlation with average ranks for ties; NaN when either
/// series is constant.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

inline Table runs_table(const std::vector<RunRecord>& recs) {
  Table t{"runs", {"instance", "algo", "run", "seed", "scalar", "f1", "f2", "delay", "m", "cpu_seconds"}, {}};
  for (const auto& r : recs)
    t.rows.push_back({r.instance, std::string(algorithm_name(r.algo)), std::int64_t{r.run},
                      static_cast<std::int64_t>(r.seed), r.objective.scalar, r.objective.f1, r.objective.f2,
                      r.objective.delay, std::int64_t{r.objective.m}, r.cpu_seconds});
  return t;
}

inline std::vector<RunRecord> solve_runs(const std::vector<NamedInstance>& instances,
                                         const std::vector<Algorithm>& algos, int runs, std::uint64_t seed,
                                         const SearchParams& params) {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  std::vector<RunRecord> recs;
  for (const auto& ni : instances)
    for (Algorithm a : algos)
      for (int r = 0; r < runs; ++r) recs.push_back(run_once(ni, a, params, seed + static_cast<std::uint64_t>(r), r));
  return recs;
}

/// Per-run rows, per-(instance, algo) f_best / f_ave / CPU, and the
/// G1 = (f_ave^TS - f_ave^PTS)/f_ave^PTS*100, G2 (GA) gaps when available.
inline Report solve_report(const std::vector<NamedInstance>& instances, const std::vector<RunRecord>& recs,
                           const std::vector<Algorithm>& algos) {
  Report rep;
  rep.tables.push_back(runs_table(recs));
  Table summary{"summary", {"instance", "algo", "runs", "f_best", "f_ave", "m_ave", "delay_ave", "cpu_ave"}, {}};
  for (const auto& ni : instances)
    for (Algorithm a : algos) {
      const Aggregate g = aggregate(recs, ni.name, a);
      summary.rows.push_back({ni.name, std::string(algorithm_name(a)), std::int64_t{g.count}, g.best, g.mean, g.m,
                              g.delay, g.cpu});
    }
  rep.tables.push_back(std::move(summary));

  const auto has = [&](Algorithm a) { return std::find(algos.begin(), algos.end(), a) != algos.end(); };
  if (has(Algorithm::pts) && (has(Algorithm::ts) || has(Algorithm::ga))) {
    Table gaps{"gaps", {"instance", "G1", "G2"}, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& ni : instances) {
      const double p = aggregate(recs, ni.name, Algorithm::pts).mean;
      const double g1 = has(Algorithm::ts) ? -relative_gap(p, aggregate(recs, ni.name, Algorithm::ts).mean) : nan;
      const double g2 = has(Algorithm::ga) ? -relative_gap(p, aggregate(recs, ni.name, Algorithm::ga).mean) : nan;
      gaps.rows.push_back({ni.name, g1, g2});
    }
    rep.tables.push_back(std::move(gaps));
  }
  return rep;
}

/// Gk and k-means-only `runs` times each, greedy once;
/// Imp1 = (f_ave^k - f_ave^Gk)/f_ave^k*100, Imp2 = (f^G - f_ave^Gk)/f^G*100.
inline Report initials_report(const std::vector<NamedInstance>& instances, int runs, std::uint64_t seed,
                              const SearchParams& params) {
  std::vector<RunRecord> recs;
  for (const auto& ni : instances) {
    auto part = solve_runs({ni}, {Algorithm::gk, Algorithm::kmeans}, runs, seed, params);
    recs.insert(recs.end(), part.begin(), part.end());
    recs.push_back(run_once(ni, Algorithm::greedy, params, seed, 0));
  }

  Report rep;
  rep.tables.push_back(runs_table(recs));
  Table summary{"summary",
                {"instance", "f_ave_gk", "f_best_gk", "f_ave_kmeans", "f_best_kmeans", "imp1", "f_greedy", "imp2"},
                {}};
  for (const auto& ni : instances) {
    const Aggregate gk = aggregate(recs, ni.name, Algorithm::gk);
    const Aggregate km = aggregate(recs, ni.name, Algorithm::kmeans);
    const Aggregate gr = aggregate(recs, ni.name, Algorithm::greedy);
    summary.rows.push_back({ni.name, gk.mean, gk.best, km.mean, km.best, relative_gap(km.mean, gk.mean), gr.mean,
                            relative_gap(gr.mean, gk.mean)});
  }
  rep.tables.push_back(std::move(summary));
  return rep;
}

inline const std::vector<double>& default_levels() {
  static const std::vector<double> levels{0.6, 0.7, 0.8, 0.9, 0.95};
  return levels;
}

/// Re-solves every instance at each capacity confidence level 1 - eps1 and
/// reports total delayed service time (sum of expected delays) and AMR count.
inline Report sensitivity_report(const std::vector<NamedInstance>& instances, const std::vector<double>& levels,
                                 int runs, std::uint64_t seed, const SearchParams& params,
                                 Algorithm algo = Algorithm::pts) {
  for (double l : levels)
    if (!(l > 0.5 && l < 1.0)) throw ConfigError("confidence levels must lie in (0.5, 1)");
  Table rtab{"runs", {"instance", "level", "run", "seed", "tds", "m", "scalar", "cpu_seconds"}, {}};
  Table summary{"summary", {"instance", "level", "tds_ave", "m_ave"}, {}};
  std::vector<double> tds_mean(levels.size(), 0.0), m_mean(levels.size(), 0.0);
  for (const auto& ni : instances) {
    for (std::size_t li = 0; li < levels.size(); ++li) {
      NamedInstance variant = ni;
      variant.inst.eps1 = 1.0 - levels[li];
      double tds = 0, m = 0;
      for (int r = 0; r < runs; ++r) {
        const RunRecord rec = run_once(variant, algo, params, seed + static_cast<std::uint64_t>(r), r);
        rtab.rows.push_back({ni.name, levels[li], std::int64_t{r}, static_cast<std::int64_t>(rec.seed),
                             rec.objective.delay, std::int64_t{rec.objective.m}, rec.objective.scalar,
                             rec.cpu_seconds});
        tds += rec.objective.delay;
        m += rec.objective.m;
      }
      summary.rows.push_back({ni.name, levels[li], tds / runs, m / runs});
      tds_mean[li] += tds / runs / static_cast<double>(instances.size());
      m_mean[li] += m / runs / static_cast<double>(instances.size());
    }
  }
  Table by_level{"levels", {"level", "tds_mean", "m_mean"}, {}};
  for (std::size_t li = 0; li < levels.size(); ++li) by_level.rows.push_back({levels[li], tds_mean[li], m_mean[li]});
  Table trend{"trend", {"spearman_m", "spearman_tds"}, {{spearman(levels, m_mean), spearman(levels, tds_mean)}}};

  Report rep;
  rep.tables = {std::move(rtab), std::move(summary), std::move(by_level), std::move(trend)};
  return rep;
}

inline Table trace_table(const std::vector<TraceRow>& trace) {
  Table t{"trace", {"iteration", "incumbent_scalar", "current_scalar", "operator", "weights_p1", "weights_p2"}, {}};
  for (const auto& r : trace)
    t.rows.push_back({std::int64_t{r.iteration}, r.incumbent_scalar, r.current_scalar, std::string(move_name(r.op)),
                      r.p1, r.p2});
  return t;
}

}  // namespace bench
}  // namespace ccamr
