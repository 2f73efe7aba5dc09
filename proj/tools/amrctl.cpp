// amrctl: command-line front end for the solver, the experiment protocol
// and the simulation/enumeration oracles.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ccamr/ccamr.hpp"

namespace {

using namespace ccamr;

struct Options {
  std::vector<std::string> instances;
  int first_n = 25;
  std::vector<std::string> algos{"pts"};
  int runs = 10;
  std::uint64_t seed = 1;
  AugmentConfig augment;
  SearchParams search;
  std::string format = "csv";
  std::string out;
};

void add_common(CLI::App* cmd, Options& o, bool with_instances = true) {
  if (with_instances) {
    cmd->add_option("--instance", o.instances, "Solomon file or directory of *.txt files (repeatable)")->required();
    cmd->add_option("--first-n", o.first_n, "keep the first N customers; 0 keeps all")->check(CLI::NonNegativeNumber);
  }
  cmd->add_option("--algo", o.algos, "pts, ts, ga, gk, kmeans, greedy (repeatable)")->delimiter(',');
  cmd->add_option("--runs", o.runs, "independent seeded runs")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "base seed; run r uses seed + r");
  cmd->add_option("--eps1", o.augment.eps1, "capacity risk level");
  cmd->add_option("--eps2", o.augment.eps2, "time-window risk level");
  cmd->add_option("--xi1", o.augment.xi1, "cost per AMR");
  cmd->add_option("--xi2", o.augment.xi2, "cost per expected time unit");
  cmd->add_option("--xi3", o.augment.xi3, "weight of expected delay");
  cmd->add_option("--pop", o.search.population, "population size");
  cmd->add_option("--iters", o.search.iterations, "search iterations");
  cmd->add_option("--xover", o.search.crossover, "crossover probability");
  cmd->add_option("--mut", o.search.mutation, "mutation probability");
  cmd->add_option("--tenure", o.search.tenure, "tabu tenure");
  cmd->add_option("--candidates", o.search.candidates, "sampled pairs per neighbourhood step");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "output file (default stdout)");
}

std::vector<NamedInstance> load_all(const Options& o) {
  o.augment.validate();
  std::vector<NamedInstance> out;
  for (const auto& path : bench::expand_paths(o.instances)) out.push_back(bench::load_instance(path, o.first_n, o.augment));
  if (out.empty()) throw ConfigError("no instance files found");
  return out;
}

std::vector<Algorithm> algorithms(const Options& o) {
  std::vector<Algorithm> out;
  for (const auto& a : o.algos) out.push_back(parse_algorithm(a));
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

void emit(const Options& o, const Report& rep) {
  std::string text;
  if (o.format == "json") {
    text = report::to_json(rep).dump(2) + "\n";
  } else {
    std::ostringstream ss;
    report::write_csv(ss, rep);
    text = ss.str();
  }
  if (o.out.empty()) std::cout << text;
  else write_file(o.out, text);
}

Report sim_report(const SimReport& r) {
  Table visits{"visits",
               {"amr", "trip", "node", "arrival_mean", "arrival_se", "waiting_mean", "start_mean", "earliness_mean",
                "delay_mean", "window_violation", "load_violation"},
               {}};
  for (const auto& v : r.visits)
    visits.rows.push_back({std::int64_t{v.amr}, std::int64_t{v.trip}, std::int64_t{v.node}, v.arrival.mean,
                           v.arrival.se, v.waiting.mean, v.start.mean, v.earliness.mean, v.delay.mean,
                           v.window_violation, v.load_violation});
  Table trips{"trips", {"amr", "trip", "capacity_violation", "return_mean"}, {}};
  for (const auto& t : r.trips)
    trips.rows.push_back({std::int64_t{t.amr}, std::int64_t{t.trip}, t.capacity_violation, t.return_arrival.mean});
  Table summary{"summary",
                {"samples", "truncated_draws", "f1_mean", "f1_se", "f2_mean", "f2_se", "delay_mean", "delay_se"},
                {{r.samples, r.truncated_draws, r.f1.mean, r.f1.se, r.f2.mean, r.f2.se, r.delay.mean, r.delay.se}}};
  Report rep;
  rep.tables = {std::move(visits), std::move(trips), std::move(summary)};
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chance-constrained multi-trip AMR routing"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "run solvers over instances");
  add_common(solve, o);
  std::string trace_path, solution_path;
  solve->add_option("--trace", trace_path, "search trace CSV (single instance and algorithm, run 0)");
  solve->add_option("--solution", solution_path, "best solution JSON (single instance and algorithm)");

  auto* initials = app.add_subcommand("initials", "compare Gk, k-means-only and greedy construction");
  add_common(initials, o);

  auto* sensitivity = app.add_subcommand("sensitivity", "sweep the capacity confidence level");
  add_common(sensitivity, o);
  std::vector<double> levels = bench::default_levels();
  sensitivity->add_option("--levels", levels, "confidence levels 1 - eps1")->delimiter(',');

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo replay of a solution");
  add_common(simulate, o);
  std::string sim_solution;
  std::int64_t samples = 100000;
  simulate->add_option("--solution", sim_solution, "solution JSON; default solves with the first --algo");
  simulate->add_option("--samples", samples, "Monte-Carlo samples")->check(CLI::PositiveNumber);

  auto* oracle_cmd = app.add_subcommand("oracle", "compare search against exhaustive enumeration");
  add_common(oracle_cmd, o, false);
  int tiny_n = 6, count = 20;
  std::string profile = "type1";
  oracle_cmd->add_option("--tiny-n", tiny_n, "requests per generated instance")->check(CLI::Range(1, 8));
  oracle_cmd->add_option("--count", count, "generated instances")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--profile", profile, "type1 or type2")->check(CLI::IsMember({"type1", "type2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    o.search.validate();
    if (*solve) {
      const auto instances = load_all(o);
      const auto algos = algorithms(o);
      const auto recs = bench::solve_runs(instances, algos, o.runs, o.seed, o.search);
      emit(o, bench::solve_report(instances, recs, algos));
      if (!trace_path.empty() || !solution_path.empty()) {
        if (instances.size() != 1 || algos.size() != 1)
          throw ConfigError("--trace and --solution need exactly one instance and one algorithm");
        if (!trace_path.empty()) {
          std::ostringstream ss;
          report::write_csv(ss, Report{{bench::trace_table(recs.front().trace)}});
          const std::string text = ss.str();
          write_file(trace_path, text.substr(text.find('\n') + 1));
        }
        if (!solution_path.empty()) {
          const RunRecord* best = &recs.front();
          for (const auto& r : recs)
            if (model::better(r.objective, r.solution, best->objective, best->solution)) best = &r;
          write_file(solution_path, solution_json(best->solution, best->objective).dump(2) + "\n");
        }
      }
    } else if (*initials) {
      emit(o, bench::initials_report(load_all(o), o.runs, o.seed, o.search));
    } else if (*sensitivity) {
      const auto algos = algorithms(o);
      emit(o, bench::sensitivity_report(load_all(o), levels, o.runs, o.seed, o.search, algos.front()));
    } else if (*simulate) {
      const auto instances = load_all(o);
      if (instances.size() != 1) throw ConfigError("simulate needs exactly one instance");
      const auto& ni = instances.front();
      Solution sol;
      if (!sim_solution.empty()) {
        std::ifstream f(sim_solution);
        if (!f) throw ConfigError("cannot read " + sim_solution);
        sol = nlohmann::json::parse(f).get<Solution>();
        model::validate(ni.inst, sol);
      } else {
        sol = bench::run_once(ni, algorithms(o).front(), o.search, o.seed, 0).solution;
      }
      const SimReport rep = oracle::simulate(ni.inst, sol, samples, o.seed);
      if (o.format == "json") {
        const std::string text = nlohmann::json(rep).dump(2) + "\n";
        if (o.out.empty()) std::cout << text;
        else write_file(o.out, text);
      } else {
        emit(o, sim_report(rep));
      }
    } else if (*oracle_cmd) {
      o.augment.validate();
      const TinyProfile prof = profile == "type1" ? TinyProfile::type1 : TinyProfile::type2;
      Table rows{"oracle", {"instance", "seed", "exhaustive_scalar", "search_scalar", "match", "feasible_count"}, {}};
      std::int64_t matches = 0;
      for (int i = 0; i < count; ++i) {
        const std::uint64_t s = o.seed + static_cast<std::uint64_t>(i);
        NamedInstance ni{"", oracle::gen_tiny(tiny_n, s, prof, o.augment)};
        ni.name = ni.inst.base.name;
        const oracle::ExhaustiveResult ex = oracle::exhaustive(ni.inst);
        const auto recs = bench::solve_runs({ni}, {algorithms(o).front()}, o.runs, o.seed, o.search);
        double best = recs.front().objective.scalar;
        for (const auto& r : recs) best = std::min(best, r.objective.scalar);
        const bool match = model::same_value(best, ex.objective.scalar);
        matches += match;
        rows.rows.push_back({ni.name, static_cast<std::int64_t>(s), ex.objective.scalar, best,
                             std::int64_t{match}, static_cast<std::int64_t>(ex.feasible_count)});
      }
      Table summary{"summary", {"instances", "matches"}, {{std::int64_t{count}, matches}}};
      emit(o, Report{{std::move(rows), std::move(summary)}});
    }
  } catch (const UnrepairableError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const InfeasibleInstance& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
