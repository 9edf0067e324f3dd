// nearopt command-line driver.
//
// Exit codes: 0 success, 1 infeasible or unbounded, 2 input error,
// 3 internal invariant failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nearopt/analytic_oracle.hpp"
#include "nearopt/conditions.hpp"
#include "nearopt/esom.hpp"
#include "nearopt/io.hpp"
#include "nearopt/lp.hpp"
#include "nearopt/nearopt.hpp"
#include "nearopt/pareto.hpp"

namespace fs = std::filesystem;
using namespace nearopt;

namespace {

enum Exit { kOk = 0, kTerminal = 1, kInput = 2, kInvariant = 3 };

/// Solve status that ends a command with exit code 1.
struct TerminalStatus : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string model;
  std::string out = ".";
  double tol_feas = Tolerances{}.feasibility;
  double tol_opt = Tolerances{}.optimality;
  std::uint64_t seed = 20240601;
  std::size_t jobs = 1;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

struct Session {
  const Globals& globals;
  DenseSimplexBackend backend;
  io::ResolvedModel model;
  io::RunManifest manifest;
  fs::path out;

  explicit Session(const Globals& g, std::string command)
      : globals(g), backend(Tolerances{g.tol_feas, g.tol_opt}) {
    if (!(g.tol_feas > 0.0) || !(g.tol_opt > 0.0)) throw ModelError("tolerances must be positive");
    manifest.command = std::move(command);
    manifest.solver = backend.name();
    manifest.tolerances = backend.tolerances();
    manifest.seed = g.seed;
    manifest.jobs = g.jobs;
    manifest.started = utc_now();
    out = g.out;
  }

  void load() {
    if (globals.model.empty()) throw ModelError("--model is required for '" + manifest.command + "'");
    const std::string bytes = io::read_file(globals.model);
    manifest.input_digest = io::digest(bytes);
    model = io::resolve(io::parse_model(bytes));
  }

  void write(const std::string& name, const std::string& content) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!fs::is_directory(out)) throw io::FileError("output directory '" + out.string() + "' is not usable");
    io::write_atomic(out / name, content);
  }

  void finish() {
    manifest.finished = utc_now();
    write("manifest.json", io::manifest_json(manifest));
  }
};

std::size_t objective_key(const LinearProgram& lp, const std::string& key) {
  if (const auto k = lp.objective_index(key)) return *k;
  char* end = nullptr;
  const unsigned long v = std::strtoul(key.c_str(), &end, 10);
  if (!key.empty() && *end == '\0' && v < lp.num_objectives()) return v;
  throw ModelError("unknown objective '" + key + "'");
}

Selector selector_key(const io::ResolvedModel& model, const std::string& key) {
  if (const auto it = model.selectors.find(key); it != model.selectors.end()) return it->second;
  // '+' joins registry names and variable names; overlaps count once
  std::vector<std::size_t> indices;
  std::stringstream list(key);
  for (std::string name; std::getline(list, name, '+');) {
    if (const auto it = model.selectors.find(name); it != model.selectors.end()) {
      for (std::size_t i : it->second.indices()) indices.push_back(i);
    } else if (const auto index = model.program.variable_index(name)) {
      indices.push_back(*index);
    } else {
      throw ModelError("unknown selector or variable '" + name + "'");
    }
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return Selector::from_indices(model.program.num_variables(), indices);
}

std::vector<Real> parse_levels(const std::string& text) {
  std::vector<Real> out;
  std::stringstream list(text);
  for (std::string item; std::getline(list, item, ',');) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !std::isfinite(v)) throw ModelError("bad number '" + item + "' in list");
    out.push_back(v);
  }
  if (out.empty()) throw ModelError("empty list");
  return out;
}

ParetoFront build_front(Session& s, const std::vector<Real>& schedule, const std::string& free_key) {
  const std::size_t free = objective_key(s.model.program, free_key);
  s.manifest.schedule = schedule;
  s.manifest.free_objective = free;
  try {
    ParetoFront front = generate_front(s.model.program, schedule, free, s.backend, {s.globals.jobs, true});
    for (const auto& w : front.warnings) std::cerr << "warning: " << w << "\n";
    s.manifest.front_size = front.size();
    s.write("front.csv", io::front_csv(front, s.model.program, free));
    s.write("front.json", io::front_json(front, s.model.program));
    return front;
  } catch (const FrontError& e) {
    throw TerminalStatus(e.what());
  }
}

int run_solve(const Globals& g, const std::string& objective) {
  Session s(g, "solve");
  s.load();
  const LinearProgram& lp = s.model.program;
  std::vector<std::size_t> targets;
  if (objective.empty()) {
    for (std::size_t k = 0; k < lp.num_objectives(); ++k) targets.push_back(k);
  } else {
    targets.push_back(objective_key(lp, objective));
  }
  std::ostringstream json;
  json << "{\n  \"solutions\": [";
  bool terminal = false;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::size_t k = targets[i];
    const SolveOutcome out = s.backend.solve(lp, k, Direction::Minimize);
    std::cout << lp.objective(k).label << ": " << to_string(out.status);
    if (out.objective_value) std::cout << " " << io::format_number(*out.objective_value);
    std::cout << "\n";
    json << (i ? ",\n" : "\n") << "    {\"objective\": " << nlohmann::json(lp.objective(k).label).dump()
         << ", \"status\": \"" << to_string(out.status) << "\"";
    if (out.optimal()) {
      json << ", \"value\": " << io::format_number(*out.objective_value) << ", \"values\": [";
      for (std::size_t j = 0; j < lp.num_objectives(); ++j) {
        json << (j ? ", " : "") << io::format_number(evaluate(lp.objective(j), *out.point));
      }
      json << "]";
      if (s.model.energy) {
        const esom::EnergyReport r = esom::report(out, *s.model.compiled, *s.model.energy);
        json << ", \"endogenous\": " << io::format_number(r.endogenous)
             << ", \"exogenous\": " << io::format_number(r.exogenous)
             << ", \"gwp\": " << io::format_number(r.gwp) << ", \"resources\": {";
        bool first = true;
        for (const auto& [name, energy] : r.resource_energy) {
          json << (first ? "" : ", ") << nlohmann::json(name).dump() << ": " << io::format_number(energy);
          first = false;
        }
        json << "}";
        std::cout << "  endogenous " << io::format_number(r.endogenous) << " exogenous "
                  << io::format_number(r.exogenous) << " gwp " << io::format_number(r.gwp) << "\n";
      }
    } else {
      terminal = true;
    }
    json << "}";
  }
  json << "\n  ]";
  if (s.model.energy && !s.model.energy->notes.empty()) {
    json << ",\n  \"notes\": " << nlohmann::json(s.model.energy->notes).dump();
    std::cout << "note: " << s.model.energy->notes << "\n";
  }
  json << "\n}\n";
  s.write("solve.json", json.str());
  s.finish();
  return terminal ? kTerminal : kOk;
}

int run_pareto(const Globals& g, const std::string& epsilons, const std::string& free_key) {
  Session s(g, "pareto");
  s.load();
  const std::vector<Real> schedule = epsilons.empty() ? default_front_schedule() : parse_levels(epsilons);
  const ParetoFront front = build_front(s, schedule, free_key);
  for (const auto& p : front.points) {
    std::cout << to_string(p.provenance.method) << " " << io::format_number(p.provenance.parameter);
    for (Eigen::Index k = 0; k < p.objectives.size(); ++k) std::cout << " " << io::format_number(p.objectives(k));
    std::cout << "\n";
  }
  const SpreadReport spread = spread_report(front);
  std::cout << "points " << spread.count << " coverage " << io::format_number(spread.coverage);
  if (spread.largest_gap) std::cout << " largest_gap " << io::format_number(*spread.largest_gap);
  std::cout << "\n";
  s.finish();
  return kOk;
}

int run_neccond(const Globals& g, const std::string& selector_name, const std::vector<std::string>& eps_pairs,
                bool single, const std::string& epsilons, const std::string& free_key) {
  Session s(g, "neccond");
  s.load();
  const LinearProgram& lp = s.model.program;
  const Selector selector = selector_key(s.model, selector_name);
  s.manifest.selector = selector_name;

  std::vector<std::pair<std::size_t, Real>> eps;
  for (const std::string& pair : eps_pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ModelError("--eps expects objective=value, got '" + pair + "'");
    eps.emplace_back(objective_key(lp, pair.substr(0, eq)), parse_levels(pair.substr(eq + 1)).at(0));
  }
  if (eps.empty()) throw ModelError("--eps is required");

  NecessaryConditionReport report;
  if (single) {
    if (eps.size() != 1) throw ModelError("--single takes exactly one objective=value pair");
    const SolveOutcome base = s.backend.solve(lp, eps[0].first, Direction::Minimize);
    if (!base.optimal()) throw TerminalStatus("objective is " + std::string(to_string(base.status)));
    report = necessary_condition_single(lp, eps[0].first, eps[0].second, selector, s.backend);
    s.manifest.epsilons = {std::vector<Real>{eps[0].second}};
  } else {
    Vector values = Vector::Constant(static_cast<Eigen::Index>(lp.num_objectives()), std::nan(""));
    for (const auto& [k, v] : eps) values(static_cast<Eigen::Index>(k)) = v;
    if (values.hasNaN()) throw ModelError("--multi needs one --eps entry per objective");
    const ParetoFront front =
        build_front(s, epsilons.empty() ? default_front_schedule() : parse_levels(epsilons), free_key);
    report = necessary_condition_multi(lp, front.points, EpsilonVector(values), selector, s.backend, g.jobs);
    s.manifest.epsilons = {std::vector<Real>(values.data(), values.data() + values.size())};
  }
  std::cout << to_string(report.bound) << " threshold " << io::format_number(report.threshold) << "\n";
  s.write("neccond.json", io::report_json(report, lp));
  s.finish();
  return kOk;
}

int run_sweep(const Globals& g, const std::string& selector_name, const std::string& grid, const std::string& epsilons,
              const std::string& free_key) {
  Session s(g, "sweep");
  s.load();
  const LinearProgram& lp = s.model.program;
  if (lp.num_objectives() != 2) throw ModelError("sweep needs a two-objective model");
  const Selector selector = selector_key(s.model, selector_name);
  s.manifest.selector = selector_name;

  std::vector<Real> rows = default_sweep_levels();
  std::vector<Real> cols = rows;
  if (!grid.empty()) {
    const auto semi = grid.find(';');
    rows = parse_levels(grid.substr(0, semi));
    cols = semi == std::string::npos ? rows : parse_levels(grid.substr(semi + 1));
  }
  s.manifest.row_levels = rows;
  s.manifest.column_levels = cols;

  const ParetoFront front =
      build_front(s, epsilons.empty() ? default_front_schedule() : parse_levels(epsilons), free_key);
  const SweepResult result = sweep(lp, front.points, rows, cols, selector, s.backend, g.jobs);
  s.write("sweep.csv", io::sweep_csv(result));
  s.write("sweep.json", io::sweep_json(result, lp));
  std::cout << io::sweep_csv(result);
  if (!result.monotone) {
    s.finish();
    throw InvariantError("sweep thresholds are not monotone in epsilon");
  }
  s.finish();
  return kOk;
}

int run_oracle(const Globals& g, std::size_t count) {
  Session s(g, "oracle");
  using namespace oracle;
  const ScalarFunctionPair pair;
  bool ok = true;
  std::ostringstream log;
  auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    log << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    ok = ok && pass;
  };
  auto near = [](Real a, Real b, Real tol) { return std::abs(a - b) <= tol + 1e-12; };
  auto show = [](const Interval& i) { return "[" + io::format_number(i.lower) + ", " + io::format_number(i.upper) + "]"; };

  const Interval single = grid_epsilon_space(pair, Which::F1, {0.25}).hull();
  check("single-objective space", near(single.lower, 0.263, 1e-3) && near(single.upper, 0.487, 1e-3), show(single));

  // Union of the two single-objective spaces. Capping both objectives at every
  // front point (the box union) is a different, narrower set, reported alongside.
  const Interval f1 = grid_epsilon_space(pair, Which::F1, {0.25}).hull();
  const Interval f2 = grid_epsilon_space(pair, Which::F2, {0.6}).hull();
  const Interval per_objective{std::min(f1.lower, f2.lower), std::max(f1.upper, f2.upper)};
  check("single-space union", near(per_objective.lower, 0.263, 1e-3) && near(per_objective.upper, 1.05, 1e-3),
        show(per_objective));
  const Interval boxes =
      grid_epsilon_space(pair, Which::Both, {0.25, 0.6}, linspace(0.375, 0.75, 3751)).hull();
  log << "INFO front box union: " << show(boxes) << "\n";

  const Interval box = grid_epsilon_space(pair, Which::Both, {0.25, 0.6}, {0.6}).hull();
  check("anchor box space", near(box.lower, 0.395, 1e-3) && near(box.upper, 0.65, 1e-3), show(box));

  const std::vector<std::pair<Real, Real>> list1 = {{2.0, 2.91}, {3.41, 1.85}, {7.62, 1.5}};
  const auto tuples = grid_pareto(pair, 3, ParetoSpacing::ByX);
  bool lists = tuples.size() == list1.size();
  for (std::size_t i = 0; lists && i < tuples.size(); ++i) {
    lists = near(round_significant(tuples[i](0), 3), list1[i].first, 0.01) &&
            near(round_significant(tuples[i](1), 3), list1[i].second, 0.01);
  }
  check("three-point front", lists, std::to_string(tuples.size()) + " tuples");

  const CorpusResult corpus = tiny_program_corpus(g.seed, count, s.backend);
  check("tiny program corpus", corpus.agreements == corpus.programs,
        std::to_string(corpus.agreements) + "/" + std::to_string(corpus.programs) + " agree, worst gap " +
            io::format_number(corpus.worst_gap));
  for (const auto& d : corpus.disagreements) log << "  " << d << "\n";

  std::cout << log.str();
  s.write("oracle.txt", log.str());
  s.finish();
  return ok ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-optimal necessary conditions for multi-objective linear programs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  if (const char* env = std::getenv("NEAROPT_JOBS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end == '\0' && v > 0) g.jobs = v;
  }
  app.add_option("--model", g.model, "Model JSON file");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--tol-feas", g.tol_feas, "Feasibility tolerance")->capture_default_str();
  app.add_option("--tol-opt", g.tol_opt, "Optimality tolerance")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for the random program corpus")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Parallel solves (NEAROPT_JOBS)")->check(CLI::PositiveNumber);

  std::string objective;
  auto* solve_cmd = app.add_subcommand("solve", "Minimise each objective");
  solve_cmd->add_option("--objective", objective, "Objective label or index (default: all)");

  std::string epsilons;
  std::string free_key = "1";
  auto* pareto_cmd = app.add_subcommand("pareto", "Relative epsilon-constraint front");
  pareto_cmd->add_option("--epsilons", epsilons, "Comma-separated schedule");
  pareto_cmd->add_option("--free-objective", free_key, "Objective left unconstrained")->capture_default_str();

  std::string selector;
  std::vector<std::string> eps_pairs;
  bool single = false;
  bool multi = false;
  auto* neccond_cmd = app.add_subcommand("neccond", "Threshold of the necessary condition d'x >= c");
  neccond_cmd->add_option("--selector", selector, "Selector name or var+var+...")->required();
  neccond_cmd->add_option("--eps", eps_pairs, "objective=value pairs")->delimiter(',');
  auto* single_flag = neccond_cmd->add_flag("--single", single, "Exact threshold for one objective");
  neccond_cmd->add_flag("--multi", multi, "Upper bound over a front (default)")->excludes(single_flag);
  neccond_cmd->add_option("--epsilons", epsilons, "Front schedule");
  neccond_cmd->add_option("--free-objective", free_key, "Front free objective");

  std::string grid;
  auto* sweep_cmd = app.add_subcommand("sweep", "Threshold heatmap over an epsilon grid");
  sweep_cmd->add_option("--selector", selector, "Selector name or var+var+...")->required();
  sweep_cmd->add_option("--grid", grid, "Levels 'a,b,c' or 'rows;cols'");
  sweep_cmd->add_option("--epsilons", epsilons, "Front schedule");
  sweep_cmd->add_option("--free-objective", free_key, "Front free objective");

  std::size_t count = 200;
  auto* oracle_cmd = app.add_subcommand("oracle", "Analytic golden checks and solver equivalence corpus");
  oracle_cmd->add_option("--count", count, "Random programs in the corpus")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*solve_cmd) return run_solve(g, objective);
    if (*pareto_cmd) return run_pareto(g, epsilons, free_key);
    if (*neccond_cmd) return run_neccond(g, selector, eps_pairs, single, epsilons, free_key);
    if (*sweep_cmd) return run_sweep(g, selector, grid, epsilons, free_key);
    if (*oracle_cmd) return run_oracle(g, count);
  } catch (const TerminalStatus& e) {
    std::cerr << "nearopt: " << e.what() << "\n";
    return kTerminal;
  } catch (const InvariantError& e) {
    std::cerr << "nearopt: invariant failure: " << e.what() << "\n";
    return kInvariant;
  } catch (const ModelError& e) {
    std::cerr << "nearopt: input error: " << e.what() << "\n";
    return kInput;
  } catch (const io::FileError& e) {
    std::cerr << "nearopt: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "nearopt: internal error: " << e.what() << "\n";
    return kInvariant;
  }
  return kInput;
}
