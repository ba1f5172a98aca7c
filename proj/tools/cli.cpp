#include "cli.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "permalloc/criterion.hpp"
#include "permalloc/dynamics.hpp"
#include "permalloc/error.hpp"
#include "permalloc/raceway.hpp"
#include "permalloc/serialize.hpp"
#include "permalloc/solvers.hpp"
#include "reproduce.hpp"

namespace permalloc::cli {

namespace {

struct Settings {
  std::string system_path;
  std::string scenario_path;
  std::string grid_path;
  std::string out_path;
  std::string mode = "both";
  bool exact = true;
  unsigned workers = 1;
  std::size_t n_cap = kDefaultEnumerationCap;
  std::uint64_t seed = 0;
  std::size_t random_n = 0;
  std::string perm;
  std::string x0;
  std::size_t periods = 10;
  std::size_t samples = 10;
  bool json = false;
  bool heuristic = false;
  std::string columns = "mu_max,mu_plus,criterion,pmax_equals_pplus";
  std::uint64_t budget = SweepOptions{}.budget;
  std::string figure;
  std::size_t layers = 0;
  double period = 0.0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << text;
}

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Positive u, v in [0.1, 1) and d in [0.05, 0.95).
AllocationSystem random_system(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("--random needs N >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> u(n), v(n), d(n);
  for (auto& x : u) x = 0.1 + 0.9 * unit_draw(rng);
  for (auto& x : v) x = 0.1 + 0.9 * unit_draw(rng);
  for (auto& x : d) x = 0.05 + 0.9 * unit_draw(rng);
  return AllocationSystem(std::move(u), std::move(v), std::move(d));
}

struct LoadedSystem {
  SystemInput input;
  Json config;
};

LoadedSystem load_system(const Settings& s, std::ostream& err, bool allow_scenario) {
  const int sources = !s.system_path.empty() + (s.random_n > 0) +
                      (allow_scenario && !s.scenario_path.empty());
  if (sources != 1) {
    throw InvalidArgument(allow_scenario ? "give exactly one of --system, --random, --scenario"
                                         : "give exactly one of --system, --random");
  }
  LoadedSystem out;
  if (!s.system_path.empty()) {
    const Json j = parse_json(read_file(s.system_path), s.system_path);
    out.input = system_from_json(j, [&err](std::string_view m) { err << "warning: " << m << '\n'; });
    out.config = j;
  } else if (s.random_n > 0) {
    out.input.system = random_system(s.random_n, s.seed);
    out.config = Json{{"random", s.random_n}};
  } else {
    const RacewayScenario sc = scenario_from_json(parse_json(read_file(s.scenario_path), s.scenario_path));
    out.input.system = build_han_system(sc).system;
    out.config = Json{{"scenario", scenario_to_json(sc)}};
  }
  return out;
}

Permutation load_perm(const std::string& text, std::size_t n) {
  if (text.empty()) return Permutation::identity(n);
  if (text.front() == '[') return permutation_from_json(parse_json(text, "--perm"), n);
  return Permutation::parse_cycles(n, text);
}

Json base_config(const char* command, const Settings& s) {
  Json c;
  c["command"] = command;
  c["version"] = kVersion;
  c["seed"] = s.seed;
  return c;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int cmd_solve(const Settings& s, std::ostream& out, std::ostream& err) {
  const LoadedSystem loaded = load_system(s, err, false);
  const AllocationSystem& sys = loaded.input.system;
  const Mode mode = parse_mode(s.mode);
  SolveResult result;
  if (s.exact) {
    result = solve_exact(sys, ExactOptions{mode, s.workers, s.n_cap});
  } else {
    result = solve_approx(sys, mode);
  }
  Json j = solve_result_to_json(result, sys);
  Json config = base_config("solve", s);
  config["input"] = loaded.config;
  config["mode"] = s.mode;
  config["method"] = s.exact ? "exact" : "approx";
  config["n_cap"] = s.n_cap;
  j["config"] = std::move(config);
  emit(dump(j), s.out_path, out);
  return kOk;
}

int cmd_criterion(const Settings& s, std::ostream& out, std::ostream& err) {
  const LoadedSystem loaded = load_system(s, err, true);
  const CriterionReport rep =
      check(loaded.input.system, CheckOptions{s.heuristic});
  Json config = base_config("criterion", s);
  config["input"] = loaded.config;
  config["heuristic"] = s.heuristic;
  std::string text;
  if (s.json) {
    Json j = criterion_report_to_json(rep);
    j["config"] = std::move(config);
    text = dump(j);
  } else {
    std::ostringstream os;
    os << csv_comment_line(config, s.seed) << '\n';
    os << "m1 | phi(m1)\n";
    for (const PhiTerm& t : rep.phi) os << t.m1 << " | " << format_number(t.phi) << '\n';
    os << "max_phi = " << format_number(rep.max_phi) << " at m1 = " << rep.argmax_m1 << '\n';
    os << "verdict: " << (rep.satisfied ? "satisfied" : "unsatisfied")
       << (rep.heuristic ? " (heuristic, m1 = 2 only)" : "") << '\n';
    text = os.str();
  }
  emit(text, s.out_path, out);
  return rep.satisfied ? kOk : kUnsatisfied;
}

int cmd_steady_state(const Settings& s, std::ostream& out, std::ostream& err) {
  const LoadedSystem loaded = load_system(s, err, false);
  const AllocationSystem& sys = loaded.input.system;
  const Permutation p = load_perm(s.perm, sys.size());
  Json j;
  j["perm"] = permutation_to_json(p);
  j["cycles"] = p.to_cycle_string();
  j["order"] = order(p);
  j["x_per"] = steady_state(sys, p).x_per;
  j["J"] = objective_J(sys, p);
  j["J_approx"] = objective_J_approx(sys, p);
  Json config = base_config("steady-state", s);
  config["input"] = loaded.config;
  j["config"] = std::move(config);
  emit(dump(j), s.out_path, out);
  return kOk;
}

int cmd_simulate(const Settings& s, std::ostream& out, std::ostream& err) {
  if (s.system_path.empty()) throw InvalidArgument("simulate needs --system with a, b, T, u");
  const LoadedSystem loaded = load_system(s, err, false);
  if (!loaded.input.dynamics) throw InvalidArgument("simulate needs the a, b, T form of the system");
  const SwitchedDynamics& dyn = *loaded.input.dynamics;
  const Permutation p = load_perm(s.perm, dyn.size());
  std::vector<double> x0(dyn.size(), 0.0);
  if (!s.x0.empty()) {
    const Json j = parse_json(s.x0, "--x0");
    if (!j.is_array()) throw InvalidArgument("--x0 must be a JSON array");
    x0.clear();
    for (const auto& e : j) {
      if (!e.is_number()) throw InvalidArgument("--x0 must contain only numbers");
      x0.push_back(e.get<double>());
    }
  }
  const Trajectory tr = simulate(dyn, p, x0, s.periods, s.samples);
  Json config = base_config("simulate", s);
  config["input"] = loaded.config;
  config["perm"] = permutation_to_json(p);
  config["x0"] = x0;
  config["periods"] = s.periods;
  config["samples"] = s.samples;
  std::ostringstream os;
  os << csv_comment_line(config, s.seed) << '\n';
  write_trajectory_csv(os, tr);
  emit(os.str(), s.out_path, out);
  return kOk;
}

Json ratio(double num, double den) { return den == 0.0 ? Json(nullptr) : Json(num / den); }

int cmd_raceway_eval(const Settings& s, std::ostream& out, std::ostream&) {
  if (s.scenario_path.empty()) throw InvalidArgument("raceway-eval needs --scenario");
  const RacewayScenario sc = scenario_from_json(parse_json(read_file(s.scenario_path), s.scenario_path));
  const HanSystem han = build_han_system(sc);
  const std::size_t n = sc.layers;

  Json j;
  j["intensity"] = han.vectors.intensity;
  j["Gamma"] = han.vectors.gamma_vec;
  j["V"] = han.vectors.v_vec;
  j["Z"] = han.vectors.z_vec;
  j["D"] = han.vectors.d_vec;
  const double mu_i = mu_bar(han, Permutation::identity(n));
  const Permutation p_plus = approx_maximizer(han.system);
  const double mu_plus = mu_bar(han, p_plus);
  j["mu_identity"] = mu_i;
  j["p_plus"] = permutation_to_json(p_plus);
  j["mu_plus"] = mu_plus;
  if (!s.perm.empty()) {
    const Permutation p = load_perm(s.perm, n);
    j["perm"] = permutation_to_json(p);
    j["mu_perm"] = mu_bar(han, p);
  }
  if (s.exact) {
    const SolveResult r = solve_exact(han.system, ExactOptions{Mode::both, s.workers, s.n_cap});
    const double mu_max = mu_bar(han, r.best->perm);
    const double mu_min = mu_bar(han, r.worst->perm);
    j["p_max"] = permutation_to_json(r.best->perm);
    j["mu_max"] = mu_max;
    j["p_min"] = permutation_to_json(r.worst->perm);
    j["mu_min"] = mu_min;
    j["r1"] = ratio(mu_max - mu_i, mu_i);
    j["r2"] = ratio(mu_max - mu_min, mu_min);
    j["r3"] = ratio(mu_i - mu_min, mu_i);
    j["rt1"] = ratio(mu_plus - mu_i, mu_i);
    j["rt2"] = ratio(mu_plus - mu_min, mu_min);
  }
  Json config = base_config("raceway-eval", s);
  config["scenario"] = scenario_to_json(sc);
  config["method"] = s.exact ? "exact" : "approx";
  config["n_cap"] = s.n_cap;
  j["config"] = std::move(config);
  emit(dump(j), s.out_path, out);
  return kOk;
}

std::vector<SweepColumn> parse_columns(const std::string& text) {
  std::vector<SweepColumn> cols;
  std::stringstream ss(text);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (!name.empty()) cols.push_back(parse_column(name));
  }
  if (cols.empty()) throw InvalidArgument("--columns is empty");
  return cols;
}

std::string table_text(const Json& config, std::uint64_t seed, const SweepTable& table) {
  std::ostringstream os;
  os << csv_comment_line(config, seed) << '\n';
  write_table_csv(os, table);
  return os.str();
}

int cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
  if (s.grid_path.empty()) throw InvalidArgument("sweep needs --grid");
  const ScenarioGrid grid = grid_from_json(parse_json(read_file(s.grid_path), s.grid_path));
  SweepOptions opts;
  opts.columns = parse_columns(s.columns);
  opts.exact = ExactOptions{Mode::both, s.workers, s.n_cap};
  opts.budget = s.budget;
  err << "sweep: " << grid.point_count() << " grid points, about "
      << estimate_sweep_work(grid, opts) << " permutations to enumerate\n";
  const SweepTable table = sweep(grid, opts);
  Json config = base_config("sweep", s);
  config["grid"] = grid_to_json(grid);
  config["columns"] = s.columns;
  config["n_cap"] = s.n_cap;
  emit(table_text(config, s.seed, table), s.out_path, out);
  return kOk;
}

int cmd_reproduce(const Settings& s, std::ostream& out, std::ostream&) {
  bool known = false;
  for (const auto& f : figures()) known = known || f.id == s.figure;
  if (!known) reproduce(s.figure, {});  // throws with the list of ids
  ReproduceOptions o;
  if (s.layers > 0) o.layers = s.layers;
  if (s.period > 0.0) o.period = s.period;
  if (!s.scenario_path.empty()) {
    o.scenario = scenario_from_json(parse_json(read_file(s.scenario_path), s.scenario_path));
  }
  o.exact = ExactOptions{Mode::both, s.workers, s.n_cap};
  const SweepTable table = reproduce(s.figure, o);
  Json config = reproduce_config(s.figure, o);
  config["version"] = kVersion;
  config["seed"] = s.seed;
  emit(table_text(config, s.seed, table), s.out_path, out);
  return kOk;
}

void add_common(CLI::App* sub, Settings& s) {
  sub->add_option("--workers", s.workers, "Worker threads for exhaustive searches")
      ->check(CLI::PositiveNumber);
  sub->add_option("--n-cap", s.n_cap, "Largest N allowed for exhaustive search");
  sub->add_option("--seed", s.seed, "Random seed (recorded in the output)");
  sub->add_option("--out", s.out_path, "Write the result to this file instead of stdout");
}

void add_system(CLI::App* sub, Settings& s) {
  sub->add_option("--system", s.system_path, "System JSON file");
  sub->add_option("--random", s.random_n, "Use a random positive system of this size");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Periodic allocation by permutation: exact and approximate optimizers"};
  app.name("permalloc");
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Optimize J over permutations");
  add_system(solve, s);
  solve->add_option("--mode", s.mode, "max, min or both")->check(CLI::IsMember({"max", "min", "both"}));
  solve->add_flag("--exact,!--approx", s.exact, "Exhaustive search (default) or sorted matching");
  add_common(solve, s);

  auto* criterion = app.add_subcommand("criterion", "Check whether sorted matching is exact");
  add_system(criterion, s);
  criterion->add_option("--scenario", s.scenario_path, "Raceway scenario JSON file");
  criterion->add_flag("--json", s.json, "Print the full report as JSON");
  criterion->add_flag("--m1-2-only", s.heuristic, "Only evaluate phi(2) (heuristic)");
  add_common(criterion, s);

  auto* steady = app.add_subcommand("steady-state", "Periodic state x_per and J for a permutation");
  add_system(steady, s);
  steady->add_option("--perm", s.perm, "Permutation as [2,3,1] or \"(1 2 3)\" (default identity)");
  add_common(steady, s);

  auto* sim = app.add_subcommand("simulate", "Sample the switched trajectory as CSV");
  sim->add_option("--system", s.system_path, "System JSON file with a, b, T, u")->required();
  sim->add_option("--perm", s.perm, "Permutation as [2,3,1] or \"(1 2 3)\" (default identity)");
  sim->add_option("--x0", s.x0, "Initial state as a JSON array (default zeros)");
  sim->add_option("--periods", s.periods, "Number of periods after the first");
  sim->add_option("--samples", s.samples, "Samples per period")->check(CLI::PositiveNumber);
  add_common(sim, s);

  auto* race = app.add_subcommand("raceway-eval", "Evaluate a raceway scenario");
  race->add_option("--scenario", s.scenario_path, "Scenario JSON file")->required();
  race->add_option("--perm", s.perm, "Also evaluate this mixing permutation");
  race->add_flag("--exact,!--approx", s.exact, "Include P_max, P_min and the ratios (default)");
  add_common(race, s);

  auto* sw = app.add_subcommand("sweep", "Evaluate scenarios over a grid as CSV");
  sw->add_option("--grid", s.grid_path, "Grid JSON file")->required();
  sw->add_option("--columns", s.columns, "Comma-separated output columns");
  sw->add_option("--budget", s.budget, "Largest number of permutations to enumerate");
  add_common(sw, s);

  auto* rep = app.add_subcommand("reproduce", "Run a canned parameter sweep");
  rep->add_option("figure", s.figure, "Figure id: muN, 4muT, 2mark, 3r, 2rt, Fm, criterion")
      ->required();
  rep->add_option("--N", s.layers, "Number of layers");
  rep->add_option("--T", s.period, "Lap duration in seconds");
  rep->add_option("--scenario", s.scenario_path, "Scenario JSON file replacing the defaults");
  add_common(rep, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(s, out, err);
    if (criterion->parsed()) return cmd_criterion(s, out, err);
    if (steady->parsed()) return cmd_steady_state(s, out, err);
    if (sim->parsed()) return cmd_simulate(s, out, err);
    if (race->parsed()) return cmd_raceway_eval(s, out, err);
    if (sw->parsed()) return cmd_sweep(s, out, err);
    if (rep->parsed()) return cmd_reproduce(s, out, err);
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kOverCap;
  } catch (const DegenerateGaps& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const MixedSign& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}

}  // namespace permalloc::cli
