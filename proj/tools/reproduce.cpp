#include "reproduce.hpp"

#include "permalloc/error.hpp"

namespace permalloc::cli {

namespace {

struct Triplet {
  double surface_light;
  double bottom_fraction;
  double period;
};

constexpr Triplet kCriterionRegime{2000.0, 0.05, 1000.0};
constexpr Triplet kApproximationFailure{800.0, 0.005, 1.0};
constexpr std::size_t kLargestApproxN = 100;

const std::vector<double> kMarkLight{250, 500, 750, 1000, 1250, 1500, 1750, 2000, 2250, 2500};
const std::vector<double> kMarkFraction{0.001, 0.005, 0.01, 0.02, 0.05, 0.1};

std::vector<RacewayScenario> triplet_scenarios(const ReproduceOptions& o, std::size_t n) {
  if (o.scenario) {
    RacewayScenario sc = *o.scenario;
    if (o.layers) sc.layers = *o.layers;
    if (o.period) sc.period = *o.period;
    return {sc};
  }
  std::vector<RacewayScenario> out;
  for (const Triplet& t : {kCriterionRegime, kApproximationFailure}) {
    RacewayScenario sc{t.surface_light, t.bottom_fraction, o.period.value_or(t.period), n};
    out.push_back(sc);
  }
  return out;
}

ScenarioGrid single_point(const RacewayScenario& sc) {
  return ScenarioGrid{{sc.surface_light}, {sc.bottom_fraction}, {sc.period}, {sc.layers},
                      sc.depth,           sc.han};
}

std::vector<std::size_t> range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> out;
  for (std::size_t n = first; n <= last; ++n) out.push_back(n);
  return out;
}

SweepOptions sweep_options(const ReproduceOptions& o, std::vector<SweepColumn> columns) {
  SweepOptions s;
  s.columns = std::move(columns);
  s.exact = o.exact;
  return s;
}

SweepTable mu_vs_n(const ReproduceOptions& o) {
  const std::size_t exact_max = o.layers.value_or(9);
  SweepTable table;
  table.header = {"I_s", "q", "T", "N", "mu_max", "mu_plus", "pmax_equals_pplus", "criterion",
                  "max_phi"};
  for (const RacewayScenario& base : triplet_scenarios(o, 2)) {
    ScenarioGrid grid = single_point(base);
    grid.layers = range(2, exact_max);
    const auto exact = sweep(grid, sweep_options(o, {SweepColumn::mu_max, SweepColumn::mu_plus,
                                                     SweepColumn::pmax_equals_pplus,
                                                     SweepColumn::criterion, SweepColumn::max_phi}));
    table.estimated_evaluations += exact.estimated_evaluations;
    for (const auto& row : exact.rows) table.rows.push_back(row);
    if (exact_max >= kLargestApproxN) continue;
    grid.layers = range(exact_max + 1, kLargestApproxN);
    const auto approx = sweep(grid, sweep_options(o, {SweepColumn::mu_plus, SweepColumn::criterion,
                                                      SweepColumn::max_phi}));
    for (const auto& row : approx.rows) {
      std::vector<std::string> r(row.begin(), row.begin() + 4);
      r.push_back("");
      r.push_back(row[4]);
      r.push_back("");
      r.push_back(row[5]);
      r.push_back(row[6]);
      table.rows.push_back(std::move(r));
    }
  }
  return table;
}

SweepTable mu_vs_period(const ReproduceOptions& o) {
  ScenarioGrid grid;
  grid.surface_light = {500, 1000, 1500, 2000};
  grid.bottom_fraction = {0.001};
  grid.period = o.period ? std::vector<double>{*o.period} : std::vector<double>{1, 10, 100, 1000};
  grid.layers = {o.layers.value_or(7)};
  const auto long_form = sweep(grid, sweep_options(o, {SweepColumn::mu_max}));

  SweepTable table;
  table.estimated_evaluations = long_form.estimated_evaluations;
  table.header = {"I_s"};
  for (double t : grid.period) table.header.push_back("T=" + format_number(t));
  for (std::size_t i = 0; i < grid.surface_light.size(); ++i) {
    std::vector<std::string> row{format_number(grid.surface_light[i])};
    for (std::size_t k = 0; k < grid.period.size(); ++k) {
      row.push_back(long_form.rows[i * grid.period.size() + k][4]);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

SweepTable surface(const ReproduceOptions& o, std::vector<SweepColumn> columns) {
  ScenarioGrid grid;
  grid.surface_light = kMarkLight;
  grid.bottom_fraction = kMarkFraction;
  grid.period = o.period ? std::vector<double>{*o.period} : std::vector<double>{1, 1000};
  grid.layers = {o.layers.value_or(9)};
  if (o.scenario) {
    grid.depth = o.scenario->depth;
    grid.han = o.scenario->han;
  }
  return sweep(grid, sweep_options(o, std::move(columns)));
}

std::vector<std::string> scenario_cells(const RacewayScenario& sc) {
  return {format_number(sc.surface_light), format_number(sc.bottom_fraction),
          format_number(sc.period), std::to_string(sc.layers)};
}

SweepTable f_table(const ReproduceOptions& o) {
  SweepTable table;
  table.header = {"I_s", "q", "T", "N", "m", "F_plus", "F_minus", "s"};
  for (const RacewayScenario& sc : triplet_scenarios(o, o.layers.value_or(7))) {
    const CriterionReport rep = check(build_han_system(sc).system);
    for (std::size_t m = 1; m <= sc.layers; ++m) {
      auto row = scenario_cells(sc);
      row.push_back(std::to_string(m));
      row.push_back(format_number(rep.f_plus[m - 1]));
      row.push_back(format_number(rep.f_minus[m - 1]));
      row.push_back(format_number(rep.s[m - 1]));
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

SweepTable phi_table(const ReproduceOptions& o) {
  SweepTable table;
  table.header = {"I_s", "q", "T", "N", "m1", "phi", "max_phi", "verdict"};
  const std::vector<std::size_t> layers =
      o.layers ? std::vector<std::size_t>{*o.layers} : range(2, 10);
  const std::size_t groups = triplet_scenarios(o, 2).size();
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t n : layers) {
      const RacewayScenario sc = triplet_scenarios(o, n)[g];
      const CriterionReport rep = check(build_han_system(sc).system);
      for (const PhiTerm& term : rep.phi) {
        auto row = scenario_cells(sc);
        row.push_back(std::to_string(term.m1));
        row.push_back(format_number(term.phi));
        row.push_back(format_number(rep.max_phi));
        row.push_back(rep.satisfied ? "satisfied" : "unsatisfied");
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

}  // namespace

const std::vector<Figure>& figures() {
  static const std::vector<Figure> list{
      {"muN", "mu_N(P_max) and mu_N(P_+) against N for the two reference triplets"},
      {"4muT", "mu_N(P_max) against the lap time T for four surface intensities"},
      {"2mark", "P_max = P_+ marker and criterion verdict over the (I_s, q) grid"},
      {"3r", "efficiency ratios r1, r2, r3 over the (I_s, q) grid"},
      {"2rt", "efficiency ratios r~1, r~2 of P_+ over the (I_s, q) grid"},
      {"Fm", "F_m^+ and F_m^- bounds with the gap sums s_m"},
      {"criterion", "phi(m1) table with the verdict"},
  };
  return list;
}

SweepTable reproduce(const std::string& id, const ReproduceOptions& options) {
  if (id == "muN") return mu_vs_n(options);
  if (id == "4muT") return mu_vs_period(options);
  if (id == "2mark") {
    return surface(options, {SweepColumn::mu_max, SweepColumn::mu_plus,
                             SweepColumn::pmax_equals_pplus, SweepColumn::criterion,
                             SweepColumn::max_phi});
  }
  if (id == "3r") return surface(options, {SweepColumn::r1, SweepColumn::r2, SweepColumn::r3});
  if (id == "2rt") return surface(options, {SweepColumn::rt1, SweepColumn::rt2});
  if (id == "Fm") return f_table(options);
  if (id == "criterion") return phi_table(options);
  std::string known;
  for (const auto& f : figures()) known += (known.empty() ? "" : ", ") + f.id;
  throw InvalidArgument("unknown figure id '" + id + "' (known: " + known + ")");
}

Json reproduce_config(const std::string& id, const ReproduceOptions& options) {
  Json j;
  j["command"] = "reproduce";
  j["figure"] = id;
  j["N"] = options.layers ? Json(*options.layers) : Json(nullptr);
  j["T"] = options.period ? Json(*options.period) : Json(nullptr);
  j["scenario"] = options.scenario ? scenario_to_json(*options.scenario) : Json(nullptr);
  j["n_cap"] = options.exact.n_cap;
  return j;
}

}  // namespace permalloc::cli
