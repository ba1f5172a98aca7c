#include "permalloc/serialize.hpp"

#include <ostream>
#include <string>
#include <vector>

#include "permalloc/error.hpp"

namespace permalloc {

namespace {

std::vector<double> number_array(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing key \"") + key + "\"");
  const Json& a = j.at(key);
  if (!a.is_array()) throw InvalidArgument(std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& e : a) {
    if (!e.is_number()) {
      throw InvalidArgument(std::string("\"") + key + "\" must contain only numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

double number(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing key \"") + key + "\"");
  if (!j.at(key).is_number()) throw InvalidArgument(std::string("\"") + key + "\" must be a number");
  return j.at(key).get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

std::size_t count(const Json& e, const char* key) {
  if (!e.is_number_integer() || e.get<std::int64_t>() < 0) {
    throw InvalidArgument(std::string("\"") + key + "\" must be a non-negative integer");
  }
  return e.get<std::size_t>();
}

Json extremum_fields(Json out, const char* prefix, const std::optional<Extremum>& e,
                     const AllocationSystem& sys) {
  const std::string p(prefix);
  if (!e) return out;
  out[p + "_perm"] = permutation_to_json(e->perm);
  out[p + "_cycles"] = e->perm.to_cycle_string();
  out[p + "_value"] = e->value;
  out[p + "_J"] = objective_J(sys, e->perm);
  out[p + "_J_approx"] = objective_J_approx(sys, e->perm);
  out[p + "_ties"] = e->ties ? Json(*e->ties) : Json(nullptr);
  return out;
}

}  // namespace

SystemInput system_from_json(const Json& j, const WarningSink& warn) {
  if (!j.is_object()) throw InvalidArgument("a system must be a JSON object");
  SystemInput in;
  if (j.contains("a")) {
    SwitchedDynamics dyn;
    dyn.a = number_array(j, "a");
    dyn.b = number_array(j, "b");
    dyn.period = number(j, "T");
    dyn.t0 = number_or(j, "t0", 0.0);
    auto u = number_array(j, "u");
    in.system = build_system(dyn, std::move(u), warn);
    in.dynamics = std::move(dyn);
  } else if (j.contains("d")) {
    in.system = AllocationSystem(number_array(j, "u"), number_array(j, "v"), number_array(j, "d"));
  } else {
    throw InvalidArgument(R"(a system needs either "a", "b", "T", "u" or "u", "v", "d")");
  }
  return in;
}

Json system_to_json(const AllocationSystem& sys) {
  Json j;
  j["u"] = std::vector<double>(sys.u().begin(), sys.u().end());
  j["v"] = std::vector<double>(sys.v().begin(), sys.v().end());
  j["d"] = std::vector<double>(sys.d().begin(), sys.d().end());
  return j;
}

Permutation permutation_from_json(const Json& j, std::size_t n) {
  if (j.is_string()) return Permutation::parse_cycles(n, j.get<std::string>());
  if (!j.is_array()) throw InvalidArgument("a permutation must be an image array or a cycle string");
  std::vector<std::int64_t> images;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw InvalidArgument("permutation images must be integers");
    images.push_back(e.get<std::int64_t>());
  }
  if (images.size() != n) throw SizeMismatch(images.size(), n, "permutation");
  return Permutation::from_one_based(images);
}

Json permutation_to_json(const Permutation& p) { return p.one_based(); }

HanParams han_params_from_json(const Json& j) {
  HanParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw InvalidArgument("\"han\" must be an object");
  p.k_r = number_or(j, "k_r", p.k_r);
  p.k_d = number_or(j, "k_d", p.k_d);
  p.tau_H = number_or(j, "tau_H", p.tau_H);
  p.sigma_H = number_or(j, "sigma_H", p.sigma_H);
  p.k_H = number_or(j, "k_H", p.k_H);
  p.R = number_or(j, "R", p.R);
  p.validate();
  return p;
}

Json han_params_to_json(const HanParams& p) {
  return Json{{"k_r", p.k_r}, {"k_d", p.k_d},     {"tau_H", p.tau_H},
              {"sigma_H", p.sigma_H}, {"k_H", p.k_H}, {"R", p.R}};
}

RacewayScenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("a scenario must be a JSON object");
  RacewayScenario sc;
  sc.surface_light = number(j, "I_s");
  sc.bottom_fraction = number(j, "q");
  sc.period = number(j, "T");
  if (!j.contains("N")) throw InvalidArgument("missing key \"N\"");
  sc.layers = count(j.at("N"), "N");
  sc.depth = number_or(j, "h", sc.depth);
  sc.han = han_params_from_json(j.value("han", Json()));
  sc.validate();
  return sc;
}

Json scenario_to_json(const RacewayScenario& sc) {
  return Json{{"I_s", sc.surface_light}, {"q", sc.bottom_fraction}, {"T", sc.period},
              {"N", sc.layers},          {"h", sc.depth},           {"han", han_params_to_json(sc.han)}};
}

ScenarioGrid grid_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("a grid must be a JSON object");
  ScenarioGrid g;
  g.surface_light = number_array(j, "I_s");
  g.bottom_fraction = number_array(j, "q");
  g.period = number_array(j, "T");
  if (!j.contains("N") || !j.at("N").is_array()) throw InvalidArgument("\"N\" must be an array");
  for (const auto& e : j.at("N")) g.layers.push_back(count(e, "N"));
  g.depth = number_or(j, "h", g.depth);
  g.han = han_params_from_json(j.value("han", Json()));
  for (double is : g.surface_light) {
    for (double q : g.bottom_fraction) {
      for (double t : g.period) {
        for (std::size_t n : g.layers) RacewayScenario{is, q, t, n, g.depth, g.han}.validate();
      }
    }
  }
  return g;
}

Json grid_to_json(const ScenarioGrid& g) {
  return Json{{"I_s", g.surface_light}, {"q", g.bottom_fraction}, {"T", g.period},
              {"N", g.layers},          {"h", g.depth},           {"han", han_params_to_json(g.han)}};
}

Json solve_result_to_json(const SolveResult& r, const AllocationSystem& sys) {
  Json out;
  out["method"] = r.exact ? "exact" : "approx";
  out["mode"] = std::string(to_string(r.mode));
  out["n"] = r.n;
  out = extremum_fields(std::move(out), "best", r.best, sys);
  out = extremum_fields(std::move(out), "worst", r.worst, sys);
  out["evaluated"] = r.evaluated;
  return out;
}

Json criterion_report_to_json(const CriterionReport& r) {
  Json out;
  out["sign_case"] = std::string(to_string(r.sign_case));
  out["satisfied"] = r.satisfied;
  out["heuristic"] = r.heuristic;
  out["max_phi"] = r.max_phi;
  out["argmax_m1"] = r.argmax_m1;
  out["d_max"] = r.d_max;
  out["d_min"] = r.d_min;
  out["p_tilde"] = r.p_tilde;
  out["p_sorted"] = r.p_sorted;
  out["s"] = r.s;
  out["F_plus"] = r.f_plus;
  out["F_minus"] = r.f_minus;
  Json terms = Json::array();
  for (const auto& t : r.phi) {
    terms.push_back(Json{{"m1", t.m1},
                         {"l_star", t.l_star},
                         {"numerator", t.numerator},
                         {"denominator", t.denominator},
                         {"phi", t.phi}});
  }
  out["phi"] = std::move(terms);
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const std::size_t n = tr.state.empty() ? 0 : tr.state.front().size();
  os << "t";
  for (std::size_t k = 1; k <= n; ++k) os << ",x" << k;
  os << '\n';
  for (std::size_t i = 0; i < tr.time.size(); ++i) {
    os << format_number(tr.time[i]);
    for (double x : tr.state[i]) os << ',' << format_number(x);
    os << '\n';
  }
}

std::string csv_comment_line(const Json& config, std::uint64_t seed) {
  return std::string("# permalloc ") + kVersion + " seed=" + std::to_string(seed) +
         " config=" + config.dump();
}

void write_table_csv(std::ostream& os, const SweepTable& table) {
  for (std::size_t k = 0; k < table.header.size(); ++k) os << (k ? "," : "") << table.header[k];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
    os << '\n';
  }
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(origin + ": " + e.what());
  }
}

}  // namespace permalloc
