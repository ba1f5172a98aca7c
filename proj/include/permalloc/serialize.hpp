#pragma once

// JSON / CSV conversions. Permutations are written as arrays of 1-based
// images; inputs also accept cycle strings such as "(1 2 3)".

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "permalloc/criterion.hpp"
#include "permalloc/dynamics.hpp"
#include "permalloc/raceway.hpp"
#include "permalloc/solvers.hpp"

namespace permalloc {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// A system file holds either {"a", "b", "T", "u"} (optionally "t0") or
/// {"u", "v", "d"}.
struct SystemInput {
  AllocationSystem system;
  std::optional<SwitchedDynamics> dynamics;
};

SystemInput system_from_json(const Json& j, const WarningSink& warn = default_warning_sink);
Json system_to_json(const AllocationSystem& sys);

/// Array of 1-based images or a cycle string (needs n).
Permutation permutation_from_json(const Json& j, std::size_t n);
Json permutation_to_json(const Permutation& p);

HanParams han_params_from_json(const Json& j);
Json han_params_to_json(const HanParams& p);

/// {"I_s", "q", "T", "N", "h", "han"}; h and han are optional.
RacewayScenario scenario_from_json(const Json& j);
Json scenario_to_json(const RacewayScenario& sc);

/// {"I_s": [...], "q": [...], "T": [...], "N": [...], "h", "han"}.
ScenarioGrid grid_from_json(const Json& j);
Json grid_to_json(const ScenarioGrid& g);

/// Flat keys best_perm, best_value, best_J, best_J_approx, best_ties and
/// the worst_* counterparts, plus method, mode, n and evaluated.
Json solve_result_to_json(const SolveResult& r, const AllocationSystem& sys);
Json criterion_report_to_json(const CriterionReport& r);

/// Header "t,x1,...,xN".
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// "# permalloc <version> seed=<seed> config=<compact json>".
std::string csv_comment_line(const Json& config, std::uint64_t seed);
void write_table_csv(std::ostream& os, const SweepTable& table);

/// Parses JSON text, rethrowing syntax errors as InvalidArgument.
Json parse_json(const std::string& text, const std::string& origin);

}  // namespace permalloc
