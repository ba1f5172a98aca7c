#pragma once

// Microalgae raceway: N horizontal layers under Beer-Lambert light, the
// photoinhibited fraction C of each layer following the slow-fast reduced
// Han model
//
//   C' = -alpha(I) C + beta(I),      mu(C, I) = -gamma(I) C + zeta(I),
//
// and a mixing device that permutes the layers once per lap of duration T.
// The mean growth rate over a lap in the periodic regime is
//
//   mu_N = (<Gamma, C(0)> + <1, Z>) / (N T),   C(0) = (I - P D)^-1 P V,
//
// so maximizing mu_N is the allocation problem with u = Gamma, v = V.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permalloc/criterion.hpp"
#include "permalloc/dynamics.hpp"
#include "permalloc/permutation.hpp"
#include "permalloc/solvers.hpp"

namespace permalloc {

/// Han model parameters; defaults are the usual literature values.
struct HanParams {
  double k_r = 6.8e-3;      // repair rate [1/s]
  double k_d = 2.99e-4;     // damage rate [-]
  double tau_H = 0.25;      // turnover time [s]
  double sigma_H = 0.047;   // specific photon absorption [m^2/umol]
  double k_H = 8.7e-6;      // growth factor [-]
  double R = 1.389e-7;      // respiration rate [1/s]

  void validate() const;
};

struct RacewayScenario {
  double surface_light = 0.0;  // I_s [umol/m^2/s]
  double bottom_fraction = 0.1;  // q = I_b / I_s, in (0, 1]
  double period = 1000.0;      // T, lap duration [s]
  std::size_t layers = 1;      // N
  double depth = 0.4;          // h [m]
  HanParams han;

  void validate() const;
  /// epsilon = ln(1/q) / h.
  double extinction() const;
  /// z_n = -(n + 1/2) h / N for 0-based n.
  std::vector<double> layer_depths() const;
};

struct HanRates {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double zeta = 0.0;
};

HanRates han_rates(double intensity, const HanParams& p);

/// I_n = I_s exp(epsilon z_n).
std::vector<double> light_profile(const RacewayScenario& sc);

struct HanVectors {
  std::vector<double> intensity;  // I_n
  std::vector<double> gamma_vec;  // Gamma_n <= 0
  std::vector<double> v_vec;      // V_n >= 0
  std::vector<double> z_vec;      // Z_n
  std::vector<double> d_vec;      // D_nn
};

struct HanSystem {
  HanVectors vectors;
  AllocationSystem system;  // u = Gamma, v = V, d = diag D
  double period = 0.0;
};

HanSystem build_han_system(const RacewayScenario& sc);

/// Mean net specific growth rate mu_N for mixing permutation p.
double mu_bar(const HanSystem& han, const Permutation& p);
double mu_bar(const RacewayScenario& sc, const Permutation& p);

struct EfficiencyRatios {
  Permutation p_max;
  Permutation p_min;
  Permutation p_plus;
  double mu_identity = 0.0;
  double mu_max = 0.0;
  double mu_min = 0.0;
  double mu_plus = 0.0;
  double r1 = 0.0;   // (mu(P_max) - mu(I)) / mu(I)
  double r2 = 0.0;   // (mu(P_max) - mu(P_min)) / mu(P_min)
  double r3 = 0.0;   // (mu(I) - mu(P_min)) / mu(I)
  double rt1 = 0.0;  // (mu(P_+) - mu(I)) / mu(I)
  double rt2 = 0.0;  // (mu(P_+) - mu(P_min)) / mu(P_min)
};

/// Needs exhaustive solves; throws InvalidArgument naming the vanishing
/// denominator when mu(I) or mu(P_min) is zero.
EfficiencyRatios efficiency_ratios(const RacewayScenario& sc, const ExactOptions& options = {});

// ---- sweeps --------------------------------------------------------------

struct ScenarioGrid {
  std::vector<double> surface_light;
  std::vector<double> bottom_fraction;
  std::vector<double> period;
  std::vector<std::size_t> layers;
  double depth = 0.4;
  HanParams han;

  std::size_t point_count() const;
};

enum class SweepColumn {
  mu_identity,
  mu_max,
  mu_min,
  mu_plus,
  criterion,
  max_phi,
  pmax_equals_pplus,
  r1,
  r2,
  r3,
  rt1,
  rt2,
  p_max,
  p_plus,
};

std::string column_name(SweepColumn c);
/// Throws InvalidArgument listing the known names.
SweepColumn parse_column(const std::string& name);
/// True when the column needs an exhaustive search at each grid point.
bool needs_exact(SweepColumn c);

struct SweepOptions {
  std::vector<SweepColumn> columns;
  ExactOptions exact;
  /// Refuse to run when more permutations than this would be enumerated.
  std::uint64_t budget = 4'000'000'000ULL;
};

struct SweepTable {
  std::vector<std::string> header;            // I_s, q, T, N, then the columns
  std::vector<std::vector<std::string>> rows;
  std::uint64_t estimated_evaluations = 0;
};

/// Permutations the sweep would enumerate.
std::uint64_t estimate_sweep_work(const ScenarioGrid& grid, const SweepOptions& options);

/// Rows in the nested order I_s, q, T, N (outermost first). Throws
/// InvalidArgument when the estimate exceeds the budget.
SweepTable sweep(const ScenarioGrid& grid, const SweepOptions& options);

/// Shortest decimal text that round-trips the double.
std::string format_number(double x);

}  // namespace permalloc
