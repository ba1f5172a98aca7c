#include "permalloc/raceway.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "permalloc/compensated_sum.hpp"
#include "permalloc/error.hpp"

namespace permalloc {

namespace {

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidArgument(std::string(name) + " must be positive and finite");
  }
}

void require_non_negative(double x, const char* name) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw InvalidArgument(std::string(name) + " must be non-negative and finite");
  }
}

}  // namespace

void HanParams::validate() const {
  require_positive(k_r, "k_r");
  require_positive(k_d, "k_d");
  require_positive(tau_H, "tau_H");
  require_positive(sigma_H, "sigma_H");
  require_positive(k_H, "k_H");
  require_positive(R, "R");
}

void RacewayScenario::validate() const {
  require_non_negative(surface_light, "I_s");
  if (!(bottom_fraction > 0.0 && bottom_fraction <= 1.0)) {
    throw InvalidArgument("q must lie in (0, 1], got " + format_number(bottom_fraction));
  }
  require_positive(period, "T");
  require_positive(depth, "h");
  if (layers < 1) throw InvalidArgument("N must be at least 1");
  han.validate();
}

double RacewayScenario::extinction() const { return std::log(1.0 / bottom_fraction) / depth; }

std::vector<double> RacewayScenario::layer_depths() const {
  std::vector<double> z(layers);
  const auto n = static_cast<double>(layers);
  for (std::size_t k = 0; k < layers; ++k) z[k] = -(static_cast<double>(k) + 0.5) * depth / n;
  return z;
}

HanRates han_rates(double intensity, const HanParams& p) {
  const double si = p.sigma_H * intensity;
  const double denom = p.tau_H * si + 1.0;
  HanRates r;
  r.beta = p.k_d * p.tau_H * si * si / denom;
  r.alpha = r.beta + p.k_r;
  r.gamma = p.k_H * si / denom;
  r.zeta = r.gamma - p.R;
  return r;
}

std::vector<double> light_profile(const RacewayScenario& sc) {
  sc.validate();
  const double eps = sc.extinction();
  auto z = sc.layer_depths();
  for (auto& zi : z) zi = sc.surface_light * std::exp(eps * zi);
  return z;
}

HanSystem build_han_system(const RacewayScenario& sc) {
  HanVectors vec;
  vec.intensity = light_profile(sc);
  const std::size_t n = sc.layers;
  const double t = sc.period;
  vec.gamma_vec.resize(n);
  vec.v_vec.resize(n);
  vec.z_vec.resize(n);
  vec.d_vec.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const HanRates r = han_rates(vec.intensity[k], sc.han);
    const double at = r.alpha * t;
    const double one_minus_d = -std::expm1(-at);
    vec.gamma_vec[k] = -(r.gamma / r.alpha) * one_minus_d;
    vec.v_vec[k] = (r.beta / r.alpha) * one_minus_d;
    vec.z_vec[k] = (r.gamma * r.beta / r.alpha) * (one_minus_d / r.alpha - t) + r.zeta * t;
    vec.d_vec[k] = std::max(std::exp(-at), DBL_MIN);
  }
  AllocationSystem sys(vec.gamma_vec, vec.v_vec, vec.d_vec);
  return {std::move(vec), std::move(sys), t};
}

double mu_bar(const HanSystem& han, const Permutation& p) {
  const double j = objective_J(han.system, p);
  CompensatedSum z;
  for (double zi : han.vectors.z_vec) z += zi;
  const auto n = static_cast<double>(han.system.size());
  return (j + z.value()) / (n * han.period);
}

double mu_bar(const RacewayScenario& sc, const Permutation& p) {
  if (p.size() != sc.layers) throw SizeMismatch(p.size(), sc.layers, "mu_bar permutation");
  return mu_bar(build_han_system(sc), p);
}

EfficiencyRatios efficiency_ratios(const RacewayScenario& sc, const ExactOptions& options) {
  const HanSystem han = build_han_system(sc);
  ExactOptions opts = options;
  opts.mode = Mode::both;
  const SolveResult exact = solve_exact(han.system, opts);

  EfficiencyRatios r;
  r.p_max = exact.best->perm;
  r.p_min = exact.worst->perm;
  r.p_plus = approx_maximizer(han.system);
  r.mu_identity = mu_bar(han, Permutation::identity(sc.layers));
  r.mu_max = mu_bar(han, r.p_max);
  r.mu_min = mu_bar(han, r.p_min);
  r.mu_plus = mu_bar(han, r.p_plus);
  if (r.mu_identity == 0.0) {
    throw InvalidArgument("mu_N(I) = 0, so r1, r3 and r~1 are undefined");
  }
  if (r.mu_min == 0.0) {
    throw InvalidArgument("mu_N(P_min) = 0, so r2 and r~2 are undefined");
  }
  r.r1 = (r.mu_max - r.mu_identity) / r.mu_identity;
  r.r2 = (r.mu_max - r.mu_min) / r.mu_min;
  r.r3 = (r.mu_identity - r.mu_min) / r.mu_identity;
  r.rt1 = (r.mu_plus - r.mu_identity) / r.mu_identity;
  r.rt2 = (r.mu_plus - r.mu_min) / r.mu_min;
  return r;
}

// ---- sweeps ----------------------------------------------------------------

std::size_t ScenarioGrid::point_count() const {
  return surface_light.size() * bottom_fraction.size() * period.size() * layers.size();
}

namespace {

struct ColumnInfo {
  SweepColumn column;
  const char* name;
  bool exact;
};

constexpr std::array kColumns{
    ColumnInfo{SweepColumn::mu_identity, "mu_identity", false},
    ColumnInfo{SweepColumn::mu_max, "mu_max", true},
    ColumnInfo{SweepColumn::mu_min, "mu_min", true},
    ColumnInfo{SweepColumn::mu_plus, "mu_plus", false},
    ColumnInfo{SweepColumn::criterion, "criterion", false},
    ColumnInfo{SweepColumn::max_phi, "max_phi", false},
    ColumnInfo{SweepColumn::pmax_equals_pplus, "pmax_equals_pplus", true},
    ColumnInfo{SweepColumn::r1, "r1", true},
    ColumnInfo{SweepColumn::r2, "r2", true},
    ColumnInfo{SweepColumn::r3, "r3", true},
    ColumnInfo{SweepColumn::rt1, "rt1", true},
    ColumnInfo{SweepColumn::rt2, "rt2", true},
    ColumnInfo{SweepColumn::p_max, "p_max", true},
    ColumnInfo{SweepColumn::p_plus, "p_plus", false},
};

const ColumnInfo& info(SweepColumn c) {
  for (const auto& ci : kColumns) {
    if (ci.column == c) return ci;
  }
  throw InvalidArgument("unknown sweep column");
}

bool any_exact(const SweepOptions& options) {
  return std::any_of(options.columns.begin(), options.columns.end(), needs_exact);
}

std::string ratio_text(double num, double den) {
  if (den == 0.0) return "";
  return format_number(num / den);
}

struct PointResult {
  HanSystem han;
  std::optional<SolveResult> exact;
  Permutation p_plus;
  std::optional<CriterionReport> report;
  std::string criterion_error;
};

std::string cell(SweepColumn c, const PointResult& pr) {
  const auto mu = [&](const Permutation& p) { return mu_bar(pr.han, p); };
  const std::size_t n = pr.han.system.size();
  const double mu_i = mu(Permutation::identity(n));
  switch (c) {
    case SweepColumn::mu_identity: return format_number(mu_i);
    case SweepColumn::mu_plus: return format_number(mu(pr.p_plus));
    case SweepColumn::p_plus: return pr.p_plus.to_cycle_string();
    case SweepColumn::criterion:
      if (pr.report) return pr.report->satisfied ? "satisfied" : "unsatisfied";
      return pr.criterion_error;
    case SweepColumn::max_phi: return pr.report ? format_number(pr.report->max_phi) : "";
    default: break;
  }
  const double mu_max = mu(pr.exact->best->perm);
  const double mu_min = mu(pr.exact->worst->perm);
  const double mu_plus = mu(pr.p_plus);
  switch (c) {
    case SweepColumn::mu_max: return format_number(mu_max);
    case SweepColumn::mu_min: return format_number(mu_min);
    case SweepColumn::p_max: return pr.exact->best->perm.to_cycle_string();
    case SweepColumn::pmax_equals_pplus: {
      const bool same = pr.exact->best->perm == pr.p_plus ||
                        std::fabs(mu_max - mu_plus) <= 1e-10 * std::fabs(mu_max);
      return same ? "1" : "0";
    }
    case SweepColumn::r1: return ratio_text(mu_max - mu_i, mu_i);
    case SweepColumn::r2: return ratio_text(mu_max - mu_min, mu_min);
    case SweepColumn::r3: return ratio_text(mu_i - mu_min, mu_i);
    case SweepColumn::rt1: return ratio_text(mu_plus - mu_i, mu_i);
    case SweepColumn::rt2: return ratio_text(mu_plus - mu_min, mu_min);
    default: break;
  }
  return "";
}

}  // namespace

std::string column_name(SweepColumn c) { return info(c).name; }

SweepColumn parse_column(const std::string& name) {
  std::string known;
  for (const auto& ci : kColumns) {
    if (name == ci.name) return ci.column;
    known += known.empty() ? "" : ", ";
    known += ci.name;
  }
  throw InvalidArgument("unknown sweep column '" + name + "' (known: " + known + ")");
}

bool needs_exact(SweepColumn c) { return info(c).exact; }

std::uint64_t estimate_sweep_work(const ScenarioGrid& grid, const SweepOptions& options) {
  if (!any_exact(options)) return 0;
  const std::uint64_t per_layer_set =
      grid.surface_light.size() * grid.bottom_fraction.size() * grid.period.size();
  std::uint64_t total = 0;
  for (std::size_t n : grid.layers) {
    if (n > 20) return std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t f = factorial(n);
    if (per_layer_set != 0 && f > (std::numeric_limits<std::uint64_t>::max() - total) / per_layer_set) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total += per_layer_set * f;
  }
  return total;
}

SweepTable sweep(const ScenarioGrid& grid, const SweepOptions& options) {
  SweepTable table;
  table.estimated_evaluations = estimate_sweep_work(grid, options);
  if (table.estimated_evaluations > options.budget) {
    throw InvalidArgument("sweep would enumerate about " +
                          std::to_string(table.estimated_evaluations) +
                          " permutations, over the budget of " + std::to_string(options.budget) +
                          "; shrink the grid, lower N or drop exact columns");
  }
  const bool exact = any_exact(options);
  if (exact) {
    for (std::size_t n : grid.layers) check_enumeration_cap(n, options.exact.n_cap);
  }
  const bool want_criterion =
      std::any_of(options.columns.begin(), options.columns.end(), [](SweepColumn c) {
        return c == SweepColumn::criterion || c == SweepColumn::max_phi;
      });

  table.header = {"I_s", "q", "T", "N"};
  for (SweepColumn c : options.columns) table.header.push_back(column_name(c));

  for (double is : grid.surface_light) {
    for (double q : grid.bottom_fraction) {
      for (double t : grid.period) {
        for (std::size_t n : grid.layers) {
          RacewayScenario sc{is, q, t, n, grid.depth, grid.han};
          PointResult pr{build_han_system(sc), std::nullopt, {}, std::nullopt, {}};
          pr.p_plus = approx_maximizer(pr.han.system);
          if (exact) {
            ExactOptions opts = options.exact;
            opts.mode = Mode::both;
            pr.exact = solve_exact(pr.han.system, opts);
          }
          if (want_criterion) {
            if (n < 2) {
              pr.criterion_error = "n/a";
            } else {
              try {
                pr.report = check(pr.han.system);
              } catch (const DegenerateGaps&) {
                pr.criterion_error = "degenerate";
              } catch (const MixedSign&) {
                pr.criterion_error = "mixed-sign";
              }
            }
          }
          std::vector<std::string> row{format_number(is), format_number(q), format_number(t),
                                       std::to_string(n)};
          for (SweepColumn c : options.columns) row.push_back(cell(c, pr));
          table.rows.push_back(std::move(row));
        }
      }
    }
  }
  return table;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

}  // namespace permalloc
