#include "permalloc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <string>

#include "permalloc/error.hpp"

namespace permalloc {

void default_warning_sink(std::string_view message) {
  std::cerr << "warning: " << message << '\n';
}

void SwitchedDynamics::validate() const {
  if (a.size() != b.size()) throw SizeMismatch(a.size(), b.size(), "SwitchedDynamics a/b");
  if (a.empty()) throw InvalidArgument("SwitchedDynamics needs at least one slot");
  if (!(period > 0.0) || !std::isfinite(period)) throw InvalidArgument("period T must be > 0");
  if (!std::isfinite(t0)) throw InvalidArgument("T_0 must be finite");
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (!(a[n] > 0.0) || !std::isfinite(a[n])) {
      throw InvalidArgument("decay rate a_" + std::to_string(n + 1) + " must be > 0");
    }
    if (!(b[n] >= 0.0) || !std::isfinite(b[n])) {
      throw InvalidArgument("source rate b_" + std::to_string(n + 1) + " must be >= 0");
    }
  }
}

AllocationSystem::AllocationSystem(std::vector<double> u, std::vector<double> v,
                                   std::vector<double> d)
    : u_(std::move(u)), v_(std::move(v)), d_(std::move(d)) {
  if (u_.size() != v_.size()) throw SizeMismatch(u_.size(), v_.size(), "AllocationSystem u/v");
  if (u_.size() != d_.size()) throw SizeMismatch(u_.size(), d_.size(), "AllocationSystem u/d");
  if (u_.empty()) throw InvalidArgument("AllocationSystem needs at least one slot");
  log_d_.resize(d_.size());
  for (std::size_t n = 0; n < d_.size(); ++n) {
    if (!(d_[n] > 0.0 && d_[n] < 1.0)) {
      throw InvalidArgument("d_" + std::to_string(n + 1) + " = " + std::to_string(d_[n]) +
                            " must lie in (0, 1)");
    }
    if (!std::isfinite(u_[n]) || !std::isfinite(v_[n])) {
      throw InvalidArgument("u and v must be finite");
    }
    log_d_[n] = std::log(d_[n]);
  }
}

double AllocationSystem::d_max() const { return *std::max_element(d_.begin(), d_.end()); }
double AllocationSystem::d_min() const { return *std::min_element(d_.begin(), d_.end()); }

GeneralObjective GeneralObjective::from_dynamics(const SwitchedDynamics& dyn,
                                                 std::vector<double> w) {
  dyn.validate();
  if (w.size() != dyn.size()) throw SizeMismatch(w.size(), dyn.size(), "GeneralObjective w");
  GeneralObjective obj;
  obj.w = std::move(w);
  obj.period = dyn.period;
  obj.dtilde.resize(dyn.size());
  obj.vtilde.resize(dyn.size());
  for (std::size_t n = 0; n < dyn.size(); ++n) {
    const double a = dyn.a[n];
    obj.dtilde[n] = -std::expm1(-a * dyn.period) / a;
    obj.vtilde[n] = dyn.b[n] / a * (dyn.period - obj.dtilde[n]);
  }
  return obj;
}

std::vector<double> GeneralObjective::u() const {
  std::vector<double> out(w.size());
  for (std::size_t n = 0; n < w.size(); ++n) out[n] = dtilde[n] * w[n];
  return out;
}

AllocationSystem build_system(const SwitchedDynamics& dyn, std::vector<double> u,
                              const WarningSink& warn) {
  dyn.validate();
  if (u.size() != dyn.size()) throw SizeMismatch(u.size(), dyn.size(), "build_system u");
  const std::size_t n_slots = dyn.size();
  std::vector<double> d(n_slots);
  std::vector<double> v(n_slots);
  for (std::size_t n = 0; n < n_slots; ++n) {
    const double decay = dyn.a[n] * dyn.period;
    d[n] = std::exp(-decay);
    v[n] = dyn.b[n] / dyn.a[n] * -std::expm1(-decay);
    if (d[n] < std::numeric_limits<double>::min()) {
      d[n] = std::numeric_limits<double>::min();
      if (warn) {
        warn("d_" + std::to_string(n + 1) + " = exp(-" + std::to_string(decay) +
             ") underflows; clamped to the smallest normal double");
      }
    }
    if (d[n] >= 1.0) {
      throw InvalidArgument("a_" + std::to_string(n + 1) + " T is too small: d_" +
                            std::to_string(n + 1) + " rounds to 1");
    }
  }
  return AllocationSystem(std::move(u), std::move(v), std::move(d));
}

Trajectory simulate(const SwitchedDynamics& dyn, const Permutation& p, std::span<const double> x0,
                    std::size_t k_steps, std::size_t samples_per_period) {
  dyn.validate();
  const std::size_t n_slots = dyn.size();
  if (p.size() != n_slots) throw SizeMismatch(p.size(), n_slots, "simulate permutation");
  if (x0.size() != n_slots) throw SizeMismatch(x0.size(), n_slots, "simulate x0");
  if (samples_per_period == 0) throw InvalidArgument("samples_per_period must be >= 1");

  Trajectory traj;
  traj.time.reserve((k_steps + 1) * samples_per_period + 1);
  traj.state.reserve((k_steps + 1) * samples_per_period + 1);

  const double T = dyn.period;
  auto relax = [&](std::span<const double> start, double tau) {
    std::vector<double> x(n_slots);
    for (std::size_t n = 0; n < n_slots; ++n) {
      const double a = dyn.a[n];
      x[n] = std::exp(-a * tau) * start[n] + dyn.b[n] / a * -std::expm1(-a * tau);
    }
    return x;
  };

  std::vector<double> start(x0.begin(), x0.end());
  for (std::size_t k = 0; k <= k_steps; ++k) {
    const double t_k = dyn.t0 + static_cast<double>(k) * T;
    for (std::size_t j = 0; j < samples_per_period; ++j) {
      const double tau = T * static_cast<double>(j) / static_cast<double>(samples_per_period);
      traj.time.push_back(t_k + tau);
      traj.state.push_back(j == 0 ? start : relax(start, tau));
    }
    std::vector<double> end = relax(start, T);
    if (k == k_steps) {
      traj.time.push_back(t_k + T);
      traj.state.push_back(std::move(end));
    } else {
      for (std::size_t n = 0; n < n_slots; ++n) start[p(n)] = end[n];
    }
  }
  return traj;
}

void steady_state_into(const AllocationSystem& sys, std::span<const Index> images,
                       std::span<double> x, std::span<char> scratch) {
  const auto d = sys.d();
  const auto v = sys.v();
  const auto log_d = sys.log_d();
  const std::size_t n = images.size();
  std::fill(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(n), char{0});
  for (std::size_t start = 0; start < n; ++start) {
    if (scratch[start]) continue;
    // Going once around the cycle maps x_start to (prod d) x_start + offset.
    double offset = 0.0;
    double log_gain = 0.0;
    std::size_t j = start;
    do {
      offset = d[j] * offset + v[j];
      log_gain += log_d[j];
      scratch[j] = 1;
      j = images[j];
    } while (j != start);
    x[start] = offset / -std::expm1(log_gain);
    for (j = start; images[j] != start; j = images[j]) x[images[j]] = d[j] * x[j] + v[j];
  }
}

SteadyState steady_state(const AllocationSystem& sys, const Permutation& p) {
  if (p.size() != sys.size()) throw SizeMismatch(p.size(), sys.size(), "steady_state");
  SteadyState ss;
  ss.x_per.resize(sys.size());
  std::vector<char> scratch(sys.size());
  steady_state_into(sys, p.images(), ss.x_per, scratch);
  return ss;
}

double objective_J(const AllocationSystem& sys, const Permutation& p) {
  const SteadyState ss = steady_state(sys, p);
  double acc = 0.0;
  for (std::size_t n = 0; n < sys.size(); ++n) acc += sys.u()[n] * ss.x_per[n];
  return acc;
}

double objective_J_approx(const AllocationSystem& sys, const Permutation& p) {
  if (p.size() != sys.size()) throw SizeMismatch(p.size(), sys.size(), "objective_J_approx");
  double acc = 0.0;
  for (std::size_t j = 0; j < sys.size(); ++j) acc += sys.u()[p(j)] * sys.v()[j];
  return acc;
}

double average_benefit(const GeneralObjective& obj, const AllocationSystem& sys,
                       const Permutation& p) {
  if (obj.w.size() != sys.size()) throw SizeMismatch(obj.w.size(), sys.size(), "average_benefit");
  const std::vector<double> expected_u = obj.u();
  for (std::size_t n = 0; n < sys.size(); ++n) {
    const double scale = std::max({std::fabs(expected_u[n]), std::fabs(sys.u()[n]), 1e-300});
    if (std::fabs(expected_u[n] - sys.u()[n]) > 1e-12 * scale) {
      throw InvalidArgument("average_benefit: u_" + std::to_string(n + 1) +
                            " differs from dtilde * w");
    }
  }
  double weighted_source = 0.0;
  for (std::size_t n = 0; n < sys.size(); ++n) weighted_source += obj.w[n] * obj.vtilde[n];
  return (objective_J(sys, p) + weighted_source) / obj.period;
}

Permutation NormalizedSystem::to_sorted(const Permutation& original) const {
  return compose(relabel.inverse(), compose(original, relabel));
}

Permutation NormalizedSystem::from_sorted(const Permutation& sorted) const {
  return compose(relabel, compose(sorted, relabel.inverse()));
}

NormalizedSystem normalize_sorted_u(const AllocationSystem& sys) {
  const std::size_t n = sys.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  const auto u = sys.u();
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return u[i] < u[j]; });
  std::vector<double> su(n), sv(n), sd(n);
  for (std::size_t i = 0; i < n; ++i) {
    su[i] = sys.u()[order[i]];
    sv[i] = sys.v()[order[i]];
    sd[i] = sys.d()[order[i]];
  }
  return {AllocationSystem(std::move(su), std::move(sv), std::move(sd)),
          Permutation::from_images(std::move(order))};
}

}  // namespace permalloc
