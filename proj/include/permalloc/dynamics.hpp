#pragma once

// The switched linear system
//
//   x_n'(t) = -a_n x_n(t) + b_n         on [T_k, T_{k+1}),
//   x(T_k)  = P x(T_k^-),               T_k = k T + T_0,
//
// where slot n always relaxes with rates (a_n, b_n) and the contents of slot
// j move to slot sigma(j) at every re-allocation, i.e. (P w)_n = w_{sigma^-1(n)}.
// Over one period x(T_{k+1}) = P D x(T_k) + P v with D = diag(exp(-a T)) and
// v = (b/a)(1 - exp(-a T)).

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "permalloc/permutation.hpp"

namespace permalloc {

using WarningSink = std::function<void(std::string_view)>;

/// Writes the warning to stderr.
void default_warning_sink(std::string_view message);

struct SwitchedDynamics {
  std::vector<double> a;  // decay rates, > 0
  std::vector<double> b;  // source rates, >= 0
  double period = 1.0;    // T
  double t0 = 0.0;        // T_0

  std::size_t size() const noexcept { return a.size(); }
  /// Throws InvalidArgument / SizeMismatch when the invariants fail.
  void validate() const;
};

/// (u, v, D) defining J(P) = <u, (I - P D)^-1 P v>.
class AllocationSystem {
 public:
  AllocationSystem() = default;
  /// Throws unless all three have the same length and 0 < d_n < 1.
  AllocationSystem(std::vector<double> u, std::vector<double> v, std::vector<double> d);

  std::size_t size() const noexcept { return u_.size(); }
  std::span<const double> u() const noexcept { return u_; }
  std::span<const double> v() const noexcept { return v_; }
  std::span<const double> d() const noexcept { return d_; }
  /// log(d_n), cached for the cycle solve.
  std::span<const double> log_d() const noexcept { return log_d_; }

  double d_max() const;
  double d_min() const;

 private:
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<double> d_;
  std::vector<double> log_d_;
};

/// Per-period quantities of the averaged benefit f^k = <w, (1/T) int x dt>.
struct GeneralObjective {
  std::vector<double> w;
  std::vector<double> dtilde;  // (1 - e^{-aT}) / a
  std::vector<double> vtilde;  // (b/a) (T - dtilde)
  double period = 1.0;

  static GeneralObjective from_dynamics(const SwitchedDynamics& dyn, std::vector<double> w);
  /// u = dtilde * w, the weight vector J needs.
  std::vector<double> u() const;
};

struct SteadyState {
  std::vector<double> x_per;  // x(T_k) in the periodic regime
};

/// d_n = e^{-a_n T}, v_n = (b_n/a_n)(1 - e^{-a_n T}). When a_n T is so large
/// that d_n underflows, d_n is clamped to the smallest normal double and a
/// warning is sent to `warn`.
AllocationSystem build_system(const SwitchedDynamics& dyn, std::vector<double> u,
                              const WarningSink& warn = default_warning_sink);

struct Trajectory {
  std::vector<double> time;
  std::vector<std::vector<double>> state;  // state[i] is x(time[i])
};

/// Closed-form trajectory over periods k = 0..k_steps. Each period contributes
/// `samples_per_period` points T_k + jT/s (j = 0 is the value right after the
/// re-allocation); the last point is the left limit at T_{k_steps+1}.
Trajectory simulate(const SwitchedDynamics& dyn, const Permutation& p, std::span<const double> x0,
                    std::size_t k_steps, std::size_t samples_per_period);

/// Solves (I - P D) x = P v one cycle at a time in O(N).
SteadyState steady_state(const AllocationSystem& sys, const Permutation& p);

/// Allocation-free kernel behind steady_state; `images` is a 0-based image array.
void steady_state_into(const AllocationSystem& sys, std::span<const Index> images,
                       std::span<double> x, std::span<char> scratch);

/// J(P) = <u, (I - P D)^-1 P v>.
double objective_J(const AllocationSystem& sys, const Permutation& p);

/// J^approx(P) = <u, P v> = sum_n u_n v_{sigma^-1(n)}.
double objective_J_approx(const AllocationSystem& sys, const Permutation& p);

/// J_av(P) = (J(P) + <w, vtilde>) / T. Requires sys.u() == dtilde * w.
double average_benefit(const GeneralObjective& obj, const AllocationSystem& sys,
                       const Permutation& p);

/// The system with slots relabelled so that u is ascending (stable sort).
/// New slot i is old slot relabel(i); a permutation sigma of the original
/// system corresponds to relabel^-1 o sigma o relabel on the sorted one and
/// both give the same J and J^approx.
struct NormalizedSystem {
  AllocationSystem system;
  Permutation relabel;

  Permutation to_sorted(const Permutation& original) const;
  Permutation from_sorted(const Permutation& sorted) const;
};

NormalizedSystem normalize_sorted_u(const AllocationSystem& sys);

}  // namespace permalloc
