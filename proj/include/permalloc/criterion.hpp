#pragma once

// Sufficient condition under which the exact optimizers of
// J(P) = <u, (I - P D)^-1 P v> coincide with the sorted-matching optimizers
// of J^approx(P) = <u, P v>.
//
// With u sorted ascending and w the ascending rearrangement of v:
//
//   p~_n   = min_{i != n} |u_n - u_i| * min_{j != n} |w_n - w_j|
//   s_m    = sum of the m smallest p~_n
//   F_m^+  = top m of |u| matched with top m of |v| (largest possible sum)
//   F_m^-  = bottom m of |u| against bottom m of |v| reversed
//   phi(m1) = (1 / s_ceil(m1/2)) sum_{l>=1} d_max^l F^+_{(l+1) m1} - d_min^l F^-_{(l+1) m1}
//
// and the verdict is max_{m1 = 2..N} phi(m1) <= 1. F saturates at m >= N,
// which turns the series into a finite sum plus two geometric tails.
//
// u and v must each have a constant sign. For negative products (u < 0 < v
// or v < 0 < u) the reported F_m^+ / F_m^- are the signed sums, i.e. the
// negated magnitude bounds with their roles exchanged; phi always works on
// the magnitudes.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "permalloc/dynamics.hpp"
#include "permalloc/permutation.hpp"

namespace permalloc {

enum class SignCase { u_pos_v_pos, u_neg_v_pos, u_pos_v_neg, u_neg_v_neg };

std::string_view to_string(SignCase c);

/// Throws MixedSign if u or v has both strictly positive and strictly
/// negative entries. All-zero vectors count as positive.
SignCase classify_signs(std::span<const double> u, std::span<const double> v);

struct GapProducts {
  std::vector<double> p_tilde;   // per sorted position n
  std::vector<double> p_sorted;  // ascending
  std::vector<double> s;         // s[m-1] = s_m
};

/// The permutation sigma with v_{sigma(0)} <= v_{sigma(1)} <= ... (stable).
Permutation ascending_order(std::span<const double> v);

/// Gap products for u sorted ascending and sigma_plus = ascending_order(v),
/// using the nearest-neighbour shortcut. Throws InvalidArgument if N < 2,
/// u is not ascending or sigma_plus does not sort v.
GapProducts gap_products(std::span<const double> u, std::span<const double> v,
                         const Permutation& sigma_plus);

struct FBounds {
  double minus = 0.0;  // F_m^-
  double plus = 0.0;   // F_m^+
};

/// F_m^+/-, signed as described above. u must be sorted ascending.
FBounds f_bounds(std::span<const double> u, std::span<const double> v, std::size_t m);

struct CheckOptions {
  /// Only evaluate phi(2). The maximum is usually attained there, but that
  /// is an empirical observation, not a guarantee: a "satisfied" verdict in
  /// this mode is heuristic.
  bool heuristic_m1_2_only = false;
};

struct PhiTerm {
  std::size_t m1 = 0;
  std::size_t l_star = 0;
  double numerator = 0.0;
  double denominator = 0.0;  // s_ceil(m1/2)
  double phi = 0.0;
};

struct CriterionReport {
  SignCase sign_case = SignCase::u_pos_v_pos;
  std::vector<double> p_tilde;
  std::vector<double> p_sorted;
  std::vector<double> s;        // s_1..s_N
  std::vector<double> f_plus;   // F_1^+..F_N^+
  std::vector<double> f_minus;  // F_1^-..F_N^-
  std::vector<PhiTerm> phi;     // m1 = 2..N (only m1 = 2 in heuristic mode)
  double d_max = 0.0;
  double d_min = 0.0;
  double max_phi = 0.0;
  std::size_t argmax_m1 = 0;
  bool satisfied = false;
  bool heuristic = false;
};

/// phi(m1) via the exact finite truncation. Throws DegenerateGaps when
/// s_ceil(m1/2) = 0 and InvalidArgument unless 2 <= m1 <= N.
double phi(const AllocationSystem& sys, std::size_t m1);

/// Evaluates the criterion on sys (u is sorted internally).
CriterionReport check(const AllocationSystem& sys, const CheckOptions& options = {});

}  // namespace permalloc
