#include "permalloc/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "permalloc/compensated_sum.hpp"
#include "permalloc/error.hpp"

namespace permalloc {

std::string_view to_string(SignCase c) {
  switch (c) {
    case SignCase::u_pos_v_pos: return "u+v+";
    case SignCase::u_neg_v_pos: return "u-v+";
    case SignCase::u_pos_v_neg: return "u+v-";
    case SignCase::u_neg_v_neg: return "u-v-";
  }
  return "u+v+";
}

namespace {

// +1 for non-negative, -1 for non-positive (and not all zero).
int constant_sign(std::span<const double> x, std::string_view name) {
  const bool any_pos = std::any_of(x.begin(), x.end(), [](double e) { return e > 0.0; });
  const bool any_neg = std::any_of(x.begin(), x.end(), [](double e) { return e < 0.0; });
  if (any_pos && any_neg) {
    throw MixedSign(std::string(name) +
                    " has entries of both signs; the criterion only holds when u and v "
                    "each have a constant sign");
  }
  return any_neg ? -1 : 1;
}

std::vector<double> sorted_magnitudes(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](double e) { return std::fabs(e); });
  std::sort(out.begin(), out.end());
  return out;
}

struct MagnitudeBounds {
  double upper = 0.0;  // top m of |u| with top m of |v|, sorted matching
  double lower = 0.0;  // bottom m of |u| with bottom m of |v|, reversed
};

MagnitudeBounds magnitude_bounds(std::span<const double> a, std::span<const double> b,
                                 std::size_t m) {
  const std::size_t n = a.size();
  m = std::min(m, n);
  CompensatedSum upper;
  CompensatedSum lower;
  for (std::size_t k = n - m; k < n; ++k) upper += a[k] * b[k];
  for (std::size_t k = 0; k < m; ++k) lower += a[k] * b[m - 1 - k];
  return {upper.value(), lower.value()};
}

void require_ascending(std::span<const double> u) {
  if (!std::is_sorted(u.begin(), u.end())) throw InvalidArgument("u must be sorted ascending");
}

// Everything phi needs, precomputed once per system.
struct PhiInputs {
  std::vector<double> a;  // |u| ascending
  std::vector<double> b;  // |v| ascending
  GapProducts gaps;
  NormalizedSystem norm;
  double d_max = 0.0;
  double d_min = 0.0;
};

PhiInputs phi_inputs(const AllocationSystem& sys) {
  if (sys.size() < 2) throw InvalidArgument("the criterion needs N >= 2");
  PhiInputs in;
  in.norm = normalize_sorted_u(sys);
  const auto u = in.norm.system.u();
  const auto v = in.norm.system.v();
  in.a = sorted_magnitudes(u);
  in.b = sorted_magnitudes(v);
  in.gaps = gap_products(u, v, ascending_order(v));
  in.d_max = sys.d_max();
  in.d_min = sys.d_min();
  return in;
}

PhiTerm phi_term(const PhiInputs& in, std::size_t m1) {
  const std::size_t n = in.a.size();
  if (m1 < 2 || m1 > n) {
    throw InvalidArgument("m1 = " + std::to_string(m1) + " outside 2.." + std::to_string(n));
  }
  PhiTerm term;
  term.m1 = m1;
  term.l_star = n / m1 - 1;
  term.denominator = in.gaps.s[(m1 + 1) / 2 - 1];
  if (!(term.denominator > 0.0)) {
    throw DegenerateGaps("s_" + std::to_string((m1 + 1) / 2) + " = 0 for m1 = " +
                         std::to_string(m1) +
                         ": u or v has repeated entries, so phi is undefined");
  }
  CompensatedSum numerator;
  for (std::size_t l = 1; l <= term.l_star; ++l) {
    const auto bounds = magnitude_bounds(in.a, in.b, (l + 1) * m1);
    const auto ld = static_cast<double>(l);
    numerator += std::pow(in.d_max, ld) * bounds.upper;
    numerator -= std::pow(in.d_min, ld) * bounds.lower;
  }
  const auto full = magnitude_bounds(in.a, in.b, n);
  const auto tail_power = static_cast<double>(term.l_star + 1);
  numerator += std::pow(in.d_max, tail_power) / (1.0 - in.d_max) * full.upper;
  numerator -= std::pow(in.d_min, tail_power) / (1.0 - in.d_min) * full.lower;
  term.numerator = numerator.value();
  term.phi = term.numerator / term.denominator;
  return term;
}

}  // namespace

SignCase classify_signs(std::span<const double> u, std::span<const double> v) {
  const int su = constant_sign(u, "u");
  const int sv = constant_sign(v, "v");
  if (su > 0) return sv > 0 ? SignCase::u_pos_v_pos : SignCase::u_pos_v_neg;
  return sv > 0 ? SignCase::u_neg_v_pos : SignCase::u_neg_v_neg;
}

Permutation ascending_order(std::span<const double> v) {
  std::vector<Index> order(v.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return v[i] < v[j]; });
  return Permutation::from_images(std::move(order));
}

GapProducts gap_products(std::span<const double> u, std::span<const double> v,
                         const Permutation& sigma_plus) {
  const std::size_t n = u.size();
  if (n < 2) throw InvalidArgument("gap products need N >= 2");
  if (v.size() != n) throw SizeMismatch(v.size(), n, "gap_products v");
  if (sigma_plus.size() != n) throw SizeMismatch(sigma_plus.size(), n, "gap_products sigma_plus");
  require_ascending(u);
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = v[sigma_plus(k)];
  if (!std::is_sorted(w.begin(), w.end())) throw InvalidArgument("sigma_plus does not sort v");

  // On sorted data the closest other entry is a neighbour.
  auto nearest_gap = [n](const std::vector<double>& x, std::size_t k) {
    if (k == 0) return std::fabs(x[0] - x[1]);
    if (k == n - 1) return std::fabs(x[n - 1] - x[n - 2]);
    return std::min(std::fabs(x[k] - x[k - 1]), std::fabs(x[k] - x[k + 1]));
  };
  const std::vector<double> us(u.begin(), u.end());

  GapProducts out;
  out.p_tilde.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.p_tilde[k] = nearest_gap(us, k) * nearest_gap(w, k);
  out.p_sorted = out.p_tilde;
  std::sort(out.p_sorted.begin(), out.p_sorted.end());
  out.s.resize(n);
  CompensatedSum acc;
  for (std::size_t k = 0; k < n; ++k) {
    acc += out.p_sorted[k];
    out.s[k] = acc.value();
  }
  return out;
}

FBounds f_bounds(std::span<const double> u, std::span<const double> v, std::size_t m) {
  if (u.size() != v.size()) throw SizeMismatch(u.size(), v.size(), "f_bounds");
  if (u.empty()) throw InvalidArgument("f_bounds needs N >= 1");
  if (m < 1) throw InvalidArgument("f_bounds needs m >= 1");
  require_ascending(u);
  const SignCase sign = classify_signs(u, v);
  const auto bounds = magnitude_bounds(sorted_magnitudes(u), sorted_magnitudes(v), m);
  if (sign == SignCase::u_pos_v_pos || sign == SignCase::u_neg_v_neg) {
    return {bounds.lower, bounds.upper};
  }
  return {-bounds.upper, -bounds.lower};
}

double phi(const AllocationSystem& sys, std::size_t m1) {
  classify_signs(sys.u(), sys.v());
  return phi_term(phi_inputs(sys), m1).phi;
}

CriterionReport check(const AllocationSystem& sys, const CheckOptions& options) {
  CriterionReport report;
  report.sign_case = classify_signs(sys.u(), sys.v());
  report.heuristic = options.heuristic_m1_2_only;

  const PhiInputs in = phi_inputs(sys);
  const std::size_t n = sys.size();
  report.p_tilde = in.gaps.p_tilde;
  report.p_sorted = in.gaps.p_sorted;
  report.s = in.gaps.s;
  for (std::size_t m = 1; m <= n; ++m) {
    const FBounds f = f_bounds(in.norm.system.u(), in.norm.system.v(), m);
    report.f_minus.push_back(f.minus);
    report.f_plus.push_back(f.plus);
  }
  report.d_max = in.d_max;
  report.d_min = in.d_min;

  const std::size_t last_m1 = options.heuristic_m1_2_only ? 2 : n;
  for (std::size_t m1 = 2; m1 <= last_m1; ++m1) {
    report.phi.push_back(phi_term(in, m1));
    if (report.phi.size() == 1 || report.phi.back().phi > report.max_phi) {
      report.max_phi = report.phi.back().phi;
      report.argmax_m1 = m1;
    }
  }
  report.satisfied = report.max_phi <= 1.0;
  return report;
}

}  // namespace permalloc
