#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "permalloc/dynamics.hpp"
#include "permalloc/permutation.hpp"

namespace permalloc {

enum class Mode { max, min, both };

std::string_view to_string(Mode mode);
/// Accepts "max", "min", "both"; throws InvalidArgument otherwise.
Mode parse_mode(std::string_view text);

struct Extremum {
  Permutation perm;
  double value = 0.0;
  /// Permutations whose value lies within 1e-12 |value| of the optimum
  /// (including `perm`). Only known for the exhaustive search.
  std::optional<std::uint64_t> ties;
};

struct SolveResult {
  Mode mode = Mode::both;
  bool exact = true;
  std::size_t n = 0;
  std::optional<Extremum> best;   // argmax (P_max or P_+)
  std::optional<Extremum> worst;  // argmin (P_min or P_-)
  std::uint64_t evaluated = 0;    // permutations enumerated
};

struct ExactOptions {
  Mode mode = Mode::both;
  unsigned workers = 1;
  std::size_t n_cap = kDefaultEnumerationCap;
};

/// Exhaustive search of J over all N! permutations. On equal values the
/// lexicographically smallest permutation wins, so the result does not
/// depend on the number of workers.
SolveResult solve_exact(const AllocationSystem& sys, const ExactOptions& options = {});

/// Maximizers/minimizers of J^approx(P) = <u, P v> by sorted matching:
/// P_+ pairs the k-th smallest u with the k-th smallest v, P_- with the
/// k-th largest. Ties in u or v are broken by a stable sort.
SolveResult solve_approx(const AllocationSystem& sys, Mode mode = Mode::both);

/// P_+ / P_- as permutations of the original (unsorted) system.
Permutation approx_maximizer(const AllocationSystem& sys);
Permutation approx_minimizer(const AllocationSystem& sys);

}  // namespace permalloc
