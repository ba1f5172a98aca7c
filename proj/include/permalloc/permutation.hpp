#pragma once

// Permutations of {0, ..., N-1}.
//
// Storage and the C++ API are 0-based. Everything that leaves the library
// (JSON, cycle strings, the CLI, the Python module) is 1-based; use
// one_based() / from_one_based() / parse_cycles() at those boundaries.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace permalloc {

using Index = std::uint32_t;

class Permutation {
 public:
  /// Identity on zero elements.
  Permutation() = default;

  static Permutation identity(std::size_t n);

  /// Validates that `images` is a bijection of {0..n-1}.
  static Permutation from_images(std::vector<Index> images);

  /// Same, for 1-based images as they appear in files and on the command line.
  static Permutation from_one_based(std::span<const std::int64_t> images);

  /// Transposition (i j) on n elements; (i i) is the identity.
  static Permutation transposition(std::size_t n, Index i, Index j);

  /// Parses cycle notation with 1-based labels, e.g. "(1 2 3)(4 5)".
  /// "()" or an empty string is the identity.
  static Permutation parse_cycles(std::size_t n, std::string_view text);

  std::size_t size() const noexcept { return images_.size(); }

  /// Image of element i (0-based).
  Index operator()(std::size_t i) const noexcept { return images_[i]; }

  std::span<const Index> images() const noexcept { return images_; }
  std::vector<std::int64_t> one_based() const;

  Permutation inverse() const;
  Permutation pow(std::int64_t k) const;
  bool is_identity() const noexcept;

  /// Disjoint cycles (0-based), each starting at its smallest element,
  /// ordered by that element. Fixed points are included as 1-cycles.
  std::vector<std::vector<Index>> cycles() const;

  /// 1-based cycle notation without fixed points; "()" for the identity.
  std::string to_cycle_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  /// Lexicographic order of the image arrays.
  friend std::strong_ordering operator<=>(const Permutation& a, const Permutation& b) {
    return a.images_ <=> b.images_;
  }

 private:
  explicit Permutation(std::vector<Index> images) : images_(std::move(images)) {}

  std::vector<Index> images_;
};

/// (p o q)(i) = p(q(i)).
Permutation compose(const Permutation& p, const Permutation& q);

/// Smallest K >= 1 with p^K = id (lcm of the cycle lengths).
std::uint64_t order(const Permutation& p);

/// The sequence sigma_0 = p, sigma_n = (n sigma_{n-1}(n)) o sigma_{n-1}.
/// steps[n] fixes {0..n-1}; steps[N-1] = steps[N] = id.
struct TranspositionChain {
  std::vector<Permutation> steps;
};

TranspositionChain transposition_chain(const Permutation& p);

/// E_k = {i : p^k(i) != q^k(i)}, G_k = {i : p^j(i) = q^j(i) for all j <= k}.
struct DivergenceSets {
  std::vector<Index> diverging;  // E_k
  std::vector<Index> agreeing;   // G_k
  std::size_t m = 0;             // #E_k
};

DivergenceSets divergence_sets(const Permutation& p, const Permutation& q, std::size_t k);

/// Walks k = 1, 2, ... keeping p^k and q^k, so the whole family of
/// divergence sets costs O(N) per step.
class DivergenceTracker {
 public:
  DivergenceTracker(const Permutation& p, const Permutation& q);

  /// Advances to the next power and returns the sets for it.
  const DivergenceSets& advance();
  std::size_t k() const noexcept { return k_; }

 private:
  Permutation p_;
  Permutation q_;
  std::vector<Index> p_pow_;
  std::vector<Index> q_pow_;
  std::vector<char> still_agreeing_;
  std::size_t k_ = 0;
  DivergenceSets current_;
};

// ---- enumeration ---------------------------------------------------------

inline constexpr std::size_t kDefaultEnumerationCap = 12;

/// n!, throws InvalidArgument when it does not fit in 64 bits (n > 20).
std::uint64_t factorial(std::size_t n);

/// Throws CapExceeded when n > cap.
void check_enumeration_cap(std::size_t n, std::size_t cap);

/// Lexicographic rank in [0, n!) via the factorial number system.
std::uint64_t rank(const Permutation& p);
Permutation unrank(std::size_t n, std::uint64_t r);

/// Calls fn on the image array of every permutation with rank in
/// [first, last), in lexicographic order. The span is only valid for the call.
template <class Fn>
void for_each_permutation(std::size_t n, std::uint64_t first, std::uint64_t last, Fn&& fn) {
  if (first >= last) return;
  const Permutation start = unrank(n, first);
  std::vector<Index> images(start.images().begin(), start.images().end());
  for (std::uint64_t r = first; r < last; ++r) {
    fn(std::span<const Index>(images));
    std::next_permutation(images.begin(), images.end());
  }
}

/// All n! permutations in lexicographic order. Refuses n above `cap`.
std::vector<Permutation> enumerate(std::size_t n, std::size_t cap = kDefaultEnumerationCap);

/// Splits [0, n!) into `parts` contiguous, nearly equal blocks.
std::vector<std::pair<std::uint64_t, std::uint64_t>> partition_ranks(std::size_t n,
                                                                     std::size_t parts);

}  // namespace permalloc
