#include "permalloc/permutation.hpp"

#include <cctype>
#include <limits>
#include <numeric>

#include "permalloc/error.hpp"

namespace permalloc {

Permutation Permutation::identity(std::size_t n) {
  std::vector<Index> images(n);
  std::iota(images.begin(), images.end(), Index{0});
  return Permutation(std::move(images));
}

Permutation Permutation::from_images(std::vector<Index> images) {
  const std::size_t n = images.size();
  if (n > std::numeric_limits<Index>::max()) throw InvalidArgument("permutation too large");
  std::vector<char> seen(n, 0);
  for (Index x : images) {
    if (x >= n) {
      throw InvalidArgument("permutation image " + std::to_string(x + 1) + " outside 1.." +
                            std::to_string(n));
    }
    if (seen[x]) throw InvalidArgument("permutation image " + std::to_string(x + 1) + " repeated");
    seen[x] = 1;
  }
  return Permutation(std::move(images));
}

Permutation Permutation::from_one_based(std::span<const std::int64_t> images) {
  std::vector<Index> zero(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto x = images[i];
    if (x < 1 || static_cast<std::uint64_t>(x) > images.size()) {
      throw InvalidArgument("permutation image " + std::to_string(x) + " outside 1.." +
                            std::to_string(images.size()));
    }
    zero[i] = static_cast<Index>(x - 1);
  }
  return from_images(std::move(zero));
}

Permutation Permutation::transposition(std::size_t n, Index i, Index j) {
  if (i >= n || j >= n) throw InvalidArgument("transposition index out of range");
  Permutation p = identity(n);
  std::swap(p.images_[i], p.images_[j]);
  return p;
}

Permutation Permutation::parse_cycles(std::size_t n, std::string_view text) {
  std::vector<Index> images(n);
  std::iota(images.begin(), images.end(), Index{0});
  std::vector<char> used(n, 0);

  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_space();
  while (pos < text.size()) {
    if (text[pos] != '(') throw InvalidArgument("cycle notation: expected '(' in \"" + std::string(text) + "\"");
    ++pos;
    std::vector<Index> cycle;
    for (;;) {
      while (pos < text.size() &&
             (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) {
        ++pos;
      }
      if (pos >= text.size()) throw InvalidArgument("cycle notation: missing ')'");
      if (text[pos] == ')') {
        ++pos;
        break;
      }
      if (!std::isdigit(static_cast<unsigned char>(text[pos]))) {
        throw InvalidArgument("cycle notation: unexpected character '" + std::string(1, text[pos]) + "'");
      }
      std::uint64_t label = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        label = label * 10 + static_cast<std::uint64_t>(text[pos] - '0');
        if (label > n) break;
        ++pos;
      }
      if (label < 1 || label > n) {
        throw InvalidArgument("cycle notation: label outside 1.." + std::to_string(n));
      }
      const auto idx = static_cast<Index>(label - 1);
      if (used[idx]) throw InvalidArgument("cycle notation: label " + std::to_string(label) + " repeated");
      used[idx] = 1;
      cycle.push_back(idx);
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      images[cycle[i]] = cycle[(i + 1) % cycle.size()];
    }
    skip_space();
  }
  return Permutation(std::move(images));
}

std::vector<std::int64_t> Permutation::one_based() const {
  std::vector<std::int64_t> out(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) out[i] = static_cast<std::int64_t>(images_[i]) + 1;
  return out;
}

Permutation Permutation::inverse() const {
  std::vector<Index> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) inv[images_[i]] = static_cast<Index>(i);
  return Permutation(std::move(inv));
}

Permutation Permutation::pow(std::int64_t k) const {
  Permutation base = k < 0 ? inverse() : *this;
  auto e = static_cast<std::uint64_t>(k < 0 ? -k : k);
  Permutation result = identity(size());
  while (e > 0) {
    if (e & 1u) result = compose(base, result);
    base = compose(base, base);
    e >>= 1u;
  }
  return result;
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

std::vector<std::vector<Index>> Permutation::cycles() const {
  std::vector<std::vector<Index>> out;
  std::vector<char> seen(images_.size(), 0);
  for (std::size_t start = 0; start < images_.size(); ++start) {
    if (seen[start]) continue;
    std::vector<Index> cycle;
    for (auto i = static_cast<Index>(start); !seen[i]; i = images_[i]) {
      seen[i] = 1;
      cycle.push_back(i);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

std::string Permutation::to_cycle_string() const {
  std::string out;
  for (const auto& cycle : cycles()) {
    if (cycle.size() < 2) continue;
    out += '(';
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(cycle[i] + 1);
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw SizeMismatch(p.size(), q.size(), "compose");
  std::vector<Index> out(p.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p(q(i));
  return Permutation::from_images(std::move(out));
}

std::uint64_t order(const Permutation& p) {
  std::uint64_t result = 1;
  for (const auto& cycle : p.cycles()) {
    const std::uint64_t len = cycle.size();
    const std::uint64_t g = std::gcd(result, len);
    const std::uint64_t factor = len / g;
    if (result > std::numeric_limits<std::uint64_t>::max() / factor) {
      throw InvalidArgument("permutation order overflows 64 bits");
    }
    result *= factor;
  }
  return result;
}

TranspositionChain transposition_chain(const Permutation& p) {
  const std::size_t n = p.size();
  TranspositionChain chain;
  chain.steps.reserve(n + 1);
  chain.steps.push_back(p);
  for (std::size_t step = 1; step <= n; ++step) {
    // 1-based step n acts on element n, i.e. 0-based element step-1.
    const auto target = static_cast<Index>(step - 1);
    const Permutation& prev = chain.steps.back();
    chain.steps.push_back(compose(Permutation::transposition(n, target, prev(target)), prev));
  }
  return chain;
}

DivergenceSets divergence_sets(const Permutation& p, const Permutation& q, std::size_t k) {
  if (p.size() != q.size()) throw SizeMismatch(p.size(), q.size(), "divergence_sets");
  if (k == 0) {
    DivergenceSets sets;
    sets.agreeing.resize(p.size());
    std::iota(sets.agreeing.begin(), sets.agreeing.end(), Index{0});
    return sets;
  }
  DivergenceTracker tracker(p, q);
  for (std::size_t j = 1; j < k; ++j) tracker.advance();
  return tracker.advance();
}

DivergenceTracker::DivergenceTracker(const Permutation& p, const Permutation& q)
    : p_(p), q_(q), still_agreeing_(p.size(), 1) {
  if (p.size() != q.size()) throw SizeMismatch(p.size(), q.size(), "DivergenceTracker");
  p_pow_.resize(p.size());
  q_pow_.resize(p.size());
  std::iota(p_pow_.begin(), p_pow_.end(), Index{0});
  std::iota(q_pow_.begin(), q_pow_.end(), Index{0});
}

const DivergenceSets& DivergenceTracker::advance() {
  ++k_;
  current_ = {};
  for (std::size_t i = 0; i < p_pow_.size(); ++i) {
    p_pow_[i] = p_(p_pow_[i]);
    q_pow_[i] = q_(q_pow_[i]);
    if (p_pow_[i] != q_pow_[i]) {
      current_.diverging.push_back(static_cast<Index>(i));
      still_agreeing_[i] = 0;
    }
    if (still_agreeing_[i]) current_.agreeing.push_back(static_cast<Index>(i));
  }
  current_.m = current_.diverging.size();
  return current_;
}

std::uint64_t factorial(std::size_t n) {
  if (n > 20) throw InvalidArgument(std::to_string(n) + "! does not fit in 64 bits");
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_enumeration_cap(std::size_t n, std::size_t cap) {
  if (n > cap) throw CapExceeded(n, cap);
}

std::uint64_t rank(const Permutation& p) {
  const std::size_t n = p.size();
  std::uint64_t r = 0;
  std::vector<char> used(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t smaller = 0;
    for (Index x = 0; x < p(i); ++x) {
      if (!used[x]) ++smaller;
    }
    used[p(i)] = 1;
    r += smaller * factorial(n - 1 - i);
  }
  return r;
}

Permutation unrank(std::size_t n, std::uint64_t r) {
  if (r >= factorial(n)) throw InvalidArgument("rank out of range for N = " + std::to_string(n));
  std::vector<Index> pool(n);
  std::iota(pool.begin(), pool.end(), Index{0});
  std::vector<Index> images;
  images.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t f = factorial(n - 1 - i);
    const auto digit = static_cast<std::size_t>(r / f);
    r %= f;
    images.push_back(pool[digit]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  return Permutation::from_images(std::move(images));
}

std::vector<Permutation> enumerate(std::size_t n, std::size_t cap) {
  if (n < 1) throw InvalidArgument("enumerate needs N >= 1");
  check_enumeration_cap(n, cap);
  std::vector<Permutation> out;
  out.reserve(factorial(n));
  for_each_permutation(n, 0, factorial(n), [&](std::span<const Index> images) {
    out.push_back(Permutation::from_images({images.begin(), images.end()}));
  });
  return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> partition_ranks(std::size_t n,
                                                                     std::size_t parts) {
  const std::uint64_t total = factorial(n);
  if (parts == 0) parts = 1;
  if (parts > total) parts = static_cast<std::size_t>(total);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> blocks;
  blocks.reserve(parts);
  const std::uint64_t base = total / parts;
  const std::uint64_t extra = total % parts;
  std::uint64_t first = 0;
  for (std::size_t i = 0; i < parts; ++i) {
    const std::uint64_t len = base + (i < extra ? 1 : 0);
    blocks.emplace_back(first, first + len);
    first += len;
  }
  return blocks;
}

}  // namespace permalloc
