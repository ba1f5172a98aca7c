#include "permalloc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "permalloc/error.hpp"

namespace permalloc {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::max: return "max";
    case Mode::min: return "min";
    case Mode::both: return "both";
  }
  return "both";
}

Mode parse_mode(std::string_view text) {
  if (text == "max") return Mode::max;
  if (text == "min") return Mode::min;
  if (text == "both") return Mode::both;
  throw InvalidArgument("unknown mode '" + std::string(text) + "' (expected max, min or both)");
}

namespace {

constexpr double kTieTolerance = 1e-12;

// Running optimum of one direction plus every value that may still end up
// within the tie tolerance of the final optimum. The window bound
// best -/+ 1e-12 |best| only moves toward the optimum, so values dropped
// from the window can never be needed again.
class ExtremumTracker {
 public:
  explicit ExtremumTracker(bool maximize) : maximize_(maximize) {}

  void offer(double value, std::span<const Index> images) {
    if (!seen_ || better(value, best_)) {
      best_ = value;
      images_.assign(images.begin(), images.end());
      seen_ = true;
      prune();
    }
    if (within(value, best_)) add_to_window(value);
  }

  bool seen() const { return seen_; }
  double best() const { return best_; }
  const std::vector<Index>& images() const { return images_; }
  const std::vector<std::pair<double, std::uint64_t>>& window() const { return window_; }

  bool better(double a, double b) const { return maximize_ ? a > b : a < b; }
  bool within(double value, double optimum) const {
    const double tol = kTieTolerance * std::fabs(optimum);
    return maximize_ ? value >= optimum - tol : value <= optimum + tol;
  }

 private:
  void prune() {
    std::erase_if(window_, [&](const auto& entry) { return !within(entry.first, best_); });
  }

  void add_to_window(double value) {
    for (auto& [v, count] : window_) {
      if (v == value) {
        ++count;
        return;
      }
    }
    window_.emplace_back(value, 1);
  }

  bool maximize_;
  bool seen_ = false;
  double best_ = 0.0;
  std::vector<Index> images_;
  std::vector<std::pair<double, std::uint64_t>> window_;
};

struct WorkerResult {
  ExtremumTracker max{true};
  ExtremumTracker min{false};
};

void scan_block(const AllocationSystem& sys, std::uint64_t first, std::uint64_t last,
                WorkerResult& out) {
  const std::size_t n = sys.size();
  std::vector<double> x(n);
  std::vector<char> scratch(n);
  const auto u = sys.u();
  for_each_permutation(n, first, last, [&](std::span<const Index> images) {
    steady_state_into(sys, images, x, scratch);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += u[i] * x[i];
    out.max.offer(value, images);
    out.min.offer(value, images);
  });
}

// Workers hold consecutive rank blocks, so keeping the earlier worker on
// equal values reproduces the single-threaded lexicographic tie-break.
Extremum reduce(const std::vector<WorkerResult>& results, ExtremumTracker WorkerResult::*side) {
  const ExtremumTracker* winner = nullptr;
  for (const auto& r : results) {
    const ExtremumTracker& t = r.*side;
    if (!t.seen()) continue;
    if (!winner || t.better(t.best(), winner->best())) winner = &t;
  }
  std::uint64_t ties = 0;
  for (const auto& r : results) {
    for (const auto& [value, count] : (r.*side).window()) {
      if (winner->within(value, winner->best())) ties += count;
    }
  }
  return {Permutation::from_images(winner->images()), winner->best(), ties};
}

}  // namespace

SolveResult solve_exact(const AllocationSystem& sys, const ExactOptions& options) {
  const std::size_t n = sys.size();
  check_enumeration_cap(n, options.n_cap);
  const auto blocks = partition_ranks(n, std::max(1u, options.workers));

  std::vector<WorkerResult> results(blocks.size());
  if (blocks.size() == 1) {
    scan_block(sys, blocks[0].first, blocks[0].second, results[0]);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(blocks.size());
    for (std::size_t w = 0; w < blocks.size(); ++w) {
      threads.emplace_back([&, w] { scan_block(sys, blocks[w].first, blocks[w].second, results[w]); });
    }
  }

  SolveResult result;
  result.mode = options.mode;
  result.exact = true;
  result.n = n;
  result.evaluated = factorial(n);
  if (options.mode != Mode::min) result.best = reduce(results, &WorkerResult::max);
  if (options.mode != Mode::max) result.worst = reduce(results, &WorkerResult::min);
  return result;
}

namespace {

// Sorted-system matching: sigma^-1(k) is the slot holding the k-th entry of v
// in the requested order, so u_k (k-th smallest) meets that entry.
Permutation match_sorted(const NormalizedSystem& norm, bool ascending) {
  const auto v = norm.system.v();
  std::vector<Index> order(v.size());
  std::iota(order.begin(), order.end(), Index{0});
  if (ascending) {
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return v[i] < v[j]; });
  } else {
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return v[i] > v[j]; });
  }
  // order is sigma^-1 on the sorted system.
  const Permutation inverse = Permutation::from_images(std::move(order));
  return norm.from_sorted(inverse.inverse());
}

}  // namespace

Permutation approx_maximizer(const AllocationSystem& sys) {
  return match_sorted(normalize_sorted_u(sys), true);
}

Permutation approx_minimizer(const AllocationSystem& sys) {
  return match_sorted(normalize_sorted_u(sys), false);
}

SolveResult solve_approx(const AllocationSystem& sys, Mode mode) {
  const NormalizedSystem norm = normalize_sorted_u(sys);
  SolveResult result;
  result.mode = mode;
  result.exact = false;
  result.n = sys.size();
  result.evaluated = 0;
  if (mode != Mode::min) {
    Permutation p = match_sorted(norm, true);
    const double value = objective_J_approx(sys, p);
    result.best = Extremum{std::move(p), value, std::nullopt};
  }
  if (mode != Mode::max) {
    Permutation p = match_sorted(norm, false);
    const double value = objective_J_approx(sys, p);
    result.worst = Extremum{std::move(p), value, std::nullopt};
  }
  return result;
}

}  // namespace permalloc
