#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace permalloc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SizeMismatch : public Error {
 public:
  SizeMismatch(std::size_t lhs, std::size_t rhs, const std::string& what)
      : Error(what + ": size mismatch (" + std::to_string(lhs) + " vs " +
              std::to_string(rhs) + ")") {}
};

/// Raised when an exhaustive operation is asked for N above the configured cap.
class CapExceeded : public Error {
 public:
  CapExceeded(std::size_t n, std::size_t cap)
      : Error("N = " + std::to_string(n) + " exceeds the enumeration cap of " +
              std::to_string(cap) + " (raise it with --n-cap; cost grows as N!)"),
        n_(n),
        cap_(cap) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t n_;
  std::size_t cap_;
};

/// The criterion needs strictly separated entries: s_{ceil(m1/2)} vanished.
class DegenerateGaps : public Error {
 public:
  using Error::Error;
};

/// u or v has entries of both signs; the criterion only covers constant signs.
class MixedSign : public Error {
 public:
  using Error::Error;
};

}  // namespace permalloc
