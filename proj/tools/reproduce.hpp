#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "permalloc/raceway.hpp"
#include "permalloc/serialize.hpp"

namespace permalloc::cli {

struct ReproduceOptions {
  std::optional<std::size_t> layers;  // --N
  std::optional<double> period;       // --T
  std::optional<RacewayScenario> scenario;
  ExactOptions exact;
};

struct Figure {
  std::string id;
  std::string description;
};

const std::vector<Figure>& figures();

/// Throws InvalidArgument for an unknown id.
SweepTable reproduce(const std::string& id, const ReproduceOptions& options);

/// The configuration recorded in the CSV comment line.
Json reproduce_config(const std::string& id, const ReproduceOptions& options);

}  // namespace permalloc::cli
