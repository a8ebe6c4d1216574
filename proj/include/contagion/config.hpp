#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "contagion/env.hpp"

namespace contagion {

// Invalid or inconsistent experiment configuration. The CLI maps this to
// exit code 2 and a machine-readable error message.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One experiment as described by the JSON config document.
struct ExperimentConfig {
  int dimension = 1;
  std::vector<InitPoint> initial;
  std::optional<WeightRegime> regime;
  std::optional<DisplacementSpec> displacement;
  std::int64_t steps = 0;
  std::int64_t replicates = 1;
  std::uint64_t seed = 0;
  int theorem = 0;          // verify subcommand target; 0 = unspecified
  nlohmann::json options;   // subcommand-specific knobs, defaults applied by consumers
  nlohmann::json raw;       // the document as parsed, for provenance in reports

  const WeightRegime& require_regime() const;
  const DisplacementSpec& require_displacement() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace contagion
