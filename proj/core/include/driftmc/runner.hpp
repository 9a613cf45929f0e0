#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "driftmc/config.hpp"

namespace driftmc {

struct RunOutcome {
  std::string report_json;
  bool ok = true;               // false on diagnostic failure
  std::string failure_reason;   // set when !ok
};

// Executes the configured experiment and renders the JSON report
// (estimates with standard errors, config echo, version, wall clock). The
// report bytes are deterministic in (config, seed) except the wall_clock_sec
// field. Overrides, when set, replace the config's threads / seed.
RunOutcome run_experiment(const ExperimentConfig& config,
                          std::optional<int> threads_override = std::nullopt,
                          std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace driftmc
