#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "driftmc/billiard.hpp"
#include "driftmc/env.hpp"
#include "driftmc/tube.hpp"

namespace driftmc {

enum class ExperimentKind {
  kRwreSpeed,
  kRwreRegen,
  kRwreQ,
  kBilliardLln,
  kBilliardBalance,
  kBilliardTails,
  kSkeleton,
  kOracleCheck,
};

std::string to_string(ExperimentKind kind);

struct WalkParams {
  std::int64_t x0 = 0;
  std::int64_t n_steps = 100'000;
  std::int64_t n_replicas = 16;
  std::int64_t step_cap = 10'000'000;
  int depth = 5;  // probe depth of the Condition D estimator
};

struct RegenParams {
  int n_levels = 8;
  std::int64_t r_replicas = 20'000;
  std::int64_t n_cycles = 5'000;
  std::int64_t direct_steps = 100'000;
  std::int64_t direct_replicas = 16;
  std::int64_t burn_in = 1'000;
  int halfwidth = 0;
};

struct BilliardExpParams {
  BilliardParams params;
  std::vector<double> lambdas;  // defaults to {params.lambda}
  std::int64_t n_steps = 100'000;
  std::int64_t n_replicas = 16;
  std::int64_t start_band = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> band_pairs;
  double slab_a = 0.0;
  double slab_b = 4.0;
  int t_max = 5;
  std::int64_t tail_replicas = 10'000;
  std::int64_t m_steps = 10'000;
  std::vector<double> h_list;
};

struct OracleParams {
  std::string check = "exact_hit";  // exact_hit | periodic_speed |
                                    // fundamental_visits | cosine_sampler
  int window = 40;
  std::int64_t x0 = -1;
  std::int64_t n_replicas = 100'000;
  int depth = 5;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kRwreSpeed;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_path;

  std::optional<DriverSpec> environment;
  std::uint64_t env_seed = 1;

  std::optional<RadiusSpec> tube;
  std::vector<std::uint64_t> tube_seeds = {1};

  std::vector<TruncationLevel> truncation;

  WalkParams walk;
  RegenParams regen;
  BilliardExpParams billiard;
  OracleParams oracle;
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  static std::string render(const std::vector<ValidationIssue>& issues);
  std::vector<ValidationIssue> issues_;
};

// Parses and fully validates; throws ConfigError listing offending fields.
ExperimentConfig parse_config(const std::string& json_text);

// Full schema and invariant check without running; empty result means valid.
std::vector<ValidationIssue> validate_config_text(const std::string& json_text);

// Canonical serialization; parse(canonical(c)) reproduces c bit-exactly.
std::string canonical_config_json(const ExperimentConfig& config);

// Built-in acceptance-suite configs, one per acceptance criterion row,
// with stable ids.
std::vector<std::pair<std::string, std::string>> builtin_suites();

}  // namespace driftmc
