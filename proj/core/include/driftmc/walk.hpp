#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftmc/env.hpp"
#include "driftmc/rng.hpp"
#include "driftmc/stats.hpp"

namespace driftmc {

// Walker/Vose alias table for O(1) sampling of a discrete distribution.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> probs);
  int sample(Rng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<int> alias_;
};

// Shared stepping core: proposals are drawn from the untruncated site law;
// a proposal with |Y| >= rho is rejected and the walker holds its position.
class WalkEngine {
 public:
  WalkEngine(const Environment& env, TruncationLevel rho);

  // Raw proposal from the site's untruncated law.
  int propose(std::int64_t site, Rng& rng) const;

  struct Step {
    int proposal = 0;
    bool rejected = false;
  };
  Step step(std::int64_t& position, Rng& rng) const;

  TruncationLevel truncation() const { return rho_; }
  const Environment& environment() const { return *env_; }

 private:
  const Environment* env_;
  TruncationLevel rho_;
  std::vector<AliasTable> tables_;  // one per driver state
};

struct WalkRun {
  std::vector<std::int64_t> positions;  // length n_steps + 1
  TruncationLevel rho = TruncationLevel::infinite();
  std::int64_t start = 0;
  std::uint64_t seed = 0;
  std::int64_t rejected_steps = 0;
  // Steps recorded with |delta| >= rho; must stay zero.
  std::int64_t truncation_violations = 0;

  std::int64_t n_steps() const {
    return static_cast<std::int64_t>(positions.size()) - 1;
  }
  std::int64_t final_position() const { return positions.back(); }
};

struct HitRecord {
  std::int64_t target = 0;
  std::optional<std::int64_t> time;  // unset: step cap exhausted
  std::int64_t landed_at = 0;        // position at the hitting time
  bool exact = false;                // landed_at == target

  bool reached() const { return time.has_value(); }
};

struct VisitCounts {
  std::int64_t window_lo = 0;
  std::int64_t window_hi = 0;
  std::vector<std::int64_t> counts;  // indexed by site - window_lo

  std::int64_t at(std::int64_t site) const {
    if (site < window_lo || site > window_hi) return 0;
    return counts[static_cast<std::size_t>(site - window_lo)];
  }
};

WalkRun run_walk(const Environment& env, TruncationLevel rho, std::int64_t x0,
                 std::int64_t n_steps, std::uint64_t seed);

struct CoupledRuns {
  WalkRun first;   // truncation rho1
  WalkRun second;  // truncation rho2 >= rho1
  std::optional<std::int64_t> separated_at;  // first step index where they differ
};

// Natural coupling: while the walks coincide they consume the same proposal
// and each applies its own truncation rule; after separation their proposals
// are independent.
CoupledRuns run_coupled(const Environment& env, TruncationLevel rho1,
                        TruncationLevel rho2, std::int64_t x0,
                        std::int64_t n_steps, std::uint64_t seed);

// First time the walk is >= z, the landing site and the exact-hit flag.
// Replaying the same seed reproduces the run_walk trajectory prefix.
HitRecord hit(const Environment& env, TruncationLevel rho, std::int64_t x0,
              std::int64_t z, std::uint64_t seed,
              std::int64_t step_cap = 10'000'000);

VisitCounts visit_counts(const WalkRun& run, std::int64_t window_lo,
                         std::int64_t window_hi);

struct ConditionDEstimate {
  std::vector<Estimate> g;      // g[k]: mean visits to x0 - k
  double backtrack_freq = 0.0;  // re-entered the probe window after clearing
  std::int64_t failed_replicas = 0;  // never cleared the barrier within cap
  std::int64_t barrier = 0;
  bool transient_ok = false;
  std::string message;
};

// Empirical stand-in for E_w^0 N_inf(-k): visits to the probe window before
// the walk first clears a far-right barrier, plus a verification leg that
// measures how often it ever comes back.
ConditionDEstimate estimate_condition_D(const Environment& env,
                                        TruncationLevel rho, int depth,
                                        std::int64_t n_replicas,
                                        std::uint64_t seed,
                                        std::int64_t step_cap = 10'000'000,
                                        int n_threads = 1);

// Debug dump: "step,position" rows.
void write_csv(const WalkRun& run, std::ostream& os);

}  // namespace driftmc
