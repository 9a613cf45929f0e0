#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftmc/env.hpp"
#include "driftmc/stats.hpp"

namespace driftmc {

// Monte Carlo exact-hit profile over the ladder levels j*rho, j = 1..n,
// each level started from the landing law of the previous one.
struct RProfile {
  TruncationLevel rho = TruncationLevel::infinite();
  std::vector<std::int64_t> levels;
  std::vector<Estimate> r;

  double min_r() const;
  double r_for_level_index(std::size_t j) const;  // pooled beyond the scan
};

struct SplitParams {
  double eps1 = 0.0;
  TruncationLevel rho = TruncationLevel::infinite();
  RProfile profile;
  bool floored = false;  // eps1 hit the 1e-4 floor

  void validate() const;  // eps1 in (0,1) and <= min r / 2
};

struct CycleData {
  std::int64_t duration = 0;      // epoch-to-epoch time
  std::int64_t displacement = 0;  // epoch-to-epoch displacement
  std::int64_t ell_increment = 0; // spacing of success indices
};

struct RegenRecord {
  TruncationLevel rho = TruncationLevel::infinite();
  double eps1 = 0.0;
  std::vector<std::int64_t> ell;          // success indices l_1 < l_2 < ...
  std::vector<std::int64_t> epoch_times;  // hitting times of l_k * rho
  std::vector<CycleData> cycles;

  // Occupation of the local environment descriptor, accumulated over the
  // time steps 1..T of all completed cycles.
  int descriptor_halfwidth = 0;
  int descriptor_base = 0;  // driver states per site
  std::vector<double> occupation;
  std::int64_t total_cycle_time = 0;

  std::int64_t resamples = 0;  // discarded segment samples
  std::int64_t anchoring_violations = 0;
  std::int64_t truncation_violations = 0;
  bool aborted = false;
  std::string abort_reason;

  std::int64_t n_cycles() const {
    return static_cast<std::int64_t>(cycles.size());
  }
};

// Finite-dimensional marginal of the environment seen from the particle:
// weights over driver-state windows of the given half-width.
struct EnvOccupation {
  int halfwidth = 0;
  int base_states = 0;         // driver states per site
  std::vector<double> weights; // size base_states^(2*halfwidth+1), sums to 1

  void validate() const;  // weights sum to 1 within 1e-9
};

// Number of descriptor states for a window of the given half-width.
std::size_t descriptor_count(int base_states, int halfwidth);

// Descriptor index of the environment window centered at `site`.
std::size_t descriptor_at(const Environment& env, std::int64_t site,
                          int halfwidth);

// Marginal law of the descriptor under the static environment measure.
EnvOccupation static_descriptor_marginal(const Environment& env,
                                         int halfwidth);

RProfile estimate_r_profile(const Environment& env, TruncationLevel rho,
                            int n_levels, std::int64_t n_replicas,
                            std::uint64_t seed, int n_threads = 1);

// eps1 = max(1e-4, (min over levels of (r - 2 stderr)) / 2), clamped to
// min r / 2.
SplitParams choose_eps1(const RProfile& profile);

// The lemma's eps1 is uniform over rho: take the smallest over a scan.
double uniform_eps1(std::span<const SplitParams> params);

// Segment-by-segment simulation coupled to the Bernoulli(eps1) sequence:
// successes force an exact ladder hit (rejection sampling), failures draw
// from the residual mixture via thinning against the estimated r.
RegenRecord run_with_splitting(const Environment& env,
                               const SplitParams& split,
                               std::int64_t n_cycles, std::uint64_t seed,
                               int descriptor_halfwidth = 0);

Estimate speed_direct(const Environment& env, TruncationLevel rho,
                      std::int64_t n_steps, std::int64_t n_replicas,
                      std::uint64_t seed, int n_threads = 1);

struct CycleSpeed {
  Estimate with_ell;   // rho * mean(ell increment) / mean(duration)
  Estimate with_eps1;  // rho / (eps1 * mean(duration))
  double mean_cycle_duration = 0.0;
  double mean_ell_increment = 0.0;
};

// Both algebraic forms of the cycle speed formula; requires >= 30 cycles.
CycleSpeed speed_cycle(const RegenRecord& record, const SplitParams& split);

// Cycle-average occupation estimate of the invariant descriptor law;
// requires >= 100 cycles.
EnvOccupation occupation_Q(const RegenRecord& record);

// Long-run occupation sampled directly, without the cycle structure.
EnvOccupation occupation_direct(const Environment& env, TruncationLevel rho,
                                std::int64_t n_steps, std::int64_t burn_in,
                                std::int64_t n_replicas, std::uint64_t seed,
                                int descriptor_halfwidth = 0,
                                int n_threads = 1);

struct RnDensity {
  std::vector<double> ratio;  // occ / marginal per descriptor state
  double min_ratio = 0.0;     // over states with positive marginal mass
  double max_ratio = 0.0;
  bool inconsistent = false;  // occupation mass on a zero-marginal state
};

RnDensity rn_density(const EnvOccupation& occ, const EnvOccupation& marginal);

// Mean one-step drift averaged over the descriptor law (halfwidth 0):
// the finite-state reading of the speed identity.
double occupation_drift(const EnvOccupation& occ, const Environment& env,
                        TruncationLevel rho);

struct SpeedTableRow {
  TruncationLevel rho = TruncationLevel::infinite();
  Estimate speed;
};

std::vector<SpeedTableRow> speed_vs_rho(const Environment& env,
                                        std::span<const TruncationLevel> rhos,
                                        std::int64_t n_steps,
                                        std::int64_t n_replicas,
                                        std::uint64_t seed, int n_threads = 1);

}  // namespace driftmc
