#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "driftmc/rng.hpp"
#include "driftmc/stats.hpp"
#include "driftmc/tube.hpp"

namespace driftmc {

// Normalizing constant of the cosine reflection kernel in d = 3: the
// hemisphere integral of the cosine equals pi.
inline constexpr double kCosineNormD3 = 1.0 / 3.14159265358979323846;

struct BilliardParams {
  double lambda = 0.0;  // drift parameter
  int n_skeleton = 2;   // N: skeleton subsampling range {1..N}
  double r1 = 0.1;      // thinning probability of the kappa sequence
  int block_length = 3; // L: skeleton points are L^4 successes apart
  bool verify_chords = true;  // round-trip visibility check per accepted chord

  void validate() const;
};

struct ProposalRecord {
  double delta = 0.0;  // (y - x) . e of the proposed chord
  bool accepted = false;
};

struct BilliardRun {
  BoundaryPoint start;
  BoundaryPoint final_point;
  std::int64_t n_steps = 0;
  std::int64_t holds = 0;                 // rejected proposals
  std::int64_t degenerate_resamples = 0;  // rays resampled on tangency
  double min_axial_excursion = 0.0;       // min over k of (xi_k - xi_0) . e

  std::vector<double> axial;              // xi_k . e; filled when recorded
  std::vector<BoundaryPoint> points;      // filled when recorded
  std::vector<ProposalRecord> proposals;  // filled when recorded

  // Hard-invariant counters; all must stay zero.
  std::int64_t rightward_rejections = 0;
  std::int64_t hold_position_changes = 0;
  std::int64_t boundary_residual_violations = 0;
  std::int64_t roundtrip_violations = 0;

  std::int64_t invariant_violations() const {
    return rightward_rejections + hold_position_changes +
           boundary_residual_violations + roundtrip_violations;
  }

  double axial_displacement() const {
    return final_point.alpha - start.alpha;
  }
};

// Cosine-law direction on the half-sphere around the inner normal:
// w . n has density 2t on [0, 1] (d = 3), azimuth uniform.
Direction sample_cosine(const Direction& normal, Rng& rng);

// One KRWD transition from x: cosine proposal, ray trace, drift acceptance
// (rightward always, leftward with probability e^{lambda * delta}), holding
// on rejection.
class BilliardSimulator {
 public:
  BilliardSimulator(const Tube& tube, const BilliardParams& params);

  struct StepResult {
    BoundaryPoint next;
    ProposalRecord proposal;
    int resamples = 0;       // degenerate rays rediscarded
    bool residual_ok = true; // landing point on-patch within 1e-10
    bool roundtrip_ok = true;
  };
  StepResult step(const BoundaryPoint& x, Rng& rng) const;

  const Tube& tube() const { return *tube_; }
  const BilliardParams& params() const { return params_; }

 private:
  const Tube* tube_;
  BilliardParams params_;
};

struct RunOptions {
  bool record_axial = false;
  bool record_points = false;
  bool record_proposals = false;
};

BilliardRun run_billiard(const Tube& tube, const BilliardParams& params,
                         const BoundaryPoint& start, std::int64_t n_steps,
                         Rng& rng, const RunOptions& options = {});

// Holding probability at x estimated by the rejected-proposal frequency.
Estimate estimate_theta(const Tube& tube, const BilliardParams& params,
                        const BoundaryPoint& x, std::int64_t n_samples,
                        std::uint64_t seed);

struct LlnResult {
  Estimate speed;                      // mean of (xi_n - xi_0).e / n
  std::vector<double> replica_speeds;
  std::int64_t invariant_violations = 0;
  std::int64_t holds = 0;
  std::int64_t steps_total = 0;
};

LlnResult run_lln(const Tube& tube, const BilliardParams& params,
                  std::int64_t n_steps, std::int64_t n_replicas,
                  std::uint64_t seed, int n_threads = 1,
                  std::int64_t start_band = 0);

struct BalanceReport {
  std::int64_t band1 = 0;
  std::int64_t band2 = 0;
  double pi_b1 = 0.0;   // lambda-weighted band measures (exact)
  double pi_b2 = 0.0;
  double flux_12 = 0.0;  // pi(B1) * P^{B1}[xi_1 in B2]
  double flux_21 = 0.0;
  double sigma_12 = 0.0;
  double sigma_21 = 0.0;
  std::int64_t invariant_violations = 0;

  double combined_sigma() const;
  double rel_diff() const;
  bool within(double n_sigma) const;
};

// Two-sided flux comparison from lambda-weighted stationary starts; detailed
// balance predicts equal fluxes.
BalanceReport detailed_balance_test(const Tube& tube,
                                    const BilliardParams& params,
                                    std::int64_t band1, std::int64_t band2,
                                    std::int64_t n_samples, std::uint64_t seed,
                                    int n_threads = 1);

struct SurvivalCurve {
  double a = 0.0;
  double b = 0.0;
  std::int64_t scale = 0;          // (b - a)^3
  std::vector<double> survival;    // P[tau > scale * t] for t = 1..size
  std::int64_t replicas = 0;
};

// Exit-time tail from the slab F(a,b), started surface-uniform on
// start_band.
SurvivalCurve exit_time_tail(const Tube& tube, const BilliardParams& params,
                             double a, double b, std::int64_t start_band,
                             std::int64_t n_replicas, std::uint64_t seed,
                             int n_threads = 1, int t_max = 5);

struct Skeleton {
  std::vector<std::int64_t> values;        // S_m = [xi_{J(kappa_{L^4 m})} . e]
  std::vector<std::int64_t> step_indices;  // J(kappa_{L^4 m})
  double mean_steps_per_point = 0.0;

  std::size_t points() const { return values.size(); }
  std::vector<double> increments() const;
};

// Diagnostic skeleton: fresh eta (uniform {1..N}) and zeta' (Bernoulli r1)
// sequences drawn independently of the recorded path, subsampled at every
// L^4-th success. The run must have axial positions recorded.
Skeleton extract_skeleton(const BilliardRun& run, const BilliardParams& params,
                          std::uint64_t seed);

// Per-H frequency over runs of ever dipping below start - H.
std::vector<double> backtrack_stat(std::span<const BilliardRun> runs,
                                   std::span<const double> h_list);

// Trajectory export: "step,alpha,patch,phi,delta,accepted" rows; requires a
// run recorded with both axial positions and proposals.
void write_trajectory_csv(const BilliardRun& run, std::ostream& os);

}  // namespace driftmc
