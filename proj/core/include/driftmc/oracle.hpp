#pragma once

#include <cstdint>
#include <vector>

#include "driftmc/env.hpp"

namespace driftmc {

// Dense row-stochastic chain on a small ordered state set; absorbing states
// carry identity rows.
struct FiniteChain {
  int n = 0;
  std::vector<double> p;           // row-major n*n
  std::vector<std::uint8_t> absorbing;

  double& at(int i, int j) { return p[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const {
    return p[static_cast<std::size_t>(i) * n + j];
  }
  void validate() const;  // rows sum to 1 within 1e-12, absorbing rows identity
};

struct ExactHitBracket {
  double lower = 0.0;   // left exit counted as failure
  double upper = 1.0;   // left exit counted as success
  double residual = 0.0;  // max of the two certified solve residuals
  int window = 0;

  double width() const { return upper - lower; }
};

// Exact-hit probability r_{x0}(0) for the truncated walk on the window
// [-W, -1], absorbing at 0 (success) and at any overshoot landing >= 1
// (failure). The unbounded left dependence is bracketed by the two boundary
// treatments.
ExactHitBracket solve_exact_hit(const Environment& env, TruncationLevel rho,
                                int window, std::int64_t x0);

// Doubles W from window_start until the bracket width drops below tol or W
// hits the cap (4096 states).
ExactHitBracket solve_exact_hit_refined(const Environment& env,
                                        TruncationLevel rho, int window_start,
                                        std::int64_t x0, double tol = 1e-6);

struct FundamentalVisits {
  std::int64_t window_lo = 0;
  std::int64_t window_hi = 0;
  std::vector<double> visits;  // expected visits per site, indexed from lo
  double residual = 0.0;

  double at(std::int64_t site) const {
    if (site < window_lo || site > window_hi) return 0.0;
    return visits[static_cast<std::size_t>(site - window_lo)];
  }
};

// Expected visit counts of the windowed chain started at x0, with every jump
// out of the window absorbing; exact via the fundamental matrix of the
// transient block.
FundamentalVisits fundamental_visits(const Environment& env,
                                     TruncationLevel rho,
                                     std::int64_t window_lo,
                                     std::int64_t window_hi, std::int64_t x0);

// Exact speed of the truncated walk in a periodic environment via the
// stationary law of the phase chain.
double periodic_speed(const Environment& env, TruncationLevel rho);

// Stationary distribution over phases of the environment seen from the
// particle, exact for periodic environments.
std::vector<double> periodic_env_chain(const Environment& env,
                                       TruncationLevel rho);

}  // namespace driftmc
