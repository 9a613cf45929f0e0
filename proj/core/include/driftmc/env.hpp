#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driftmc/driver.hpp"

namespace driftmc {

// Jump truncation parameter: integer rho >= 2, or infinite (no truncation).
class TruncationLevel {
 public:
  static TruncationLevel finite(int rho);
  static TruncationLevel infinite() { return TruncationLevel(kInfinity); }

  bool is_infinite() const { return rho_ == kInfinity; }
  int rho() const { return rho_; }

  // True when a jump of this size survives truncation (|y| < rho).
  bool allows(int jump) const {
    const long long j = jump < 0 ? -static_cast<long long>(jump) : jump;
    return j < static_cast<long long>(rho_);
  }

  bool operator==(const TruncationLevel&) const = default;

  std::string to_string() const;

 private:
  explicit TruncationLevel(int rho) : rho_(rho) {}
  static constexpr int kInfinity = std::numeric_limits<int>::max();
  int rho_;
};

// Declared power bound on jump tails: mass at |y| >= s is <= gamma1 * s^-alpha.
struct TailSpec {
  double alpha = 0.0;
  double gamma1 = 0.0;
};

// One site's jump distribution on Z.
struct JumpLaw {
  std::vector<int> offsets;    // strictly increasing
  std::vector<double> probs;   // same length, nonnegative, sum 1 within 1e-12
  std::optional<TailSpec> tail;  // declared tail bound, if any

  static JumpLaw from_pairs(
      std::initializer_list<std::pair<int, double>> pairs);

  int max_jump() const;          // max |offset|
  double prob_of(int y) const;   // 0 if y not in support
  double tail_mass(int s) const; // total mass at |y| >= s
  double mean() const;
  double second_moment() const;

  // Throws std::invalid_argument on any violated invariant, including the
  // declared tail bound.
  void validate() const;
};

// Moves all mass at |y| >= rho onto offset 0. Identity when rho is infinite
// or when no offset reaches the cutoff. Exact: repeated or staged
// truncations agree bitwise with the direct one.
JumpLaw truncate(const JumpLaw& law, TruncationLevel rho);

// A drifted law with unit jumps plus a power tail: mass at |y| >= s equals
// tail_coeff * s^-alpha for 2 <= s <= max_jump (zero beyond). Mass at each
// magnitude is split between +s and -s by the given rightward fractions.
JumpLaw power_tail_law(double alpha, double tail_coeff, int max_jump,
                       double plus_frac_unit, double plus_frac_tail);

// Conditions the environment claims to satisfy; validated at construction.
struct ConditionClaims {
  std::optional<double> eps_tilde;  // Condition E: law(+1) >= eps_tilde
  std::optional<TailSpec> tail;     // Condition C bound for every law
};

struct DriverSpec {
  DriverKind kind = DriverKind::kIid;
  std::vector<JumpLaw> laws;   // one per driver state (periodic: per phase)
  std::vector<double> weights; // iid only; defaults to uniform
  std::vector<std::vector<double>> transition;  // markov only, row-stochastic
  ConditionClaims claims;

  static DriverSpec iid(JumpLaw law);
  static DriverSpec periodic(std::vector<JumpLaw> laws);
  static DriverSpec markov(std::vector<JumpLaw> laws,
                           std::vector<std::vector<double>> transition);
};

// A fixed realization of the random environment: deterministic in
// (spec, seed, site). Read-only after construction; site queries are safe
// for concurrent readers.
class Environment {
 public:
  Environment(DriverSpec spec, std::uint64_t seed);

  int n_states() const { return static_cast<int>(spec_.laws.size()); }
  int state_at(std::int64_t site) const { return driver_->state_at(site); }
  const JumpLaw& law_for_state(int state) const { return spec_.laws.at(state); }
  const JumpLaw& law_at(std::int64_t site) const {
    return spec_.laws[static_cast<std::size_t>(state_at(site))];
  }

  const DriverSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

  // Marginal law of the driver state at any fixed site (stationary law of
  // the markov chain; iid weights; uniform over phases for periodic).
  const std::vector<double>& driver_marginal() const {
    return driver_->marginal();
  }

  // Largest |offset| over all state laws.
  int max_jump() const { return max_jump_; }

  // Stable identifier of (spec, seed) for report keys.
  std::string hash_id() const;

 private:
  DriverSpec spec_;
  std::uint64_t seed_;
  std::shared_ptr<const StateDriver> driver_;
  int max_jump_ = 0;
};

struct ConditionEReport {
  double eps_tilde = 0.0;
  std::vector<std::int64_t> failing_sites;
  bool pass() const { return failing_sites.empty(); }
};

ConditionEReport check_condition_E(const Environment& env, double eps_tilde,
                                   std::int64_t site_lo, std::int64_t site_hi);

struct ConditionCViolation {
  std::int64_t site = 0;
  int s = 0;
  double mass = 0.0;
  double bound = 0.0;
};

struct ConditionCReport {
  double gamma1 = 0.0;
  double alpha = 0.0;
  std::vector<ConditionCViolation> violations;
  bool pass() const { return violations.empty(); }
};

ConditionCReport check_condition_C(const Environment& env, double gamma1,
                                   double alpha, std::int64_t site_lo,
                                   std::int64_t site_hi);

}  // namespace driftmc
