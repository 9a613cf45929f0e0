#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

namespace driftmc {

enum class DriverKind { kIid, kMarkov, kPeriodic };

// Deterministic realization of a stationary finite-state process indexed by
// Z: iid draws, a two-sided stationary markov chain (extended to the left by
// its time reversal), or a fixed-phase periodic sequence. State queries are
// safe for concurrent readers and reproducible in (parameters, seed, site).
class StateDriver {
 public:
  StateDriver(DriverKind kind, int n_states, std::vector<double> weights,
              std::vector<std::vector<double>> transition, std::uint64_t seed);

  int n_states() const { return n_states_; }
  DriverKind kind() const { return kind_; }
  int state_at(std::int64_t site) const;

  // Marginal law of the state at any fixed site.
  const std::vector<double>& marginal() const { return marginal_; }
  const std::vector<std::vector<double>>& transition() const {
    return transition_;
  }

 private:
  int markov_state_at(std::int64_t site) const;

  DriverKind kind_;
  int n_states_;
  std::uint64_t seed_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> transition_;
  std::vector<std::vector<double>> reverse_transition_;
  std::vector<double> marginal_;

  mutable std::mutex cache_mu_;
  mutable std::vector<int> fwd_states_;  // sites 0, 1, 2, ...
  mutable std::vector<int> bwd_states_;  // sites -1, -2, ...
};

}  // namespace driftmc
