#include "driftmc/driver.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

#include <Eigen/Dense>

#include "driftmc/rng.hpp"

namespace driftmc {

namespace {

constexpr double kProbTol = 1e-12;
constexpr std::uint64_t kSiteSalt = 0x5157EULL;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool is_irreducible(const std::vector<std::vector<double>>& p) {
  const std::size_t n = p.size();
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      for (std::size_t j = 0; j < n; ++j) {
        const double w = transpose ? p[j][i] : p[i][j];
        if (w > 0.0 && !seen[j]) {
          seen[j] = 1;
          ++count;
          q.push(j);
        }
      }
    }
    return count == n;
  };
  return reach_all(false) && reach_all(true);
}

std::vector<double> stationary_of(const std::vector<std::vector<double>>& p) {
  const int n = static_cast<int>(p.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(j, i) = p[static_cast<std::size_t>(i)]
                                           [static_cast<std::size_t>(j)];
  a -= Eigen::MatrixXd::Identity(n, n);
  a.row(0).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = 1.0;
  Eigen::VectorXd pi = a.partialPivLu().solve(b);
  std::vector<double> out(pi.data(), pi.data() + n);
  for (double& x : out) x = std::max(x, 0.0);
  double s = 0.0;
  for (double x : out) s += x;
  for (double& x : out) x /= s;
  return out;
}

int sample_categorical(const std::vector<double>& probs, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

double site_uniform(std::uint64_t seed, std::int64_t site) {
  return u64_to_unit_double(
      hash_mix(seed ^ kSiteSalt, static_cast<std::uint64_t>(site)));
}

}  // namespace

StateDriver::StateDriver(DriverKind kind, int n_states,
                         std::vector<double> weights,
                         std::vector<std::vector<double>> transition,
                         std::uint64_t seed)
    : kind_(kind),
      n_states_(n_states),
      seed_(seed),
      weights_(std::move(weights)),
      transition_(std::move(transition)) {
  require(n_states_ >= 1, "StateDriver: need at least one state");
  switch (kind_) {
    case DriverKind::kIid: {
      if (weights_.empty())
        weights_.assign(static_cast<std::size_t>(n_states_),
                        1.0 / static_cast<double>(n_states_));
      require(static_cast<int>(weights_.size()) == n_states_,
              "StateDriver: iid weights size mismatch");
      double wsum = 0.0;
      for (double w : weights_) {
        require(w >= 0.0, "StateDriver: negative iid weight");
        wsum += w;
      }
      require(std::fabs(wsum - 1.0) <= kProbTol,
              "StateDriver: iid weights sum != 1");
      marginal_ = weights_;
      break;
    }
    case DriverKind::kPeriodic: {
      marginal_.assign(static_cast<std::size_t>(n_states_),
                       1.0 / static_cast<double>(n_states_));
      break;
    }
    case DriverKind::kMarkov: {
      require(static_cast<int>(transition_.size()) == n_states_,
              "StateDriver: transition size mismatch");
      for (const auto& row : transition_) {
        require(static_cast<int>(row.size()) == n_states_,
                "StateDriver: transition row size mismatch");
        double rsum = 0.0;
        for (double p : row) {
          require(p >= 0.0, "StateDriver: negative transition probability");
          rsum += p;
        }
        require(std::fabs(rsum - 1.0) <= kProbTol,
                "StateDriver: transition row sum != 1");
      }
      require(is_irreducible(transition_),
              "StateDriver: reducible driving chain");
      marginal_ = stationary_of(transition_);
      // Time-reversed kernel for the two-sided stationary extension.
      reverse_transition_.assign(
          static_cast<std::size_t>(n_states_),
          std::vector<double>(static_cast<std::size_t>(n_states_), 0.0));
      for (int i = 0; i < n_states_; ++i)
        for (int j = 0; j < n_states_; ++j)
          reverse_transition_[static_cast<std::size_t>(i)]
                             [static_cast<std::size_t>(j)] =
              marginal_[static_cast<std::size_t>(j)] *
              transition_[static_cast<std::size_t>(j)]
                         [static_cast<std::size_t>(i)] /
              marginal_[static_cast<std::size_t>(i)];
      break;
    }
  }
}

int StateDriver::state_at(std::int64_t site) const {
  switch (kind_) {
    case DriverKind::kIid:
      if (n_states_ == 1) return 0;
      return sample_categorical(weights_, site_uniform(seed_, site));
    case DriverKind::kPeriodic:
      return static_cast<int>(((site % n_states_) + n_states_) % n_states_);
    case DriverKind::kMarkov:
      return markov_state_at(site);
  }
  return 0;
}

int StateDriver::markov_state_at(std::int64_t site) const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  if (fwd_states_.empty()) {
    const double u0 = u64_to_unit_double(hash_mix(seed_ ^ kSiteSalt, 0) ^
                                         0x9E3779B97F4A7C15ULL);
    fwd_states_.push_back(sample_categorical(marginal_, u0));
  }
  if (site >= 0) {
    while (static_cast<std::int64_t>(fwd_states_.size()) <= site) {
      const std::int64_t next = static_cast<std::int64_t>(fwd_states_.size());
      const int prev = fwd_states_.back();
      fwd_states_.push_back(
          sample_categorical(transition_[static_cast<std::size_t>(prev)],
                             site_uniform(seed_, next)));
    }
    return fwd_states_[static_cast<std::size_t>(site)];
  }
  while (static_cast<std::int64_t>(bwd_states_.size()) < -site) {
    const std::int64_t next =
        -static_cast<std::int64_t>(bwd_states_.size()) - 1;
    const int prev = bwd_states_.empty() ? fwd_states_[0] : bwd_states_.back();
    bwd_states_.push_back(sample_categorical(
        reverse_transition_[static_cast<std::size_t>(prev)],
        site_uniform(seed_, next)));
  }
  return bwd_states_[static_cast<std::size_t>(-site - 1)];
}

}  // namespace driftmc
