#include "driftmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include <Eigen/Dense>

namespace driftmc {

namespace {

constexpr double kResidualCap = 1e-9;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

int effective_bound(const Environment& env, TruncationLevel rho) {
  const int jumps = env.max_jump() + 1;
  return rho.is_infinite() ? jumps : std::min(rho.rho(), jumps);
}

bool strongly_connected(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      const int i = q.front();
      q.pop();
      for (int j = 0; j < n; ++j) {
        const double w = transpose ? p(j, i) : p(i, j);
        if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          ++count;
          q.push(j);
        }
      }
    }
    return count == n;
  };
  return reach_all(false) && reach_all(true);
}

// Stationary row vector of an irreducible row-stochastic matrix, certified
// by residual.
Eigen::VectorXd certified_stationary(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(0).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = 1.0;
  Eigen::VectorXd pi = a.partialPivLu().solve(b);
  const double residual = (a * pi - b).lpNorm<Eigen::Infinity>();
  if (residual > kResidualCap)
    throw std::runtime_error("oracle: stationary solve residual too large");
  return pi;
}

}  // namespace

void FiniteChain::validate() const {
  require(n >= 1, "FiniteChain: empty");
  require(p.size() == static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
          "FiniteChain: matrix size mismatch");
  require(absorbing.size() == static_cast<std::size_t>(n),
          "FiniteChain: absorbing flags size mismatch");
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      require(at(i, j) >= 0.0, "FiniteChain: negative entry");
      sum += at(i, j);
    }
    require(std::fabs(sum - 1.0) <= 1e-12, "FiniteChain: row sum != 1");
    if (absorbing[static_cast<std::size_t>(i)])
      for (int j = 0; j < n; ++j)
        require(at(i, j) == (i == j ? 1.0 : 0.0),
                "FiniteChain: absorbing row is not an identity row");
  }
}

ExactHitBracket solve_exact_hit(const Environment& env, TruncationLevel rho,
                                int window, std::int64_t x0) {
  const int bound = effective_bound(env, rho);
  require(window >= bound, "solve_exact_hit: window too small (W < rho)");
  require(x0 >= -window && x0 <= -1,
          "solve_exact_hit: x0 must lie in [-W, -1]");

  const int n = window;  // transient sites -W..-1
  auto index_of = [&](std::int64_t site) { return static_cast<int>(site + n); };

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);  // I - Q
  Eigen::VectorXd b_lower = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd b_upper = Eigen::VectorXd::Zero(n);

  for (std::int64_t site = -n; site <= -1; ++site) {
    const JumpLaw law = truncate(env.law_at(site), rho);
    const int row = index_of(site);
    for (std::size_t k = 0; k < law.offsets.size(); ++k) {
      const std::int64_t target = site + law.offsets[k];
      const double p = law.probs[k];
      if (target == 0) {
        b_lower(row) += p;
        b_upper(row) += p;
      } else if (target >= 1) {
        // overshoot: failure in both treatments
      } else if (target < -n) {
        // left exit: failure in the pessimistic solve, success in the
        // optimistic one
        b_upper(row) += p;
      } else {
        m(row, index_of(target)) -= p;
      }
    }
  }

  const auto lu = m.partialPivLu();
  const Eigen::VectorXd r_lower = lu.solve(b_lower);
  const Eigen::VectorXd r_upper = lu.solve(b_upper);
  const double res_lower = (m * r_lower - b_lower).lpNorm<Eigen::Infinity>();
  const double res_upper = (m * r_upper - b_upper).lpNorm<Eigen::Infinity>();

  ExactHitBracket out;
  out.window = window;
  out.lower = std::clamp(r_lower(index_of(x0)), 0.0, 1.0);
  out.upper = std::clamp(r_upper(index_of(x0)), 0.0, 1.0);
  out.residual = std::max(res_lower, res_upper);
  if (out.residual > kResidualCap)
    throw std::runtime_error("solve_exact_hit: residual too large");
  return out;
}

ExactHitBracket solve_exact_hit_refined(const Environment& env,
                                        TruncationLevel rho, int window_start,
                                        std::int64_t x0, double tol) {
  constexpr int kMaxWindow = 4096;
  int w = std::max(window_start, static_cast<int>(-x0));
  ExactHitBracket bracket = solve_exact_hit(env, rho, w, x0);
  while (bracket.width() > tol && 2 * w <= kMaxWindow) {
    w *= 2;
    bracket = solve_exact_hit(env, rho, w, x0);
  }
  return bracket;
}

FundamentalVisits fundamental_visits(const Environment& env,
                                     TruncationLevel rho,
                                     std::int64_t window_lo,
                                     std::int64_t window_hi, std::int64_t x0) {
  require(window_lo <= window_hi, "fundamental_visits: empty window");
  require(x0 >= window_lo && x0 <= window_hi,
          "fundamental_visits: x0 outside window");
  const int n = static_cast<int>(window_hi - window_lo + 1);
  auto index_of = [&](std::int64_t site) {
    return static_cast<int>(site - window_lo);
  };

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);  // (I - Q)^T
  for (std::int64_t site = window_lo; site <= window_hi; ++site) {
    const JumpLaw law = truncate(env.law_at(site), rho);
    for (std::size_t k = 0; k < law.offsets.size(); ++k) {
      const std::int64_t target = site + law.offsets[k];
      if (target < window_lo || target > window_hi) continue;
      m(index_of(target), index_of(site)) -= law.probs[k];
    }
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(index_of(x0)) = 1.0;
  const Eigen::VectorXd visits = m.partialPivLu().solve(b);
  const double residual = (m * visits - b).lpNorm<Eigen::Infinity>();
  if (!(residual <= kResidualCap) || !visits.allFinite())
    throw std::runtime_error(
        "fundamental_visits: singular transient block (non-transient window)");

  FundamentalVisits out;
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  out.visits.assign(visits.data(), visits.data() + n);
  out.residual = residual;
  return out;
}

namespace {

// Phase chain of a periodic environment under truncation rho: state is the
// walker's position mod p.
FiniteChain periodic_phase_chain(const Environment& env, TruncationLevel rho) {
  require(env.spec().kind == DriverKind::kPeriodic,
          "periodic oracle: requires a periodic environment");
  const int p = env.n_states();
  FiniteChain chain;
  chain.n = p;
  chain.p.assign(static_cast<std::size_t>(p) * p, 0.0);
  chain.absorbing.assign(static_cast<std::size_t>(p), 0);
  for (int i = 0; i < p; ++i) {
    const JumpLaw law = truncate(env.law_for_state(i), rho);
    for (std::size_t k = 0; k < law.offsets.size(); ++k) {
      const int j = static_cast<int>((((i + law.offsets[k]) % p) + p) % p);
      chain.at(i, j) += law.probs[k];
    }
  }
  chain.validate();
  return chain;
}

Eigen::VectorXd phase_stationary(const FiniteChain& chain) {
  Eigen::MatrixXd p(chain.n, chain.n);
  for (int i = 0; i < chain.n; ++i)
    for (int j = 0; j < chain.n; ++j) p(i, j) = chain.at(i, j);
  require(strongly_connected(p), "periodic oracle: reducible phase chain");
  return certified_stationary(p);
}

}  // namespace

double periodic_speed(const Environment& env, TruncationLevel rho) {
  const FiniteChain chain = periodic_phase_chain(env, rho);
  const Eigen::VectorXd pi = phase_stationary(chain);
  double v = 0.0;
  for (int i = 0; i < chain.n; ++i)
    v += pi(i) * truncate(env.law_for_state(i), rho).mean();
  return v;
}

std::vector<double> periodic_env_chain(const Environment& env,
                                       TruncationLevel rho) {
  const FiniteChain chain = periodic_phase_chain(env, rho);
  const Eigen::VectorXd pi = phase_stationary(chain);
  return std::vector<double>(pi.data(), pi.data() + chain.n);
}

}  // namespace driftmc
