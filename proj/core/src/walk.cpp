#include "driftmc/walk.hpp"

#include <cmath>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "driftmc/parallel.hpp"

namespace driftmc {

namespace {
constexpr std::uint64_t kStreamWalk = 0;
constexpr std::uint64_t kStreamCoupledFirst = 1;
constexpr std::uint64_t kStreamCoupledSecond = 2;
}  // namespace

AliasTable::AliasTable(std::span<const double> probs) {
  const std::size_t n = probs.size();
  if (n == 0) throw std::invalid_argument("AliasTable: empty distribution");
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::queue<int> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = probs[i] * static_cast<double>(n);
    if (scaled[i] < 1.0)
      small.push(static_cast<int>(i));
    else
      large.push(static_cast<int>(i));
  }
  while (!small.empty() && !large.empty()) {
    const int s = small.front();
    const int l = large.front();
    small.pop();
    large.pop();
    prob_[static_cast<std::size_t>(s)] = scaled[static_cast<std::size_t>(s)];
    alias_[static_cast<std::size_t>(s)] = l;
    scaled[static_cast<std::size_t>(l)] -=
        1.0 - scaled[static_cast<std::size_t>(s)];
    if (scaled[static_cast<std::size_t>(l)] < 1.0)
      small.push(l);
    else
      large.push(l);
  }
  while (!large.empty()) {
    prob_[static_cast<std::size_t>(large.front())] = 1.0;
    large.pop();
  }
  while (!small.empty()) {
    prob_[static_cast<std::size_t>(small.front())] = 1.0;
    small.pop();
  }
}

int AliasTable::sample(Rng& rng) const {
  const std::size_t i = static_cast<std::size_t>(
      rng.next_below(static_cast<std::uint64_t>(prob_.size())));
  if (rng.next_double() < prob_[i]) return static_cast<int>(i);
  return alias_[i];
}

WalkEngine::WalkEngine(const Environment& env, TruncationLevel rho)
    : env_(&env), rho_(rho) {
  tables_.reserve(static_cast<std::size_t>(env.n_states()));
  for (int s = 0; s < env.n_states(); ++s)
    tables_.emplace_back(env.law_for_state(s).probs);
}

int WalkEngine::propose(std::int64_t site, Rng& rng) const {
  const int state = env_->state_at(site);
  const int idx = tables_[static_cast<std::size_t>(state)].sample(rng);
  return env_->law_for_state(state).offsets[static_cast<std::size_t>(idx)];
}

WalkEngine::Step WalkEngine::step(std::int64_t& position, Rng& rng) const {
  Step s;
  s.proposal = propose(position, rng);
  if (rho_.allows(s.proposal)) {
    position += s.proposal;
  } else {
    s.rejected = true;
  }
  return s;
}

WalkRun run_walk(const Environment& env, TruncationLevel rho, std::int64_t x0,
                 std::int64_t n_steps, std::uint64_t seed) {
  if (n_steps < 0) throw std::invalid_argument("run_walk: n_steps < 0");
  WalkEngine engine(env, rho);
  Rng rng = Rng::substream(seed, kStreamWalk);

  WalkRun run;
  run.rho = rho;
  run.start = x0;
  run.seed = seed;
  run.positions.reserve(static_cast<std::size_t>(n_steps) + 1);
  run.positions.push_back(x0);
  std::int64_t pos = x0;
  for (std::int64_t k = 0; k < n_steps; ++k) {
    const auto s = engine.step(pos, rng);
    if (s.rejected) ++run.rejected_steps;
    const std::int64_t delta = pos - run.positions.back();
    if (!rho.allows(static_cast<int>(delta))) ++run.truncation_violations;
    run.positions.push_back(pos);
  }
  return run;
}

CoupledRuns run_coupled(const Environment& env, TruncationLevel rho1,
                        TruncationLevel rho2, std::int64_t x0,
                        std::int64_t n_steps, std::uint64_t seed) {
  if (!rho1.is_infinite() &&
      (rho2.is_infinite() ? false : rho1.rho() > rho2.rho()))
    throw std::invalid_argument("run_coupled: requires rho1 <= rho2");
  if (rho1.is_infinite() && !rho2.is_infinite())
    throw std::invalid_argument("run_coupled: requires rho1 <= rho2");

  WalkEngine engine1(env, rho1);
  WalkEngine engine2(env, rho2);
  Rng shared = Rng::substream(seed, kStreamWalk);
  Rng own1 = Rng::substream(seed, kStreamCoupledFirst);
  Rng own2 = Rng::substream(seed, kStreamCoupledSecond);

  CoupledRuns out;
  for (WalkRun* run : {&out.first, &out.second}) {
    run->start = x0;
    run->seed = seed;
    run->positions.reserve(static_cast<std::size_t>(n_steps) + 1);
    run->positions.push_back(x0);
  }
  out.first.rho = rho1;
  out.second.rho = rho2;

  std::int64_t p1 = x0, p2 = x0;
  for (std::int64_t k = 0; k < n_steps; ++k) {
    if (p1 == p2) {
      const int y = engine1.propose(p1, shared);
      if (rho1.allows(y))
        p1 += y;
      else
        ++out.first.rejected_steps;
      if (rho2.allows(y))
        p2 += y;
      else
        ++out.second.rejected_steps;
      if (p1 != p2 && !out.separated_at) out.separated_at = k + 1;
    } else {
      if (engine1.step(p1, own1).rejected) ++out.first.rejected_steps;
      if (engine2.step(p2, own2).rejected) ++out.second.rejected_steps;
    }
    out.first.positions.push_back(p1);
    out.second.positions.push_back(p2);
  }
  return out;
}

HitRecord hit(const Environment& env, TruncationLevel rho, std::int64_t x0,
              std::int64_t z, std::uint64_t seed, std::int64_t step_cap) {
  if (step_cap < 1) throw std::invalid_argument("hit: step_cap < 1");
  HitRecord rec;
  rec.target = z;
  std::int64_t pos = x0;
  if (pos >= z) {
    rec.time = 0;
    rec.landed_at = pos;
    rec.exact = (pos == z);
    return rec;
  }
  WalkEngine engine(env, rho);
  Rng rng = Rng::substream(seed, kStreamWalk);
  for (std::int64_t k = 1; k <= step_cap; ++k) {
    engine.step(pos, rng);
    if (pos >= z) {
      rec.time = k;
      rec.landed_at = pos;
      rec.exact = (pos == z);
      return rec;
    }
  }
  rec.landed_at = pos;
  return rec;
}

VisitCounts visit_counts(const WalkRun& run, std::int64_t window_lo,
                         std::int64_t window_hi) {
  if (window_hi < window_lo)
    throw std::invalid_argument("visit_counts: empty window");
  VisitCounts vc;
  vc.window_lo = window_lo;
  vc.window_hi = window_hi;
  vc.counts.assign(static_cast<std::size_t>(window_hi - window_lo + 1), 0);
  for (const std::int64_t p : run.positions)
    if (p >= window_lo && p <= window_hi)
      ++vc.counts[static_cast<std::size_t>(p - window_lo)];
  return vc;
}

ConditionDEstimate estimate_condition_D(const Environment& env,
                                        TruncationLevel rho, int depth,
                                        std::int64_t n_replicas,
                                        std::uint64_t seed,
                                        std::int64_t step_cap, int n_threads) {
  if (depth < 1) throw std::invalid_argument("estimate_condition_D: depth < 1");
  const int effective_rho = rho.is_infinite()
                                ? env.max_jump() + 1
                                : std::min(rho.rho(), env.max_jump() + 1);
  const std::int64_t barrier = 10LL * effective_rho + 50;

  struct ReplicaResult {
    std::vector<std::int64_t> visits;
    bool cleared = false;
    bool backtracked = false;
  };
  std::vector<ReplicaResult> results(static_cast<std::size_t>(n_replicas));

  for_each_replica(n_replicas, n_threads, [&](std::int64_t r) {
    WalkEngine engine(env, rho);
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r));
    ReplicaResult& res = results[static_cast<std::size_t>(r)];
    res.visits.assign(static_cast<std::size_t>(depth) + 1, 0);

    std::int64_t pos = 0;
    auto record = [&](std::int64_t p) {
      if (p <= 0 && -p <= depth) ++res.visits[static_cast<std::size_t>(-p)];
    };
    record(pos);
    std::int64_t k = 0;
    // Phase 1: count visits until the barrier is first cleared.
    for (; k < step_cap && pos < barrier; ++k) {
      engine.step(pos, rng);
      record(pos);
    }
    if (pos < barrier) return;  // non-transient behavior for this replica
    res.cleared = true;
    // Phase 2: verification leg out to twice the barrier; visits are still
    // counted (they belong to N_inf) and flagged as backtracks.
    for (; k < step_cap && pos < 2 * barrier; ++k) {
      engine.step(pos, rng);
      if (pos <= 0 && -pos <= depth) {
        res.backtracked = true;
        record(pos);
      }
    }
  });

  ConditionDEstimate est;
  est.barrier = barrier;
  std::vector<RunningStat> stats(static_cast<std::size_t>(depth) + 1);
  std::int64_t backtracks = 0;
  for (const auto& res : results) {
    if (!res.cleared) {
      ++est.failed_replicas;
      continue;
    }
    if (res.backtracked) ++backtracks;
    for (int kk = 0; kk <= depth; ++kk)
      stats[static_cast<std::size_t>(kk)].add(
          static_cast<double>(res.visits[static_cast<std::size_t>(kk)]));
  }
  const std::int64_t cleared = n_replicas - est.failed_replicas;
  est.transient_ok = (est.failed_replicas == 0);
  est.backtrack_freq =
      cleared > 0 ? static_cast<double>(backtracks) / static_cast<double>(cleared)
                  : 1.0;
  for (int kk = 0; kk <= depth; ++kk)
    est.g.push_back({stats[static_cast<std::size_t>(kk)].mean(),
                     stats[static_cast<std::size_t>(kk)].stderr_mean()});
  est.message = est.transient_ok
                    ? "ok"
                    : "walk failed to clear the right barrier within the step "
                      "cap; Condition D likely violated for this environment";
  return est;
}

void write_csv(const WalkRun& run, std::ostream& os) {
  os << "step,position\n";
  for (std::size_t k = 0; k < run.positions.size(); ++k)
    os << k << ',' << run.positions[k] << '\n';
}

}  // namespace driftmc
