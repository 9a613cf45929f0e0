#include "driftmc/regen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driftmc/parallel.hpp"
#include "driftmc/rng.hpp"
#include "driftmc/walk.hpp"

namespace driftmc {

namespace {

constexpr double kEps1Floor = 1e-4;
constexpr std::int64_t kSegmentStepCap = 10'000'000;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

double RProfile::min_r() const {
  double m = 1.0;
  for (const auto& e : r) m = std::min(m, e.value);
  return m;
}

double RProfile::r_for_level_index(std::size_t j) const {
  if (j >= 1 && j <= r.size()) return r[j - 1].value;
  // Beyond the scanned ladder: pooled mean.
  double s = 0.0;
  for (const auto& e : r) s += e.value;
  return r.empty() ? 1.0 : s / static_cast<double>(r.size());
}

void SplitParams::validate() const {
  require(eps1 > 0.0 && eps1 < 1.0, "SplitParams: eps1 outside (0,1)");
  require(!rho.is_infinite(), "SplitParams: rho must be finite");
  require(!profile.r.empty(), "SplitParams: empty r profile");
  require(eps1 <= profile.min_r() / 2.0 + 1e-15,
          "SplitParams: eps1 exceeds min r / 2");
}

void EnvOccupation::validate() const {
  require(weights.size() == descriptor_count(base_states, halfwidth),
          "EnvOccupation: weight count mismatch");
  double s = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "EnvOccupation: negative weight");
    s += w;
  }
  require(std::fabs(s - 1.0) <= 1e-9, "EnvOccupation: weights sum != 1");
}

std::size_t descriptor_count(int base_states, int halfwidth) {
  std::size_t n = 1;
  for (int i = 0; i < 2 * halfwidth + 1; ++i)
    n *= static_cast<std::size_t>(base_states);
  return n;
}

std::size_t descriptor_at(const Environment& env, std::int64_t site,
                          int halfwidth) {
  std::size_t idx = 0;
  for (int j = -halfwidth; j <= halfwidth; ++j)
    idx = idx * static_cast<std::size_t>(env.n_states()) +
          static_cast<std::size_t>(env.state_at(site + j));
  return idx;
}

namespace {

// Digits of a descriptor index in base `base`, most significant first.
std::vector<int> descriptor_digits(std::size_t d, int base, int width) {
  std::vector<int> digits(static_cast<std::size_t>(width));
  for (int k = width - 1; k >= 0; --k) {
    digits[static_cast<std::size_t>(k)] =
        static_cast<int>(d % static_cast<std::size_t>(base));
    d /= static_cast<std::size_t>(base);
  }
  return digits;
}

}  // namespace

EnvOccupation static_descriptor_marginal(const Environment& env,
                                         int halfwidth) {
  EnvOccupation occ;
  occ.halfwidth = halfwidth;
  occ.base_states = env.n_states();
  const std::size_t n = descriptor_count(occ.base_states, halfwidth);
  occ.weights.assign(n, 0.0);
  const auto& marginal = env.driver_marginal();
  const int width = 2 * halfwidth + 1;

  switch (env.spec().kind) {
    case DriverKind::kIid: {
      for (std::size_t d = 0; d < n; ++d) {
        const auto digits = descriptor_digits(d, occ.base_states, width);
        double w = 1.0;
        for (int k = 0; k < width; ++k)
          w *= marginal[static_cast<std::size_t>(
              digits[static_cast<std::size_t>(k)])];
        occ.weights[d] = w;
      }
      break;
    }
    case DriverKind::kPeriodic: {
      // One window pattern per phase, each with probability 1/p.
      const int p = env.n_states();
      for (int phase = 0; phase < p; ++phase) {
        std::size_t idx = 0;
        for (int j = -halfwidth; j <= halfwidth; ++j) {
          const int s = ((phase + j) % p + p) % p;
          idx = idx * static_cast<std::size_t>(p) + static_cast<std::size_t>(s);
        }
        occ.weights[idx] += 1.0 / static_cast<double>(p);
      }
      break;
    }
    case DriverKind::kMarkov: {
      // Window law: pi(s_0) * prod P(s_k, s_{k+1}) along the window.
      for (std::size_t d = 0; d < n; ++d) {
        const auto digits = descriptor_digits(d, occ.base_states, width);
        double w = marginal[static_cast<std::size_t>(digits[0])];
        for (int k = 0; k + 1 < width; ++k)
          w *= env.spec().transition[static_cast<std::size_t>(
              digits[static_cast<std::size_t>(k)])]
                                    [static_cast<std::size_t>(
                                        digits[static_cast<std::size_t>(k + 1)])];
        occ.weights[d] = w;
      }
      break;
    }
  }
  occ.validate();
  return occ;
}

RProfile estimate_r_profile(const Environment& env, TruncationLevel rho,
                            int n_levels, std::int64_t n_replicas,
                            std::uint64_t seed, int n_threads) {
  require(!rho.is_infinite(),
          "estimate_r_profile: regeneration requires finite rho");
  require(n_levels >= 1 && n_replicas >= 1, "estimate_r_profile: bad sizes");

  std::vector<std::vector<std::uint8_t>> hits(
      static_cast<std::size_t>(n_replicas));
  std::vector<std::uint8_t> ok(static_cast<std::size_t>(n_replicas), 0);

  for_each_replica(n_replicas, n_threads, [&](std::int64_t rep) {
    WalkEngine engine(env, rho);
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(rep));
    auto& h = hits[static_cast<std::size_t>(rep)];
    h.assign(static_cast<std::size_t>(n_levels), 0);
    std::int64_t pos = 0;
    for (int j = 1; j <= n_levels; ++j) {
      const std::int64_t target = static_cast<std::int64_t>(j) * rho.rho();
      std::int64_t steps = 0;
      while (pos < target && steps < kSegmentStepCap) {
        engine.step(pos, rng);
        ++steps;
      }
      if (pos < target) return;  // non-transient replica; dropped
      h[static_cast<std::size_t>(j - 1)] = (pos == target) ? 1 : 0;
    }
    ok[static_cast<std::size_t>(rep)] = 1;
  });

  RProfile profile;
  profile.rho = rho;
  std::int64_t used = 0;
  for (auto o : ok)
    if (o) ++used;
  if (used == 0)
    throw std::runtime_error(
        "estimate_r_profile: no replica reached the ladder; review "
        "Conditions E/C/D for this environment");
  for (int j = 1; j <= n_levels; ++j) {
    std::int64_t s = 0;
    for (std::int64_t rep = 0; rep < n_replicas; ++rep)
      if (ok[static_cast<std::size_t>(rep)])
        s += hits[static_cast<std::size_t>(rep)][static_cast<std::size_t>(j - 1)];
    const double r_hat = static_cast<double>(s) / static_cast<double>(used);
    const double se =
        std::sqrt(std::max(r_hat * (1.0 - r_hat), 0.0) /
                  static_cast<double>(used));
    if (r_hat < 1e-3)
      throw std::runtime_error(
          "estimate_r_profile: degenerate exact-hit estimate near 0; review "
          "Conditions E/C/D for this environment");
    profile.levels.push_back(static_cast<std::int64_t>(j) * rho.rho());
    profile.r.push_back({r_hat, se});
  }
  return profile;
}

SplitParams choose_eps1(const RProfile& profile) {
  require(!profile.r.empty(), "choose_eps1: empty profile");
  double worst = 1.0;
  for (const auto& e : profile.r) {
    require(e.value > 0.0, "choose_eps1: requires all r > 0");
    worst = std::min(worst, e.value - 2.0 * e.stderr);
  }
  SplitParams params;
  params.rho = profile.rho;
  params.profile = profile;
  const double candidate = worst / 2.0;
  params.eps1 = std::max(kEps1Floor, candidate);
  params.floored = candidate < kEps1Floor;
  params.eps1 = std::min(params.eps1, profile.min_r() / 2.0);
  params.validate();
  return params;
}

double uniform_eps1(std::span<const SplitParams> params) {
  require(!params.empty(), "uniform_eps1: empty scan");
  double e = 1.0;
  for (const auto& p : params) e = std::min(e, p.eps1);
  return e;
}

namespace {

struct Segment {
  std::vector<std::int64_t> path;  // positions after each step
  bool exact = false;
  bool capped = false;
};

Segment simulate_segment(const WalkEngine& engine, std::int64_t from,
                         std::int64_t target, Rng& rng) {
  Segment seg;
  std::int64_t pos = from;
  while (pos < target) {
    if (static_cast<std::int64_t>(seg.path.size()) >= kSegmentStepCap) {
      seg.capped = true;
      return seg;
    }
    engine.step(pos, rng);
    seg.path.push_back(pos);
  }
  seg.exact = (pos == target);
  return seg;
}

}  // namespace

RegenRecord run_with_splitting(const Environment& env,
                               const SplitParams& split,
                               std::int64_t n_cycles, std::uint64_t seed,
                               int descriptor_halfwidth) {
  split.validate();
  require(n_cycles >= 1, "run_with_splitting: n_cycles < 1");
  const std::int64_t rho = split.rho.rho();
  WalkEngine engine(env, split.rho);
  Rng rng = Rng::substream(seed, 0);

  RegenRecord record;
  record.rho = split.rho;
  record.eps1 = split.eps1;
  record.descriptor_halfwidth = descriptor_halfwidth;
  record.descriptor_base = env.n_states();
  record.occupation.assign(
      descriptor_count(env.n_states(), descriptor_halfwidth), 0.0);

  const std::int64_t budget =
      static_cast<std::int64_t>(std::ceil(10.0 / split.eps1));

  std::int64_t pos = 0;
  std::int64_t t = 0;
  std::int64_t prev_epoch_time = 0;
  std::int64_t prev_epoch_pos = 0;
  std::int64_t prev_success_j = 0;

  for (std::int64_t j = 1;
       record.n_cycles() < n_cycles && !record.aborted; ++j) {
    const std::int64_t target = j * rho;
    const bool success = rng.bernoulli(split.eps1);

    Segment seg;
    std::int64_t attempts = 0;
    for (;;) {
      if (++attempts > budget) {
        record.aborted = true;
        record.abort_reason =
            "segment resampling budget exceeded; environment flagged";
        break;
      }
      seg = simulate_segment(engine, pos, target, rng);
      if (seg.capped) {
        record.aborted = true;
        record.abort_reason = "segment step cap exceeded";
        break;
      }
      if (success) {
        if (seg.exact) break;
        ++record.resamples;
        continue;
      }
      // Residual mixture: thin exact hits with probability eps1 / r-hat.
      if (seg.exact) {
        const double r_hat =
            split.profile.r_for_level_index(static_cast<std::size_t>(j));
        if (rng.next_double() < split.eps1 / r_hat) {
          ++record.resamples;
          continue;
        }
      }
      break;
    }
    if (record.aborted) break;

    // Commit the accepted segment.
    std::int64_t prev = pos;
    for (const std::int64_t p : seg.path) {
      const std::int64_t delta = p - prev;
      if (!split.rho.allows(static_cast<int>(delta)))
        ++record.truncation_violations;
      record.occupation[descriptor_at(env, p, descriptor_halfwidth)] += 1.0;
      prev = p;
    }
    t += static_cast<std::int64_t>(seg.path.size());
    pos = seg.path.empty() ? pos : seg.path.back();

    if (success) {
      if (pos != target) ++record.anchoring_violations;
      record.ell.push_back(j);
      record.epoch_times.push_back(t);
      record.cycles.push_back({t - prev_epoch_time, pos - prev_epoch_pos,
                               j - prev_success_j});
      prev_epoch_time = t;
      prev_epoch_pos = pos;
      prev_success_j = j;
    }
  }
  record.total_cycle_time = prev_epoch_time;
  // Occupation beyond the last epoch never entered: segments after the final
  // success are not simulated.
  return record;
}

Estimate speed_direct(const Environment& env, TruncationLevel rho,
                      std::int64_t n_steps, std::int64_t n_replicas,
                      std::uint64_t seed, int n_threads) {
  require(n_steps >= 1 && n_replicas >= 1, "speed_direct: bad sizes");
  std::vector<double> v(static_cast<std::size_t>(n_replicas), 0.0);
  for_each_replica(n_replicas, n_threads, [&](std::int64_t rep) {
    WalkEngine engine(env, rho);
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(rep));
    std::int64_t pos = 0;
    for (std::int64_t k = 0; k < n_steps; ++k) engine.step(pos, rng);
    v[static_cast<std::size_t>(rep)] =
        static_cast<double>(pos) / static_cast<double>(n_steps);
  });
  RunningStat stat;
  for (double x : v) stat.add(x);
  return {stat.mean(), stat.stderr_mean()};
}

CycleSpeed speed_cycle(const RegenRecord& record, const SplitParams& split) {
  require(record.n_cycles() >= 30, "speed_cycle: too few cycles (< 30)");
  const double rho = static_cast<double>(split.rho.rho());

  RunningStat dur, ell;
  for (const auto& c : record.cycles) {
    dur.add(static_cast<double>(c.duration));
    ell.add(static_cast<double>(c.ell_increment));
  }

  // Batch means over consecutive cycles for the ratio estimators.
  const std::int64_t n = record.n_cycles();
  const std::int64_t n_batches = std::max<std::int64_t>(
      8, static_cast<std::int64_t>(std::floor(std::sqrt(n))));
  const std::int64_t per = std::max<std::int64_t>(1, n / n_batches);
  RunningStat v_ell_batches, v_eps_batches;
  for (std::int64_t b = 0; b * per < n; ++b) {
    double d = 0.0, l = 0.0;
    std::int64_t count = 0;
    for (std::int64_t i = b * per; i < std::min(n, (b + 1) * per); ++i) {
      d += static_cast<double>(record.cycles[static_cast<std::size_t>(i)].duration);
      l += static_cast<double>(
          record.cycles[static_cast<std::size_t>(i)].ell_increment);
      ++count;
    }
    if (count == 0) continue;
    v_ell_batches.add(rho * l / d);
    v_eps_batches.add(rho / (split.eps1 * (d / static_cast<double>(count))));
  }

  CycleSpeed out;
  out.mean_cycle_duration = dur.mean();
  out.mean_ell_increment = ell.mean();
  out.with_ell = {rho * ell.mean() / dur.mean(), v_ell_batches.stderr_mean()};
  out.with_eps1 = {rho / (split.eps1 * dur.mean()),
                   v_eps_batches.stderr_mean()};
  return out;
}

EnvOccupation occupation_Q(const RegenRecord& record) {
  require(record.n_cycles() >= 100, "occupation_Q: too few cycles (< 100)");
  require(record.total_cycle_time > 0, "occupation_Q: empty record");
  EnvOccupation occ;
  occ.halfwidth = record.descriptor_halfwidth;
  occ.base_states = record.descriptor_base;
  double total = 0.0;
  for (double w : record.occupation) total += w;
  occ.weights.reserve(record.occupation.size());
  for (double w : record.occupation) occ.weights.push_back(w / total);
  occ.validate();
  return occ;
}

EnvOccupation occupation_direct(const Environment& env, TruncationLevel rho,
                                std::int64_t n_steps, std::int64_t burn_in,
                                std::int64_t n_replicas, std::uint64_t seed,
                                int descriptor_halfwidth, int n_threads) {
  require(n_steps > burn_in, "occupation_direct: n_steps <= burn_in");
  const std::size_t n_desc =
      descriptor_count(env.n_states(), descriptor_halfwidth);
  std::vector<std::vector<double>> hist(
      static_cast<std::size_t>(n_replicas));
  for_each_replica(n_replicas, n_threads, [&](std::int64_t rep) {
    WalkEngine engine(env, rho);
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(rep));
    auto& h = hist[static_cast<std::size_t>(rep)];
    h.assign(n_desc, 0.0);
    std::int64_t pos = 0;
    for (std::int64_t k = 1; k <= n_steps; ++k) {
      engine.step(pos, rng);
      if (k > burn_in) h[descriptor_at(env, pos, descriptor_halfwidth)] += 1.0;
    }
  });
  EnvOccupation occ;
  occ.halfwidth = descriptor_halfwidth;
  occ.base_states = env.n_states();
  occ.weights.assign(n_desc, 0.0);
  double total = 0.0;
  for (const auto& h : hist)
    for (std::size_t i = 0; i < n_desc; ++i) {
      occ.weights[i] += h[i];
      total += h[i];
    }
  for (double& w : occ.weights) w /= total;
  occ.validate();
  return occ;
}

RnDensity rn_density(const EnvOccupation& occ, const EnvOccupation& marginal) {
  require(occ.weights.size() == marginal.weights.size(),
          "rn_density: mismatched state sets");
  RnDensity out;
  out.ratio.assign(occ.weights.size(), 0.0);
  bool first = true;
  for (std::size_t i = 0; i < occ.weights.size(); ++i) {
    if (marginal.weights[i] <= 0.0) {
      if (occ.weights[i] > 0.0) out.inconsistent = true;
      continue;
    }
    out.ratio[i] = occ.weights[i] / marginal.weights[i];
    if (first) {
      out.min_ratio = out.max_ratio = out.ratio[i];
      first = false;
    } else {
      out.min_ratio = std::min(out.min_ratio, out.ratio[i]);
      out.max_ratio = std::max(out.max_ratio, out.ratio[i]);
    }
  }
  return out;
}

double occupation_drift(const EnvOccupation& occ, const Environment& env,
                        TruncationLevel rho) {
  require(occ.halfwidth == 0, "occupation_drift: requires halfwidth 0");
  require(static_cast<int>(occ.weights.size()) == env.n_states(),
          "occupation_drift: state count mismatch");
  double v = 0.0;
  for (int s = 0; s < env.n_states(); ++s)
    v += occ.weights[static_cast<std::size_t>(s)] *
         truncate(env.law_for_state(s), rho).mean();
  return v;
}

std::vector<SpeedTableRow> speed_vs_rho(const Environment& env,
                                        std::span<const TruncationLevel> rhos,
                                        std::int64_t n_steps,
                                        std::int64_t n_replicas,
                                        std::uint64_t seed, int n_threads) {
  require(!rhos.empty(), "speed_vs_rho: empty rho list");
  std::vector<SpeedTableRow> table;
  for (const auto& rho : rhos)
    table.push_back(
        {rho, speed_direct(env, rho, n_steps, n_replicas, seed, n_threads)});
  return table;
}

}  // namespace driftmc
