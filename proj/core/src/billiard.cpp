#include "driftmc/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "driftmc/parallel.hpp"

namespace driftmc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kResidualTol = 1e-10;
constexpr double kRoundTripTol = 1e-9;
constexpr int kMaxDirectionResamples = 256;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Band index of a boundary point under U_j = {x : x.e in (j, j+1]}.
std::int64_t band_of(const BoundaryPoint& p) {
  return p.patch == PatchKind::kLateral ? p.cell : p.cell - 1;
}

}  // namespace

void BilliardParams::validate() const {
  require(lambda >= 0.0, "BilliardParams: lambda must be >= 0");
  require(n_skeleton >= 1, "BilliardParams: N must be >= 1");
  require(r1 > 0.0 && r1 <= 1.0, "BilliardParams: r1 must lie in (0, 1]");
  require(block_length >= 1, "BilliardParams: L must be >= 1");
}

Direction sample_cosine(const Direction& normal, Rng& rng) {
  // Orthonormal frame around the normal.
  const Vec3 n = normal;
  const Vec3 seed_axis =
      std::fabs(n.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  Vec3 t1{n.y * seed_axis.z - n.z * seed_axis.y,
          n.z * seed_axis.x - n.x * seed_axis.z,
          n.x * seed_axis.y - n.y * seed_axis.x};
  t1 = t1.normalized();
  const Vec3 t2{n.y * t1.z - n.z * t1.y, n.z * t1.x - n.x * t1.z,
                n.x * t1.y - n.y * t1.x};

  const double t = std::sqrt(rng.next_open());  // cos(angle to normal)
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  const double psi = kTwoPi * rng.next_double();
  const Vec3 w = n * t + t1 * (s * std::cos(psi)) + t2 * (s * std::sin(psi));
  return w;
}

BilliardSimulator::BilliardSimulator(const Tube& tube,
                                     const BilliardParams& params)
    : tube_(&tube), params_(params) {
  params_.validate();
}

BilliardSimulator::StepResult BilliardSimulator::step(const BoundaryPoint& x,
                                                      Rng& rng) const {
  StepResult result;
  const Direction n = inner_normal(*tube_, x);
  for (int attempt = 0; attempt < kMaxDirectionResamples; ++attempt) {
    const Direction w = sample_cosine(n, rng);
    const RayResult ray = ray_exit(*tube_, x, w);
    if (!ray.ok()) {
      ++result.resamples;
      continue;
    }
    const double delta = ray.point.alpha - x.alpha;
    result.proposal.delta = delta;
    const bool accept =
        delta >= 0.0 || rng.next_double() < std::exp(params_.lambda * delta);
    result.proposal.accepted = accept;
    if (!accept) {
      result.next = x;  // holding step
      return result;
    }
    result.next = ray.point;
    result.residual_ok = boundary_residual(*tube_, ray.point) <= kResidualTol;
    if (params_.verify_chords) {
      const RayResult back = ray_exit(*tube_, ray.point, w * -1.0);
      result.roundtrip_ok =
          back.ok() && (embed(back.point) - embed(x)).norm() <= kRoundTripTol;
    }
    return result;
  }
  throw std::runtime_error(
      "billiard step: direction resampling failed to produce a usable chord");
}

BilliardRun run_billiard(const Tube& tube, const BilliardParams& params,
                         const BoundaryPoint& start, std::int64_t n_steps,
                         Rng& rng, const RunOptions& options) {
  BilliardSimulator sim(tube, params);
  BilliardRun run;
  run.start = start;
  run.n_steps = n_steps;
  if (options.record_axial) {
    run.axial.reserve(static_cast<std::size_t>(n_steps) + 1);
    run.axial.push_back(start.alpha);
  }
  if (options.record_points) {
    run.points.reserve(static_cast<std::size_t>(n_steps) + 1);
    run.points.push_back(start);
  }
  if (options.record_proposals)
    run.proposals.reserve(static_cast<std::size_t>(n_steps));

  BoundaryPoint x = start;
  for (std::int64_t k = 0; k < n_steps; ++k) {
    const auto res = sim.step(x, rng);
    run.degenerate_resamples += res.resamples;
    if (!res.proposal.accepted) {
      ++run.holds;
      if (res.proposal.delta >= 0.0) ++run.rightward_rejections;
      if (res.next.alpha != x.alpha || res.next.phi != x.phi)
        ++run.hold_position_changes;
    } else {
      if (!res.residual_ok) ++run.boundary_residual_violations;
      if (!res.roundtrip_ok) ++run.roundtrip_violations;
    }
    x = res.next;
    run.min_axial_excursion =
        std::min(run.min_axial_excursion, x.alpha - start.alpha);
    if (options.record_axial) run.axial.push_back(x.alpha);
    if (options.record_points) run.points.push_back(x);
    if (options.record_proposals) run.proposals.push_back(res.proposal);
  }
  run.final_point = x;
  return run;
}

Estimate estimate_theta(const Tube& tube, const BilliardParams& params,
                        const BoundaryPoint& x, std::int64_t n_samples,
                        std::uint64_t seed) {
  require(n_samples >= 1, "estimate_theta: n_samples < 1");
  BilliardSimulator sim(tube, params);
  Rng rng = Rng::substream(seed, 0);
  std::int64_t holds = 0;
  for (std::int64_t i = 0; i < n_samples; ++i)
    if (!sim.step(x, rng).proposal.accepted) ++holds;
  const double theta =
      static_cast<double>(holds) / static_cast<double>(n_samples);
  return {theta, std::sqrt(theta * (1.0 - theta) /
                           static_cast<double>(n_samples))};
}

LlnResult run_lln(const Tube& tube, const BilliardParams& params,
                  std::int64_t n_steps, std::int64_t n_replicas,
                  std::uint64_t seed, int n_threads, std::int64_t start_band) {
  require(n_steps >= 1 && n_replicas >= 1, "run_lln: bad sizes");
  struct Slot {
    double speed = 0.0;
    std::int64_t violations = 0;
    std::int64_t holds = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n_replicas));
  for_each_replica(n_replicas, n_threads, [&](std::int64_t rep) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(rep));
    const BoundaryPoint start = sample_boundary_uniform(tube, start_band, rng);
    const BilliardRun run = run_billiard(tube, params, start, n_steps, rng);
    auto& slot = slots[static_cast<std::size_t>(rep)];
    slot.speed = run.axial_displacement() / static_cast<double>(n_steps);
    slot.violations = run.invariant_violations();
    slot.holds = run.holds;
  });

  LlnResult out;
  RunningStat stat;
  for (const auto& slot : slots) {
    out.replica_speeds.push_back(slot.speed);
    out.invariant_violations += slot.violations;
    out.holds += slot.holds;
    stat.add(slot.speed);
  }
  out.speed = {stat.mean(), stat.stderr_mean()};
  out.steps_total = n_steps * n_replicas;
  return out;
}

double BalanceReport::combined_sigma() const {
  return std::sqrt(sigma_12 * sigma_12 + sigma_21 * sigma_21);
}

double BalanceReport::rel_diff() const {
  const double mean = 0.5 * (flux_12 + flux_21);
  return mean > 0.0 ? std::fabs(flux_12 - flux_21) / mean : 0.0;
}

bool BalanceReport::within(double n_sigma) const {
  return std::fabs(flux_12 - flux_21) <= n_sigma * combined_sigma();
}

BalanceReport detailed_balance_test(const Tube& tube,
                                    const BilliardParams& params,
                                    std::int64_t band1, std::int64_t band2,
                                    std::int64_t n_samples, std::uint64_t seed,
                                    int n_threads) {
  require(n_samples >= 1, "detailed_balance_test: n_samples < 1");
  require(band_measure(tube, band1) > 0.0 && band_measure(tube, band2) > 0.0,
          "detailed_balance_test: degenerate bands");

  BalanceReport report;
  report.band1 = band1;
  report.band2 = band2;
  report.pi_b1 = band_measure_lambda(tube, band1, params.lambda);
  report.pi_b2 = band_measure_lambda(tube, band2, params.lambda);

  struct Side {
    std::int64_t hits = 0;
    std::int64_t violations = 0;
  };
  auto run_side = [&](std::int64_t from_band, std::int64_t to_band,
                      std::uint64_t stream_salt) {
    std::vector<std::uint8_t> hit_flags(static_cast<std::size_t>(n_samples));
    std::vector<std::uint8_t> violation_flags(
        static_cast<std::size_t>(n_samples));
    BilliardSimulator sim(tube, params);
    for_each_replica(n_samples, n_threads, [&](std::int64_t i) {
      Rng rng = Rng::substream(seed ^ stream_salt,
                               static_cast<std::uint64_t>(i));
      const BoundaryPoint x =
          sample_boundary_weighted(tube, from_band, params.lambda, rng);
      const auto res = sim.step(x, rng);
      bool violated = false;
      if (!res.proposal.accepted) {
        if (res.proposal.delta >= 0.0) violated = true;
        if (res.next.alpha != x.alpha) violated = true;
      } else if (!res.residual_ok || !res.roundtrip_ok) {
        violated = true;
      }
      hit_flags[static_cast<std::size_t>(i)] =
          res.proposal.accepted && band_of(res.next) == to_band ? 1 : 0;
      violation_flags[static_cast<std::size_t>(i)] = violated ? 1 : 0;
    });
    Side side;
    for (std::int64_t i = 0; i < n_samples; ++i) {
      side.hits += hit_flags[static_cast<std::size_t>(i)];
      side.violations += violation_flags[static_cast<std::size_t>(i)];
    }
    return side;
  };

  const Side s12 = run_side(band1, band2, 0x12ULL);
  const Side s21 = run_side(band2, band1, 0x21ULL);
  report.invariant_violations = s12.violations + s21.violations;

  const double n = static_cast<double>(n_samples);
  const double p12 = static_cast<double>(s12.hits) / n;
  const double p21 = static_cast<double>(s21.hits) / n;
  report.flux_12 = report.pi_b1 * p12;
  report.flux_21 = report.pi_b2 * p21;
  report.sigma_12 = report.pi_b1 * std::sqrt(p12 * (1.0 - p12) / n);
  report.sigma_21 = report.pi_b2 * std::sqrt(p21 * (1.0 - p21) / n);
  return report;
}

SurvivalCurve exit_time_tail(const Tube& tube, const BilliardParams& params,
                             double a, double b, std::int64_t start_band,
                             std::int64_t n_replicas, std::uint64_t seed,
                             int n_threads, int t_max) {
  require(b - a >= 1.0, "exit_time_tail: requires b - a >= 1");
  require(t_max >= 1 && n_replicas >= 1, "exit_time_tail: bad sizes");
  const std::int64_t scale =
      static_cast<std::int64_t>(std::llround((b - a) * (b - a) * (b - a)));
  const std::int64_t horizon = scale * t_max;

  std::vector<std::int64_t> taus(static_cast<std::size_t>(n_replicas));
  BilliardSimulator sim(tube, params);
  for_each_replica(n_replicas, n_threads, [&](std::int64_t rep) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(rep));
    BoundaryPoint x = sample_boundary_uniform(tube, start_band, rng);
    std::int64_t tau = 0;
    if (x.alpha >= a && x.alpha <= b) {
      while (tau <= horizon) {
        x = sim.step(x, rng).next;
        ++tau;
        if (x.alpha < a || x.alpha > b) break;
      }
    }
    taus[static_cast<std::size_t>(rep)] = tau;
  });

  SurvivalCurve curve;
  curve.a = a;
  curve.b = b;
  curve.scale = scale;
  curve.replicas = n_replicas;
  for (int t = 1; t <= t_max; ++t) {
    std::int64_t surviving = 0;
    for (const auto tau : taus)
      if (tau > scale * t) ++surviving;
    curve.survival.push_back(static_cast<double>(surviving) /
                             static_cast<double>(n_replicas));
  }
  return curve;
}

std::vector<double> Skeleton::increments() const {
  std::vector<double> inc;
  for (std::size_t i = 1; i < values.size(); ++i)
    inc.push_back(static_cast<double>(values[i] - values[i - 1]));
  return inc;
}

Skeleton extract_skeleton(const BilliardRun& run, const BilliardParams& params,
                          std::uint64_t seed) {
  params.validate();
  if (run.axial.empty())
    throw std::invalid_argument(
        "extract_skeleton: run has no recorded axial trajectory");
  const std::int64_t n_steps =
      static_cast<std::int64_t>(run.axial.size()) - 1;

  std::int64_t l4 = 1;
  for (int i = 0; i < 4; ++i) l4 *= params.block_length;

  Skeleton skel;
  Rng rng = Rng::substream(seed, 0);
  skel.values.push_back(
      static_cast<std::int64_t>(std::floor(run.axial.front())));
  skel.step_indices.push_back(0);

  std::int64_t j_index = 0;  // J(n)
  std::int64_t successes = 0;
  for (;;) {
    const std::int64_t eta =
        1 + static_cast<std::int64_t>(
                rng.next_below(static_cast<std::uint64_t>(params.n_skeleton)));
    j_index += eta;
    if (j_index > n_steps) break;
    if (rng.bernoulli(params.r1)) {
      ++successes;
      if (successes % l4 == 0) {
        skel.values.push_back(static_cast<std::int64_t>(
            std::floor(run.axial[static_cast<std::size_t>(j_index)])));
        skel.step_indices.push_back(j_index);
      }
    }
  }
  if (skel.points() < 2)
    throw std::invalid_argument(
        "extract_skeleton: run too short for the requested skeleton");
  skel.mean_steps_per_point =
      static_cast<double>(skel.step_indices.back() - skel.step_indices.front()) /
      static_cast<double>(skel.points() - 1);
  return skel;
}

std::vector<double> backtrack_stat(std::span<const BilliardRun> runs,
                                   std::span<const double> h_list) {
  if (runs.empty()) throw std::invalid_argument("backtrack_stat: no runs");
  std::vector<double> freq;
  for (const double h : h_list) {
    std::int64_t count = 0;
    for (const auto& run : runs)
      if (run.min_axial_excursion < -h) ++count;
    freq.push_back(static_cast<double>(count) /
                   static_cast<double>(runs.size()));
  }
  return freq;
}

void write_trajectory_csv(const BilliardRun& run, std::ostream& os) {
  if (run.points.empty() || run.proposals.empty())
    throw std::invalid_argument(
        "write_trajectory_csv: run lacks recorded points/proposals");
  os << "step,alpha,patch,phi,delta,accepted\n";
  for (std::size_t k = 0; k < run.points.size(); ++k) {
    const auto& p = run.points[k];
    os << k << ',' << p.alpha << ','
       << (p.patch == PatchKind::kLateral ? "lateral" : "step") << ',' << p.phi
       << ',';
    if (k == 0)
      os << ",";
    else
      os << run.proposals[k - 1].delta << ','
         << (run.proposals[k - 1].accepted ? 1 : 0);
    os << '\n';
  }
}

}  // namespace driftmc
