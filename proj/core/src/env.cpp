#include "driftmc/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "driftmc/rng.hpp"

namespace driftmc {

namespace {

constexpr double kProbTol = 1e-12;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

TruncationLevel TruncationLevel::finite(int rho) {
  if (rho < 2) throw std::invalid_argument("truncation level requires rho >= 2");
  return TruncationLevel(rho);
}

std::string TruncationLevel::to_string() const {
  return is_infinite() ? "inf" : std::to_string(rho_);
}

JumpLaw JumpLaw::from_pairs(
    std::initializer_list<std::pair<int, double>> pairs) {
  std::vector<std::pair<int, double>> v(pairs);
  std::sort(v.begin(), v.end());
  JumpLaw law;
  for (const auto& [y, p] : v) {
    law.offsets.push_back(y);
    law.probs.push_back(p);
  }
  law.validate();
  return law;
}

int JumpLaw::max_jump() const {
  int m = 0;
  for (int y : offsets) m = std::max(m, std::abs(y));
  return m;
}

double JumpLaw::prob_of(int y) const {
  const auto it = std::lower_bound(offsets.begin(), offsets.end(), y);
  if (it == offsets.end() || *it != y) return 0.0;
  return probs[static_cast<std::size_t>(it - offsets.begin())];
}

double JumpLaw::tail_mass(int s) const {
  double m = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i)
    if (std::abs(offsets[i]) >= s) m += probs[i];
  return m;
}

double JumpLaw::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i)
    m += static_cast<double>(offsets[i]) * probs[i];
  return m;
}

double JumpLaw::second_moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i)
    m += static_cast<double>(offsets[i]) * offsets[i] * probs[i];
  return m;
}

void JumpLaw::validate() const {
  require(!offsets.empty(), "JumpLaw: empty support");
  require(offsets.size() == probs.size(), "JumpLaw: offsets/probs mismatch");
  for (std::size_t i = 1; i < offsets.size(); ++i)
    require(offsets[i] > offsets[i - 1], "JumpLaw: offsets not increasing");
  double sum = 0.0;
  for (double p : probs) {
    require(p >= -kProbTol, "JumpLaw: negative probability");
    sum += p;
  }
  require(std::fabs(sum - 1.0) <= kProbTol, "JumpLaw: probabilities sum != 1");
  if (tail) {
    require(tail->alpha > 1.0, "JumpLaw: tail alpha must exceed 1");
    require(tail->gamma1 > 0.0, "JumpLaw: tail gamma1 must be positive");
    for (int s = 1; s <= max_jump(); ++s) {
      const double bound = tail->gamma1 * std::pow(s, -tail->alpha);
      require(tail_mass(s) <= bound + kProbTol,
              "JumpLaw: declared tail bound violated");
    }
  }
}

JumpLaw truncate(const JumpLaw& law, TruncationLevel rho) {
  if (rho.is_infinite()) return law;
  bool touched = false;
  for (int y : law.offsets)
    if (!rho.allows(y)) touched = true;
  if (!touched) return law;

  JumpLaw out;
  out.tail = law.tail;
  double kept = 0.0;
  for (std::size_t i = 0; i < law.offsets.size(); ++i) {
    const int y = law.offsets[i];
    if (y == 0 || !rho.allows(y)) continue;
    out.offsets.push_back(y);
    out.probs.push_back(law.probs[i]);
    kept += law.probs[i];
  }
  // Holding mass defined as the complement of the kept moving mass, so that
  // staged truncations reproduce the direct one bit for bit.
  double hold = 1.0 - kept;
  if (hold < 0.0) hold = 0.0;
  const auto it = std::lower_bound(out.offsets.begin(), out.offsets.end(), 0);
  const auto idx = static_cast<std::size_t>(it - out.offsets.begin());
  out.offsets.insert(it, 0);
  out.probs.insert(out.probs.begin() + static_cast<std::ptrdiff_t>(idx), hold);
  out.validate();
  return out;
}

JumpLaw power_tail_law(double alpha, double tail_coeff, int max_jump,
                       double plus_frac_unit, double plus_frac_tail) {
  require(alpha > 1.0, "power_tail_law: alpha must exceed 1");
  require(tail_coeff > 0.0 && tail_coeff * std::pow(2.0, -alpha) < 1.0,
          "power_tail_law: tail mass at s=2 must be below 1");
  require(max_jump >= 2, "power_tail_law: max_jump must be >= 2");
  require(plus_frac_unit >= 0.0 && plus_frac_unit <= 1.0 &&
              plus_frac_tail >= 0.0 && plus_frac_tail <= 1.0,
          "power_tail_law: fractions must lie in [0,1]");

  auto tail_at = [&](int s) -> double {
    if (s <= 1) return 1.0;
    if (s > max_jump) return 0.0;
    return tail_coeff * std::pow(static_cast<double>(s), -alpha);
  };

  std::vector<std::pair<int, double>> entries;
  for (int s = 1; s <= max_jump; ++s) {
    const double mass = tail_at(s) - tail_at(s + 1);
    if (mass <= 0.0) continue;
    const double frac = (s == 1) ? plus_frac_unit : plus_frac_tail;
    const double up = mass * frac;
    const double down = mass - up;
    if (up > 0.0) entries.emplace_back(s, up);
    if (down > 0.0) entries.emplace_back(-s, down);
  }
  std::sort(entries.begin(), entries.end());

  JumpLaw law;
  for (const auto& [y, p] : entries) {
    law.offsets.push_back(y);
    law.probs.push_back(p);
  }
  // Fold the rounding slack into the dominant +1 entry.
  double sum = 0.0;
  for (double p : law.probs) sum += p;
  const auto it = std::lower_bound(law.offsets.begin(), law.offsets.end(), 1);
  if (it != law.offsets.end() && *it == 1)
    law.probs[static_cast<std::size_t>(it - law.offsets.begin())] += 1.0 - sum;
  law.validate();
  return law;
}

DriverSpec DriverSpec::iid(JumpLaw law) {
  DriverSpec s;
  s.kind = DriverKind::kIid;
  s.laws.push_back(std::move(law));
  s.weights = {1.0};
  return s;
}

DriverSpec DriverSpec::periodic(std::vector<JumpLaw> laws) {
  DriverSpec s;
  s.kind = DriverKind::kPeriodic;
  s.laws = std::move(laws);
  return s;
}

DriverSpec DriverSpec::markov(std::vector<JumpLaw> laws,
                              std::vector<std::vector<double>> transition) {
  DriverSpec s;
  s.kind = DriverKind::kMarkov;
  s.laws = std::move(laws);
  s.transition = std::move(transition);
  return s;
}

Environment::Environment(DriverSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
  require(!spec_.laws.empty(), "Environment: no laws");
  for (const auto& law : spec_.laws) {
    law.validate();
    max_jump_ = std::max(max_jump_, law.max_jump());
  }
  if (spec_.kind == DriverKind::kIid && spec_.weights.empty())
    spec_.weights.assign(spec_.laws.size(),
                         1.0 / static_cast<double>(spec_.laws.size()));
  driver_ = std::make_shared<const StateDriver>(
      spec_.kind, n_states(), spec_.weights, spec_.transition, seed_);

  if (spec_.claims.eps_tilde) {
    for (const auto& law : spec_.laws)
      require(law.prob_of(1) >= *spec_.claims.eps_tilde - kProbTol,
              "Environment: law violates declared Condition E");
  }
  if (spec_.claims.tail) {
    const auto& t = *spec_.claims.tail;
    for (const auto& law : spec_.laws)
      for (int s = 1; s <= law.max_jump(); ++s)
        require(law.tail_mass(s) <=
                    t.gamma1 * std::pow(s, -t.alpha) + kProbTol,
                "Environment: law violates declared Condition C");
  }
}

std::string Environment::hash_id() const {
  // FNV-1a over a canonical rendering of (spec, seed).
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto fold = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto fold_d = [&](double x) { fold(&x, sizeof x); };
  auto fold_i = [&](std::int64_t x) { fold(&x, sizeof x); };

  fold_i(static_cast<std::int64_t>(spec_.kind));
  for (const auto& law : spec_.laws) {
    fold_i(static_cast<std::int64_t>(law.offsets.size()));
    for (std::size_t i = 0; i < law.offsets.size(); ++i) {
      fold_i(law.offsets[i]);
      fold_d(law.probs[i]);
    }
  }
  for (double w : spec_.weights) fold_d(w);
  for (const auto& row : spec_.transition)
    for (double p : row) fold_d(p);
  fold_i(static_cast<std::int64_t>(seed_));

  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

ConditionEReport check_condition_E(const Environment& env, double eps_tilde,
                                   std::int64_t site_lo, std::int64_t site_hi) {
  ConditionEReport report;
  report.eps_tilde = eps_tilde;
  for (std::int64_t x = site_lo; x <= site_hi; ++x)
    if (env.law_at(x).prob_of(1) < eps_tilde) report.failing_sites.push_back(x);
  return report;
}

ConditionCReport check_condition_C(const Environment& env, double gamma1,
                                   double alpha, std::int64_t site_lo,
                                   std::int64_t site_hi) {
  if (alpha <= 1.0) throw std::invalid_argument("check_condition_C: alpha <= 1");
  if (gamma1 <= 0.0) throw std::invalid_argument("check_condition_C: gamma1 <= 0");
  ConditionCReport report;
  report.gamma1 = gamma1;
  report.alpha = alpha;
  for (std::int64_t x = site_lo; x <= site_hi; ++x) {
    const JumpLaw& law = env.law_at(x);
    for (int s = 1; s <= law.max_jump(); ++s) {
      const double mass = law.tail_mass(s);
      const double bound = gamma1 * std::pow(static_cast<double>(s), -alpha);
      if (mass > bound + kProbTol)
        report.violations.push_back({x, s, mass, bound});
    }
  }
  return report;
}

}  // namespace driftmc
