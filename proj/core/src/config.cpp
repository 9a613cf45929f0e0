#include "driftmc/config.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace driftmc {

using ordered_json = nlohmann::ordered_json;

namespace {

struct ParseContext {
  std::vector<ValidationIssue> issues;

  void add(std::string field, std::string message) {
    issues.push_back({std::move(field), std::move(message)});
  }
  bool ok() const { return issues.empty(); }
};

std::optional<ExperimentKind> kind_from_string(const std::string& s) {
  if (s == "rwre_speed") return ExperimentKind::kRwreSpeed;
  if (s == "rwre_regen") return ExperimentKind::kRwreRegen;
  if (s == "rwre_Q") return ExperimentKind::kRwreQ;
  if (s == "billiard_lln") return ExperimentKind::kBilliardLln;
  if (s == "billiard_balance") return ExperimentKind::kBilliardBalance;
  if (s == "billiard_tails") return ExperimentKind::kBilliardTails;
  if (s == "skeleton") return ExperimentKind::kSkeleton;
  if (s == "oracle_check") return ExperimentKind::kOracleCheck;
  return std::nullopt;
}

std::optional<DriverKind> driver_from_string(const std::string& s) {
  if (s == "iid") return DriverKind::kIid;
  if (s == "markov") return DriverKind::kMarkov;
  if (s == "periodic") return DriverKind::kPeriodic;
  return std::nullopt;
}

std::string driver_to_string(DriverKind kind) {
  switch (kind) {
    case DriverKind::kIid:
      return "iid";
    case DriverKind::kMarkov:
      return "markov";
    case DriverKind::kPeriodic:
      return "periodic";
  }
  return "iid";
}

std::optional<JumpLaw> law_from_json(const ordered_json& j,
                                     const std::string& path,
                                     ParseContext& ctx) {
  JumpLaw law;
  if (j.contains("family")) {
    const std::string family = j.value("family", "");
    if (family != "power_tail") {
      ctx.add(path + ".family", "unknown law family '" + family + "'");
      return std::nullopt;
    }
    try {
      law = power_tail_law(j.value("alpha", 3.0), j.value("coeff", 0.8),
                           j.value("max_jump", 64), j.value("plus_unit", 0.8),
                           j.value("plus_tail", 0.7));
    } catch (const std::exception& e) {
      ctx.add(path, e.what());
      return std::nullopt;
    }
  } else {
    if (!j.contains("offsets") || !j.contains("probs")) {
      ctx.add(path, "law requires offsets/probs or a family");
      return std::nullopt;
    }
    try {
      law.offsets = j.at("offsets").get<std::vector<int>>();
      law.probs = j.at("probs").get<std::vector<double>>();
    } catch (const std::exception& e) {
      ctx.add(path, std::string("malformed offsets/probs: ") + e.what());
      return std::nullopt;
    }
  }
  if (j.contains("tail")) {
    TailSpec tail;
    tail.alpha = j["tail"].value("alpha", 0.0);
    tail.gamma1 = j["tail"].value("gamma1", 0.0);
    law.tail = tail;
  }
  try {
    law.validate();
  } catch (const std::exception& e) {
    ctx.add(path, e.what());
    return std::nullopt;
  }
  return law;
}

std::optional<DriverSpec> env_from_json(const ordered_json& j,
                                        ParseContext& ctx) {
  DriverSpec spec;
  const std::string driver = j.value("driver", "");
  const auto kind = driver_from_string(driver);
  if (!kind) {
    ctx.add("environment.driver",
            "must be one of iid | markov | periodic, got '" + driver + "'");
    return std::nullopt;
  }
  spec.kind = *kind;
  if (!j.contains("laws") || !j["laws"].is_array() || j["laws"].empty()) {
    ctx.add("environment.laws", "requires a non-empty array of laws");
    return std::nullopt;
  }
  for (std::size_t i = 0; i < j["laws"].size(); ++i) {
    auto law = law_from_json(j["laws"][i],
                             "environment.laws[" + std::to_string(i) + "]", ctx);
    if (!law) return std::nullopt;
    spec.laws.push_back(std::move(*law));
  }
  if (j.contains("weights"))
    spec.weights = j["weights"].get<std::vector<double>>();
  if (j.contains("transition"))
    spec.transition = j["transition"].get<std::vector<std::vector<double>>>();
  if (j.contains("claims")) {
    const auto& c = j["claims"];
    if (c.contains("eps_tilde"))
      spec.claims.eps_tilde = c["eps_tilde"].get<double>();
    if (c.contains("gamma1") && c.contains("alpha"))
      spec.claims.tail = TailSpec{c["alpha"].get<double>(),
                                  c["gamma1"].get<double>()};
  }
  return spec;
}

std::optional<RadiusSpec> tube_from_json(const ordered_json& j,
                                         ParseContext& ctx) {
  RadiusSpec spec;
  const std::string driver = j.value("driver", "periodic");
  const auto kind = driver_from_string(driver);
  if (!kind) {
    ctx.add("tube.driver",
            "must be one of iid | markov | periodic, got '" + driver + "'");
    return std::nullopt;
  }
  spec.kind = *kind;
  if (!j.contains("radii") || !j["radii"].is_array() || j["radii"].empty()) {
    ctx.add("tube.radii", "requires a non-empty array of radii");
    return std::nullopt;
  }
  spec.radii = j["radii"].get<std::vector<double>>();
  for (std::size_t i = 0; i < spec.radii.size(); ++i)
    if (!(spec.radii[i] > 0.0))
      ctx.add("tube.radii[" + std::to_string(i) + "]",
              "radius must be positive");
  if (j.contains("transition"))
    spec.transition = j["transition"].get<std::vector<std::vector<double>>>();
  if (j.contains("weights"))
    spec.weights = j["weights"].get<std::vector<double>>();
  return spec;
}

std::optional<TruncationLevel> truncation_from_json(const ordered_json& j,
                                                    const std::string& path,
                                                    ParseContext& ctx) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return TruncationLevel::infinite();
    ctx.add(path, "string truncation level must be \"inf\"");
    return std::nullopt;
  }
  if (!j.is_number_integer()) {
    ctx.add(path, "truncation level must be an integer >= 2 or \"inf\"");
    return std::nullopt;
  }
  const std::int64_t rho = j.get<std::int64_t>();
  if (rho < 2) {
    ctx.add(path, "truncation level must be >= 2 (got " +
                      std::to_string(rho) + ")");
    return std::nullopt;
  }
  return TruncationLevel::finite(static_cast<int>(rho));
}

ExperimentConfig parse_into(const ordered_json& j, ParseContext& ctx) {
  ExperimentConfig cfg;

  const std::string kind_str = j.value("kind", "");
  if (const auto kind = kind_from_string(kind_str))
    cfg.kind = *kind;
  else
    ctx.add("kind", "unknown experiment kind '" + kind_str + "'");

  if (!j.contains("seed")) {
    ctx.add("seed", "required field is missing (no silent nondeterminism)");
  } else if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
    ctx.add("seed", "must be an unsigned 64-bit integer");
  } else {
    cfg.seed = j["seed"].get<std::uint64_t>();
  }

  cfg.threads = j.value("threads", 1);
  if (cfg.threads < 1) ctx.add("threads", "must be >= 1");
  cfg.out_path = j.value("out", "");

  if (j.contains("environment")) {
    cfg.environment = env_from_json(j["environment"], ctx);
    cfg.env_seed = j["environment"].value("seed", 1ULL);
  }
  if (j.contains("tube")) {
    cfg.tube = tube_from_json(j["tube"], ctx);
    if (j["tube"].contains("seeds"))
      cfg.tube_seeds = j["tube"]["seeds"].get<std::vector<std::uint64_t>>();
    else
      cfg.tube_seeds = {j["tube"].value("seed", 1ULL)};
    if (cfg.tube_seeds.empty()) ctx.add("tube.seeds", "must be non-empty");
  }

  if (j.contains("truncation")) {
    const auto& arr = j["truncation"];
    if (!arr.is_array()) {
      ctx.add("truncation", "must be an array of levels");
    } else {
      for (std::size_t i = 0; i < arr.size(); ++i) {
        auto level = truncation_from_json(
            arr[i], "truncation[" + std::to_string(i) + "]", ctx);
        if (level) cfg.truncation.push_back(*level);
      }
    }
  }

  if (j.contains("walk")) {
    const auto& w = j["walk"];
    cfg.walk.x0 = w.value("x0", cfg.walk.x0);
    cfg.walk.n_steps = w.value("n_steps", cfg.walk.n_steps);
    cfg.walk.n_replicas = w.value("n_replicas", cfg.walk.n_replicas);
    cfg.walk.step_cap = w.value("step_cap", cfg.walk.step_cap);
    cfg.walk.depth = w.value("depth", cfg.walk.depth);
    if (cfg.walk.n_steps < 1) ctx.add("walk.n_steps", "must be >= 1");
    if (cfg.walk.n_replicas < 1) ctx.add("walk.n_replicas", "must be >= 1");
    if (cfg.walk.step_cap < 1) ctx.add("walk.step_cap", "must be >= 1");
  }

  if (j.contains("regen")) {
    const auto& r = j["regen"];
    cfg.regen.n_levels = r.value("n_levels", cfg.regen.n_levels);
    cfg.regen.r_replicas = r.value("r_replicas", cfg.regen.r_replicas);
    cfg.regen.n_cycles = r.value("n_cycles", cfg.regen.n_cycles);
    cfg.regen.direct_steps = r.value("direct_steps", cfg.regen.direct_steps);
    cfg.regen.direct_replicas =
        r.value("direct_replicas", cfg.regen.direct_replicas);
    cfg.regen.burn_in = r.value("burn_in", cfg.regen.burn_in);
    cfg.regen.halfwidth = r.value("halfwidth", cfg.regen.halfwidth);
    if (cfg.regen.n_levels < 1) ctx.add("regen.n_levels", "must be >= 1");
    if (cfg.regen.r_replicas < 1) ctx.add("regen.r_replicas", "must be >= 1");
    if (cfg.regen.n_cycles < 1) ctx.add("regen.n_cycles", "must be >= 1");
    if (cfg.regen.halfwidth < 0) ctx.add("regen.halfwidth", "must be >= 0");
  }

  if (j.contains("billiard")) {
    const auto& b = j["billiard"];
    cfg.billiard.params.lambda = b.value("lambda", cfg.billiard.params.lambda);
    cfg.billiard.params.n_skeleton = b.value("N", cfg.billiard.params.n_skeleton);
    cfg.billiard.params.r1 = b.value("r1", cfg.billiard.params.r1);
    cfg.billiard.params.block_length =
        b.value("L", cfg.billiard.params.block_length);
    cfg.billiard.params.verify_chords =
        b.value("verify_chords", cfg.billiard.params.verify_chords);
    if (b.contains("lambdas"))
      cfg.billiard.lambdas = b["lambdas"].get<std::vector<double>>();
    cfg.billiard.n_steps = b.value("n_steps", cfg.billiard.n_steps);
    cfg.billiard.n_replicas = b.value("n_replicas", cfg.billiard.n_replicas);
    cfg.billiard.start_band = b.value("start_band", cfg.billiard.start_band);
    if (b.contains("band_pairs")) {
      for (std::size_t i = 0; i < b["band_pairs"].size(); ++i) {
        const auto& p = b["band_pairs"][i];
        if (!p.is_array() || p.size() != 2) {
          ctx.add("billiard.band_pairs[" + std::to_string(i) + "]",
                  "must be a [band, band] pair");
          continue;
        }
        cfg.billiard.band_pairs.emplace_back(p[0].get<std::int64_t>(),
                                             p[1].get<std::int64_t>());
      }
    }
    cfg.billiard.slab_a = b.value("a", cfg.billiard.slab_a);
    cfg.billiard.slab_b = b.value("b", cfg.billiard.slab_b);
    cfg.billiard.t_max = b.value("t_max", cfg.billiard.t_max);
    cfg.billiard.tail_replicas =
        b.value("tail_replicas", cfg.billiard.tail_replicas);
    cfg.billiard.m_steps = b.value("m_steps", cfg.billiard.m_steps);
    if (b.contains("H_list"))
      cfg.billiard.h_list = b["H_list"].get<std::vector<double>>();
    try {
      cfg.billiard.params.validate();
    } catch (const std::exception& e) {
      ctx.add("billiard", e.what());
    }
    if (cfg.billiard.n_steps < 1) ctx.add("billiard.n_steps", "must be >= 1");
    if (cfg.billiard.n_replicas < 1)
      ctx.add("billiard.n_replicas", "must be >= 1");
    if (cfg.billiard.slab_b - cfg.billiard.slab_a < 1.0 &&
        cfg.kind == ExperimentKind::kBilliardTails)
      ctx.add("billiard.b", "slab must satisfy b - a >= 1");
  }
  if (cfg.billiard.lambdas.empty())
    cfg.billiard.lambdas = {cfg.billiard.params.lambda};

  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    cfg.oracle.check = o.value("check", cfg.oracle.check);
    cfg.oracle.window = o.value("window", cfg.oracle.window);
    cfg.oracle.x0 = o.value("x0", cfg.oracle.x0);
    cfg.oracle.n_replicas = o.value("n_replicas", cfg.oracle.n_replicas);
    cfg.oracle.depth = o.value("depth", cfg.oracle.depth);
    if (cfg.oracle.check != "exact_hit" &&
        cfg.oracle.check != "periodic_speed" &&
        cfg.oracle.check != "fundamental_visits" &&
        cfg.oracle.check != "cosine_sampler")
      ctx.add("oracle.check", "unknown oracle check '" + cfg.oracle.check + "'");
  }

  // Kind-specific presence requirements.
  const bool needs_env = cfg.kind == ExperimentKind::kRwreSpeed ||
                         cfg.kind == ExperimentKind::kRwreRegen ||
                         cfg.kind == ExperimentKind::kRwreQ ||
                         (cfg.kind == ExperimentKind::kOracleCheck &&
                          cfg.oracle.check != "cosine_sampler");
  const bool needs_tube = cfg.kind == ExperimentKind::kBilliardLln ||
                          cfg.kind == ExperimentKind::kBilliardBalance ||
                          cfg.kind == ExperimentKind::kBilliardTails ||
                          cfg.kind == ExperimentKind::kSkeleton;
  if (needs_env && !cfg.environment)
    ctx.add("environment", "required for this experiment kind");
  if (needs_tube && !cfg.tube)
    ctx.add("tube", "required for this experiment kind");

  // Environments must construct cleanly (irreducibility, claims, ...).
  if (cfg.environment) {
    try {
      Environment probe(*cfg.environment, cfg.env_seed);
    } catch (const std::exception& e) {
      ctx.add("environment", e.what());
    }
  }
  if (cfg.tube) {
    try {
      Tube probe(*cfg.tube, cfg.tube_seeds.empty() ? 1 : cfg.tube_seeds[0]);
    } catch (const std::exception& e) {
      ctx.add("tube", e.what());
    }
  }
  if (cfg.truncation.empty()) cfg.truncation.push_back(TruncationLevel::infinite());
  return cfg;
}

ordered_json law_to_json(const JumpLaw& law) {
  ordered_json j;
  j["offsets"] = law.offsets;
  j["probs"] = law.probs;
  if (law.tail) {
    j["tail"] = ordered_json{{"alpha", law.tail->alpha},
                             {"gamma1", law.tail->gamma1}};
  }
  return j;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kRwreSpeed:
      return "rwre_speed";
    case ExperimentKind::kRwreRegen:
      return "rwre_regen";
    case ExperimentKind::kRwreQ:
      return "rwre_Q";
    case ExperimentKind::kBilliardLln:
      return "billiard_lln";
    case ExperimentKind::kBilliardBalance:
      return "billiard_balance";
    case ExperimentKind::kBilliardTails:
      return "billiard_tails";
    case ExperimentKind::kSkeleton:
      return "skeleton";
    case ExperimentKind::kOracleCheck:
      return "oracle_check";
  }
  return "rwre_speed";
}

ConfigError::ConfigError(std::vector<ValidationIssue> issues)
    : std::runtime_error(render(issues)), issues_(std::move(issues)) {}

std::string ConfigError::render(const std::vector<ValidationIssue>& issues) {
  std::ostringstream os;
  os << "invalid experiment config:";
  for (const auto& issue : issues)
    os << "\n  " << issue.field << ": " << issue.message;
  return os.str();
}

ExperimentConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({{"<document>", e.what()}});
  }
  ParseContext ctx;
  ExperimentConfig cfg = parse_into(j, ctx);
  if (!ctx.ok()) throw ConfigError(ctx.issues);
  return cfg;
}

std::vector<ValidationIssue> validate_config_text(
    const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    return {{"<document>", e.what()}};
  }
  ParseContext ctx;
  (void)parse_into(j, ctx);
  return ctx.issues;
}

std::string canonical_config_json(const ExperimentConfig& config) {
  ordered_json j;
  j["kind"] = to_string(config.kind);
  j["seed"] = config.seed;
  if (config.threads != 1) j["threads"] = config.threads;
  if (!config.out_path.empty()) j["out"] = config.out_path;

  if (config.environment) {
    ordered_json e;
    e["driver"] = driver_to_string(config.environment->kind);
    e["seed"] = config.env_seed;
    e["laws"] = ordered_json::array();
    for (const auto& law : config.environment->laws)
      e["laws"].push_back(law_to_json(law));
    if (!config.environment->weights.empty() &&
        config.environment->kind == DriverKind::kIid)
      e["weights"] = config.environment->weights;
    if (!config.environment->transition.empty())
      e["transition"] = config.environment->transition;
    if (config.environment->claims.eps_tilde ||
        config.environment->claims.tail) {
      ordered_json c;
      if (config.environment->claims.eps_tilde)
        c["eps_tilde"] = *config.environment->claims.eps_tilde;
      if (config.environment->claims.tail) {
        c["alpha"] = config.environment->claims.tail->alpha;
        c["gamma1"] = config.environment->claims.tail->gamma1;
      }
      e["claims"] = c;
    }
    j["environment"] = e;
  }

  if (config.tube) {
    ordered_json t;
    t["driver"] = driver_to_string(config.tube->kind);
    t["radii"] = config.tube->radii;
    if (!config.tube->transition.empty())
      t["transition"] = config.tube->transition;
    if (!config.tube->weights.empty() &&
        config.tube->kind == DriverKind::kIid)
      t["weights"] = config.tube->weights;
    t["seeds"] = config.tube_seeds;
    j["tube"] = t;
  }

  j["truncation"] = ordered_json::array();
  for (const auto& rho : config.truncation) {
    if (rho.is_infinite())
      j["truncation"].push_back("inf");
    else
      j["truncation"].push_back(rho.rho());
  }

  j["walk"] = ordered_json{{"x0", config.walk.x0},
                           {"n_steps", config.walk.n_steps},
                           {"n_replicas", config.walk.n_replicas},
                           {"step_cap", config.walk.step_cap},
                           {"depth", config.walk.depth}};
  j["regen"] = ordered_json{{"n_levels", config.regen.n_levels},
                            {"r_replicas", config.regen.r_replicas},
                            {"n_cycles", config.regen.n_cycles},
                            {"direct_steps", config.regen.direct_steps},
                            {"direct_replicas", config.regen.direct_replicas},
                            {"burn_in", config.regen.burn_in},
                            {"halfwidth", config.regen.halfwidth}};
  {
    ordered_json b;
    b["lambda"] = config.billiard.params.lambda;
    b["lambdas"] = config.billiard.lambdas;
    b["N"] = config.billiard.params.n_skeleton;
    b["r1"] = config.billiard.params.r1;
    b["L"] = config.billiard.params.block_length;
    b["verify_chords"] = config.billiard.params.verify_chords;
    b["n_steps"] = config.billiard.n_steps;
    b["n_replicas"] = config.billiard.n_replicas;
    b["start_band"] = config.billiard.start_band;
    if (!config.billiard.band_pairs.empty()) {
      b["band_pairs"] = ordered_json::array();
      for (const auto& [x, y] : config.billiard.band_pairs)
        b["band_pairs"].push_back(ordered_json::array({x, y}));
    }
    b["a"] = config.billiard.slab_a;
    b["b"] = config.billiard.slab_b;
    b["t_max"] = config.billiard.t_max;
    b["tail_replicas"] = config.billiard.tail_replicas;
    b["m_steps"] = config.billiard.m_steps;
    if (!config.billiard.h_list.empty()) b["H_list"] = config.billiard.h_list;
    j["billiard"] = b;
  }
  j["oracle"] = ordered_json{{"check", config.oracle.check},
                             {"window", config.oracle.window},
                             {"x0", config.oracle.x0},
                             {"n_replicas", config.oracle.n_replicas},
                             {"depth", config.oracle.depth}};
  return j.dump(2);
}

namespace {

ordered_json law_json_pairs(
    std::initializer_list<std::pair<int, double>> pairs) {
  ordered_json j;
  std::vector<int> offsets;
  std::vector<double> probs;
  for (const auto& [y, p] : pairs) {
    offsets.push_back(y);
    probs.push_back(p);
  }
  j["offsets"] = offsets;
  j["probs"] = probs;
  return j;
}

ordered_json mixed_tail_law_json() {
  ordered_json law;
  law["family"] = "power_tail";
  law["alpha"] = 3.0;
  law["coeff"] = 0.8;
  law["max_jump"] = 64;
  law["plus_unit"] = 0.8;
  law["plus_tail"] = 0.7;
  law["tail"] = ordered_json{{"alpha", 3.0}, {"gamma1", 1.0}};
  return law;
}

ordered_json periodic3_env_json() {
  ordered_json env;
  env["driver"] = "periodic";
  env["seed"] = 1;
  env["laws"] = ordered_json::array(
      {law_json_pairs({{1, 0.6}, {2, 0.2}, {-1, 0.2}}),
       law_json_pairs({{1, 0.4}, {2, 0.4}, {-1, 0.2}}),
       law_json_pairs({{1, 0.5}, {2, 0.1}, {-1, 0.4}})});
  return env;
}

ordered_json unit_cylinder_json() {
  ordered_json t;
  t["driver"] = "periodic";
  t["radii"] = ordered_json::array({1.0});
  t["seed"] = 1;
  return t;
}

ordered_json alternating_tube_json() {
  ordered_json t;
  t["driver"] = "markov";
  t["radii"] = ordered_json::array({1.0, 2.0});
  t["transition"] =
      ordered_json::array({ordered_json::array({0.3, 0.7}),
                           ordered_json::array({0.7, 0.3})});
  t["seeds"] = ordered_json::array({1, 2});
  return t;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> builtin_suites() {
  std::vector<std::pair<std::string, std::string>> suites;
  auto push = [&suites](const std::string& id, const ordered_json& j) {
    suites.emplace_back(id, j.dump(2));
  };

  {
    ordered_json j;
    j["kind"] = "rwre_speed";
    j["seed"] = 1001;
    j["environment"] = ordered_json{
        {"driver", "iid"},
        {"seed", 1},
        {"laws", ordered_json::array({law_json_pairs({{1, 0.6}, {-1, 0.4}})})}};
    j["truncation"] = ordered_json::array({"inf"});
    j["walk"] = ordered_json{{"n_steps", 1000000}, {"n_replicas", 32}};
    push("c01_homogeneous_speed", j);
  }
  {
    ordered_json j;
    j["kind"] = "oracle_check";
    j["seed"] = 1002;
    j["environment"] = periodic3_env_json();
    j["truncation"] = ordered_json::array({4});
    j["oracle"] = ordered_json{{"check", "periodic_speed"}};
    j["walk"] = ordered_json{{"n_steps", 500000}, {"n_replicas", 8}};
    push("c02_oracle_periodic_speed", j);
  }
  {
    ordered_json j;
    j["kind"] = "oracle_check";
    j["seed"] = 1003;
    j["environment"] = ordered_json{
        {"driver", "iid"},
        {"seed", 1},
        {"laws", ordered_json::array({law_json_pairs({{1, 0.5}, {2, 0.5}})})}};
    j["truncation"] = ordered_json::array({"inf"});
    j["oracle"] = ordered_json{
        {"check", "exact_hit"}, {"window", 40}, {"x0", -1},
        {"n_replicas", 100000}};
    push("c03_oracle_exact_hit", j);
  }
  {
    ordered_json j;
    j["kind"] = "rwre_regen";
    j["seed"] = 1004;
    j["environment"] = ordered_json{
        {"driver", "iid"},
        {"seed", 1},
        {"laws", ordered_json::array({mixed_tail_law_json()})}};
    j["truncation"] = ordered_json::array({8});
    j["regen"] = ordered_json{{"n_levels", 8},
                              {"r_replicas", 40000},
                              {"n_cycles", 30000},
                              {"direct_steps", 100000},
                              {"direct_replicas", 16}};
    push("c04_two_speed_estimators", j);
  }
  {
    ordered_json j;
    j["kind"] = "rwre_regen";
    j["seed"] = 1005;
    j["environment"] = ordered_json{
        {"driver", "iid"},
        {"seed", 1},
        {"laws", ordered_json::array({mixed_tail_law_json()})}};
    j["truncation"] = ordered_json::array({4, 8, 16});
    j["regen"] = ordered_json{{"n_levels", 8},
                              {"r_replicas", 20000},
                              {"n_cycles", 10000}};
    push("c05_cycle_duration_scaling", j);
  }
  {
    ordered_json j;
    j["kind"] = "rwre_Q";
    j["seed"] = 1006;
    j["environment"] = periodic3_env_json();
    j["truncation"] = ordered_json::array({4});
    j["regen"] = ordered_json{{"n_levels", 6},
                              {"r_replicas", 20000},
                              {"n_cycles", 20000},
                              {"direct_steps", 400000},
                              {"burn_in", 1000}};
    push("c06_invariant_measure_consistency", j);
  }
  {
    ordered_json j;
    j["kind"] = "rwre_Q";
    j["seed"] = 1007;
    ordered_json env;
    env["driver"] = "markov";
    env["seed"] = 1;
    env["laws"] = ordered_json::array(
        {mixed_tail_law_json(),
         law_json_pairs({{1, 0.55}, {2, 0.2}, {-1, 0.25}})});
    env["transition"] = ordered_json::array(
        {ordered_json::array({0.7, 0.3}), ordered_json::array({0.4, 0.6})});
    j["environment"] = env;
    j["truncation"] = ordered_json::array({8, 16});
    j["regen"] = ordered_json{{"n_levels", 6},
                              {"r_replicas", 20000},
                              {"n_cycles", 20000},
                              {"direct_steps", 400000}};
    push("c07_rn_density_boundedness", j);
  }
  {
    ordered_json j;
    j["kind"] = "rwre_speed";
    j["seed"] = 1008;
    j["environment"] = ordered_json{
        {"driver", "iid"},
        {"seed", 1},
        {"laws", ordered_json::array({mixed_tail_law_json()})}};
    j["truncation"] = ordered_json::array({4, 8, 16, "inf"});
    j["walk"] = ordered_json{{"n_steps", 500000}, {"n_replicas", 16}};
    push("c08_truncation_convergence", j);
  }
  {
    ordered_json j;
    j["kind"] = "oracle_check";
    j["seed"] = 1009;
    j["oracle"] = ordered_json{{"check", "cosine_sampler"},
                               {"n_replicas", 100000}};
    push("c09_cosine_sampler", j);
  }
  {
    ordered_json j;
    j["kind"] = "billiard_lln";
    j["seed"] = 1010;
    j["tube"] = unit_cylinder_json();
    j["billiard"] = ordered_json{
        {"lambda", 0.0}, {"n_steps", 1000000}, {"n_replicas", 16}};
    push("c10_driftless_zero_speed", j);
  }
  {
    ordered_json j;
    j["kind"] = "billiard_lln";
    j["seed"] = 1011;
    j["tube"] = alternating_tube_json();
    j["billiard"] = ordered_json{
        {"lambda", 1.0}, {"n_steps", 1000000}, {"n_replicas", 16}};
    push("c11_drifted_positive_speed", j);
  }
  {
    ordered_json j;
    j["kind"] = "billiard_balance";
    j["seed"] = 1012;
    j["tube"] = unit_cylinder_json();
    j["billiard"] = ordered_json{
        {"lambda", 0.25},
        {"lambdas", ordered_json::array({0.25, 1.0})},
        {"n_replicas", 100000},
        {"band_pairs", ordered_json::array({ordered_json::array({0, 1}),
                                            ordered_json::array({0, 3})})}};
    push("c12_reversibility", j);
  }
  {
    ordered_json j;
    j["kind"] = "billiard_tails";
    j["seed"] = 1013;
    j["tube"] = unit_cylinder_json();
    j["billiard"] = ordered_json{
        {"lambda", 1.0},      {"a", 0.0},
        {"b", 4.0},           {"start_band", 2},
        {"t_max", 5},         {"tail_replicas", 10000},
        {"m_steps", 10000},   {"n_replicas", 2000},
        {"H_list", ordered_json::array({0.0, 1.0, 2.0, 4.0, 9.0, 16.0})}};
    push("c13_exit_time_tails", j);
  }
  {
    ordered_json j;
    j["kind"] = "skeleton";
    j["seed"] = 1014;
    j["tube"] = unit_cylinder_json();
    j["billiard"] = ordered_json{{"lambda", 1.0},
                                 {"N", 2},
                                 {"r1", 0.1},
                                 {"L", 3},
                                 {"n_steps", 1000000},
                                 {"n_replicas", 8}};
    push("c14_skeleton_tails", j);
  }
  return suites;
}

}  // namespace driftmc
