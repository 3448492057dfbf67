#include "cascade/config_json.hpp"

#include <cstdio>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& scope,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError(scope.empty() ? key : scope + "." + key,
                               "unknown key");
  }
}

double get_number(const json& j, const std::string& scope, const char* key) {
  if (!j.contains(key)) throw ConfigError(scope + key, "missing");
  if (!j[key].is_number()) throw ConfigError(scope + key, "must be a number");
  return j[key].get<double>();
}

uint64_t get_uint(const json& j, const std::string& scope, const char* key) {
  if (!j.contains(key)) throw ConfigError(scope + key, "missing");
  if (!j[key].is_number_unsigned())
    throw ConfigError(scope + key, "must be a non-negative integer");
  return j[key].get<uint64_t>();
}

Schedule parse_schedule(const json& j, double gamma, const Schedule* truth,
                        const std::string& scope) {
  if (!j.is_object()) throw ConfigError(scope, "must be an object");
  if (!j.contains("kind")) throw ConfigError(scope + ".kind", "missing");
  const std::string kind = j["kind"].get<std::string>();
  const std::string sp = scope + ".";
  if (kind == "optimal") {
    reject_unknown(j, scope, {"kind", "epsilon"});
    const double eps = j.contains("epsilon")
                           ? get_number(j, sp, "epsilon")
                           : 0.0;
    return Schedule::optimal_matched(gamma, eps);
  }
  if (kind == "scaled") {
    reject_unknown(j, scope, {"kind", "of", "rho"});
    if (!j.contains("of")) throw ConfigError(sp + "of", "missing");
    const double rho = get_number(j, sp, "rho");
    if (j["of"].is_string()) {
      if (j["of"].get<std::string>() != "truth" || truth == nullptr)
        throw ConfigError(sp + "of", "only \"truth\" may be referenced here");
      return Schedule::scaled(*truth, rho);
    }
    return Schedule::scaled(parse_schedule(j["of"], gamma, truth, sp + "of"),
                            rho);
  }
  if (kind == "harmonic") {
    reject_unknown(j, scope, {"kind", "c_p"});
    return Schedule::harmonic(get_number(j, sp, "c_p"));
  }
  if (kind == "powerlaw") {
    reject_unknown(j, scope, {"kind", "coefficient", "exponent"});
    return Schedule::power_law(get_number(j, sp, "coefficient"),
                               get_number(j, sp, "exponent"));
  }
  if (kind == "constant") {
    reject_unknown(j, scope, {"kind", "q"});
    return Schedule::constant(get_number(j, sp, "q"));
  }
  if (kind == "table") {
    reject_unknown(j, scope, {"kind", "values"});
    if (!j.contains("values") || !j["values"].is_array())
      throw ConfigError(sp + "values", "missing or not an array");
    std::vector<double> values;
    for (const auto& v : j["values"]) values.push_back(v.get<double>());
    return Schedule::table(std::move(values));
  }
  throw ConfigError(sp + "kind", "unknown schedule kind '" + kind + "'");
}

CheckpointSpec parse_checkpoints(const json& j, const std::string& scope) {
  if (!j.is_object()) throw ConfigError(scope, "must be an object");
  if (!j.contains("kind")) throw ConfigError(scope + ".kind", "missing");
  const std::string kind = j["kind"].get<std::string>();
  CheckpointSpec spec;
  if (kind == "geometric") {
    reject_unknown(j, scope, {"kind", "count"});
    spec.kind = CheckpointSpec::Kind::Geometric;
    spec.count = static_cast<uint32_t>(get_uint(j, scope + ".", "count"));
    return spec;
  }
  if (kind == "explicit") {
    reject_unknown(j, scope, {"kind", "values"});
    spec.kind = CheckpointSpec::Kind::Explicit;
    if (!j.contains("values") || !j["values"].is_array())
      throw ConfigError(scope + ".values", "missing or not an array");
    for (const auto& v : j["values"])
      spec.values.push_back(v.get<uint32_t>());
    return spec;
  }
  throw ConfigError(scope + ".kind", "unknown checkpoints kind '" + kind + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
  reject_unknown(j, "", {"gamma", "truth", "assumed", "horizon", "checkpoints",
                         "trials", "seed"});
  const double gamma = get_number(j, "", "gamma");
  if (!(gamma > 1.0)) throw ConfigError("gamma", "must be > 1");
  if (!j.contains("truth")) throw ConfigError("truth", "missing");
  Schedule truth = parse_schedule(j["truth"], gamma, nullptr, "truth");
  if (!j.contains("assumed")) throw ConfigError("assumed", "missing");
  Schedule assumed = parse_schedule(j["assumed"], gamma, &truth, "assumed");
  const uint64_t horizon = get_uint(j, "", "horizon");
  if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
  if (!j.contains("checkpoints")) throw ConfigError("checkpoints", "missing");
  CheckpointSpec ckpts = parse_checkpoints(j["checkpoints"], "checkpoints");
  const uint64_t trials = get_uint(j, "", "trials");
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  const uint64_t seed = get_uint(j, "", "seed");
  ExperimentConfig cfg{UrnModel::from_gamma(gamma),
                       std::move(truth),
                       std::move(assumed),
                       horizon,
                       std::move(ckpts),
                       trials,
                       seed};
  (void)cfg.checkpoints.resolve(horizon);  // validate now, not mid-run
  return cfg;
}

json schedule_to_json(const Schedule& s) {
  struct Visitor {
    json operator()(const Schedule::OptimalMatched& v) const {
      return {{"kind", "optimal"}, {"epsilon", v.epsilon}};
    }
    json operator()(const Schedule::Scaled& v) const {
      return {{"kind", "scaled"},
              {"of", schedule_to_json(*v.base)},
              {"rho", v.rho}};
    }
    json operator()(const Schedule::Harmonic& v) const {
      return {{"kind", "harmonic"}, {"c_p", v.c_p}};
    }
    json operator()(const Schedule::PowerLaw& v) const {
      return {{"kind", "powerlaw"},
              {"coefficient", v.coefficient},
              {"exponent", v.exponent}};
    }
    json operator()(const Schedule::Constant& v) const {
      return {{"kind", "constant"}, {"q", v.q}};
    }
    json operator()(const Schedule::Table& v) const {
      return {{"kind", "table"}, {"values", v.values}};
    }
  };
  return std::visit(Visitor{}, s.spec());
}

json resolved_config_json(const ExperimentConfig& cfg) {
  json ck;
  if (cfg.checkpoints.kind == CheckpointSpec::Kind::Geometric)
    ck = {{"kind", "geometric"}, {"count", cfg.checkpoints.count}};
  else
    ck = {{"kind", "explicit"}, {"values", cfg.checkpoints.values}};
  return {{"gamma", cfg.urn.gamma()},
          {"truth", schedule_to_json(cfg.truth)},
          {"assumed", schedule_to_json(cfg.assumed)},
          {"horizon", cfg.horizon},
          {"checkpoints", ck},
          {"trials", cfg.trials},
          {"seed", cfg.master_seed}};
}

std::string config_digest(const json& resolved) {
  const std::string dump = resolved.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AdversarialJob parse_adversarial_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
  reject_unknown(j, "", {"gamma", "n_players", "v", "placements", "rules",
                         "assumed", "trials", "seed"});
  const double gamma = get_number(j, "", "gamma");
  if (!(gamma > 1.0)) throw ConfigError("gamma", "must be > 1");
  AdversarialJob job{UrnModel::from_gamma(gamma)};
  job.n_players = get_uint(j, "", "n_players");
  job.v = get_uint(j, "", "v");
  if (job.v > job.n_players) throw ConfigError("v", "must be <= n_players");
  job.trials = get_uint(j, "", "trials");
  if (job.trials < 1) throw ConfigError("trials", "must be >= 1");
  job.seed = get_uint(j, "", "seed");

  if (!j.contains("placements") || !j["placements"].is_array() ||
      j["placements"].empty())
    throw ConfigError("placements", "missing or empty");
  for (const auto& p : j["placements"]) {
    const std::string name = p.get<std::string>();
    if (name != "end" && name != "start" && name != "uniform")
      throw ConfigError("placements", "unknown placement '" + name + "'");
    job.placements.push_back(name);
  }

  if (!j.contains("rules") || !j["rules"].is_array() || j["rules"].empty())
    throw ConfigError("rules", "missing or empty");
  for (const auto& r : j["rules"]) {
    const std::string name = r.get<std::string>();
    if (name == "majority") {
      job.rules.push_back(adversarial::DecisionRule::majority());
    } else if (name == "map") {
      if (!j.contains("assumed"))
        throw ConfigError("assumed", "required by the map rule");
      job.rules.push_back(adversarial::DecisionRule::mismatched_map(
          parse_schedule(j["assumed"], gamma, nullptr, "assumed")));
    } else {
      throw ConfigError("rules", "unknown rule '" + name + "'");
    }
  }
  return job;
}

json resolved_adversarial_json(const AdversarialJob& job) {
  json rules = json::array();
  for (const auto& r : job.rules) rules.push_back(r.name());
  return {{"gamma", job.urn.gamma()},   {"n_players", job.n_players},
          {"v", job.v},                 {"placements", job.placements},
          {"rules", rules},             {"trials", job.trials},
          {"seed", job.seed}};
}

}  // namespace cascade
