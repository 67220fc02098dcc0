#include "morl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "morl/errors.hpp"

namespace morl {
namespace {

using nlohmann::json;

const std::vector<std::string> kHyperKeys = {"T", "N", "B", "m", "H", "eta", "delta", "gamma"};
// Keys that a theorem preset computes and therefore must not be given with one.
const std::vector<std::string> kPresetOwnedKeys = {"T", "N", "B", "m", "H", "eta", "delta"};
const std::vector<std::string> kExperimentKeys = {"runs",     "seed",           "out",
                                                  "parallelism", "checkpoint_every",
                                                  "record_wall_time"};
const std::vector<std::string> kPresetKeys = {"preset", "M", "eps"};

const std::map<std::string, std::string>& synonyms() {
  static const std::map<std::string, std::string> table = {
      {"batchsize", "N"},      {"batch_size", "N"},    {"batch", "N"},
      {"n", "N"},              {"epochs", "T"},        {"num_epochs", "T"},
      {"t", "T"},              {"lr", "eta"},          {"learning_rate", "eta"},
      {"stepsize", "eta"},     {"step_size", "eta"},   {"horizon", "H"},
      {"h", "H"},              {"discount", "gamma"},  {"inner_batch", "B"},
      {"b", "B"},              {"epoch_length", "m"},  {"inner_iterations", "m"},
      {"radius", "delta"},     {"seeds", "seed"},      {"num_runs", "runs"},
      {"output", "out"},       {"threads", "parallelism"},
      {"workers", "parallelism"},
  };
  return table;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::vector<std::string>& known,
                    const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) != known.end()) continue;
    std::string msg = "unknown key '" + join_path(prefix, key) + "'";
    const std::string hint = suggest_key(key, known);
    if (!hint.empty()) msg += " (did you mean '" + join_path(prefix, hint) + "'?)";
    throw ConfigError(msg);
  }
}

template <class T>
T get_as(const json& v, const std::string& path) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(path + ": expected a number");
      return v.get<double>();
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (v.is_number_integer()) return v.get<T>();
      if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d)) return static_cast<T>(d);
      }
      throw ConfigError(path + ": expected an integer");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
      return v.get<bool>();
    } else {
      if (!v.is_string()) throw ConfigError(path + ": expected a string");
      return v.get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Collected hyperparameter keys with their source path, so conflicts can be
// reported precisely.
struct HyperInput {
  std::map<std::string, std::pair<json, std::string>> values;

  void add(const std::string& key, const json& v, const std::string& path) {
    if (values.count(key)) {
      throw ConfigError(path + ": also given as '" + values[key].second + "'");
    }
    values[key] = {v, path};
  }
  bool has(const std::string& key) const { return values.count(key) > 0; }
};

void apply_hyper(Hyperparams& h, const HyperInput& in, const std::set<std::string>& skip = {}) {
  for (const auto& [key, entry] : in.values) {
    if (skip.count(key)) continue;
    const auto& [v, path] = entry;
    if (key == "T") h.T = get_as<std::int64_t>(v, path);
    else if (key == "N") h.N = get_as<std::int64_t>(v, path);
    else if (key == "B") h.B = get_as<std::int64_t>(v, path);
    else if (key == "m") h.m = get_as<std::int64_t>(v, path);
    else if (key == "H") h.H = get_as<int>(v, path);
    else if (key == "eta") h.eta = get_as<double>(v, path);
    else if (key == "delta") {
      // No trust region: "inf" (JSON has no infinity literal).
      h.delta = v.is_string() && v.get<std::string>() == "inf"
                    ? std::numeric_limits<double>::infinity()
                    : get_as<double>(v, path);
    }
    else if (key == "gamma") h.gamma = get_as<double>(v, path);
  }
}

HyperInput collect_hyper(const json& obj, const std::string& prefix) {
  if (!obj.is_object()) throw ConfigError(prefix + ": expected an object");
  reject_unknown(obj, kHyperKeys, prefix);
  HyperInput in;
  for (const auto& [key, v] : obj.items()) in.add(key, v, join_path(prefix, key));
  return in;
}

// Matched-budget settings: N = 288 for MO-PG; N = 144, B = 12, m = 13 for
// MO-TSIVR-PG; both T = 1000.
Hyperparams algorithm_defaults(Algorithm algo, EnvKind env) {
  Hyperparams h;
  h.T = 1000;
  if (env == EnvKind::kDeepSeaTreasure) {
    h.H = 100;
    h.gamma = 1.0;
    h.eta = 0.01;
  } else {
    h.H = 100;
    h.gamma = 0.9999;
    h.eta = 0.001;
  }
  if (algo == Algorithm::kMoPg) {
    h.N = 288;
  } else {
    h.N = 144;
    h.B = 12;
    h.m = 13;
    h.delta = 0.5;
  }
  return h;
}

json hyper_json(const Hyperparams& h) {
  json j;
  j["T"] = h.T;
  j["N"] = h.N;
  j["B"] = h.B;
  j["m"] = h.m;
  j["H"] = h.H;
  j["eta"] = h.eta;
  j["delta"] = std::isfinite(h.delta) ? json(h.delta) : json("inf");
  j["gamma"] = h.gamma;
  return j;
}

}  // namespace

std::string suggest_key(const std::string& unknown, const std::vector<std::string>& known) {
  std::string lower = unknown;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto& syn = synonyms();
  for (const std::string& candidate : {unknown, lower}) {
    auto it = syn.find(candidate);
    if (it != syn.end() &&
        std::find(known.begin(), known.end(), it->second) != known.end())
      return it->second;
  }
  std::string best;
  std::size_t best_dist = 3;  // suggest only within distance 2
  for (const auto& k : known) {
    const std::size_t d = edit_distance(lower, k);
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  return best;
}

std::string to_string(EnvKind kind) {
  return kind == EnvKind::kDeepSeaTreasure ? "dst" : "server-queues";
}

EnvKind parse_env_kind(const std::string& name) {
  if (name == "dst" || name == "deep-sea-treasure") return EnvKind::kDeepSeaTreasure;
  if (name == "server-queues") return EnvKind::kServerQueues;
  throw ConfigError("unknown environment '" + name + "' (expected dst or server-queues)");
}

RunConfig parse_config(const json& doc, const ConfigOverrides& ov) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  static const std::vector<std::string> top_keys = [] {
    std::vector<std::string> k = {"env",    "algo",       "hyper",      "scalarization",
                                  "policy", "experiment", "compare",    "exponents"};
    k.insert(k.end(), kHyperKeys.begin(), kHyperKeys.end());
    k.insert(k.end(), kExperimentKeys.begin(), kExperimentKeys.end());
    k.insert(k.end(), kPresetKeys.begin(), kPresetKeys.end());
    return k;
  }();
  reject_unknown(doc, top_keys, "");

  RunConfig cfg;
  HyperInput hyper_in;

  // env
  std::optional<int> env_m;
  if (doc.contains("env")) {
    const json& e = doc["env"];
    if (e.is_string()) {
      cfg.env.kind = parse_env_kind(e.get<std::string>());
    } else if (e.is_object()) {
      reject_unknown(e, {"name", "M", "H", "gamma", "arrival_rates", "layout"}, "env");
      if (!e.contains("name")) throw ConfigError("env.name: missing required key");
      cfg.env.kind = parse_env_kind(get_as<std::string>(e["name"], "env.name"));
      if (e.contains("M")) env_m = get_as<int>(e["M"], "env.M");
      if (e.contains("H")) hyper_in.add("H", e["H"], "env.H");
      if (e.contains("gamma")) hyper_in.add("gamma", e["gamma"], "env.gamma");
      if (e.contains("arrival_rates")) {
        for (const auto& r : e["arrival_rates"])
          cfg.env.arrival_rates.push_back(get_as<double>(r, "env.arrival_rates"));
      }
      if (e.contains("layout")) cfg.env.layout = get_as<std::string>(e["layout"], "env.layout");
    } else {
      throw ConfigError("env: expected a name or an object");
    }
  } else if (!ov.env) {
    throw ConfigError("env: missing required key");
  }
  if (ov.env) cfg.env.kind = parse_env_kind(*ov.env);

  // algo
  if (doc.contains("algo")) {
    const json& a = doc["algo"];
    if (a.is_string()) {
      cfg.algo = parse_algorithm(a.get<std::string>());
    } else if (a.is_object()) {
      reject_unknown(a, {"name"}, "algo");
      cfg.algo = parse_algorithm(get_as<std::string>(a.at("name"), "algo.name"));
    } else {
      throw ConfigError("algo: expected a name or an object");
    }
  }
  if (ov.algo) cfg.algo = parse_algorithm(*ov.algo);

  // hyperparameters, sectioned and flat
  if (doc.contains("hyper")) {
    const json& h = doc["hyper"];
    if (!h.is_object()) throw ConfigError("hyper: expected an object");
    std::vector<std::string> allowed = kHyperKeys;
    allowed.insert(allowed.end(), kPresetKeys.begin(), kPresetKeys.end());
    reject_unknown(h, allowed, "hyper");
    for (const auto& [key, v] : h.items()) {
      if (std::find(kHyperKeys.begin(), kHyperKeys.end(), key) != kHyperKeys.end())
        hyper_in.add(key, v, "hyper." + key);
    }
  }
  for (const auto& key : kHyperKeys) {
    if (doc.contains(key)) hyper_in.add(key, doc[key], key);
  }

  // preset
  std::optional<std::string> preset_name;
  std::optional<int> preset_m;
  std::optional<double> preset_eps;
  auto read_preset = [&](const json& obj, const std::string& prefix) {
    if (obj.contains("preset")) preset_name = get_as<std::string>(obj["preset"], join_path(prefix, "preset"));
    if (obj.contains("M")) preset_m = get_as<int>(obj["M"], join_path(prefix, "M"));
    if (obj.contains("eps")) preset_eps = get_as<double>(obj["eps"], join_path(prefix, "eps"));
  };
  read_preset(doc, "");
  if (doc.contains("hyper")) read_preset(doc["hyper"], "hyper");
  if (ov.preset) preset_name = *ov.preset;
  if (ov.m) preset_m = *ov.m;
  if (ov.eps) preset_eps = *ov.eps;

  // --M / M doubles as the queue count for server-queues.
  if (cfg.env.kind == EnvKind::kServerQueues) {
    if (ov.m) cfg.env.num_queues = *ov.m;
    else if (env_m) cfg.env.num_queues = *env_m;
    else if (preset_m) cfg.env.num_queues = *preset_m;
  } else if (env_m && *env_m != 2) {
    throw ConfigError("env.M: deep-sea-treasure has exactly 2 objectives");
  }
  const int num_objectives = cfg.env.kind == EnvKind::kServerQueues ? cfg.env.num_queues : 2;
  if (num_objectives < 1) throw ConfigError("env.M: must be >= 1");

  // policy
  cfg.policy = cfg.env.kind == EnvKind::kDeepSeaTreasure ? PolicyKind::kTabularSoftmax
                                                         : PolicyKind::kLinearSoftmax;
  if (doc.contains("policy")) {
    const json& p = doc["policy"];
    reject_unknown(p, {"kind", "G", "S", "init_scale"}, "policy");
    if (p.contains("kind")) {
      const std::string k = get_as<std::string>(p["kind"], "policy.kind");
      if (k == "tabular-softmax") cfg.policy = PolicyKind::kTabularSoftmax;
      else if (k == "linear-softmax") cfg.policy = PolicyKind::kLinearSoftmax;
      else throw ConfigError("policy.kind: unknown policy '" + k + "'");
    }
    if (p.contains("G")) cfg.policy_constants.G = get_as<double>(p["G"], "policy.G");
    if (p.contains("S")) cfg.policy_constants.S = get_as<double>(p["S"], "policy.S");
    if (p.contains("init_scale")) cfg.init_scale = get_as<double>(p["init_scale"], "policy.init_scale");
  }
  if (!(cfg.policy_constants.G > 0.0 && cfg.policy_constants.S > 0.0))
    throw ConfigError("policy: G and S must be positive");

  // scalarization (horizon bound after hyperparameters are known)
  cfg.scalarization.kind = cfg.env.kind == EnvKind::kDeepSeaTreasure
                               ? ScalarizationKind::kSqrtTreasure
                               : ScalarizationKind::kAlphaFairness;
  if (doc.contains("scalarization")) {
    const json& s = doc["scalarization"];
    reject_unknown(s, {"kind", "sigma", "L_f", "C", "weights"}, "scalarization");
    if (s.contains("kind"))
      cfg.scalarization.kind = parse_scalarization_kind(get_as<std::string>(s["kind"], "scalarization.kind"));
    if (s.contains("sigma")) cfg.scalarization.sigma = get_as<double>(s["sigma"], "scalarization.sigma");
    if (s.contains("L_f")) cfg.scalarization.grad_lipschitz = get_as<double>(s["L_f"], "scalarization.L_f");
    if (s.contains("C")) cfg.scalarization.grad_bound = get_as<double>(s["C"], "scalarization.C");
    if (s.contains("weights")) {
      for (const auto& w : s["weights"])
        cfg.scalarization.weights.push_back(get_as<double>(w, "scalarization.weights"));
    }
  }
  if (!(cfg.scalarization.sigma > 0.0)) throw ConfigError("scalarization.sigma: must be positive");
  if (cfg.scalarization.kind == ScalarizationKind::kSqrtTreasure && num_objectives != 2)
    throw ConfigError("scalarization.kind: sqrt-treasure needs exactly 2 objectives");
  if (cfg.scalarization.kind == ScalarizationKind::kCustomTable &&
      static_cast<int>(cfg.scalarization.weights.size()) != num_objectives)
    throw ConfigError("scalarization.weights: need one weight per objective");

  // hyperparameters: explicit or preset, never both
  const Hyperparams defaults = algorithm_defaults(cfg.algo, cfg.env.kind);
  if (preset_name) {
    for (const auto& key : kPresetOwnedKeys) {
      if (hyper_in.has(key)) {
        throw ConfigError("both explicit hyperparameter '" + hyper_in.values.at(key).second +
                          "' and preset '" + *preset_name + "' supplied; use one or the other");
      }
    }
    const SchedulePreset preset = parse_preset(*preset_name);
    if (!preset_eps) throw ConfigError("eps: required with a preset");
    cfg.preset = preset;
    cfg.preset_m = preset_m.value_or(num_objectives);
    cfg.preset_eps = *preset_eps;
    if (cfg.preset_m != num_objectives)
      throw ConfigError("M: preset M differs from the environment's objective count");
    cfg.algo = preset_algorithm(preset);

    Hyperparams base = defaults;
    apply_hyper(base, hyper_in);  // only gamma can remain
    const double gamma = base.gamma;
    if (!(gamma < 1.0)) throw ConfigError("gamma: presets need gamma < 1");

    TheoryInputs in{cfg.policy_constants.G, cfg.policy_constants.S, 0.0, 0.0};
    // The horizon does not depend on the constants; the constants depend on
    // the horizon (through the box and the fairness numerator).
    in.C = in.L_f = 1.0;
    const int horizon = theorem_schedule(preset, cfg.preset_m, cfg.preset_eps, gamma, in).hyper.H;
    ScalarizationSpec spec = cfg.scalarization;
    spec.horizon = horizon;
    std::vector<RewardBounds> bounds(num_objectives, RewardBounds{0.0, 1.0});
    spec = with_default_constants(spec, omega_box(bounds, gamma, horizon));
    in.C = spec.grad_bound;
    in.L_f = spec.grad_lipschitz;
    cfg.hyper = theorem_schedule(preset, cfg.preset_m, cfg.preset_eps, gamma, in).hyper;
  } else {
    cfg.hyper = defaults;
    apply_hyper(cfg.hyper, hyper_in);
  }
  cfg.hyper.validate(cfg.algo);
  cfg.scalarization.horizon = cfg.hyper.H;

  // compare: each algorithm starts from its defaults, takes the shared keys
  // and then its own section.
  // Batch sizes define each side of the budget, so they only come from the
  // compare section; delta only matters to MO-TSIVR-PG and is shared.
  const std::set<std::string> per_algo = {"N", "B", "m"};
  cfg.compare_pg = algorithm_defaults(Algorithm::kMoPg, cfg.env.kind);
  cfg.compare_vr = algorithm_defaults(Algorithm::kMoTsivrPg, cfg.env.kind);
  if (!preset_name) {
    apply_hyper(cfg.compare_pg, hyper_in, per_algo);
    apply_hyper(cfg.compare_vr, hyper_in, per_algo);
  }
  if (doc.contains("compare")) {
    const json& c = doc["compare"];
    reject_unknown(c, {"mo-pg", "mo-tsivr-pg"}, "compare");
    if (c.contains("mo-pg")) apply_hyper(cfg.compare_pg, collect_hyper(c["mo-pg"], "compare.mo-pg"));
    if (c.contains("mo-tsivr-pg"))
      apply_hyper(cfg.compare_vr, collect_hyper(c["mo-tsivr-pg"], "compare.mo-tsivr-pg"));
  }
  cfg.compare_pg.validate(Algorithm::kMoPg);
  cfg.compare_vr.validate(Algorithm::kMoTsivrPg);

  // experiment
  if (const char* root = std::getenv("MORL_OUT"); root && *root) cfg.out = root;
  auto read_experiment = [&](const json& obj, const std::string& prefix) {
    if (obj.contains("runs")) cfg.runs = get_as<int>(obj["runs"], join_path(prefix, "runs"));
    if (obj.contains("seed")) cfg.seed = get_as<std::uint64_t>(obj["seed"], join_path(prefix, "seed"));
    if (obj.contains("out")) cfg.out = get_as<std::string>(obj["out"], join_path(prefix, "out"));
    if (obj.contains("parallelism"))
      cfg.parallelism = get_as<int>(obj["parallelism"], join_path(prefix, "parallelism"));
    if (obj.contains("checkpoint_every"))
      cfg.checkpoint_every = get_as<std::int64_t>(obj["checkpoint_every"], join_path(prefix, "checkpoint_every"));
    if (obj.contains("record_wall_time"))
      cfg.record_wall_time = get_as<bool>(obj["record_wall_time"], join_path(prefix, "record_wall_time"));
  };
  if (doc.contains("experiment")) {
    reject_unknown(doc["experiment"], kExperimentKeys, "experiment");
    read_experiment(doc["experiment"], "experiment");
  }
  read_experiment(doc, "");
  if (ov.runs) cfg.runs = *ov.runs;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out) cfg.out = *ov.out;
  if (ov.parallelism) cfg.parallelism = *ov.parallelism;
  if (ov.checkpoint_every) cfg.checkpoint_every = *ov.checkpoint_every;
  if (cfg.runs < 1) throw ConfigError("runs: must be >= 1");
  if (cfg.parallelism < 1) throw ConfigError("parallelism: must be >= 1");
  if (cfg.checkpoint_every < 0) throw ConfigError("checkpoint_every: must be >= 0");

  // exponents
  if (doc.contains("exponents")) {
    const json& x = doc["exponents"];
    reject_unknown(x, {"M_values", "burn_in", "floor_rel"}, "exponents");
    if (x.contains("M_values")) {
      cfg.exponents.m_values.clear();
      for (const auto& v : x["M_values"]) cfg.exponents.m_values.push_back(get_as<int>(v, "exponents.M_values"));
    }
    if (x.contains("burn_in")) cfg.exponents.burn_in = get_as<double>(x["burn_in"], "exponents.burn_in");
    if (x.contains("floor_rel")) cfg.exponents.floor_rel = get_as<double>(x["floor_rel"], "exponents.floor_rel");
  }
  if (!(cfg.exponents.burn_in >= 0.0 && cfg.exponents.burn_in < 1.0))
    throw ConfigError("exponents.burn_in: must lie in [0, 1)");
  if (!(cfg.exponents.floor_rel > 0.0)) throw ConfigError("exponents.floor_rel: must be positive");
  return cfg;
}

RunConfig parse_config_file(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, overrides);
}

json RunConfig::to_json() const {
  json j;
  json e;
  e["name"] = to_string(env.kind);
  if (env.kind == EnvKind::kServerQueues) {
    e["M"] = env.num_queues;
    e["arrival_rates"] = env.arrival_rates;
  } else if (!env.layout.empty()) {
    e["layout"] = env.layout;
  }
  j["env"] = e;
  j["algo"] = to_string(algo);
  j["hyper"] = hyper_json(hyper);
  if (preset) {
    j["hyper"]["preset"] = to_string(*preset);
    j["hyper"]["M"] = preset_m;
    j["hyper"]["eps"] = preset_eps;
  }
  json s;
  s["kind"] = to_string(scalarization.kind);
  s["sigma"] = scalarization.sigma;
  if (scalarization.grad_lipschitz > 0.0) s["L_f"] = scalarization.grad_lipschitz;
  if (scalarization.grad_bound > 0.0) s["C"] = scalarization.grad_bound;
  if (!scalarization.weights.empty()) s["weights"] = scalarization.weights;
  j["scalarization"] = s;
  j["policy"] = {{"kind", to_string(policy)},
                 {"G", policy_constants.G},
                 {"S", policy_constants.S},
                 {"init_scale", init_scale}};
  j["experiment"] = {{"runs", runs},
                     {"seed", seed},
                     {"out", out},
                     {"parallelism", parallelism},
                     {"checkpoint_every", checkpoint_every},
                     {"record_wall_time", record_wall_time}};
  j["compare"] = {{"mo-pg", hyper_json(compare_pg)}, {"mo-tsivr-pg", hyper_json(compare_vr)}};
  j["exponents"] = {{"M_values", exponents.m_values},
                    {"burn_in", exponents.burn_in},
                    {"floor_rel", exponents.floor_rel}};
  return j;
}

}  // namespace morl
