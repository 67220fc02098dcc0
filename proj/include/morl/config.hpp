#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "morl/algorithms.hpp"
#include "morl/policy.hpp"
#include "morl/scalarization.hpp"
#include "morl/theory.hpp"

namespace morl {

enum class EnvKind { kDeepSeaTreasure, kServerQueues };

std::string to_string(EnvKind kind);
EnvKind parse_env_kind(const std::string& name);

struct EnvConfig {
  EnvKind kind = EnvKind::kDeepSeaTreasure;
  int num_queues = 8;                // server-queues
  std::vector<double> arrival_rates; // server-queues; empty = 0.8 / M each
  std::string layout;                // deep-sea-treasure; empty = built-in map
};

struct ExponentConfig {
  std::vector<int> m_values{2, 3, 4};
  double burn_in = 0.1;     // fraction of leading epochs left out of the fit
  double floor_rel = 1e-6;  // gap floor relative to |f*|
};

// Fully validated settings for one CLI invocation.
struct RunConfig {
  EnvConfig env;
  Algorithm algo = Algorithm::kMoPg;
  Hyperparams hyper;
  std::optional<SchedulePreset> preset;
  int preset_m = 0;
  double preset_eps = 0.0;
  ScalarizationSpec scalarization;
  PolicyKind policy = PolicyKind::kTabularSoftmax;
  PolicyConstants policy_constants;
  double init_scale = 0.0;

  int runs = 1;
  std::uint64_t seed = 0;
  std::string out = "morl-out";
  int parallelism = 1;
  std::int64_t checkpoint_every = 200;
  bool record_wall_time = true;

  // Per-algorithm settings used by `compare`.
  Hyperparams compare_pg;
  Hyperparams compare_vr;
  ExponentConfig exponents;

  nlohmann::json to_json() const;
};

// Command-line values that override file keys.
struct ConfigOverrides {
  std::optional<std::string> env;
  std::optional<std::string> algo;
  std::optional<std::string> preset;
  std::optional<int> m;
  std::optional<double> eps;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> parallelism;
  std::optional<std::int64_t> checkpoint_every;
};

// Accepts the sectioned layout (env / algo / hyper / scalarization / policy /
// experiment / compare / exponents) as well as the flat shorthand where
// hyperparameters and experiment keys sit at the top level. Throws
// ConfigError naming the offending key path.
RunConfig parse_config(const nlohmann::json& doc, const ConfigOverrides& overrides = {});
RunConfig parse_config_file(const std::string& path, const ConfigOverrides& overrides = {});

// Closest known key for an unknown one, or empty.
std::string suggest_key(const std::string& unknown, const std::vector<std::string>& known);

}  // namespace morl
