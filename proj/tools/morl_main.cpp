// morl: run, compare, exponents, verify.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "morl/config.hpp"
#include "morl/errors.hpp"
#include "morl/experiments.hpp"
#include "morl/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace morl;

namespace {

struct Flags {
  std::string config_path;
  std::string env, algo, preset, out;
  int m = 0, runs = 0, parallelism = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = -1;
  bool full = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--env", f.env, "dst | server-queues");
  cmd->add_option("--algo", f.algo, "mo-pg | mo-tsivr-pg");
  cmd->add_option("--preset", f.preset, "thm1 | thm2 | thm2-proof | thm3 | thm4");
  cmd->add_option("--M", f.m, "number of objectives (queues)");
  cmd->add_option("--eps", f.eps, "target accuracy for presets");
  cmd->add_option("--runs", f.runs, "independent runs");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--parallelism", f.parallelism, "worker threads");
  cmd->add_option("--checkpoint-every", f.checkpoint_every, "epochs between checkpoints");
}

ConfigOverrides overrides_from(const CLI::App* cmd, const Flags& f) {
  ConfigOverrides ov;
  if (cmd->count("--env")) ov.env = f.env;
  if (cmd->count("--algo")) ov.algo = f.algo;
  if (cmd->count("--preset")) ov.preset = f.preset;
  if (cmd->count("--M")) ov.m = f.m;
  if (cmd->count("--eps")) ov.eps = f.eps;
  if (cmd->count("--runs")) ov.runs = f.runs;
  if (cmd->count("--seed")) ov.seed = f.seed;
  if (cmd->count("--out")) ov.out = f.out;
  if (cmd->count("--parallelism")) ov.parallelism = f.parallelism;
  if (cmd->count("--checkpoint-every")) ov.checkpoint_every = f.checkpoint_every;
  return ov;
}

json load_doc(const Flags& f) {
  if (f.config_path.empty()) return json::object();
  try {
    return json::parse(read_text_file(f.config_path), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + f.config_path + "' is not valid JSON: " + e.what());
  }
}

void echo_config(const RunConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  write_text_file(dir / "config.json", cfg.to_json().dump(2) + "\n");
}

double final_median(const RunSet& set) {
  std::vector<double> v;
  for (const auto& l : set.logs) v.push_back(l.records.back().f_value);
  return quantile(v, 0.5);
}

int cmd_run(const RunConfig& cfg) {
  const fs::path out = cfg.out;
  echo_config(cfg, out);
  const RunSet set = run_experiment(cfg, cfg.algo, cfg.hyper, out, cfg.parallelism, &std::cerr);
  write_aggregates(set, out, cfg.exponents.floor_rel);
  std::printf("%s: %d run(s), final median f = %.6f, output in %s\n", to_string(cfg.algo).c_str(),
              cfg.runs, final_median(set), out.string().c_str());
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  const std::int64_t b1 = episodes_per_epoch(Algorithm::kMoPg, cfg.compare_pg);
  const std::int64_t b2 = episodes_per_epoch(Algorithm::kMoTsivrPg, cfg.compare_vr);
  const auto& v = cfg.compare_vr;
  if (b1 != b2 || cfg.compare_pg.T != cfg.compare_vr.T) {
    std::fprintf(stderr,
                 "refusing to compare: episode budgets differ: mo-pg 2N = 2*%lld = %lld vs "
                 "mo-tsivr-pg 2N + 2(m-1)B = 2*%lld + 2*%lld*%lld = %lld (T %lld vs %lld)\n",
                 (long long)cfg.compare_pg.N, (long long)b1, (long long)v.N, (long long)(v.m - 1),
                 (long long)v.B, (long long)b2, (long long)cfg.compare_pg.T, (long long)v.T);
    return 2;
  }
  std::fprintf(stderr, "matched budget: %lld = %lld episodes per epoch\n", (long long)b1, (long long)b2);
  const fs::path out = cfg.out;
  echo_config(cfg, out);
  const RunSet pg = run_experiment(cfg, Algorithm::kMoPg, cfg.compare_pg, out / "mo-pg",
                                   cfg.parallelism, &std::cerr);
  write_aggregates(pg, out / "mo-pg", cfg.exponents.floor_rel);
  const RunSet vr = run_experiment(cfg, Algorithm::kMoTsivrPg, cfg.compare_vr, out / "mo-tsivr-pg",
                                   cfg.parallelism, &std::cerr);
  write_aggregates(vr, out / "mo-tsivr-pg", cfg.exponents.floor_rel);
  const json summary{{"episodes_per_epoch", b1},
                     {"final_median", {{"mo-pg", final_median(pg)}, {"mo-tsivr-pg", final_median(vr)}}}};
  write_text_file(out / "compare.json", summary.dump(2) + "\n");
  std::printf("final median f: mo-pg %.6f, mo-tsivr-pg %.6f\n", final_median(pg), final_median(vr));
  return 0;
}

int cmd_exponents(const json& doc, ConfigOverrides ov) {
  const RunConfig base = parse_config(doc, ov);
  if (base.env.kind != EnvKind::kServerQueues)
    throw ConfigError("exponents: the M sweep needs env server-queues");
  const fs::path out = base.out;
  echo_config(base, out);
  std::vector<ExponentPoint> points;
  for (int M : base.exponents.m_values) {
    ov.m = M;
    const RunConfig cfg = parse_config(doc, ov);
    const fs::path dir = out / ("M_" + std::to_string(M));
    const RunSet set = run_experiment(cfg, cfg.algo, cfg.hyper, dir, cfg.parallelism, &std::cerr);
    write_aggregates(set, dir, cfg.exponents.floor_rel);
    const LogLogFit fit = fit_gap_series(set.logs, cfg.exponents.burn_in, cfg.exponents.floor_rel);
    std::printf("M=%d: q=%.4f b=%.4f (%zu points)\n", M, fit.q, fit.b, fit.points);
    points.push_back({M, fit});
  }
  const ExponentFit fit = fit_exponents(points);
  write_text_file(out / "exponents.json", exponents_json(fit).dump(2) + "\n");
  std::printf("a_hat = %.4f, b_hat = %.4f\n", fit.a_hat, fit.b_hat);
  return 0;
}

int cmd_verify(bool full, int parallelism) {
  const auto results = run_checks(full, parallelism, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective policy gradient experiments"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* run = app.add_subcommand("run", "train one algorithm for --runs runs");
  CLI::App* compare = app.add_subcommand("compare", "both algorithms under a matched episode budget");
  CLI::App* exponents = app.add_subcommand("exponents", "M sweep and sample-complexity exponent fit");
  CLI::App* verify = app.add_subcommand("verify", "oracle and property checks");
  for (CLI::App* c : {run, compare, exponents}) add_common(c, f);
  verify->add_flag("--full", f.full, "include the long training comparisons");
  verify->add_option("--parallelism", f.parallelism, "worker threads");
  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify(f.full, std::max(1, f.parallelism));
    CLI::App* cmd = run->parsed() ? run : compare->parsed() ? compare : exponents;
    const json doc = load_doc(f);
    const ConfigOverrides ov = overrides_from(cmd, f);
    if (cmd == exponents) return cmd_exponents(doc, ov);
    const RunConfig cfg = parse_config(doc, ov);
    return cmd == run ? cmd_run(cfg) : cmd_compare(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
