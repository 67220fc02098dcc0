#include "morl/experiments.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "morl/environments.hpp"
#include "morl/errors.hpp"
#include "morl/version.hpp"

namespace morl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string run_dir_name(int r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%03d", r);
  return buf;
}

json hyper_to_json(const Hyperparams& h) {
  return json{{"T", h.T},     {"N", h.N},         {"B", h.B},
              {"m", h.m},     {"H", h.H},         {"eta", h.eta},
              {"delta", std::isfinite(h.delta) ? json(h.delta) : json("inf")},
              {"gamma", h.gamma}};
}

json records_to_json(const std::vector<EpochRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({r.epoch, r.episodes, r.steps, r.f_value, r.theta_norm, r.wall_ms});
  }
  return arr;
}

std::vector<EpochRecord> records_from_json(const json& arr) {
  std::vector<EpochRecord> out;
  for (const auto& e : arr) {
    EpochRecord r;
    r.epoch = e.at(0).get<std::int64_t>();
    r.episodes = e.at(1).get<std::int64_t>();
    r.steps = e.at(2).get<std::int64_t>();
    r.f_value = e.at(3).get<double>();
    r.theta_norm = e.at(4).get<double>();
    r.wall_ms = e.at(5).get<double>();
    out.push_back(r);
  }
  return out;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw IoError("corrupt file '" + path.string() + "': " + e.what());
  }
}

std::vector<double> column(const std::vector<TrainLog>& logs, std::size_t epoch) {
  std::vector<double> v;
  v.reserve(logs.size());
  for (const auto& log : logs) v.push_back(log.records[epoch].f_value);
  return v;
}

// OLS y = c0 + c1 x. Returns {c0, c1, rms residual}.
std::array<double, 3> ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - intercept - slope * x[i];
    ss += r * r;
  }
  return {intercept, slope, std::sqrt(ss / n)};
}

}  // namespace

Problem build_problem(const RunConfig& config, const Hyperparams& hyper) {
  Problem p;
  if (config.env.kind == EnvKind::kDeepSeaTreasure) {
    DstLayout layout = config.env.layout.empty() ? DstLayout::mo_gymnasium_default()
                                                 : DstLayout::load(config.env.layout);
    p.env = std::make_unique<DeepSeaTreasure>(std::move(layout), hyper.H, hyper.gamma);
  } else {
    p.env = std::make_unique<ServerQueues>(config.env.num_queues, hyper.H, hyper.gamma,
                                           config.env.arrival_rates);
  }
  p.policy = make_policy(config.policy, p.env->spec(), p.env->num_actions());
  ScalarizationSpec spec = config.scalarization;
  spec.horizon = hyper.H;
  const OmegaBox box = omega_box(p.env->spec());
  if (spec.kind == ScalarizationKind::kSqrtTreasure &&
      box.lo[1] + spec.time_budget + spec.sigma <= 0.0) {
    throw ConfigError("hyper.H: sqrt-treasure needs the discounted time penalty above -" +
                      fmt_double(spec.time_budget + spec.sigma));
  }
  p.scalarization = with_default_constants(spec, box);
  return p;
}

std::string config_hash(const RunConfig& config, Algorithm algo, const Hyperparams& hyper) {
  json j = config.to_json();
  // Output location and scheduling do not change results.
  j["experiment"].erase("out");
  j["experiment"].erase("parallelism");
  j["experiment"].erase("checkpoint_every");
  j.erase("compare");
  j.erase("exponents");
  j["algo"] = to_string(algo);
  j["hyper"] = hyper_to_json(hyper);
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

RunSet run_experiment(const RunConfig& config, Algorithm algo, const Hyperparams& hyper,
                      const fs::path& dir, int parallelism, std::ostream* progress) {
  hyper.validate(algo);
  if (parallelism < 1) throw UsageError("parallelism must be >= 1");
  const Problem problem = build_problem(config, hyper);

  RunSet set;
  set.algorithm = algo;
  set.hyper = hyper;
  for (int r = 0; r < config.runs; ++r) set.seeds.push_back(config.seed + static_cast<std::uint64_t>(r));
  set.logs.resize(static_cast<std::size_t>(config.runs));

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  const std::string hash = config_hash(config, algo, hyper);
  const fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    const json old = parse_json_file(manifest_path);
    if (old.value("config_hash", std::string()) != hash) {
      throw ConfigError("output directory '" + dir.string() +
                        "' holds runs of a different configuration; choose another --out");
    }
  }
  json manifest{{"version", kVersion},
                {"config_hash", hash},
                {"algorithm", to_string(algo)},
                {"hyper", hyper_to_json(hyper)},
                {"episodes_per_epoch", episodes_per_epoch(algo, hyper)},
                {"runs", config.runs},
                {"seeds", set.seeds}};
  write_text_file(manifest_path, manifest.dump(2) + "\n");

  json run_config = config.to_json();
  run_config["algo"] = to_string(algo);
  run_config["hyper"] = hyper_to_json(hyper);
  run_config.erase("compare");
  run_config.erase("exponents");
  json constants{{"G", config.policy_constants.G},
                 {"S", config.policy_constants.S},
                 {"C", problem.scalarization.grad_bound},
                 {"L_f", problem.scalarization.grad_lipschitz}};
  const int num_objectives = problem.env->spec().num_objectives;
  if (hyper.gamma < 1.0) {
    // The smoothness and variance constants diverge at gamma = 1.
    const TheoryConstants c = variance_constants(
        {config.policy_constants.G, config.policy_constants.S, problem.scalarization.grad_bound,
         problem.scalarization.grad_lipschitz},
        num_objectives, hyper.gamma, hyper.H,
        std::isfinite(hyper.delta) ? hyper.delta : 1.0 / (2.0 * config.policy_constants.G * hyper.H));
    constants["L_theta"] = c.L_theta;
    constants["D_J"] = c.D_J;
    constants["C1"] = c.C1;
    constants["C2"] = c.C2;
    constants["C3"] = c.C3;
  }

  std::mutex progress_mutex;
  auto run_one = [&](int r, int workers) {
    const fs::path run_dir = dir / run_dir_name(r);
    fs::create_directories(run_dir);
    const std::uint64_t seed = set.seeds[static_cast<std::size_t>(r)];
    const fs::path final_path = run_dir / "final.json";
    const fs::path log_path = run_dir / "log.csv";
    const fs::path ckpt_path = run_dir / "checkpoint.json";

    if (fs::exists(final_path) && fs::exists(log_path)) {
      const json fin = parse_json_file(final_path);
      TrainLog log;
      log.algorithm = algo;
      log.hyper = hyper;
      log.seed = seed;
      log.records = parse_log_csv(read_text_file(log_path));
      log.final_theta = vector_from_json(fin.at("final_theta"));
      if (static_cast<std::int64_t>(log.records.size()) == hyper.T) {
        set.logs[static_cast<std::size_t>(r)] = std::move(log);
        return;
      }
    }

    TrainOptions opt;
    opt.seed = seed;
    opt.workers = workers;
    opt.init_scale = config.init_scale;
    opt.record_wall_time = config.record_wall_time;
    opt.checkpoint_every = config.checkpoint_every;
    if (fs::exists(ckpt_path)) {
      const json c = parse_json_file(ckpt_path);
      TrainState st;
      st.next_epoch = c.at("next_epoch").get<std::int64_t>();
      st.theta = vector_from_json(c.at("theta"));
      st.records = records_from_json(c.at("records"));
      opt.resume = std::move(st);
    }
    opt.on_checkpoint = [&](const TrainState& st) {
      json c{{"next_epoch", st.next_epoch},
             {"theta", vector_to_json(st.theta)},
             {"records", records_to_json(st.records)}};
      write_text_file(ckpt_path, c.dump() + "\n");
      if (progress) {
        std::lock_guard lock(progress_mutex);
        *progress << to_string(algo) << " " << run_dir_name(r) << " epoch " << st.next_epoch
                  << "/" << hyper.T << " f=" << st.records.back().f_value
                  << " episodes=" << st.records.back().episodes << "\n";
        progress->flush();
      }
    };

    TrainLog log = train(algo, *problem.env, *problem.policy, problem.scalarization, hyper, opt);
    write_text_file(log_path, format_log_csv(log));
    json fin{{"seed", seed},
             {"algorithm", to_string(algo)},
             {"epochs", hyper.T},
             {"final_f", log.records.empty() ? 0.0 : log.records.back().f_value},
             {"final_theta", vector_to_json(log.final_theta)},
             {"config", run_config},
             {"constants", constants}};
    write_text_file(final_path, fin.dump() + "\n");
    set.logs[static_cast<std::size_t>(r)] = std::move(log);
  };

  if (config.runs == 1) {
    run_one(0, parallelism);
  } else {
    tbb::global_control control(tbb::global_control::max_allowed_parallelism,
                                static_cast<std::size_t>(parallelism));
    tbb::task_arena arena(parallelism);
    arena.execute([&] {
      tbb::parallel_for(0, config.runs, [&](int r) { run_one(r, 1); });
    });
  }
  return set;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw UsageError("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

QuantileSeries aggregate_quantiles(const std::vector<TrainLog>& logs,
                                   const std::vector<double>& levels) {
  if (logs.empty()) throw UsageError("aggregate_quantiles: no runs");
  const std::size_t T = logs.front().records.size();
  for (const auto& log : logs) {
    if (log.records.size() != T) throw UsageError("aggregate_quantiles: runs differ in length");
  }
  QuantileSeries s;
  s.levels = levels;
  s.values.assign(levels.size(), std::vector<double>(T));
  for (std::size_t t = 0; t < T; ++t) {
    s.epochs.push_back(logs.front().records[t].epoch);
    const std::vector<double> col = column(logs, t);
    for (std::size_t k = 0; k < levels.size(); ++k) s.values[k][t] = quantile(col, levels[k]);
  }
  return s;
}

double best_observed(const std::vector<TrainLog>& logs) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& log : logs)
    for (const auto& r : log.records) best = std::max(best, r.f_value);
  return best;
}

std::vector<double> optimality_gap_series(const std::vector<double>& median, double f_star,
                                          double floor) {
  std::vector<double> gap(median.size());
  for (std::size_t t = 0; t < median.size(); ++t) gap[t] = std::max(f_star - median[t], floor);
  return gap;
}

double gap_floor(double f_star, double floor_rel) {
  return f_star != 0.0 ? floor_rel * std::abs(f_star) : floor_rel;
}

LogLogFit fit_loglog(const std::vector<double>& t, const std::vector<double>& gaps, double floor) {
  if (t.size() != gaps.size()) throw UsageError("fit_loglog: t and gaps differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(gaps[i] > floor)) continue;
    if (!(t[i] > 0.0)) throw UsageError("fit_loglog: t must be positive");
    x.push_back(std::log(gaps[i]));
    y.push_back(std::log(t[i]));
  }
  if (x.size() < 2) throw DegenerateFitError("fit_loglog: fewer than two points above the floor");
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); }))
    throw DegenerateFitError("fit_loglog: every gap is equal");
  const auto [intercept, slope, rms] = ols(x, y);
  return LogLogFit{intercept, -slope, x.size(), rms};
}

LogLogFit fit_gap_series(const std::vector<TrainLog>& logs, double burn_in, double floor_rel) {
  const QuantileSeries med = aggregate_quantiles(logs, {0.5});
  const double f_star = best_observed(logs);
  const double floor = gap_floor(f_star, floor_rel);
  const std::vector<double> gap = optimality_gap_series(med.values[0], f_star, floor);
  const auto skip = static_cast<std::size_t>(std::ceil(burn_in * static_cast<double>(gap.size())));
  std::vector<double> t, g;
  for (std::size_t i = skip; i < gap.size(); ++i) {
    t.push_back(static_cast<double>(med.epochs[i] + 1));
    g.push_back(gap[i]);
  }
  return fit_loglog(t, g, floor);
}

ExponentFit fit_exponents(const std::vector<ExponentPoint>& per_m) {
  std::vector<double> x, y;
  double b_sum = 0.0;
  for (const auto& p : per_m) {
    if (p.M < 1) throw UsageError("fit_exponents: M must be >= 1");
    x.push_back(std::log(static_cast<double>(p.M)));
    y.push_back(p.fit.q);
    b_sum += p.fit.b;
  }
  std::vector<int> distinct;
  for (const auto& p : per_m) distinct.push_back(p.M);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw UsageError("fit_exponents: need at least two distinct M values");

  ExponentFit out;
  out.per_m = per_m;
  const auto [intercept, slope, rms] = ols(x, y);
  (void)rms;
  out.a_hat = slope;
  out.a_intercept = intercept;
  out.b_hat = b_sum / static_cast<double>(per_m.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.q_residuals.push_back(y[i] - intercept - slope * x[i]);
  return out;
}

std::string format_log_csv(const TrainLog& log) {
  std::string out = "epoch,episodes,steps,f_value,theta_norm,wall_ms\n";
  char buf[64];
  for (const auto& r : log.records) {
    out += std::to_string(r.epoch) + "," + std::to_string(r.episodes) + "," +
           std::to_string(r.steps) + "," + fmt_double(r.f_value) + "," +
           fmt_double(r.theta_norm) + ",";
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    out += buf;
    out += "\n";
  }
  return out;
}

std::vector<EpochRecord> parse_log_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "epoch,episodes,steps,f_value,theta_norm,wall_ms")
    throw IoError("log csv: unexpected header");
  std::vector<EpochRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EpochRecord r;
    if (std::sscanf(line.c_str(), "%" SCNd64 ",%" SCNd64 ",%" SCNd64 ",%lf,%lf,%lf", &r.epoch,
                    &r.episodes, &r.steps, &r.f_value, &r.theta_norm, &r.wall_ms) != 6)
      throw IoError("log csv: malformed line '" + line + "'");
    out.push_back(r);
  }
  return out;
}

std::string format_quantiles_csv(const QuantileSeries& s) {
  std::string out = "epoch";
  for (double q : s.levels) {
    out += q == 0.5 ? ",median" : "," + std::string("q") + std::to_string(static_cast<int>(std::lround(q * 100)));
  }
  out += "\n";
  for (std::size_t t = 0; t < s.epochs.size(); ++t) {
    out += std::to_string(s.epochs[t]);
    for (const auto& v : s.values) out += "," + fmt_double(v[t]);
    out += "\n";
  }
  return out;
}

std::string format_gap_csv(const std::vector<std::int64_t>& epochs,
                           const std::vector<double>& median, const std::vector<double>& gap) {
  std::string out = "epoch,median,gap\n";
  for (std::size_t t = 0; t < epochs.size(); ++t) {
    out += std::to_string(epochs[t]) + "," + fmt_double(median[t]) + "," + fmt_double(gap[t]) + "\n";
  }
  return out;
}

json exponents_json(const ExponentFit& fit) {
  json per = json::array();
  for (std::size_t i = 0; i < fit.per_m.size(); ++i) {
    const auto& p = fit.per_m[i];
    per.push_back({{"M", p.M},
                   {"q", p.fit.q},
                   {"b", p.fit.b},
                   {"points", p.fit.points},
                   {"residual_rms", p.fit.residual_rms},
                   {"q_residual", i < fit.q_residuals.size() ? fit.q_residuals[i] : 0.0}});
  }
  return json{{"per_M", per}, {"a_hat", fit.a_hat}, {"b_hat", fit.b_hat}};
}

void write_text_file(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace '" + path.string() + "': " + ec.message());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_aggregates(const RunSet& set, const fs::path& dir, double floor_rel) {
  const QuantileSeries q = aggregate_quantiles(set.logs, {0.25, 0.5, 0.75});
  write_text_file(dir / "quantiles.csv", format_quantiles_csv(q));
  const double f_star = best_observed(set.logs);
  const std::vector<double> gap =
      optimality_gap_series(q.values[1], f_star, gap_floor(f_star, floor_rel));
  write_text_file(dir / "gap.csv", format_gap_csv(q.epochs, q.values[1], gap));
}

}  // namespace morl
