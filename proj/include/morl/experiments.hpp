#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "morl/algorithms.hpp"
#include "morl/config.hpp"

namespace morl {

// Environment, policy and scalarization for one configuration.
struct Problem {
  std::unique_ptr<Environment> env;
  std::unique_ptr<DiscretePolicy> policy;
  ScalarizationSpec scalarization;
};

// DST pairs with sqrt-treasure, Server Queues with alpha-fairness bound to the
// horizon, unless the config names another scalarization.
Problem build_problem(const RunConfig& config, const Hyperparams& hyper);

struct RunSet {
  Algorithm algorithm = Algorithm::kMoPg;
  Hyperparams hyper;
  std::vector<std::uint64_t> seeds;
  std::vector<TrainLog> logs;
};

// Launches config.runs runs with seeds config.seed + r. Layout under `dir`:
//   manifest.json
//   run_000/log.csv, run_000/final.json, run_000/checkpoint.json, ...
// A finished run (final.json present) is loaded instead of retrained; an
// unfinished one continues from its checkpoint. Progress lines go to
// `progress` when non-null.
RunSet run_experiment(const RunConfig& config, Algorithm algo, const Hyperparams& hyper,
                      const std::filesystem::path& dir, int parallelism,
                      std::ostream* progress = nullptr);

// 64-bit FNV-1a of the result-relevant part of the configuration.
std::string config_hash(const RunConfig& config, Algorithm algo, const Hyperparams& hyper);

// Linear interpolation between order statistics: position (n - 1) q.
double quantile(std::vector<double> values, double q);

struct QuantileSeries {
  std::vector<double> levels;
  std::vector<std::int64_t> epochs;
  std::vector<std::vector<double>> values;  // [level][epoch]
};

// Per-epoch quantiles of f_value across runs. Throws UsageError on an empty
// set or runs of different length.
QuantileSeries aggregate_quantiles(const std::vector<TrainLog>& logs,
                                   const std::vector<double>& levels);

// Largest f_value over every run and epoch.
double best_observed(const std::vector<TrainLog>& logs);

// max(f_star - median_t, floor) per epoch.
std::vector<double> optimality_gap_series(const std::vector<double>& median, double f_star,
                                          double floor);

// floor_rel * |f_star|, or floor_rel when f_star is 0.
double gap_floor(double f_star, double floor_rel);

struct LogLogFit {
  double q = 0.0;  // intercept of ln t
  double b = 0.0;  // minus the slope of ln t on ln gap
  std::size_t points = 0;
  double residual_rms = 0.0;
};

// OLS of ln t on ln gap over the points with gap > floor. Throws
// DegenerateFitError with fewer than two such points or a constant gap.
LogLogFit fit_loglog(const std::vector<double>& t, const std::vector<double>& gaps,
                     double floor = 0.0);

// Gap fit of one RunSet: median across runs, f* = best_observed, t = epoch + 1,
// the first ceil(burn_in * T) epochs left out.
LogLogFit fit_gap_series(const std::vector<TrainLog>& logs, double burn_in, double floor_rel);

struct ExponentPoint {
  int M = 0;
  LogLogFit fit;
};

struct ExponentFit {
  std::vector<ExponentPoint> per_m;
  double a_hat = 0.0;        // slope of q_M on ln M
  double a_intercept = 0.0;
  double b_hat = 0.0;        // mean of b_M
  std::vector<double> q_residuals;
};

// Throws UsageError with fewer than two distinct M values.
ExponentFit fit_exponents(const std::vector<ExponentPoint>& per_m);

// Serialization. Doubles use %.17g so values round-trip exactly.
std::string format_log_csv(const TrainLog& log);
std::vector<EpochRecord> parse_log_csv(const std::string& text);
std::string format_quantiles_csv(const QuantileSeries& series);
std::string format_gap_csv(const std::vector<std::int64_t>& epochs,
                           const std::vector<double>& median, const std::vector<double>& gap);
nlohmann::json exponents_json(const ExponentFit& fit);

// Writes through a temporary file and a rename. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// quantiles.csv and gap.csv for one RunSet into `dir`.
void write_aggregates(const RunSet& set, const std::filesystem::path& dir, double floor_rel);

}  // namespace morl
