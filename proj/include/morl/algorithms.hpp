#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "morl/mdp.hpp"
#include "morl/policy.hpp"
#include "morl/scalarization.hpp"

namespace morl {

enum class Algorithm { kMoPg, kMoTsivrPg };

std::string to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& name);

struct Hyperparams {
  std::int64_t T = 1;  // epochs
  std::int64_t m = 1;  // inner iterations per epoch (MO-TSIVR-PG)
  std::int64_t B = 1;  // inner batch size (MO-TSIVR-PG)
  std::int64_t N = 1;  // outer batch size
  int H = 1;           // trajectory length
  double eta = 0.01;   // stepsize
  double delta = std::numeric_limits<double>::infinity();  // truncation radius
  double gamma = 1.0;

  // Throws ConfigError when a field the algorithm reads is not positive.
  void validate(Algorithm algo) const;
};

// Episodes consumed by one epoch: 2N for MO-PG, 2N + 2(m-1)B for MO-TSIVR-PG.
std::int64_t episodes_per_epoch(Algorithm algo, const Hyperparams& hyper);

struct EpochRecord {
  std::int64_t epoch = 0;
  std::int64_t episodes = 0;  // cumulative, including this epoch
  std::int64_t steps = 0;     // cumulative environment steps
  double f_value = 0.0;       // f(Proj(mean on-policy return of the epoch's first batch))
  double theta_norm = 0.0;    // ||theta|| at the start of the epoch
  double wall_ms = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainLog {
  Algorithm algorithm = Algorithm::kMoPg;
  Hyperparams hyper;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> records;
  Vector final_theta;
};

// Snapshot sufficient to continue a run: streams are keyed by epoch, so no
// generator state is needed besides the epoch counter.
struct TrainState {
  std::int64_t next_epoch = 0;
  Vector theta;
  std::vector<EpochRecord> records;
};

// One inner update, reported for diagnostics and tests.
struct IterationTrace {
  std::int64_t epoch = 0;
  std::int64_t iteration = 0;
  const Vector& theta;       // theta_j
  const Vector& next_theta;  // theta_{j+1}
  const Vector& j_estimate;  // J_j (unprojected)
  const Vector& projected;   // P_j
  const Vector& gradient;    // g_j
};

struct TrainOptions {
  std::uint64_t seed = 0;
  // Worker threads for trajectory sampling; results do not depend on it.
  int workers = 1;
  // Empty means all zeros (uniform policy).
  Vector initial_theta;
  // Standard deviation of an optional Gaussian perturbation of the start point.
  double init_scale = 0.0;
  bool record_wall_time = true;
  std::int64_t checkpoint_every = 0;
  std::function<void(const TrainState&)> on_checkpoint;
  std::function<void(const IterationTrace&)> on_iteration;
  std::optional<TrainState> resume;
};

// MO-PG: per epoch, N trajectories estimate J, N fresh ones estimate the
// gradient at J, then theta <- theta + eta g.
TrainLog mo_pg_train(const Environment& env, const DiscretePolicy& policy,
                     const ScalarizationSpec& spec, const Hyperparams& hyper,
                     const TrainOptions& options);

// MO-TSIVR-PG: an N-trajectory anchor at j = 0 followed by m - 1 recursive,
// importance-weighted B-trajectory corrections, each step projected onto the
// ball of radius delta around the current iterate.
TrainLog mo_tsivr_pg_train(const Environment& env, const DiscretePolicy& policy,
                           const ScalarizationSpec& spec, const Hyperparams& hyper,
                           const TrainOptions& options);

TrainLog train(Algorithm algo, const Environment& env, const DiscretePolicy& policy,
               const ScalarizationSpec& spec, const Hyperparams& hyper,
               const TrainOptions& options);

// Euclidean projection onto the ball B(center, delta).
Vector project_ball(const Vector& theta_new, const Vector& center, double delta);

}  // namespace morl
