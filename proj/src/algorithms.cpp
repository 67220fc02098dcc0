#include "morl/algorithms.hpp"

#include <chrono>
#include <cmath>

#include <optional>

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "morl/errors.hpp"
#include "morl/estimators.hpp"

namespace morl {
namespace {

constexpr int kReturnBatch = 0;
constexpr int kGradientBatch = 1;
constexpr std::uint64_t kInitStreamEpoch = ~std::uint64_t{0};

using Clock = std::chrono::steady_clock;

// Samples the trajectories of one batch and maps each to a vector. Every
// trajectory has its own stream, and results are reduced in index order, so
// the outcome does not depend on the number of workers.
class BatchRunner {
 public:
  BatchRunner(const Environment& env, const DiscretePolicy& policy, const Hyperparams& hyper,
              const TrainOptions& options)
      : env_(env),
        policy_(policy),
        horizon_(hyper.H),
        seed_(options.seed),
        workers_(std::max(1, options.workers)),
        arena_(std::max(1, options.workers)) {
    // Lift the default cap of one worker per core, so a requested pool size
    // is honoured even on small machines.
    if (workers_ > 1) {
      control_.emplace(tbb::global_control::max_allowed_parallelism,
                       static_cast<std::size_t>(workers_));
    }
  }

  template <class Fn>
  Vector mean(const Vector& theta, std::int64_t epoch, std::int64_t iteration, int batch,
              std::int64_t count, Fn&& estimate) {
    std::vector<Vector> items(static_cast<std::size_t>(count));
    std::vector<std::int64_t> lengths(static_cast<std::size_t>(count));
    auto body = [&](std::int64_t k) {
      RngStream rng(batch_key(seed_, epoch, iteration, batch, static_cast<std::uint64_t>(k)));
      Trajectory traj = sample_trajectory(env_, policy_, theta, horizon_, rng);
      lengths[k] = static_cast<std::int64_t>(traj.size());
      items[k] = estimate(traj);
    };
    if (workers_ == 1 || count == 1) {
      for (std::int64_t k = 0; k < count; ++k) body(k);
    } else {
      arena_.execute([&] { tbb::parallel_for(std::int64_t{0}, count, body); });
    }
    for (std::int64_t len : lengths) steps_ += len;
    episodes_ += count;
    return batch_mean(items);
  }

  std::int64_t episodes() const { return episodes_; }
  std::int64_t steps() const { return steps_; }
  void restore(std::int64_t episodes, std::int64_t steps) {
    episodes_ = episodes;
    steps_ = steps;
  }

 private:
  const Environment& env_;
  const DiscretePolicy& policy_;
  int horizon_;
  std::uint64_t seed_;
  int workers_;
  std::optional<tbb::global_control> control_;
  tbb::task_arena arena_;
  std::int64_t episodes_ = 0;
  std::int64_t steps_ = 0;
};

// Shared epoch bookkeeping of both algorithms.
class Trainer {
 public:
  Trainer(Algorithm algo, const Environment& env, const DiscretePolicy& policy,
          const ScalarizationSpec& spec, const Hyperparams& hyper, const TrainOptions& options)
      : env_(env),
        policy_(policy),
        spec_(spec),
        hyper_(hyper),
        options_(options),
        box_(omega_box(env.spec().reward_bounds, hyper.gamma, hyper.H)),
        runner_(env, policy, hyper, options),
        start_(Clock::now()) {
    hyper.validate(algo);
    if (hyper.gamma != env.spec().discount) {
      throw ConfigError("hyperparameter gamma differs from the environment discount");
    }
    policy.check_compatible(env.spec(), env.num_actions());

    log_.algorithm = algo;
    log_.hyper = hyper;
    log_.seed = options.seed;

    if (options.resume) {
      const TrainState& st = *options.resume;
      policy.check_params(st.theta);
      theta_ = st.theta;
      first_epoch_ = st.next_epoch;
      log_.records = st.records;
      if (!log_.records.empty()) {
        const EpochRecord& last = log_.records.back();
        runner_.restore(last.episodes, last.steps);
        wall_offset_ = last.wall_ms;
      }
    } else {
      theta_ = initial_theta();
    }
  }

  Vector initial_theta() const {
    Vector theta = options_.initial_theta.size() > 0
                       ? options_.initial_theta
                       : Vector::Zero(policy_.num_params());
    policy_.check_params(theta);
    if (options_.init_scale > 0.0) {
      RngStream rng(StreamKey{options_.seed, kInitStreamEpoch, 0, 0});
      for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] += options_.init_scale * rng.normal();
    }
    return theta;
  }

  Vector on_policy_return(const Vector& theta, std::int64_t epoch, std::int64_t iteration,
                          std::int64_t count) {
    const double gamma = hyper_.gamma;
    return runner_.mean(theta, epoch, iteration, kReturnBatch, count,
                        [&](const Trajectory& tr) { return discounted_return(tr, gamma); });
  }

  void record(std::int64_t epoch, const Vector& epoch_start_theta, const Vector& anchor_return) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.episodes = runner_.episodes();
    rec.steps = runner_.steps();
    rec.f_value = scalarize(spec_, project_omega(anchor_return, box_));
    rec.theta_norm = epoch_start_theta.norm();
    if (options_.record_wall_time) {
      rec.wall_ms =
          wall_offset_ +
          std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    }
    log_.records.push_back(rec);
    if (options_.checkpoint_every > 0 && options_.on_checkpoint &&
        (epoch + 1) % options_.checkpoint_every == 0) {
      options_.on_checkpoint(TrainState{epoch + 1, theta_, log_.records});
    }
  }

  void trace(std::int64_t epoch, std::int64_t iteration, const Vector& theta,
             const Vector& next, const Vector& j, const Vector& p, const Vector& g) const {
    if (options_.on_iteration) {
      options_.on_iteration(IterationTrace{epoch, iteration, theta, next, j, p, g});
    }
  }

  TrainLog finish() {
    log_.final_theta = theta_;
    return std::move(log_);
  }

  const Environment& env_;
  const DiscretePolicy& policy_;
  const ScalarizationSpec& spec_;
  const Hyperparams& hyper_;
  const TrainOptions& options_;
  OmegaBox box_;
  BatchRunner runner_;
  Clock::time_point start_;
  double wall_offset_ = 0.0;
  std::int64_t first_epoch_ = 0;
  Vector theta_;
  TrainLog log_;
};

}  // namespace

std::string to_string(Algorithm algo) {
  return algo == Algorithm::kMoPg ? "mo-pg" : "mo-tsivr-pg";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "mo-pg") return Algorithm::kMoPg;
  if (name == "mo-tsivr-pg") return Algorithm::kMoTsivrPg;
  throw ConfigError("unknown algorithm '" + name + "' (expected mo-pg or mo-tsivr-pg)");
}

void Hyperparams::validate(Algorithm algo) const {
  if (T < 1) throw ConfigError("hyper.T must be >= 1");
  if (N < 1) throw ConfigError("hyper.N must be >= 1");
  if (H < 1) throw ConfigError("hyper.H must be >= 1");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("hyper.eta must be finite and >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("hyper.gamma must lie in (0, 1]");
  if (algo == Algorithm::kMoTsivrPg) {
    if (m < 1) throw ConfigError("hyper.m must be >= 1");
    if (B < 1) throw ConfigError("hyper.B must be >= 1");
    if (!(delta > 0.0)) throw ConfigError("hyper.delta must be positive");
  }
}

std::int64_t episodes_per_epoch(Algorithm algo, const Hyperparams& hyper) {
  if (algo == Algorithm::kMoPg) return 2 * hyper.N;
  return 2 * hyper.N + 2 * (hyper.m - 1) * hyper.B;
}

Vector project_ball(const Vector& theta_new, const Vector& center, double delta) {
  if (!(delta > 0.0)) throw UsageError("project_ball: delta must be positive");
  const Vector step = theta_new - center;
  const double dist = step.norm();
  if (dist <= delta) return theta_new;
  return center + (delta / dist) * step;
}

TrainLog mo_pg_train(const Environment& env, const DiscretePolicy& policy,
                     const ScalarizationSpec& spec, const Hyperparams& hyper,
                     const TrainOptions& options) {
  Trainer tr(Algorithm::kMoPg, env, policy, spec, hyper, options);
  const double gamma = hyper.gamma;

  for (std::int64_t i = tr.first_epoch_; i < hyper.T; ++i) {
    const Vector theta = tr.theta_;
    const Vector j = tr.on_policy_return(theta, i, 0, hyper.N);
    const Vector g = tr.runner_.mean(theta, i, 0, kGradientBatch, hyper.N, [&](const Trajectory& t) {
      return estimate_gradient(t, policy, theta, j, spec, tr.box_, gamma);
    });
    tr.theta_ = theta + hyper.eta * g;
    tr.trace(i, 0, theta, tr.theta_, j, j, g);
    tr.record(i, theta, j);
  }
  return tr.finish();
}

TrainLog mo_tsivr_pg_train(const Environment& env, const DiscretePolicy& policy,
                           const ScalarizationSpec& spec, const Hyperparams& hyper,
                           const TrainOptions& options) {
  Trainer tr(Algorithm::kMoTsivrPg, env, policy, spec, hyper, options);
  const double gamma = hyper.gamma;
  const OmegaBox& box = tr.box_;

  for (std::int64_t i = tr.first_epoch_; i < hyper.T; ++i) {
    const Vector epoch_start = tr.theta_;

    // j = 0: large-batch anchor.
    Vector theta = epoch_start;
    Vector j_est = tr.on_policy_return(theta, i, 0, hyper.N);
    Vector p = project_omega(j_est, box);
    Vector g = tr.runner_.mean(theta, i, 0, kGradientBatch, hyper.N, [&](const Trajectory& t) {
      return estimate_gradient(t, policy, theta, p, spec, box, gamma);
    });
    const Vector anchor_return = j_est;
    Vector next = project_ball(theta + hyper.eta * g, theta, hyper.delta);
    tr.trace(i, 0, theta, next, j_est, p, g);

    // j >= 1: recursive corrections, trajectories sampled at theta_j and
    // reweighted towards theta_{j-1}.
    for (std::int64_t it = 1; it < hyper.m; ++it) {
      const Vector prev = theta;
      const Vector p_prev = p;
      theta = next;

      const Vector dj =
          tr.runner_.mean(theta, i, it, kReturnBatch, hyper.B, [&](const Trajectory& t) {
            return Vector(discounted_return(t, gamma) -
                          estimate_return(t, policy, theta, prev, gamma));
          });
      j_est += dj;
      p = project_omega(j_est, box);

      const Vector dg =
          tr.runner_.mean(theta, i, it, kGradientBatch, hyper.B, [&](const Trajectory& t) {
            return Vector(estimate_gradient(t, policy, theta, p, spec, box, gamma) -
                          estimate_gradient(t, policy, theta, prev, p_prev, spec, box, gamma));
          });
      g += dg;

      next = project_ball(theta + hyper.eta * g, theta, hyper.delta);
      tr.trace(i, it, theta, next, j_est, p, g);
    }
    tr.theta_ = next;
    tr.record(i, epoch_start, anchor_return);
  }
  return tr.finish();
}

TrainLog train(Algorithm algo, const Environment& env, const DiscretePolicy& policy,
               const ScalarizationSpec& spec, const Hyperparams& hyper,
               const TrainOptions& options) {
  return algo == Algorithm::kMoPg ? mo_pg_train(env, policy, spec, hyper, options)
                                  : mo_tsivr_pg_train(env, policy, spec, hyper, options);
}

}  // namespace morl
