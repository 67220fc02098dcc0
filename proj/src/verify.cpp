#include "morl/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <cstring>

#include "morl/algorithms.hpp"
#include "morl/config.hpp"
#include "morl/environments.hpp"
#include "morl/errors.hpp"
#include "morl/estimators.hpp"
#include "morl/experiments.hpp"
#include "morl/oracle.hpp"
#include "morl/theory.hpp"

namespace morl {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

CheckResult timed(int id, std::string name, const std::function<std::pair<bool, std::string>()>& body) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  const auto start = Clock::now();
  try {
    auto [ok, detail] = body();
    r.passed = ok;
    r.detail = std::move(detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

Vector random_vector(RngStream& rng, int n, double scale) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

// Trains `runs` independent runs in memory with seeds seed + r.
std::vector<TrainLog> train_runs(const RunConfig& cfg, Algorithm algo, const Hyperparams& hyper,
                                 int runs, std::uint64_t seed, int parallelism) {
  const Problem problem = build_problem(cfg, hyper);
  std::vector<TrainLog> logs;
  for (int r = 0; r < runs; ++r) {
    TrainOptions opt;
    opt.seed = seed + static_cast<std::uint64_t>(r);
    opt.workers = parallelism;
    opt.record_wall_time = false;
    logs.push_back(train(algo, *problem.env, *problem.policy, problem.scalarization, hyper, opt));
  }
  return logs;
}

std::vector<double> final_values(const std::vector<TrainLog>& logs) {
  std::vector<double> v;
  for (const auto& l : logs) v.push_back(l.records.back().f_value);
  return v;
}

std::vector<double> first_values(const std::vector<TrainLog>& logs) {
  std::vector<double> v;
  for (const auto& l : logs) v.push_back(l.records.front().f_value);
  return v;
}

// Fixed two-state, two-action, two-objective MDP.
TabularMdp two_state_mdp() {
  TabularMdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 2;
  mdp.num_objectives = 2;
  mdp.gamma = 0.9;
  // [s][a][s']
  mdp.transition = {0.8, 0.2, 0.3, 0.7,
                    0.5, 0.5, 0.1, 0.9};
  // [s][a][m]
  mdp.reward = {1.0, 0.0, 0.2, 0.6,
                0.0, 1.0, 0.5, 0.3};
  mdp.initial = {0.6, 0.4};
  mdp.validate();
  return mdp;
}

}  // namespace

CheckResult check_estimator_unbiasedness() {
  return timed(1, "estimator unbiasedness (exact enumeration)", [] {
    const auto corpus = generate_corpus();
    RngStream rng(0x5eed0001ULL);
    double worst_j = 0.0, worst_g = 0.0;
    int cases = 0;
    for (const auto& entry : corpus) {
      const TabularMdp& mdp = entry.mdp;
      const int H = entry.horizon;
      const TabularSoftmax policy(mdp.num_states, mdp.num_actions);
      const ScalarizationSpec spec = alpha_fairness(H, 1.0);
      const OmegaBox box = omega_box(mdp.reward_bounds(), mdp.gamma, H);
      for (int pair = 0; pair < 5; ++pair) {
        const Vector t1 = random_vector(rng, mdp.num_params(), 1.0);
        const Vector t2 = random_vector(rng, mdp.num_params(), 1.0);
        Vector j_hat(mdp.num_objectives);
        for (int m = 0; m < mdp.num_objectives; ++m)
          j_hat[m] = box.lo[m] + rng.uniform() * (box.hi[m] - box.lo[m]);

        const Vector exact_j = exact_truncated_value(mdp, t2, H);
        const Vector enum_j = enumerate_expectation(mdp, t1, H, [&](const Trajectory& tr) {
          return estimate_return(tr, policy, t1, t2, mdp.gamma);
        });
        worst_j = std::max(worst_j, (exact_j - enum_j).cwiseAbs().maxCoeff());

        const Vector exact_g = exact_value_jacobian(mdp, t2, H) * scalarize_grad(spec, j_hat);
        const Vector enum_g = enumerate_expectation(mdp, t1, H, [&](const Trajectory& tr) {
          return estimate_gradient(tr, policy, t1, t2, j_hat, spec, box, mdp.gamma);
        });
        worst_g = std::max(worst_g, (exact_g - enum_g).cwiseAbs().maxCoeff());
        ++cases;
      }
    }
    const bool ok = worst_j <= 1e-10 && worst_g <= 1e-8;
    return std::pair{ok, fmt("%d cases, max |E[J]-J^H| = %.3g (tol 1e-10), max |E[g]-grad| = %.3g (tol 1e-8)",
                             cases, worst_j, worst_g)};
  });
}

CheckResult check_is_weight_mean() {
  return timed(2, "importance-weight mean", [] {
    const TabularMdp mdp = random_tabular_mdp(3, 3, 2, 77);
    const int H = 3;
    const TabularMdpEnv env(mdp, H);
    const TabularSoftmax policy(3, 3);
    RngStream prng(0x5eed0002ULL);
    const Vector t1 = random_vector(prng, policy.num_params(), 0.5);
    const Vector t2 = random_vector(prng, policy.num_params(), 0.5);
    const int n = 100000;
    double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
    for (int k = 0; k < n; ++k) {
      RngStream rng(StreamKey{0x5eed0002ULL, 0, 0, static_cast<std::uint64_t>(k)});
      const Trajectory tr = sample_trajectory(env, policy, t1, H, rng);
      const std::vector<double> w = is_weights(tr, policy, t1, t2);
      for (int t = 0; t < 3; ++t) {
        sum[t] += w[t];
        sq[t] += w[t] * w[t];
      }
    }
    bool ok = true;
    std::string detail;
    for (int t = 0; t < 3; ++t) {
      const double mean = sum[t] / n;
      const double var = (sq[t] - n * mean * mean) / (n - 1);
      const double se = std::sqrt(var / n);
      const double z = (mean - 1.0) / se;
      ok = ok && std::abs(z) <= 4.0;
      detail += fmt("t=%d mean %.5f (%.2f SE)%s", t, mean, z, t < 2 ? ", " : "");
    }
    return std::pair{ok, detail};
  });
}

CheckResult check_variance_scaling() {
  return timed(3, "gradient variance scales as 1/N", [] {
    const TabularMdp mdp = two_state_mdp();
    const int H = 5;
    const TabularMdpEnv env(mdp, H);
    const TabularSoftmax policy(2, 2);
    const ScalarizationSpec spec = alpha_fairness(H, 1.0);
    const OmegaBox box = omega_box(mdp.reward_bounds(), mdp.gamma, H);
    Vector theta(4);
    theta << 0.3, -0.2, 0.1, 0.4;
    const int reps = 200;
    const std::uint64_t seed = 0x5eed0003ULL;

    // One MO-PG gradient: N trajectories for J, N fresh ones for g.
    auto total_variance = [&](int n, std::uint64_t tag) {
      std::vector<Vector> g(reps);
      for (int r = 0; r < reps; ++r) {
        std::vector<Vector> returns, grads;
        for (int k = 0; k < n; ++k) {
          RngStream rng(batch_key(seed, tag, r, 0, k));
          returns.push_back(discounted_return(sample_trajectory(env, policy, theta, H, rng), mdp.gamma));
        }
        const Vector j = project_omega(batch_mean(returns), box);
        for (int k = 0; k < n; ++k) {
          RngStream rng(batch_key(seed, tag, r, 1, k));
          const Trajectory tr = sample_trajectory(env, policy, theta, H, rng);
          grads.push_back(estimate_gradient(tr, policy, theta, j, spec, box, mdp.gamma));
        }
        g[r] = batch_mean(grads);
      }
      const Vector mean = batch_mean(g);
      double v = 0.0;
      for (const auto& x : g) v += (x - mean).squaredNorm();
      return v / (reps - 1);
    };
    const int n = 32;
    const double v1 = total_variance(n, 1);
    const double v2 = total_variance(2 * n, 2);
    const double ratio = v1 / v2;
    return std::pair{ratio >= 1.6 && ratio <= 2.6,
                     fmt("Var(N=%d) = %.4g, Var(N=%d) = %.4g, ratio %.3f (want [1.6, 2.6])", n, v1,
                         2 * n, v2, ratio)};
  });
}

CheckResult check_gradients() {
  return timed(4, "analytic gradients vs central differences", [] {
    RngStream rng(0x5eed0004ULL);
    const double h = 1e-5;
    auto rel_err = [](const Vector& a, const Vector& b) {
      return (a - b).norm() / std::max(a.norm(), 1e-12);
    };
    double worst_f = 0.0, worst_pi = 0.0, worst_dp = 0.0;

    for (int i = 0; i < 100; ++i) {
      ScalarizationSpec spec;
      Vector j;
      if (i % 2 == 0) {
        spec = sqrt_treasure(0.5 + rng.uniform());
        j = Vector(2);
        j << 23.7 * rng.uniform(), -100.0 * rng.uniform();
      } else {
        const int M = 1 + i % 4;
        spec = alpha_fairness(10.0 + 90.0 * rng.uniform(), 0.5 + rng.uniform());
        j = Vector(M);
        for (int m = 0; m < M; ++m) j[m] = 50.0 * rng.uniform();
      }
      const Vector fd = finite_diff_grad([&](const Vector& x) { return scalarize(spec, x); }, j, h);
      worst_f = std::max(worst_f, rel_err(scalarize_grad(spec, j), fd));
    }

    const TabularSoftmax tab(5, 4);
    const LinearSoftmax lin(6, 3);
    for (int i = 0; i < 100; ++i) {
      const bool tabular = i % 2 == 0;
      const DiscretePolicy& pol = tabular ? static_cast<const DiscretePolicy&>(tab) : lin;
      const Vector theta = random_vector(rng, pol.num_params(), 1.0);
      std::vector<double> feats;
      ObservationView obs;
      if (tabular) {
        obs.index = static_cast<int>(rng.uniform() * 5);
      } else {
        for (int f = 0; f < 6; ++f) feats.push_back(rng.uniform());
        obs.features = feats;
      }
      const int a = static_cast<int>(rng.uniform() * pol.num_actions());
      const Vector fd =
          finite_diff_grad([&](const Vector& t) { return pol.log_prob(t, obs, a); }, theta, h);
      worst_pi = std::max(worst_pi, rel_err(pol.grad_log_prob(theta, obs, a), fd));
    }
    const GaussianPolicy gauss(4, 0.7);
    for (int i = 0; i < 100; ++i) {
      const Vector theta = random_vector(rng, 4, 1.0);
      std::vector<double> feats;
      for (int f = 0; f < 4; ++f) feats.push_back(rng.uniform());
      const double a = gauss.mean(theta, feats) + rng.normal();
      const Vector fd =
          finite_diff_grad([&](const Vector& t) { return gauss.log_prob(t, feats, a); }, theta, h);
      worst_pi = std::max(worst_pi, rel_err(gauss.grad_log_prob(theta, feats, a), fd));
    }

    const auto corpus = generate_corpus();
    for (std::size_t c = 0; c < corpus.size(); c += 3) {
      const auto& e = corpus[c];
      const ScalarizationSpec spec = alpha_fairness(e.horizon, 1.0);
      const Vector theta = random_vector(rng, e.mdp.num_params(), 1.0);
      const Vector fd = finite_diff_grad(
          [&](const Vector& t) { return scalarize(spec, exact_truncated_value(e.mdp, t, e.horizon)); },
          theta, h);
      worst_dp = std::max(worst_dp, rel_err(exact_scalarized_gradient(e.mdp, theta, e.horizon, spec), fd));
    }
    const bool ok = worst_f <= 1e-6 && worst_pi <= 1e-6 && worst_dp <= 1e-6;
    return std::pair{ok, fmt("max rel err: scalarize_grad %.2g, grad_log_prob %.2g, DP gradient %.2g (tol 1e-6)",
                             worst_f, worst_pi, worst_dp)};
  });
}

namespace {

RunConfig experiment_config(const nlohmann::json& doc) {
  return parse_config(doc);
}

}  // namespace

CheckResult check_matched_budget_dst(int parallelism) {
  return timed(5, "matched-budget comparison on deep-sea-treasure", [parallelism] {
    const RunConfig cfg = experiment_config({{"env", "dst"}, {"algo", "mo-pg"}, {"T", 300}});
    Hyperparams pg = cfg.compare_pg;
    Hyperparams vr = cfg.compare_vr;
    pg.T = vr.T = 300;
    const std::int64_t e1 = episodes_per_epoch(Algorithm::kMoPg, pg);
    const std::int64_t e2 = episodes_per_epoch(Algorithm::kMoTsivrPg, vr);
    if (e1 != 576 || e2 != 576)
      return std::pair{false, fmt("episodes per epoch %lld vs %lld, expected 576", (long long)e1, (long long)e2)};
    const std::uint64_t seed = 1000;
    const auto logs_pg = train_runs(cfg, Algorithm::kMoPg, pg, 8, seed, parallelism);
    const auto logs_vr = train_runs(cfg, Algorithm::kMoTsivrPg, vr, 8, seed, parallelism);
    const double m_pg = median(final_values(logs_pg));
    const double m_vr = median(final_values(logs_vr));
    return std::pair{m_vr >= m_pg, fmt("576 = 576 episodes/epoch; final median f: mo-tsivr-pg %.4f, mo-pg %.4f",
                                       m_vr, m_pg)};
  });
}

CheckResult check_server_queues_smoke(int parallelism) {
  return timed(6, "server-queues smoke", [parallelism] {
    const RunConfig cfg = experiment_config(
        {{"env", {{"name", "server-queues"}, {"M", 4}}}, {"algo", "mo-pg"}, {"H", 50}, {"gamma", 0.999}});
    Hyperparams pg = cfg.compare_pg;
    Hyperparams vr = cfg.compare_vr;
    pg.T = vr.T = 200;
    if (episodes_per_epoch(Algorithm::kMoPg, pg) != episodes_per_epoch(Algorithm::kMoTsivrPg, vr))
      return std::pair{false, std::string("budgets differ")};
    int vr_wins = 0;
    bool all_increase = true;
    std::string detail;
    for (int rep = 0; rep < 3; ++rep) {
      const std::uint64_t seed = 2000 + 100 * static_cast<std::uint64_t>(rep);
      const auto lp = train_runs(cfg, Algorithm::kMoPg, pg, 4, seed, parallelism);
      const auto lv = train_runs(cfg, Algorithm::kMoTsivrPg, vr, 4, seed, parallelism);
      const double p0 = median(first_values(lp)), p1 = median(final_values(lp));
      const double v0 = median(first_values(lv)), v1 = median(final_values(lv));
      all_increase = all_increase && p1 > p0 && v1 > v0;
      if (v1 >= p1) ++vr_wins;
      detail += fmt("rep %d: mo-pg %.3f -> %.3f, mo-tsivr-pg %.3f -> %.3f; ", rep, p0, p1, v0, v1);
    }
    detail += fmt("mo-tsivr-pg ahead in %d/3", vr_wins);
    return std::pair{all_increase && vr_wins >= 2, detail};
  });
}

CheckResult check_exponent_pipeline() {
  return timed(7, "exponent fitting pipeline", [] {
    const std::vector<int> ms = {8, 12, 16, 32, 64};
    const double a = 4.0, c0 = 1.0, b = 3.0;
    // Noiseless: ln t = q_M - b ln eps exactly.
    std::vector<ExponentPoint> exact;
    double worst = 0.0;
    for (int M : ms) {
      const double q = c0 + a * std::log(M);
      std::vector<double> t, eps;
      for (int k = 0; k < 50; ++k) {
        const double le = -0.1 * k;
        eps.push_back(std::exp(le));
        t.push_back(std::exp(q - b * le));
      }
      const LogLogFit f = fit_loglog(t, eps);
      worst = std::max({worst, std::abs(f.q - q), std::abs(f.b - b)});
      exact.push_back({M, f});
    }
    const ExponentFit ef = fit_exponents(exact);
    worst = std::max({worst, std::abs(ef.a_hat - a), std::abs(ef.b_hat - b)});

    RngStream rng(0x5eed0007ULL);
    std::vector<ExponentPoint> noisy;
    double worst_noisy = 0.0;
    for (int M : ms) {
      const double q = c0 + a * std::log(M);
      std::vector<double> t, eps;
      for (int k = 0; k < 50; ++k) {
        const double le = -0.1 * k;
        eps.push_back(std::exp(le));
        t.push_back(std::exp(q - b * le + 0.01 * rng.normal()));
      }
      const LogLogFit f = fit_loglog(t, eps);
      worst_noisy = std::max(worst_noisy, std::abs(f.b - b));
      noisy.push_back({M, f});
    }
    const ExponentFit nf = fit_exponents(noisy);
    worst_noisy = std::max({worst_noisy, std::abs(nf.a_hat - a), std::abs(nf.b_hat - b)});
    const bool ok = worst <= 1e-9 && worst_noisy <= 0.1;
    return std::pair{ok, fmt("noiseless max err %.2g; noise 0.01: a_hat %.4f, b_hat %.4f, max err %.3g "
                             "(reference scale: a ~ 4, b ~ 3)",
                             worst, nf.a_hat, nf.b_hat, worst_noisy)};
  });
}

CheckResult check_accounting_determinism() {
  return timed(8, "episode accounting and determinism", [] {
    struct Case {
      nlohmann::json doc;
      Algorithm algo;
    };
    const std::vector<Case> cases = {
        {{{"env", "dst"}, {"algo", "mo-pg"}, {"T", 6}, {"N", 10}}, Algorithm::kMoPg},
        {{{"env", "dst"}, {"algo", "mo-tsivr-pg"}, {"T", 6}, {"N", 10}, {"B", 3}, {"m", 4}},
         Algorithm::kMoTsivrPg},
        {{{"env", {{"name", "server-queues"}, {"M", 3}}}, {"algo", "mo-tsivr-pg"}, {"T", 4},
          {"N", 12}, {"B", 4}, {"m", 3}, {"H", 20}},
         Algorithm::kMoTsivrPg},
    };
    std::string detail;
    bool ok = true;
    for (const auto& c : cases) {
      const RunConfig cfg = parse_config(c.doc);
      const Hyperparams& h = cfg.hyper;
      const std::int64_t per = episodes_per_epoch(c.algo, h);
      const std::int64_t formula = c.algo == Algorithm::kMoPg ? 2 * h.N : 2 * h.N + 2 * (h.m - 1) * h.B;
      ok = ok && per == formula;
      const auto one = train_runs(cfg, c.algo, h, 1, 42, 1).front();
      const auto eight = train_runs(cfg, c.algo, h, 1, 42, 8).front();
      for (std::size_t i = 0; i < one.records.size(); ++i) {
        const auto& r = one.records[i];
        ok = ok && r.episodes == static_cast<std::int64_t>(i + 1) * per;
        ok = ok && r.steps <= r.episodes * h.H;
      }
      ok = ok && static_cast<std::int64_t>(one.records.size()) == h.T;
      const bool same = one.records == eight.records && one.final_theta.size() == eight.final_theta.size() &&
                        std::equal(one.final_theta.begin(), one.final_theta.end(), eight.final_theta.begin(),
                                   [](double x, double y) {
                                     return std::memcmp(&x, &y, sizeof x) == 0;
                                   });
      ok = ok && same;
      detail += fmt("%s %lld/epoch%s; ", to_string(c.algo).c_str(), (long long)per,
                    same ? ", 1 vs 8 workers identical" : ", 1 vs 8 workers DIFFER");
    }
    return std::pair{ok, detail};
  });
}

CheckResult check_theorem_presets() {
  return timed(9, "theorem schedule presets", [] {
    // Hand-computed for gamma = 0.9, G = sqrt 2, S = 1, C = 0.5, L_f = 0.25.
    struct Row {
      const char* preset;
      int M;
      double eps;
      std::int64_t T, m, B, N;
      int H;
      double eta, delta;
    };
    constexpr double kInf = std::numeric_limits<double>::infinity();
    static const Row rows[] = {
        {"thm1", 1, 0.5, 4, 1, 1, 4, 1, 0.009999999999999995, kInf},
        {"thm1", 1, 0.1, 100, 1, 1, 100, 3, 0.009999999999999995, kInf},
        {"thm1", 2, 0.5, 8, 1, 1, 32, 2, 0.0049999999999999975, kInf},
        {"thm1", 2, 0.1, 200, 1, 1, 800, 3, 0.0049999999999999975, kInf},
        {"thm1", 4, 0.5, 16, 1, 1, 256, 3, 0.0024999999999999988, kInf},
        {"thm1", 4, 0.1, 400, 1, 1, 6400, 4, 0.0024999999999999988, kInf},
        {"thm2", 1, 0.5, 2, 2, 2, 4, 1, 3.2957421293415125e-08, 0.35355339059327373},
        {"thm2", 1, 0.1, 10, 10, 10, 100, 3, 1.0986048479023759e-08, 0.11785113019775791},
        {"thm2", 2, 0.5, 2, 6, 6, 32, 2, 9.4964199149455483e-09, 0.17677669529663687},
        {"thm2", 2, 0.1, 10, 29, 29, 800, 3, 6.3309686545271964e-09, 0.11785113019775791},
        {"thm2", 4, 0.5, 2, 16, 16, 256, 3, 3.4268631913468397e-09, 0.11785113019775791},
        {"thm2", 4, 0.1, 10, 80, 80, 6400, 4, 2.5701502559649548e-09, 0.088388347648318433},
        {"thm3", 1, 0.5, 2, 1, 1, 4, 7, 0.009999999999999995, kInf},
        {"thm3", 1, 0.1, 10, 1, 1, 100, 24, 0.009999999999999995, kInf},
        {"thm3", 2, 0.5, 8, 1, 1, 64, 14, 0.0049999999999999975, kInf},
        {"thm3", 2, 0.1, 40, 1, 1, 1600, 30, 0.0049999999999999975, kInf},
        {"thm3", 4, 0.5, 32, 1, 1, 1024, 21, 0.0024999999999999988, kInf},
        {"thm3", 4, 0.1, 160, 1, 1, 25600, 37, 0.0024999999999999988, kInf},
        {"thm4", 1, 0.5, 1, 2, 2, 2, 7, 1.1770844278404505e-09, 0.050507627227610534},
        {"thm4", 1, 0.1, 3, 24, 24, 531, 24, 3.4331735056761474e-10, 0.014731391274719738},
        {"thm4", 2, 0.5, 1, 6, 12, 62, 14, 3.3916095989098864e-10, 0.025253813613805267},
        {"thm4", 2, 0.1, 3, 93, 185, 16967, 30, 1.5827522340883553e-10, 0.011785113019775792},
        {"thm4", 4, 0.5, 1, 23, 89, 1968, 21, 1.2238845643507585e-10, 0.016835875742536845},
        {"thm4", 4, 0.1, 3, 369, 1474, 542915, 37, 6.9463733222604696e-11, 0.0095554970430614516},
    };
    const TheoryInputs in{std::sqrt(2.0), 1.0, 0.5, 0.25};
    int bad = 0;
    std::string first_bad;
    auto close = [](double x, double y) {
      if (std::isinf(x) || std::isinf(y)) return x == y;
      return std::abs(x - y) <= 1e-12 * std::abs(y);
    };
    for (const Row& row : rows) {
      const SchedulePreset preset = parse_preset(row.preset);
      const Hyperparams h = theorem_schedule(preset, row.M, row.eps, 0.9, in).hyper;
      const bool uses_inner = preset_algorithm(preset) == Algorithm::kMoTsivrPg;
      const bool match = h.T == row.T && h.N == row.N && h.H == row.H &&
                         (!uses_inner || (h.m == row.m && h.B == row.B)) && close(h.eta, row.eta) &&
                         close(h.delta, row.delta);
      if (!match) {
        if (bad++ == 0)
          first_bad = fmt(" first mismatch %s M=%d eps=%.1f: got T=%lld m=%lld B=%lld N=%lld H=%d eta=%.17g",
                          row.preset, row.M, row.eps, (long long)h.T, (long long)h.m,
                          (long long)h.B, (long long)h.N, h.H, h.eta);
      }
    }
    return std::pair{bad == 0, fmt("%d/24 rows match", 24 - bad) + first_bad};
  });
}

std::string format_check(const CheckResult& r) {
  return fmt("[%s] %d. %s (%.1fs): ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds) +
         r.detail;
}

std::vector<CheckResult> run_checks(bool full, int parallelism, std::ostream& out) {
  std::vector<std::function<CheckResult()>> checks = {
      check_estimator_unbiasedness, check_is_weight_mean,  check_variance_scaling,
      check_gradients,              check_exponent_pipeline, check_accounting_determinism,
      check_theorem_presets,
  };
  if (full) {
    checks.push_back([parallelism] { return check_matched_budget_dst(parallelism); });
    checks.push_back([parallelism] { return check_server_queues_smoke(parallelism); });
  }
  std::vector<CheckResult> results;
  for (const auto& c : checks) {
    results.push_back(c());
    out << format_check(results.back()) << "\n";
    out.flush();
  }
  return results;
}

}  // namespace morl
