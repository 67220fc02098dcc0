#include "morl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "morl/errors.hpp"
#include "morl/rng.hpp"

namespace morl {
namespace {

constexpr double kGrid = 1048576.0;  // 2^20

void check_distribution(std::span<const double> p, const std::string& what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ConfigError(what + ": negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError(what + ": probabilities do not sum to 1");
}

// Distribution with entries k / 2^20 summing to exactly one (largest remainder).
std::vector<double> grid_distribution(int n, RngStream& rng) {
  std::vector<double> raw(n);
  for (double& v : raw) v = -std::log(1.0 - rng.uniform());  // Dirichlet(1)
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  std::vector<std::int64_t> counts(n);
  std::vector<std::pair<double, int>> remainders;
  std::int64_t assigned = 0;
  for (int i = 0; i < n; ++i) {
    const double exact = raw[i] / total * kGrid;
    counts[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - counts[i], i);
  }
  std::sort(remainders.begin(), remainders.end(), std::greater<>());
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(kGrid) - assigned; ++k)
    ++counts[remainders[k % n].second];
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = static_cast<double>(counts[i]) / kGrid;
  return out;
}

class TabularEpisode final : public Episode {
 public:
  TabularEpisode(const TabularMdp& mdp, int state) : mdp_(mdp), state_(state) {}

  int state_index() const override { return state_; }

  bool step(int action, std::span<double> reward, RngStream& rng) override {
    for (int m = 0; m < mdp_.num_objectives; ++m) reward[m] = mdp_.r(state_, action, m);
    const double u = rng.uniform();
    double acc = 0.0;
    int next = mdp_.num_states - 1;
    for (int s = 0; s < mdp_.num_states; ++s) {
      acc += mdp_.p(state_, action, s);
      if (u < acc) {
        next = s;
        break;
      }
    }
    state_ = next;
    return false;
  }

 private:
  const TabularMdp& mdp_;
  int state_;
};

void check_theta(const TabularMdp& mdp, const Vector& theta) {
  if (theta.size() != mdp.num_params()) {
    throw ConfigError("oracle: theta has " + std::to_string(theta.size()) + " entries, expected " +
                      std::to_string(mdp.num_params()));
  }
}

}  // namespace

void TabularMdp::validate() const {
  if (num_states < 1 || num_actions < 1 || num_objectives < 1)
    throw ConfigError("tabular mdp: counts must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("tabular mdp: gamma must lie in (0, 1]");
  const std::size_t sa = static_cast<std::size_t>(num_states) * num_actions;
  if (transition.size() != sa * num_states || reward.size() != sa * num_objectives ||
      initial.size() != static_cast<std::size_t>(num_states)) {
    throw ConfigError("tabular mdp: table sizes do not match the counts");
  }
  check_distribution(initial, "tabular mdp initial distribution");
  for (std::size_t k = 0; k < sa; ++k) {
    check_distribution(std::span<const double>(transition).subspan(k * num_states, num_states),
                       "tabular mdp transition");
  }
}

std::vector<RewardBounds> TabularMdp::reward_bounds() const {
  std::vector<RewardBounds> out(num_objectives, RewardBounds{0.0, 0.0});
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a)
      for (int m = 0; m < num_objectives; ++m) {
        out[m].lo = std::min(out[m].lo, r(s, a, m));
        out[m].hi = std::max(out[m].hi, r(s, a, m));
      }
  return out;
}

EnvSpec TabularMdp::env_spec(int horizon) const {
  EnvSpec spec;
  spec.num_objectives = num_objectives;
  spec.discount = gamma;
  spec.horizon = horizon;
  spec.reward_bounds = reward_bounds();
  spec.encoding = StateEncoding::kTabular;
  spec.state_count = num_states;
  spec.validate();
  return spec;
}

TabularMdpEnv::TabularMdpEnv(TabularMdp mdp, int horizon)
    : mdp_(std::move(mdp)), spec_(mdp_.env_spec(horizon)) {
  mdp_.validate();
}

std::unique_ptr<Episode> TabularMdpEnv::reset(RngStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  int start = mdp_.num_states - 1;
  for (int s = 0; s < mdp_.num_states; ++s) {
    acc += mdp_.initial[s];
    if (u < acc) {
      start = s;
      break;
    }
  }
  return std::make_unique<TabularEpisode>(mdp_, start);
}

TabularMdp random_tabular_mdp(int num_states, int num_actions, int num_objectives,
                              std::uint64_t seed) {
  RngStream rng(seed);
  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.num_objectives = num_objectives;
  mdp.gamma = std::floor((0.5 + 0.49 * rng.uniform()) * kGrid) / kGrid;
  for (int k = 0; k < num_states * num_actions; ++k) {
    const auto row = grid_distribution(num_states, rng);
    mdp.transition.insert(mdp.transition.end(), row.begin(), row.end());
  }
  for (int k = 0; k < num_states * num_actions * num_objectives; ++k)
    mdp.reward.push_back(std::floor(rng.uniform() * kGrid) / kGrid);
  mdp.initial = grid_distribution(num_states, rng);
  mdp.validate();
  return mdp;
}

std::vector<CorpusEntry> generate_corpus() {
  std::vector<CorpusEntry> corpus;
  std::uint64_t seed = 20240101;
  for (int s : {1, 2, 3})
    for (int a : {2, 3})
      for (int m : {1, 2, 3})
        for (int h : {1, 2, 3}) {
          CorpusEntry e;
          e.seed = seed++;
          e.horizon = h;
          e.mdp = random_tabular_mdp(s, a, m, e.seed);
          corpus.push_back(std::move(e));
        }
  return corpus;
}

void save_corpus(const std::vector<CorpusEntry>& corpus, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["mdps"] = nlohmann::json::array();
  for (const auto& e : corpus) {
    nlohmann::json j;
    j["seed"] = e.seed;
    j["H"] = e.horizon;
    j["S"] = e.mdp.num_states;
    j["A"] = e.mdp.num_actions;
    j["M"] = e.mdp.num_objectives;
    j["gamma"] = e.mdp.gamma;
    j["transition"] = e.mdp.transition;
    j["reward"] = e.mdp.reward;
    j["initial"] = e.mdp.initial;
    doc["mdps"].push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus " + path.string());
  out << doc.dump(1) << '\n';
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path.string());
  const nlohmann::json doc = nlohmann::json::parse(in);
  std::vector<CorpusEntry> corpus;
  for (const auto& j : doc.at("mdps")) {
    CorpusEntry e;
    e.seed = j.at("seed").get<std::uint64_t>();
    e.horizon = j.at("H").get<int>();
    e.mdp.num_states = j.at("S").get<int>();
    e.mdp.num_actions = j.at("A").get<int>();
    e.mdp.num_objectives = j.at("M").get<int>();
    e.mdp.gamma = j.at("gamma").get<double>();
    e.mdp.transition = j.at("transition").get<std::vector<double>>();
    e.mdp.reward = j.at("reward").get<std::vector<double>>();
    e.mdp.initial = j.at("initial").get<std::vector<double>>();
    e.mdp.validate();
    corpus.push_back(std::move(e));
  }
  return corpus;
}

std::vector<double> softmax_row(const TabularMdp& mdp, const Vector& theta, int s) {
  const int A = mdp.num_actions;
  std::vector<double> p(A);
  double top = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < A; ++a) top = std::max(top, theta[s * A + a]);
  double total = 0.0;
  for (int a = 0; a < A; ++a) {
    p[a] = std::exp(theta[s * A + a] - top);
    total += p[a];
  }
  for (double& v : p) v /= total;
  return p;
}

Vector exact_truncated_value(const TabularMdp& mdp, const Vector& theta, int horizon) {
  check_theta(mdp, theta);
  const int S = mdp.num_states, A = mdp.num_actions, M = mdp.num_objectives;
  std::vector<std::vector<double>> pi(S);
  for (int s = 0; s < S; ++s) pi[s] = softmax_row(mdp, theta, s);

  Vector value = Vector::Zero(M);
  std::vector<double> dist = mdp.initial;
  double discount = 1.0;
  for (int t = 0; t < horizon; ++t) {
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double w = dist[s] * pi[s][a];
        for (int m = 0; m < M; ++m) value[m] += discount * w * mdp.r(s, a, m);
        for (int s2 = 0; s2 < S; ++s2) next[s2] += w * mdp.p(s, a, s2);
      }
    }
    dist = std::move(next);
    discount *= mdp.gamma;
  }
  return value;
}

Eigen::MatrixXd exact_value_jacobian(const TabularMdp& mdp, const Vector& theta, int horizon) {
  check_theta(mdp, theta);
  const int S = mdp.num_states, A = mdp.num_actions, M = mdp.num_objectives;
  std::vector<std::vector<double>> pi(S);
  for (int s = 0; s < S; ++s) pi[s] = softmax_row(mdp, theta, s);

  // State distributions d_t for t < H.
  std::vector<std::vector<double>> dist(horizon, std::vector<double>(S, 0.0));
  dist[0] = mdp.initial;
  for (int t = 0; t + 1 < horizon; ++t)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        for (int s2 = 0; s2 < S; ++s2) dist[t + 1][s2] += dist[t][s] * pi[s][a] * mdp.p(s, a, s2);

  // Backward pass: Q_t(s,a) = r(s,a) + gamma sum_s' P(s'|s,a) V_{t+1}(s'). The
  // tabular score is e_a - pi(.|s), so
  //   sum_a pi(a|s) Q_t(s,a) dlog pi(a|s)/dtheta[s,b] = pi(b|s) (Q_t(s,b) - V_t(s)).
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(mdp.num_params(), M);
  Eigen::MatrixXd v_next = Eigen::MatrixXd::Zero(S, M);
  for (int t = horizon - 1; t >= 0; --t) {
    const double discount = std::pow(mdp.gamma, t);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(S, M);
    for (int s = 0; s < S; ++s) {
      Eigen::MatrixXd q(A, M);
      for (int a = 0; a < A; ++a)
        for (int m = 0; m < M; ++m) {
          double cont = 0.0;
          for (int s2 = 0; s2 < S; ++s2) cont += mdp.p(s, a, s2) * v_next(s2, m);
          q(a, m) = mdp.r(s, a, m) + mdp.gamma * cont;
        }
      for (int a = 0; a < A; ++a) v.row(s) += pi[s][a] * q.row(a);
      for (int b = 0; b < A; ++b)
        jac.row(s * A + b) += discount * dist[t][s] * pi[s][b] * (q.row(b) - v.row(s));
    }
    v_next = std::move(v);
  }
  return jac;
}

Vector exact_scalarized_gradient(const TabularMdp& mdp, const Vector& theta, int horizon,
                                 const ScalarizationSpec& spec) {
  const Vector j = exact_truncated_value(mdp, theta, horizon);
  return exact_value_jacobian(mdp, theta, horizon) * scalarize_grad(spec, j);
}

Vector enumerate_expectation(const TabularMdp& mdp, const Vector& theta, int horizon,
                             const TrajectoryFunctional& functional, std::uint64_t budget) {
  check_theta(mdp, theta);
  const int S = mdp.num_states, A = mdp.num_actions;
  double terms = std::pow(static_cast<double>(S) * A, horizon);
  if (terms > static_cast<double>(budget)) {
    throw BudgetExceededError("enumerate_expectation: " + std::to_string(terms) +
                              " trajectories exceed the budget of " + std::to_string(budget));
  }
  std::vector<std::vector<double>> pi(S);
  for (int s = 0; s < S; ++s) pi[s] = softmax_row(mdp, theta, s);

  std::vector<int> states(horizon), actions(horizon);
  Vector total;
  const std::vector<double> no_features;

  std::function<void(int, double)> visit = [&](int t, double prob) {
    if (t == horizon) {
      Trajectory traj(mdp.num_objectives, 0);
      std::vector<double> r(mdp.num_objectives);
      for (int k = 0; k < horizon; ++k) {
        for (int m = 0; m < mdp.num_objectives; ++m) r[m] = mdp.r(states[k], actions[k], m);
        traj.push(states[k], no_features, actions[k], r);
      }
      const Vector value = functional(traj);
      if (total.size() == 0) total = Vector::Zero(value.size());
      total += prob * value;
      return;
    }
    for (int s = 0; s < S; ++s) {
      const double ps = t == 0 ? mdp.initial[s] : mdp.p(states[t - 1], actions[t - 1], s);
      for (int a = 0; a < A; ++a) {
        states[t] = s;
        actions[t] = a;
        visit(t + 1, prob * ps * pi[s][a]);
      }
    }
  };
  visit(0, 1.0);
  return total;
}

Vector finite_diff_grad(const std::function<double(const Vector&)>& fn, const Vector& theta,
                        double step) {
  if (!(step > 0.0)) throw UsageError("finite_diff_grad: step must be positive");
  Vector grad(theta.size());
  Vector probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + step;
    const double up = fn(probe);
    probe[i] = theta[i] - step;
    const double down = fn(probe);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace morl
