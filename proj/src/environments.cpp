#include "morl/environments.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "morl/errors.hpp"

namespace morl {
namespace {

constexpr std::string_view kMoGymnasiumMap =
    "S     .     .     .     .     .     .     .     .     .     .\n"
    "T0.7  .     .     .     .     .     .     .     .     .     .\n"
    "#     T8.2  .     .     .     .     .     .     .     .     .\n"
    "#     #     T11.5 .     .     .     .     .     .     .     .\n"
    "#     #     #     T14.0 T15.1 T16.1 .     .     .     .     .\n"
    "#     #     #     #     #     #     .     .     .     .     .\n"
    "#     #     #     #     #     #     .     .     .     .     .\n"
    "#     #     #     #     #     #     T19.6 T20.3 .     .     .\n"
    "#     #     #     #     #     #     #     #     .     .     .\n"
    "#     #     #     #     #     #     #     #     T22.4 .     .\n"
    "#     #     #     #     #     #     #     #     #     T23.7 .\n";

class DstEpisode final : public Episode {
 public:
  DstEpisode(const DeepSeaTreasure& env, GridPos pos) : env_(env), pos_(pos) {}

  int state_index() const override { return env_.state_index(pos_); }

  bool step(int action, std::span<double> reward, RngStream&) override {
    const DstTransition tr = env_.step(pos_, static_cast<DstAction>(action));
    pos_ = tr.next;
    reward[0] = tr.treasure;
    reward[1] = tr.time_penalty;
    return tr.done;
  }

 private:
  const DeepSeaTreasure& env_;
  GridPos pos_;
};

class ServerQueuesEpisode final : public Episode {
 public:
  explicit ServerQueuesEpisode(const ServerQueues& env)
      : env_(env), state_(env.initial_state()) {}

  void features(std::span<double> out) const override {
    const double scale = 1.0 / (state_.t + 1);
    const auto m = state_.served.size();
    for (std::size_t k = 0; k < m; ++k) out[k] = static_cast<double>(state_.served[k]) * scale;
    out[m] = 1.0;
  }

  bool step(int action, std::span<double> reward, RngStream& rng) override {
    return env_.step(state_, action, reward, rng);
  }

 private:
  const ServerQueues& env_;
  ServerQueuesState state_;
};

}  // namespace

DstLayout DstLayout::parse(std::string_view text) {
  DstLayout layout;
  bool have_start = false;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream tokens(line);
    std::vector<Cell> row;
    std::string tok;
    while (tokens >> tok) {
      Cell cell;
      if (tok == ".") {
        cell.kind = CellKind::kWater;
      } else if (tok == "#") {
        cell.kind = CellKind::kSeabed;
      } else if (tok == "S") {
        if (have_start) throw ConfigError("dst layout: more than one start cell");
        have_start = true;
        layout.start_ = GridPos{layout.rows_, static_cast<int>(row.size())};
      } else if (tok.size() > 1 && tok[0] == 'T') {
        cell.kind = CellKind::kTreasure;
        const char* first = tok.data() + 1;
        const char* last = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(first, last, cell.value);
        if (ec != std::errc() || ptr != last || !(cell.value > 0.0))
          throw ConfigError("dst layout: bad treasure token '" + tok + "'");
      } else {
        throw ConfigError("dst layout: unknown token '" + tok + "'");
      }
      row.push_back(cell);
    }
    if (row.empty()) continue;
    if (layout.cols_ == 0) layout.cols_ = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != layout.cols_)
      throw ConfigError("dst layout: ragged row " + std::to_string(layout.rows_));
    layout.cells_.insert(layout.cells_.end(), row.begin(), row.end());
    ++layout.rows_;
  }
  if (layout.rows_ == 0) throw ConfigError("dst layout: empty grid");
  if (!have_start) throw ConfigError("dst layout: missing start cell");
  return layout;
}

DstLayout DstLayout::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dst layout " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

DstLayout DstLayout::mo_gymnasium_default() { return parse(kMoGymnasiumMap); }

double DstLayout::max_treasure() const {
  double best = 0.0;
  for (const Cell& c : cells_) {
    if (c.kind == CellKind::kTreasure) best = std::max(best, c.value);
  }
  return best;
}

std::string DstLayout::to_text() const {
  std::ostringstream out;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (c > 0) out << ' ';
      const Cell& cell = at({r, c});
      if (GridPos{r, c} == start_) {
        out << 'S';
      } else if (cell.kind == CellKind::kSeabed) {
        out << '#';
      } else if (cell.kind == CellKind::kTreasure) {
        out << 'T' << cell.value;
      } else {
        out << '.';
      }
    }
    out << '\n';
  }
  return out.str();
}

DeepSeaTreasure::DeepSeaTreasure(DstLayout layout, int horizon, double gamma)
    : layout_(std::move(layout)) {
  spec_.num_objectives = 2;
  spec_.discount = gamma;
  spec_.horizon = horizon;
  // Zero is included in both intervals: absorbed episodes are padded with
  // zero reward.
  spec_.reward_bounds = {RewardBounds{0.0, layout_.max_treasure()}, RewardBounds{-1.0, 0.0}};
  spec_.encoding = StateEncoding::kTabular;
  spec_.state_count = layout_.rows() * layout_.cols();
  spec_.validate();
}

std::unique_ptr<Episode> DeepSeaTreasure::reset(RngStream&) const {
  return std::make_unique<DstEpisode>(*this, layout_.start());
}

DstTransition DeepSeaTreasure::step(GridPos from, DstAction action) const {
  static constexpr int kDr[] = {-1, 1, 0, 0};
  static constexpr int kDc[] = {0, 0, -1, 1};
  const int a = static_cast<int>(action);
  GridPos next{from.row + kDr[a], from.col + kDc[a]};
  const bool inside = next.row >= 0 && next.row < layout_.rows() && next.col >= 0 &&
                      next.col < layout_.cols();
  if (!inside || layout_.at(next).kind == CellKind::kSeabed) next = from;

  DstTransition tr;
  tr.next = next;
  const Cell& cell = layout_.at(next);
  if (cell.kind == CellKind::kTreasure) {
    tr.treasure = cell.value;
    tr.done = true;
  }
  return tr;
}

ServerQueues::ServerQueues(int num_queues, int horizon, double gamma,
                           std::vector<double> arrival_rates)
    : num_queues_(num_queues), horizon_(horizon), rates_(std::move(arrival_rates)) {
  if (num_queues < 1) throw ConfigError("server queues: M must be >= 1");
  if (rates_.empty()) rates_.assign(num_queues, 0.8 / num_queues);
  if (static_cast<int>(rates_.size()) != num_queues)
    throw ConfigError("server queues: need one arrival rate per queue");
  for (double r : rates_) {
    if (!(r >= 0.0)) throw ConfigError("server queues: arrival rates must be nonnegative");
  }
  spec_.num_objectives = num_queues;
  spec_.discount = gamma;
  spec_.horizon = horizon;
  spec_.reward_bounds.assign(num_queues, RewardBounds{0.0, 1.0});
  spec_.encoding = StateEncoding::kFeaturized;
  spec_.feature_dim = num_queues + 1;
  spec_.validate();
}

std::unique_ptr<Episode> ServerQueues::reset(RngStream&) const {
  return std::make_unique<ServerQueuesEpisode>(*this);
}

ServerQueuesState ServerQueues::initial_state() const {
  ServerQueuesState s;
  s.served.assign(num_queues_, 0);
  s.queue.assign(num_queues_, 0);
  return s;
}

bool ServerQueues::step(ServerQueuesState& state, int action, std::span<double> reward,
                        RngStream& rng) const {
  if (action < 0 || action >= num_queues_) throw UsageError("server queues: bad action");
  if (state.t >= horizon_) throw UsageError("server queues: episode already finished");
  for (int k = 0; k < num_queues_; ++k) {
    state.queue[k] += rng.poisson(rates_[k]);
    reward[k] = 0.0;
  }
  if (state.queue[action] > 0) {
    --state.queue[action];
    reward[action] = 1.0;
  }
  ++state.served[action];
  ++state.t;
  return state.t == horizon_;
}

std::vector<double> ServerQueues::observe(const ServerQueuesState& state) const {
  std::vector<double> out(num_queues_ + 1);
  const double scale = 1.0 / (state.t + 1);
  for (int k = 0; k < num_queues_; ++k) out[k] = static_cast<double>(state.served[k]) * scale;
  out[num_queues_] = 1.0;
  return out;
}

std::uint64_t sq_state_count(int num_queues, int horizon) {
  if (num_queues < 1 || horizon < 1) throw UsageError("sq_state_count: M and H must be >= 1");
  // binom(n, k) with k = M - 1, built up as binom(n - k + i, i).
  const std::uint64_t k = static_cast<std::uint64_t>(num_queues) - 1;
  const std::uint64_t n = static_cast<std::uint64_t>(num_queues) + horizon - 1;
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max())
      throw OverflowError("sq_state_count: binomial exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(acc);
}

}  // namespace morl
