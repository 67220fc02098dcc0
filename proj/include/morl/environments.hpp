#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "morl/mdp.hpp"

namespace morl {

// ---------------------------------------------------------------------------
// Deep Sea Treasure
//
// Grid layout identical to the MO-Gymnasium `deep-sea-treasure-v0` map. The
// agent starts in the top-left cell; entering a treasure cell ends the
// episode. Rewards are (treasure value or 0, -1).
// ---------------------------------------------------------------------------

enum class CellKind { kWater, kSeabed, kTreasure };

struct Cell {
  CellKind kind = CellKind::kWater;
  double value = 0.0;  // treasure value
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct GridPos {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
};

enum class DstAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

class DstLayout {
 public:
  // Text format: one row per line, whitespace-separated tokens. `.` water,
  // `#` seabed, `T<value>` treasure, `S` start (water).
  static DstLayout parse(std::string_view text);
  static DstLayout load(const std::filesystem::path& path);
  static DstLayout mo_gymnasium_default();

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Cell& at(GridPos p) const { return cells_[p.row * cols_ + p.col]; }
  GridPos start() const { return start_; }
  double max_treasure() const;
  std::string to_text() const;

  friend bool operator==(const DstLayout&, const DstLayout&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Cell> cells_;
  GridPos start_;
};

struct DstTransition {
  GridPos next;
  double treasure = 0.0;
  double time_penalty = -1.0;
  bool done = false;
};

class DeepSeaTreasure final : public Environment {
 public:
  explicit DeepSeaTreasure(DstLayout layout = DstLayout::mo_gymnasium_default(),
                           int horizon = 100, double gamma = 1.0);

  const EnvSpec& spec() const override { return spec_; }
  int num_actions() const override { return 4; }
  std::unique_ptr<Episode> reset(RngStream& rng) const override;

  const DstLayout& layout() const { return layout_; }
  int state_index(GridPos p) const { return p.row * layout_.cols() + p.col; }
  // Deterministic transition from a water cell. Moves into the boundary or the
  // seabed leave the position unchanged.
  DstTransition step(GridPos from, DstAction action) const;

 private:
  DstLayout layout_;
  EnvSpec spec_;
};

// ---------------------------------------------------------------------------
// Server Queues
//
// M queues with Poisson(lambda_m) arrivals; each step the server picks one
// queue. Serving a non-empty queue yields reward 1 in that component. Queue
// lengths are hidden; the visible state is the vector of service counts.
// ---------------------------------------------------------------------------

struct ServerQueuesState {
  int t = 0;
  std::vector<std::int64_t> served;  // visible c_m
  std::vector<std::int64_t> queue;   // hidden q_m
};

class ServerQueues final : public Environment {
 public:
  // Empty `arrival_rates` selects the default 0.8 / M for every queue.
  ServerQueues(int num_queues, int horizon, double gamma,
               std::vector<double> arrival_rates = {});

  const EnvSpec& spec() const override { return spec_; }
  int num_actions() const override { return num_queues_; }
  std::unique_ptr<Episode> reset(RngStream& rng) const override;

  int num_queues() const { return num_queues_; }
  const std::vector<double>& arrival_rates() const { return rates_; }

  ServerQueuesState initial_state() const;
  // Arrivals first, then service of queue `action`. Returns done.
  bool step(ServerQueuesState& state, int action, std::span<double> reward,
            RngStream& rng) const;
  // (c_1/(t+1), ..., c_M/(t+1), 1).
  std::vector<double> observe(const ServerQueuesState& state) const;

 private:
  int num_queues_;
  int horizon_;
  std::vector<double> rates_;
  EnvSpec spec_;
};

// binom(M + H - 1, M - 1): number of visible states after H steps. Throws
// OverflowError if the result does not fit in 64 bits.
std::uint64_t sq_state_count(int num_queues, int horizon);

}  // namespace morl
