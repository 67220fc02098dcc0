#pragma once

#include <cstdint>
#include <random>

namespace morl {

// Components identifying one random stream. Equal keys give identical
// streams; distinct keys give independent ones.
struct StreamKey {
  std::uint64_t run_seed = 0;
  std::uint64_t epoch = 0;
  std::uint64_t iteration = 0;
  std::uint64_t trajectory_index = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

// Key for trajectory `index` of batch `batch` (0 = return batch,
// 1 = gradient batch) at inner iteration `iteration` of `epoch`.
StreamKey batch_key(std::uint64_t run_seed, std::uint64_t epoch,
                    std::uint64_t iteration, int batch, std::uint64_t index);

// Counter-based derivation: the key is hashed into a 64-bit seed, so any
// worker can recreate the stream of any trajectory without coordination.
std::uint64_t derive_seed(const StreamKey& key);

class RngStream {
 public:
  explicit RngStream(const StreamKey& key);
  explicit RngStream(std::uint64_t seed);

  // Uniform on [0, 1).
  double uniform();
  double normal();
  // Poisson(mean) draw; mean == 0 yields 0.
  std::int64_t poisson(double mean);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace morl
