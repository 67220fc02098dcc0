#include "morl/rng.hpp"

#include "morl/errors.hpp"

namespace morl {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

StreamKey batch_key(std::uint64_t run_seed, std::uint64_t epoch,
                    std::uint64_t iteration, int batch, std::uint64_t index) {
  return StreamKey{run_seed, epoch, 2 * iteration + static_cast<std::uint64_t>(batch),
                   index};
}

std::uint64_t derive_seed(const StreamKey& key) {
  std::uint64_t h = splitmix64(key.run_seed);
  h = splitmix64(h ^ key.epoch);
  h = splitmix64(h ^ key.iteration);
  h = splitmix64(h ^ key.trajectory_index);
  return h;
}

RngStream::RngStream(const StreamKey& key) : engine_(derive_seed(key)) {}

RngStream::RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double RngStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::normal() {
  return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

std::int64_t RngStream::poisson(double mean) {
  if (mean < 0.0) throw UsageError("poisson: negative mean");
  if (mean == 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(engine_);
}

}  // namespace morl
