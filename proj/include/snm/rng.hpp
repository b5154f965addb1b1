#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace snm {

/// Identifies one random stream: the noise of one machine in one trial.
///
/// Machine ids start at 1; id 0 is reserved for per-trial problem
/// construction (support placement and support values).
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint32_t trial_index = 0;
  std::uint32_t machine_id = 0;
};

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The key is the master seed, the upper 64 counter bits hold
/// (machine_id, trial_index) and the lower 64 bits count blocks, so every
/// SeedSpec owns a disjoint slice of the counter space and no state has to
/// be shared between streams.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit PhiloxEngine(const SeedSpec& seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  /// One Philox4x32-10 bijection; exposed for known-answer tests.
  static Block block(Block counter, Key key);

 private:
  void refill();

  Key key_{};
  std::uint32_t stream_lo_ = 0;
  std::uint32_t stream_hi_ = 0;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace snm
