#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "snm/rng.hpp"

namespace snm {

/// Coordinates are zero-based throughout the library: a support index j
/// refers to mu[j].
using Index = std::int32_t;

/// Smallest nonzero mean entry at SNR parameter r: sqrt(2 r ln(d - K)).
double mu_min(std::int64_t d, std::int64_t K, double r);

/// How support values are chosen.
struct MinimalProfile {};
struct UniformProfile {
  double hi = 0.0;  ///< support values are drawn from [mu_min, hi]
};
using MuProfile = std::variant<MinimalProfile, UniformProfile>;

std::string to_string(const MuProfile& profile);
/// Parses "minimal" or "uniform:<hi>".
MuProfile parse_mu_profile(const std::string& text);

/// Ground truth of one estimation problem.
class SparseProblem {
 public:
  std::int64_t d() const { return static_cast<std::int64_t>(mu_.size()); }
  std::int64_t K() const { return static_cast<std::int64_t>(support_.size()); }
  double r() const { return r_; }
  /// Sorted ascending.
  const std::vector<Index>& support() const { return support_; }
  std::span<const double> mu() const { return mu_; }
  double mu_max() const;

  /// Builds a problem from an explicit nonnegative mean vector. The support
  /// is read off the nonzero entries; K = 0 is allowed (test fixtures).
  static SparseProblem from_mean(std::vector<double> mu, double r);

 private:
  SparseProblem(std::vector<double> mu, std::vector<Index> support, double r)
      : mu_(std::move(mu)), support_(std::move(support)), r_(r) {}

  std::vector<double> mu_;
  std::vector<Index> support_;
  double r_ = 0.0;
};

/// Fixed support list, or a seed from which a uniform K-subset is drawn.
using Placement = std::variant<std::vector<Index>, SeedSpec>;

SparseProblem make_problem(std::int64_t d, std::int64_t K, double r,
                           const MuProfile& profile,
                           const Placement& placement);

/// One machine's observation x_i = mu + eps_i.
struct Sample {
  std::uint32_t machine_id = 0;
  std::vector<double> values;
};

Sample sample_machine(const SparseProblem& problem, const SeedSpec& seed);

/// Writes the observation for `seed` into `out` (size d) without
/// allocating. With `noise_free` the observation equals mu exactly.
void fill_observation(const SparseProblem& problem, const SeedSpec& seed,
                      std::span<double> out, bool noise_free = false);

}  // namespace snm
