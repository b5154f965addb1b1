#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "snm/bounds.hpp"
#include "snm/codec.hpp"
#include "snm/ledger.hpp"
#include "snm/model.hpp"

namespace snm {

/// What one machine sends to the center.
struct UplinkMessage {
  std::uint32_t machine_id = 0;
  /// Ascending, distinct.
  std::vector<Index> indices;
  /// Estimation round only, one per index.
  std::vector<BitString> payloads;
  std::int64_t bit_length = 0;
};

struct VoteTally {
  explicit VoteTally(std::int64_t d) : votes(static_cast<std::size_t>(d), 0) {}

  /// Throws std::out_of_range for an index outside [0, d).
  void add(const UplinkMessage& msg);
  std::int64_t total() const;

  std::vector<std::int64_t> votes;
};

/// Indices of the L largest values; ties go to the lower index.
UplinkMessage topl_reply(const Sample& sample, std::int64_t L);
UplinkMessage topl_reply(std::uint32_t machine_id, std::span<const double> values,
                         std::int64_t L);

/// { j : x_j > tau_hat }. An empty reply costs 0 bits.
UplinkMessage threshold_reply(const Sample& sample, double tau_hat);
UplinkMessage threshold_reply(std::uint32_t machine_id, std::span<const double> values,
                              double tau_hat);

VoteTally tally(std::span<const UplinkMessage> messages, std::int64_t d);

/// K indices with the most votes, ties toward the lower index. Returned
/// ascending.
std::vector<Index> select_top_k(const VoteTally& tally, std::int64_t K);

/// { j : v_j > tau_c }, ascending.
std::vector<Index> select_by_vote_threshold(const VoteTally& tally, double tau_c);

/// 4 ln d.
double default_vote_threshold(std::int64_t d);

enum class Selection { TopK, VoteThreshold };

struct RunOptions {
  /// Machines observe mu exactly.
  bool noise_free = false;
  Selection selection = Selection::TopK;
  /// VoteThreshold cutoff; 4 ln d when unset.
  std::optional<double> tau_c;
  bool record_trace = false;
  /// Machine budget; m_eff above it is an error.
  std::optional<std::int64_t> machines_available;
};

struct TrialOutcome {
  std::vector<Index> estimated_support;
  bool exact_recovery = false;
  BitLedger ledger;
  std::chrono::duration<double> support_round_time{};
};

struct PiOutcome {
  std::vector<double> mu_hat;
  double squared_error = 0.0;
  BitLedger ledger;
  std::chrono::duration<double> pi_round_time{};
};

/// Machine i (1-based) of a trial draws from SeedSpec{master_seed,
/// trial_index, i}; the first m_eff machines are contacted.
TrialOutcome run_topl(const SparseProblem& problem, const TunedParams& params,
                      std::uint64_t master_seed, std::uint32_t trial_index,
                      const RunOptions& options = {});

/// Throws if the quantized threshold is not positive.
TrialOutcome run_threshold(const SparseProblem& problem, const TunedParams& params,
                           std::uint64_t master_seed, std::uint32_t trial_index,
                           const RunOptions& options = {});

/// Dispatches on params.algorithm.
TrialOutcome run_support_round(const SparseProblem& problem, const TunedParams& params,
                               std::uint64_t master_seed, std::uint32_t trial_index,
                               const RunOptions& options = {});

/// Encodes x_{i,k} for every k in the estimate. Indices are implied by the
/// downlink order, so bit_length counts payloads only.
UplinkMessage pi_reply(std::uint32_t machine_id, std::span<const double> values,
                       std::span<const Index> support, Precision prec);

/// U = floor(log2(d^g + sqrt(4 (g + 1) ln d))), P = ceil(log2 d). Without
/// `gamma`, g is the smallest of {0.5, 1, 2} with mu_max < d^g.
Precision pi_default_precision(const SparseProblem& problem,
                               std::optional<double> gamma = std::nullopt);

/// Contacts all M machines, reusing the support round's per-machine seeds.
PiOutcome run_pi(const SparseProblem& problem, std::span<const Index> estimated_support,
                 std::int64_t M, Precision prec, std::uint64_t master_seed,
                 std::uint32_t trial_index, const RunOptions& options = {});

}  // namespace snm
