#include "snm/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace snm {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t index_cost(std::size_t d) { return index_bits(static_cast<std::int64_t>(d)); }

void check_budget(std::int64_t m_eff, const RunOptions& options) {
  if (m_eff < 1) throw std::invalid_argument("run: m_eff must be >= 1");
  if (options.machines_available && m_eff > *options.machines_available) {
    throw std::invalid_argument("run: m_eff exceeds the available machines");
  }
}

std::vector<Index> select(const VoteTally& votes, std::int64_t K, const RunOptions& options) {
  if (options.selection == Selection::VoteThreshold) {
    const auto d = static_cast<std::int64_t>(votes.votes.size());
    return select_by_vote_threshold(votes, options.tau_c.value_or(default_vote_threshold(d)));
  }
  return select_top_k(votes, K);
}

/// Shared machine loop of both support-round algorithms.
template <typename Reply>
TrialOutcome support_round(const SparseProblem& problem, std::int64_t m_eff,
                           std::int64_t setup_bits, std::int64_t K,
                           std::uint64_t master_seed, std::uint32_t trial_index,
                           const RunOptions& options, Reply reply) {
  const auto start = Clock::now();
  TrialOutcome out;
  out.ledger = BitLedger(options.record_trace);
  VoteTally votes(problem.d());
  std::vector<double> x(static_cast<std::size_t>(problem.d()));
  for (std::int64_t i = 1; i <= m_eff; ++i) {
    const auto id = static_cast<std::uint32_t>(i);
    out.ledger.record({Phase::SupportRound, Direction::Downlink, id, 0, setup_bits});
    fill_observation(problem, SeedSpec{master_seed, trial_index, id}, x, options.noise_free);
    const UplinkMessage msg = reply(id, x);
    out.ledger.record({Phase::SupportRound, Direction::Uplink, id,
                       static_cast<std::int64_t>(msg.indices.size()), msg.bit_length});
    votes.add(msg);
  }
  out.estimated_support = select(votes, K, options);
  out.exact_recovery = out.estimated_support == problem.support();
  out.support_round_time = Clock::now() - start;
  return out;
}

}  // namespace

void VoteTally::add(const UplinkMessage& msg) {
  for (Index j : msg.indices) {
    if (j < 0 || static_cast<std::size_t>(j) >= votes.size()) {
      throw std::out_of_range("tally: index out of range");
    }
    ++votes[static_cast<std::size_t>(j)];
  }
}

std::int64_t VoteTally::total() const {
  return std::accumulate(votes.begin(), votes.end(), std::int64_t{0});
}

UplinkMessage topl_reply(std::uint32_t machine_id, std::span<const double> values,
                         std::int64_t L) {
  const auto d = values.size();
  if (L < 1 || static_cast<std::size_t>(L) > d) {
    throw std::invalid_argument("topl_reply: requires 1 <= L <= d");
  }
  // Buffer sorted by (value desc, index asc). Indices arrive ascending, so a
  // newcomer displaces the last entry only when strictly larger.
  const auto n = static_cast<std::size_t>(L);
  std::vector<std::pair<double, Index>> best;
  best.reserve(n + 1);
  for (std::size_t j = 0; j < d; ++j) {
    const double v = values[j];
    if (best.size() == n && !(v > best.back().first)) continue;
    auto pos = std::upper_bound(best.begin(), best.end(), v,
                                [](double lhs, const auto& e) { return lhs > e.first; });
    best.insert(pos, {v, static_cast<Index>(j)});
    if (best.size() > n) best.pop_back();
  }
  UplinkMessage msg;
  msg.machine_id = machine_id;
  msg.indices.reserve(n);
  for (const auto& e : best) msg.indices.push_back(e.second);
  std::sort(msg.indices.begin(), msg.indices.end());
  msg.bit_length = L * index_cost(d);
  return msg;
}

UplinkMessage topl_reply(const Sample& sample, std::int64_t L) {
  return topl_reply(sample.machine_id, sample.values, L);
}

UplinkMessage threshold_reply(std::uint32_t machine_id, std::span<const double> values,
                              double tau_hat) {
  if (std::isnan(tau_hat) || std::isinf(tau_hat)) {
    throw std::invalid_argument("threshold_reply: threshold must be finite");
  }
  UplinkMessage msg;
  msg.machine_id = machine_id;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] > tau_hat) msg.indices.push_back(static_cast<Index>(j));
  }
  if (!msg.indices.empty()) {
    msg.bit_length = static_cast<std::int64_t>(msg.indices.size()) * index_cost(values.size());
  }
  return msg;
}

UplinkMessage threshold_reply(const Sample& sample, double tau_hat) {
  return threshold_reply(sample.machine_id, sample.values, tau_hat);
}

VoteTally tally(std::span<const UplinkMessage> messages, std::int64_t d) {
  VoteTally out(d);
  for (const auto& msg : messages) out.add(msg);
  return out;
}

std::vector<Index> select_top_k(const VoteTally& tally, std::int64_t K) {
  const auto d = static_cast<std::int64_t>(tally.votes.size());
  if (K < 1 || K > d) throw std::invalid_argument("select_top_k: requires 1 <= K <= d");
  std::vector<Index> order(tally.votes.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + K, order.end(), [&](Index a, Index b) {
    const auto va = tally.votes[static_cast<std::size_t>(a)];
    const auto vb = tally.votes[static_cast<std::size_t>(b)];
    return va != vb ? va > vb : a < b;
  });
  order.resize(static_cast<std::size_t>(K));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<Index> select_by_vote_threshold(const VoteTally& tally, double tau_c) {
  if (!(tau_c > 0.0)) throw std::invalid_argument("select_by_vote_threshold: requires tau_c > 0");
  std::vector<Index> out;
  for (std::size_t j = 0; j < tally.votes.size(); ++j) {
    if (static_cast<double>(tally.votes[j]) > tau_c) out.push_back(static_cast<Index>(j));
  }
  return out;
}

double default_vote_threshold(std::int64_t d) {
  return 4.0 * std::log(static_cast<double>(d));
}

TrialOutcome run_topl(const SparseProblem& problem, const TunedParams& params,
                      std::uint64_t master_seed, std::uint32_t trial_index,
                      const RunOptions& options) {
  if (params.algorithm != Algorithm::TopL || !params.L) {
    throw std::invalid_argument("run_topl: params are not a Top-L configuration");
  }
  check_budget(params.m_eff, options);
  const std::int64_t L = *params.L;
  const auto setup = static_cast<std::int64_t>(std::bit_width(static_cast<std::uint64_t>(L)));
  return support_round(problem, params.m_eff, setup, problem.K(), master_seed, trial_index,
                       options, [L](std::uint32_t id, std::span<const double> x) {
                         return topl_reply(id, x, L);
                       });
}

TrialOutcome run_threshold(const SparseProblem& problem, const TunedParams& params,
                           std::uint64_t master_seed, std::uint32_t trial_index,
                           const RunOptions& options) {
  if (!is_threshold(params.algorithm) || !params.threshold) {
    throw std::invalid_argument("run_threshold: params are not a thresholding configuration");
  }
  check_budget(params.m_eff, options);
  const double tau_hat = truncated_threshold(*params.threshold, params.encoding);
  if (!(tau_hat > 0.0)) throw std::invalid_argument("run_threshold: threshold truncates to <= 0");
  return support_round(problem, params.m_eff, params.encoding.bits(), problem.K(), master_seed,
                       trial_index, options, [tau_hat](std::uint32_t id, std::span<const double> x) {
                         return threshold_reply(id, x, tau_hat);
                       });
}

TrialOutcome run_support_round(const SparseProblem& problem, const TunedParams& params,
                               std::uint64_t master_seed, std::uint32_t trial_index,
                               const RunOptions& options) {
  return params.algorithm == Algorithm::TopL
             ? run_topl(problem, params, master_seed, trial_index, options)
             : run_threshold(problem, params, master_seed, trial_index, options);
}

UplinkMessage pi_reply(std::uint32_t machine_id, std::span<const double> values,
                       std::span<const Index> support, Precision prec) {
  UplinkMessage msg;
  msg.machine_id = machine_id;
  msg.indices.assign(support.begin(), support.end());
  msg.payloads.reserve(support.size());
  for (Index k : support) {
    if (k < 0 || static_cast<std::size_t>(k) >= values.size()) {
      throw std::out_of_range("pi_reply: index out of range");
    }
    msg.payloads.push_back(trunc(values[static_cast<std::size_t>(k)], prec));
    msg.bit_length += prec.bits();
  }
  return msg;
}

Precision pi_default_precision(const SparseProblem& problem, std::optional<double> gamma) {
  const auto d = static_cast<double>(problem.d());
  double g = 0.0;
  if (gamma) {
    g = *gamma;
  } else {
    for (double candidate : {0.5, 1.0, 2.0}) {
      if (problem.mu_max() < std::pow(d, candidate)) {
        g = candidate;
        break;
      }
    }
    if (g == 0.0) throw std::invalid_argument("pi_default_precision: mu_max >= d^2");
  }
  if (!(g > 0.0)) throw std::invalid_argument("pi_default_precision: gamma must be > 0");
  const double span = std::pow(d, g) + std::sqrt(4.0 * (g + 1.0) * std::log(d));
  return {static_cast<int>(std::floor(std::log2(span))), index_bits(problem.d())};
}

PiOutcome run_pi(const SparseProblem& problem, std::span<const Index> estimated_support,
                 std::int64_t M, Precision prec, std::uint64_t master_seed,
                 std::uint32_t trial_index, const RunOptions& options) {
  if (M < 1) throw std::invalid_argument("run_pi: requires M >= 1");
  const auto start = Clock::now();
  const auto d = static_cast<std::size_t>(problem.d());
  for (Index k : estimated_support) {
    if (k < 0 || static_cast<std::size_t>(k) >= d) {
      throw std::out_of_range("run_pi: index out of range");
    }
  }
  PiOutcome out;
  out.ledger = BitLedger(options.record_trace);
  out.mu_hat.assign(d, 0.0);
  const auto n = static_cast<std::int64_t>(estimated_support.size());
  const std::int64_t request_bits = n * index_cost(d);
  std::vector<double> sums(estimated_support.size(), 0.0);
  std::vector<double> x(d);
  for (std::int64_t i = 1; i <= M; ++i) {
    const auto id = static_cast<std::uint32_t>(i);
    out.ledger.record({Phase::PiRound, Direction::Downlink, id, n, request_bits});
    fill_observation(problem, SeedSpec{master_seed, trial_index, id}, x, options.noise_free);
    const UplinkMessage msg = pi_reply(id, x, estimated_support, prec);
    out.ledger.record({Phase::PiRound, Direction::Uplink, id, n, msg.bit_length});
    for (std::size_t k = 0; k < sums.size(); ++k) sums[k] += approx(msg.payloads[k], prec);
  }
  for (std::size_t k = 0; k < sums.size(); ++k) {
    out.mu_hat[static_cast<std::size_t>(estimated_support[k])] = sums[k] / static_cast<double>(M);
  }
  const auto mu = problem.mu();
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = mu[j] - out.mu_hat[j];
    out.squared_error += diff * diff;
  }
  out.pi_round_time = Clock::now() - start;
  return out;
}

}  // namespace snm
