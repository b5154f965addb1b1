#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "snm/bounds.hpp"
#include "snm/model.hpp"
#include "snm/protocols.hpp"

namespace snm {

/// Bad configuration; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Algorithms a sweep can run. The theorem entries use the closed-form
/// machine counts and thresholds instead of the simulation tuning.
enum class SweepAlgorithm {
  TopK,
  TopL,
  ThresholdA,
  ThresholdB,
  Theorem1,
  Theorem2,
  Theorem3a,
  Theorem3b,
  Theorem3c,
};

std::string to_string(SweepAlgorithm alg);
/// Accepts top-k, top-l, threshold-a, threshold-b, theorem-1, theorem-2,
/// theorem-3a, theorem-3b, theorem-3c.
SweepAlgorithm parse_sweep_algorithm(const std::string& text);

struct SweepConfig {
  std::vector<SweepAlgorithm> algorithms;
  std::int64_t d = 0;
  std::int64_t M = 0;
  std::int64_t K = 0;
  std::int64_t L = 0;
  std::vector<double> r_grid;
  std::int64_t trials = 100;
  std::uint64_t master_seed = 1;
  MuProfile mu_profile = MinimalProfile{};
  ThresholdEncoding encoding = ThresholdEncoding::AppendixB;
  Selection selection = Selection::TopK;
  bool noise_free = false;
  unsigned threads = 1;
  std::optional<std::string> csv_path;
  std::optional<std::string> plot_path;
  std::optional<std::string> trace_path;
};

/// i / n for i = 1..n.
std::vector<double> even_r_grid(int n);

/// Throws ConfigError unless the sizes, grid and trial count are usable.
void validate(const SweepConfig& config);

/// Flat `key = value` lines, `#` starts a comment. Keys: algorithms, d, M, K,
/// L, r_grid (comma list), r_steps, trials, seed, mu_profile, encoding,
/// selection, noise_free, threads, csv, plot, trace. Later keys win.
SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::string& path);

}  // namespace snm
