#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "snm/bounds.hpp"
#include "snm/config.hpp"

namespace snm {

/// One (algorithm, r) grid point. `L` and `tau` are empty when the
/// algorithm has no such parameter.
struct ResultsRow {
  std::string algorithm;
  std::int64_t d = 0;
  std::int64_t M = 0;
  std::int64_t K = 0;
  std::optional<std::int64_t> L;
  double r = 0.0;
  std::int64_t m_eff = 0;
  std::optional<double> tau;
  std::int64_t trials = 0;
  double success_rate = 0.0;
  double mean_total_bits = 0.0;
  double std_total_bits = 0.0;
  double r_necessary = 0.0;
  double r_sufficient = 0.0;
  bool feasible = true;

  friend bool operator==(const ResultsRow&, const ResultsRow&) = default;
};

/// Parameters a sweep algorithm runs with at a given r. Infeasible points
/// keep a runnable configuration (machine count capped at M, threshold
/// falling back to t_min) and carry feasible = false.
TunedParams tune_for_sweep(SweepAlgorithm alg, const SweepConfig& config, double r,
                           const ThresholdFloor& floor);

double sufficient_snr_for(SweepAlgorithm alg, const SweepConfig& config,
                          const ThresholdFloor& floor);

/// Rows ordered by algorithm (config order) then r (grid order). Trial t of
/// every grid point uses placement seed {seed, t, 0} and machine seeds
/// {seed, t, i}, so rows are independent of the thread count. With a trace
/// path every message is dumped, each trial preceded by a '#' header.
std::vector<ResultsRow> run_sweep(const SweepConfig& config);

/// Fixed column order, matching the ResultsRow fields.
std::string csv_header();
std::string format_csv_row(const ResultsRow& row);
void emit_csv(const std::vector<ResultsRow>& rows, std::ostream& out);
void emit_csv(const std::vector<ResultsRow>& rows, const std::string& path);
std::vector<ResultsRow> parse_csv(std::istream& in);

/// gnuplot script with two panels, success rate and log-scale bits against
/// r, one curve per algorithm, a black r_necessary line and a dashed
/// r_sufficient line per algorithm. The CSV is referenced relative to the
/// script's directory.
void emit_plot_script(const std::vector<ResultsRow>& rows, const std::string& csv_path,
                      std::ostream& out, const std::string& script_dir = ".");
void emit_plot_script(const std::vector<ResultsRow>& rows, const std::string& csv_path,
                      const std::string& path);

/// Communication-regime boundaries at one r.
struct RegimeRow {
  double r = 0.0;
  double inverse_r = 0.0;       ///< r = 1/M curve, as M
  double log_cube_floor = 0.0;  ///< ln^-3 d
  std::int64_t m0 = 0;          ///< sublinear-region boundary M >= m0(d, r)
  bool sublinear = false;       ///< m0 <= d
};

std::vector<RegimeRow> regime_table(std::int64_t d, const std::vector<double>& r_grid);
void emit_regimes(const std::vector<RegimeRow>& rows, std::ostream& out);

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace snm
