// snmsim: command-line front end for the sparse normal-means simulator.
//
//   snmsim bounds m0 --d 4096 --r 0.6
//   snmsim tune --alg threshold-b --d 32768 --K 1 --M 64 --r 0.8
//   snmsim run --alg threshold-a --d 1024 --K 2 --r 0.5 --M 128 --trials 100
//   snmsim sweep --config grid.cfg --threads 4 --out results.csv
//   snmsim regimes --d 32768
//
// Exit codes: 0 ok, 2 invalid configuration, 3 sweep with only infeasible
// rows, 1 anything else.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "snm/bounds.hpp"
#include "snm/config.hpp"
#include "snm/harness.hpp"
#include "snm/model.hpp"

namespace {

using snm::format_double;

struct Globals {
  std::uint64_t seed = 1;
  std::int64_t trials = 100;
  unsigned threads = 1;
  std::string out;
  std::string trace;
  std::string encoding = "appendixB";
};

struct Params {
  std::int64_t d = 0;
  std::int64_t K = 1;
  std::int64_t L = 0;
  std::int64_t M = 0;
  double r = 0.0;
  double t = 0.0;
  std::int64_t k = 0;
  std::int64_t n = 0;
  double p = 0.0;
  std::string alg;
};

void print_tuned(const snm::TunedParams& p) {
  std::cout << "algorithm=" << snm::to_string(p.algorithm) << '\n'
            << "m_eff=" << p.m_eff << '\n';
  if (p.L) std::cout << "L=" << *p.L << '\n';
  if (p.threshold) {
    std::cout << "tau=" << format_double(*p.threshold) << '\n'
              << "tau_hat=" << format_double(snm::truncated_threshold(*p.threshold, p.encoding))
              << '\n'
              << "U=" << p.encoding.U << '\n'
              << "P=" << p.encoding.P << '\n';
  }
  std::cout << "feasible=" << (p.feasible ? "true" : "false") << '\n';
  if (!p.reason.empty()) std::cout << "reason=" << p.reason << '\n';
}

void print_bound(const std::string& name, const snm::MachineBound& b) {
  std::cout << name << '=' << b.machines << '\n'
            << "single_machine_regime=" << (b.single_machine_regime ? "true" : "false") << '\n';
}

void run_bounds(const std::string& quantity, const Params& a, snm::ThresholdEncoding enc) {
  auto line = [](const std::string& key, double v) { std::cout << key << '=' << format_double(v) << '\n'; };
  if (quantity == "mu_min") {
    line("mu_min", snm::mu_min(a.d, a.K, a.r));
  } else if (quantity == "m0") {
    print_bound("m0", snm::m0(a.d, a.r));
  } else if (quantity == "m_kl") {
    print_bound("m_kl", snm::m_kl(a.d, a.r, a.K, a.L));
  } else if (quantity == "a") {
    line("a", snm::a_quantity(a.K, a.L, a.d));
  } else if (quantity == "b") {
    line("b", snm::b_quantity(a.K, a.L, a.d, a.r));
  } else if (quantity == "threshold_small") {
    print_tuned(snm::threshold_small(a.d, a.K, a.r, enc));
  } else if (quantity == "threshold_mid") {
    print_tuned(snm::threshold_mid(a.d, a.K, a.r, a.M, enc));
  } else if (quantity == "threshold_mid_min_snr") {
    line("threshold_mid_min_snr", snm::threshold_mid_min_snr(a.d, a.K, a.M));
  } else if (quantity == "m_eff_large") {
    print_tuned(snm::m_eff_large(a.d, a.K, a.r, enc));
  } else if (quantity == "pi_risk_bound") {
    line("pi_risk_bound", snm::pi_risk_bound(a.d, a.K, a.M, a.r));
  } else if (quantity == "necessary_snr") {
    line("necessary_snr", snm::necessary_snr(a.d, a.M));
  } else if (quantity == "threshold_floor") {
    const auto f = snm::threshold_floor(a.d, a.K, a.M, enc);
    line("r_min", f.r_min);
    line("t_min", f.t_min);
  } else if (quantity == "vote_slack") {
    line("vote_slack", snm::vote_slack(a.d, a.K));
  } else if (quantity == "index_bits") {
    std::cout << "index_bits=" << snm::index_bits(a.d) << '\n';
  } else if (quantity == "gaussian_tail") {
    line("gaussian_tail", snm::gaussian_tail(a.t));
  } else if (quantity == "binomial_cdf") {
    line("binomial_cdf", snm::binomial_cdf(a.k, a.n, a.p));
  } else if (quantity == "p_send_support_topl") {
    line("p_send_support_topl", snm::p_send_support_topl(a.d, a.K, a.L, a.r));
  } else {
    throw snm::ConfigError("unknown quantity: " + quantity);
  }
}

snm::TunedParams run_tune(const Params& a, snm::ThresholdEncoding enc) {
  snm::SweepConfig c;
  c.d = a.d;
  c.K = a.K;
  c.L = a.L;
  c.M = a.M;
  c.encoding = enc;
  const auto alg = snm::parse_sweep_algorithm(a.alg);
  c.algorithms = {alg};
  c.r_grid = {a.r};
  snm::validate(c);
  const bool needs_floor = alg == snm::SweepAlgorithm::ThresholdA ||
                           alg == snm::SweepAlgorithm::ThresholdB ||
                           alg == snm::SweepAlgorithm::Theorem3b;
  const auto floor = needs_floor ? snm::threshold_floor(c.d, c.K, c.M, enc) : snm::ThresholdFloor{};
  return snm::tune_for_sweep(alg, c, a.r, floor);
}

void add_params(CLI::App* cmd, Params& a) {
  cmd->add_option("--d", a.d, "dimension");
  cmd->add_option("--K", a.K, "sparsity");
  cmd->add_option("--L", a.L, "Top-L list length");
  cmd->add_option("--M", a.M, "machines");
  cmd->add_option("--r", a.r, "SNR parameter");
}

int exit_for_sweep(const std::vector<snm::ResultsRow>& rows) {
  for (const auto& row : rows) {
    if (row.feasible) return 0;
  }
  std::cerr << "snmsim: every grid point is infeasible\n";
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed sparse normal-means simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--trials", g.trials, "Monte Carlo trials per grid point");
  app.add_option("--threads", g.threads, "worker threads");
  app.add_option("--out", g.out, "output path (CSV for run/sweep)");
  app.add_option("--trace", g.trace, "message trace output path");
  app.add_option("--encoding", g.encoding, "threshold encoding")
      ->check(CLI::IsMember({"paper", "appendixB"}));

  Params a;
  std::string quantity;
  auto* bounds = app.add_subcommand("bounds", "print a closed-form quantity");
  bounds->add_option("quantity", quantity, "quantity name")->required();
  add_params(bounds, a);
  bounds->add_option("--t", a.t, "tail argument");
  bounds->add_option("--k", a.k, "binomial cutoff");
  bounds->add_option("--n", a.n, "binomial size");
  bounds->add_option("--p", a.p, "binomial probability");

  auto* tune = app.add_subcommand("tune", "print tuned parameters");
  add_params(tune, a);
  tune->add_option("--alg", a.alg, "algorithm")->required();

  std::string mu_profile = "minimal";
  bool header = false;
  bool noise_free = false;
  auto* run = app.add_subcommand("run", "run one configuration and print its CSV row");
  add_params(run, a);
  run->add_option("--alg", a.alg, "algorithm")->required();
  run->add_option("--mu-profile", mu_profile, "minimal or uniform:<hi>");
  run->add_flag("--header", header, "print the CSV header first");
  run->add_flag("--noise-free", noise_free, "machines observe mu exactly");

  std::string config_path;
  std::string plot_path;
  auto* sweep = app.add_subcommand("sweep", "run a grid from a config file");
  sweep->add_option("--config", config_path, "key=value config file")->required();
  sweep->add_option("--plot", plot_path, "gnuplot script output path");

  int steps = 40;
  auto* regimes = app.add_subcommand("regimes", "print communication-regime boundaries");
  regimes->add_option("--d", a.d, "dimension")->required();
  regimes->add_option("--steps", steps, "number of r grid points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto enc = snm::parse_threshold_encoding(g.encoding);
    if (*bounds) {
      run_bounds(quantity, a, enc);
    } else if (*tune) {
      print_tuned(run_tune(a, enc));
    } else if (*run) {
      snm::SweepConfig c;
      c.algorithms = {snm::parse_sweep_algorithm(a.alg)};
      c.d = a.d;
      c.K = a.K;
      c.L = a.L;
      c.M = a.M;
      c.r_grid = {a.r};
      c.trials = g.trials;
      c.master_seed = g.seed;
      c.threads = g.threads;
      c.encoding = enc;
      c.noise_free = noise_free;
      c.mu_profile = snm::parse_mu_profile(mu_profile);
      if (!g.trace.empty()) c.trace_path = g.trace;
      const auto rows = snm::run_sweep(c);
      if (header) std::cout << snm::csv_header() << '\n';
      std::cout << snm::format_csv_row(rows.front()) << '\n';
      if (!g.out.empty()) snm::emit_csv(rows, g.out);
    } else if (*sweep) {
      snm::SweepConfig c = snm::load_config(config_path);
      if (app.count("--seed")) c.master_seed = g.seed;
      if (app.count("--trials")) c.trials = g.trials;
      if (app.count("--threads")) c.threads = g.threads;
      if (app.count("--encoding")) c.encoding = enc;
      if (!g.out.empty()) c.csv_path = g.out;
      if (!g.trace.empty()) c.trace_path = g.trace;
      if (!plot_path.empty()) c.plot_path = plot_path;
      const auto rows = snm::run_sweep(c);
      if (c.csv_path) {
        snm::emit_csv(rows, *c.csv_path);
      } else {
        snm::emit_csv(rows, std::cout);
      }
      if (c.plot_path) snm::emit_plot_script(rows, c.csv_path.value_or("results.csv"), *c.plot_path);
      return exit_for_sweep(rows);
    } else if (*regimes) {
      const auto table = snm::regime_table(a.d, snm::even_r_grid(steps));
      if (g.out.empty()) {
        snm::emit_regimes(table, std::cout);
      } else {
        std::ofstream out(g.out);
        if (!out) throw std::runtime_error("cannot write " + g.out);
        snm::emit_regimes(table, out);
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "snmsim: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "snmsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
