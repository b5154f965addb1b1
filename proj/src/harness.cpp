#include "snm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "snm/protocols.hpp"

namespace snm {
namespace {

bool uses_threshold_floor(SweepAlgorithm alg) {
  return alg == SweepAlgorithm::ThresholdA || alg == SweepAlgorithm::ThresholdB ||
         alg == SweepAlgorithm::Theorem3b;
}

TunedParams closed_form_topl(MachineBound bound, std::int64_t L) {
  TunedParams p;
  p.algorithm = Algorithm::TopL;
  p.L = L;
  p.m_eff = bound.single_machine_regime ? 1 : bound.machines;
  return p;
}

void cap_machines(TunedParams& p, std::int64_t M) {
  if (p.m_eff <= M) return;
  if (p.feasible) p.reason = "prescribed machine count exceeds M";
  p.m_eff = M;
  p.feasible = false;
}

struct TrialResult {
  bool success = false;
  std::int64_t bits = 0;
  std::vector<MessageRecord> trace;
};

template <typename T>
T parse_field(const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw std::invalid_argument("csv: bad field '" + text + "'");
  }
  return value;
}

const char* kPalette[] = {"#1f4fd8", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#17becf", "#7f7f7f"};

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

TunedParams tune_for_sweep(SweepAlgorithm alg, const SweepConfig& c, double r,
                           const ThresholdFloor& floor) {
  TunedParams p;
  switch (alg) {
    case SweepAlgorithm::TopK:
      return tune_topl(c.d, c.K, c.K, r, c.M);
    case SweepAlgorithm::TopL:
      return tune_topl(c.d, c.K, c.L, r, c.M);
    case SweepAlgorithm::ThresholdA:
      return tune_threshold_a(c.d, c.K, r, c.M, c.encoding, floor);
    case SweepAlgorithm::ThresholdB:
      return tune_threshold_b(c.d, c.K, r, c.M, c.encoding, floor);
    case SweepAlgorithm::Theorem1:
      p = closed_form_topl(m0(c.d, r), 1);
      break;
    case SweepAlgorithm::Theorem2:
      p = closed_form_topl(m_kl(c.d, r, c.K, c.L), c.L);
      break;
    case SweepAlgorithm::Theorem3a:
      p = threshold_small(c.d, c.K, r, c.encoding);
      break;
    case SweepAlgorithm::Theorem3b:
      p = threshold_mid(c.d, c.K, r, c.M, c.encoding);
      if (!p.threshold) {
        p.threshold = floor.t_min;
        p.encoding = threshold_precision(floor.t_min, c.d, c.encoding);
        p.reason += "; threshold undefined, using t_min";
      }
      break;
    case SweepAlgorithm::Theorem3c:
      p = m_eff_large(c.d, c.K, r, c.encoding);
      break;
  }
  cap_machines(p, c.M);
  return p;
}

double sufficient_snr_for(SweepAlgorithm alg, const SweepConfig& c, const ThresholdFloor& floor) {
  switch (alg) {
    case SweepAlgorithm::TopK: return sufficient_snr_topl(c.d, c.K, c.K, c.M);
    case SweepAlgorithm::TopL: return sufficient_snr_topl(c.d, c.K, c.L, c.M);
    case SweepAlgorithm::ThresholdA:
    case SweepAlgorithm::ThresholdB: return floor.r_min;
    case SweepAlgorithm::Theorem1: return sufficient_snr_m0(c.d, c.M);
    case SweepAlgorithm::Theorem2: return sufficient_snr_m_kl(c.d, c.K, c.L, c.M);
    case SweepAlgorithm::Theorem3a:
      return sufficient_snr(Algorithm::ThresholdSmall, c.d, c.K, c.L, c.M, c.encoding);
    case SweepAlgorithm::Theorem3b:
      return sufficient_snr(Algorithm::ThresholdMid, c.d, c.K, c.L, c.M, c.encoding);
    case SweepAlgorithm::Theorem3c:
      return sufficient_snr(Algorithm::ThresholdLarge, c.d, c.K, c.L, c.M, c.encoding);
  }
  return 1.0;
}

std::vector<ResultsRow> run_sweep(const SweepConfig& c) {
  validate(c);
  ThresholdFloor floor;
  if (std::any_of(c.algorithms.begin(), c.algorithms.end(), uses_threshold_floor)) {
    floor = threshold_floor(c.d, c.K, c.M, c.encoding);
  }
  const double r_necessary = necessary_snr(c.d, c.M);

  struct Point {
    SweepAlgorithm alg;
    double r;
    TunedParams params;
    double r_sufficient;
  };
  std::vector<Point> points;
  for (auto alg : c.algorithms) {
    const double r_suff = sufficient_snr_for(alg, c, floor);
    for (double r : c.r_grid) points.push_back({alg, r, tune_for_sweep(alg, c, r, floor), r_suff});
  }

  const auto trials = static_cast<std::size_t>(c.trials);
  const std::size_t tasks = points.size() * trials;
  std::vector<TrialResult> results(tasks);
  RunOptions options;
  options.noise_free = c.noise_free;
  options.selection = c.selection;
  options.record_trace = c.trace_path.has_value();
  options.machines_available = c.M;

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t k = next++; k < tasks; k = next++) {
        const Point& pt = points[k / trials];
        const auto t = static_cast<std::uint32_t>(k % trials);
        const SparseProblem problem =
            make_problem(c.d, c.K, pt.r, c.mu_profile, SeedSpec{c.master_seed, t, 0});
        TrialOutcome out = run_support_round(problem, pt.params, c.master_seed, t, options);
        results[k] = {out.exact_recovery, out.ledger.total_bits(), out.ledger.trace()};
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = tasks;
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(c.threads, static_cast<unsigned>(tasks)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultsRow> rows;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Point& pt = points[p];
    ResultsRow row;
    row.algorithm = to_string(pt.alg);
    row.d = c.d;
    row.M = c.M;
    row.K = c.K;
    row.L = pt.params.L;
    row.r = pt.r;
    row.m_eff = pt.params.m_eff;
    row.tau = pt.params.threshold;
    row.trials = c.trials;
    std::int64_t successes = 0;
    std::int64_t bit_sum = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      successes += results[p * trials + t].success ? 1 : 0;
      bit_sum += results[p * trials + t].bits;
    }
    const double n = static_cast<double>(trials);
    row.success_rate = static_cast<double>(successes) / n;
    row.mean_total_bits = static_cast<double>(bit_sum) / n;
    if (trials > 1) {
      double ss = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const double dev = static_cast<double>(results[p * trials + t].bits) - row.mean_total_bits;
        ss += dev * dev;
      }
      row.std_total_bits = std::sqrt(ss / (n - 1.0));
    }
    row.r_necessary = r_necessary;
    row.r_sufficient = pt.r_sufficient;
    row.feasible = pt.params.feasible;
    rows.push_back(std::move(row));
  }

  if (c.trace_path) {
    std::ofstream out(*c.trace_path);
    if (!out) throw std::runtime_error("cannot write trace file: " + *c.trace_path);
    for (std::size_t p = 0; p < points.size(); ++p) {
      for (std::size_t t = 0; t < trials; ++t) {
        out << "# algorithm=" << to_string(points[p].alg) << " r=" << format_double(points[p].r)
            << " trial=" << t << '\n';
        write_trace(out, results[p * trials + t].trace);
      }
    }
  }
  return rows;
}

std::string csv_header() {
  return "algorithm,d,M,K,L,r,m_eff,tau,trials,success_rate,mean_total_bits,"
         "std_total_bits,r_necessary,r_sufficient,feasible";
}

std::string format_csv_row(const ResultsRow& row) {
  std::ostringstream out;
  out << row.algorithm << ',' << row.d << ',' << row.M << ',' << row.K << ',';
  if (row.L) out << *row.L;
  out << ',' << format_double(row.r) << ',' << row.m_eff << ',';
  if (row.tau) out << format_double(*row.tau);
  out << ',' << row.trials << ',' << format_double(row.success_rate) << ','
      << format_double(row.mean_total_bits) << ',' << format_double(row.std_total_bits) << ','
      << format_double(row.r_necessary) << ',' << format_double(row.r_sufficient) << ','
      << (row.feasible ? "true" : "false");
  return out.str();
}

void emit_csv(const std::vector<ResultsRow>& rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  out << csv_header() << '\n';
  for (const auto& row : rows) out << format_csv_row(row) << '\n';
}

void emit_csv(const std::vector<ResultsRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv file: " + path);
  emit_csv(rows, out);
}

std::vector<ResultsRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) {
    throw std::invalid_argument("csv: missing or unexpected header");
  }
  std::vector<ResultsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 15) throw std::invalid_argument("csv: expected 15 fields");
    ResultsRow row;
    row.algorithm = f[0];
    row.d = parse_field<std::int64_t>(f[1]);
    row.M = parse_field<std::int64_t>(f[2]);
    row.K = parse_field<std::int64_t>(f[3]);
    if (!f[4].empty()) row.L = parse_field<std::int64_t>(f[4]);
    row.r = parse_field<double>(f[5]);
    row.m_eff = parse_field<std::int64_t>(f[6]);
    if (!f[7].empty()) row.tau = parse_field<double>(f[7]);
    row.trials = parse_field<std::int64_t>(f[8]);
    row.success_rate = parse_field<double>(f[9]);
    row.mean_total_bits = parse_field<double>(f[10]);
    row.std_total_bits = parse_field<double>(f[11]);
    row.r_necessary = parse_field<double>(f[12]);
    row.r_sufficient = parse_field<double>(f[13]);
    if (f[14] != "true" && f[14] != "false") throw std::invalid_argument("csv: bad feasible flag");
    row.feasible = f[14] == "true";
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_plot_script(const std::vector<ResultsRow>& rows, const std::string& csv_path,
                      std::ostream& out, const std::string& script_dir) {
  if (rows.empty()) throw std::invalid_argument("emit_plot_script: no rows");
  std::vector<std::string> algorithms;
  std::vector<double> r_sufficient;
  for (const auto& row : rows) {
    if (std::find(algorithms.begin(), algorithms.end(), row.algorithm) == algorithms.end()) {
      algorithms.push_back(row.algorithm);
      r_sufficient.push_back(row.r_sufficient);
    }
  }
  namespace fs = std::filesystem;
  const std::string data = fs::path(csv_path).lexically_relative(script_dir).generic_string();
  const std::string image = fs::path(data).replace_extension(".png").generic_string();
  const auto& first = rows.front();
  const std::size_t n_colors = std::size(kPalette);

  out << "# d=" << first.d << " M=" << first.M << " K=" << first.K << '\n'
      << "set datafile separator \",\"\n"
      << "set terminal png size 1200,480\n"
      << "set output \"" << image << "\"\n"
      << "set key top left\n"
      << "set xrange [0:1]\n"
      << "set xlabel \"r\"\n"
      << "set multiplot layout 1,2\n";

  // vertical lines: r_necessary solid black, r_sufficient dashed per algorithm
  out << "set arrow 1 from " << format_double(first.r_necessary) << ", graph 0 to "
      << format_double(first.r_necessary) << ", graph 1 nohead lw 2 lc rgb \"black\"\n";
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    out << "set arrow " << i + 2 << " from " << format_double(r_sufficient[i]) << ", graph 0 to "
        << format_double(r_sufficient[i]) << ", graph 1 nohead dt 2 lc rgb \""
        << kPalette[i % n_colors] << "\"\n";
  }

  auto plot = [&](int column) {
    out << "plot ";
    for (std::size_t i = 0; i < algorithms.size(); ++i) {
      if (i) out << ", \\\n     ";
      out << '"' << data << "\" every ::1 using 6:(strcol(1) eq \"" << algorithms[i]
          << "\" ? $" << column << " : NaN) with linespoints lc rgb \""
          << kPalette[i % n_colors] << "\" title \"" << algorithms[i] << '"';
    }
    out << '\n';
  };
  out << "set ylabel \"success rate\"\n"
      << "set yrange [0:1.05]\n";
  plot(10);
  out << "set ylabel \"total bits\"\n"
      << "set autoscale y\n"
      << "set logscale y\n";
  plot(11);
  out << "unset multiplot\n";
}

void emit_plot_script(const std::vector<ResultsRow>& rows, const std::string& csv_path,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot script: " + path);
  const auto dir = std::filesystem::path(path).parent_path();
  emit_plot_script(rows, csv_path, out, dir.empty() ? "." : dir.string());
}

std::vector<RegimeRow> regime_table(std::int64_t d, const std::vector<double>& r_grid) {
  std::vector<RegimeRow> rows;
  const double floor_line = std::pow(std::log(static_cast<double>(d)), -3.0);
  for (double r : r_grid) {
    if (!(r > 0.0)) throw std::invalid_argument("regime_table: r must be > 0");
    const MachineBound b = m0(d, r);
    RegimeRow row;
    row.r = r;
    row.inverse_r = 1.0 / r;
    row.log_cube_floor = floor_line;
    row.m0 = b.single_machine_regime ? 1 : b.machines;
    row.sublinear = row.m0 <= d;
    rows.push_back(row);
  }
  return rows;
}

void emit_regimes(const std::vector<RegimeRow>& rows, std::ostream& out) {
  out << "r,inverse_r,log_cube_floor,m0,sublinear\n";
  for (const auto& row : rows) {
    out << format_double(row.r) << ',' << format_double(row.inverse_r) << ','
        << format_double(row.log_cube_floor) << ',' << row.m0 << ','
        << (row.sublinear ? "true" : "false") << '\n';
  }
}

}  // namespace snm
