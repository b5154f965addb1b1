#include "snm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>

namespace snm {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError("config: bad value for " + key + ": '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + text + "'");
}

}  // namespace

std::string to_string(SweepAlgorithm alg) {
  switch (alg) {
    case SweepAlgorithm::TopK: return "top-k";
    case SweepAlgorithm::TopL: return "top-l";
    case SweepAlgorithm::ThresholdA: return "threshold-a";
    case SweepAlgorithm::ThresholdB: return "threshold-b";
    case SweepAlgorithm::Theorem1: return "theorem-1";
    case SweepAlgorithm::Theorem2: return "theorem-2";
    case SweepAlgorithm::Theorem3a: return "theorem-3a";
    case SweepAlgorithm::Theorem3b: return "theorem-3b";
    case SweepAlgorithm::Theorem3c: return "theorem-3c";
  }
  return "unknown";
}

SweepAlgorithm parse_sweep_algorithm(const std::string& text) {
  static const std::map<std::string, SweepAlgorithm> names = {
      {"top-k", SweepAlgorithm::TopK},           {"top-l", SweepAlgorithm::TopL},
      {"threshold-a", SweepAlgorithm::ThresholdA}, {"threshold-b", SweepAlgorithm::ThresholdB},
      {"theorem-1", SweepAlgorithm::Theorem1},   {"theorem-2", SweepAlgorithm::Theorem2},
      {"theorem-3a", SweepAlgorithm::Theorem3a}, {"theorem-3b", SweepAlgorithm::Theorem3b},
      {"theorem-3c", SweepAlgorithm::Theorem3c},
  };
  const auto it = names.find(text);
  if (it == names.end()) throw ConfigError("unknown algorithm: " + text);
  return it->second;
}

std::vector<double> even_r_grid(int n) {
  if (n < 1) throw ConfigError("r grid needs at least one point");
  std::vector<double> grid;
  for (int i = 1; i <= n; ++i) grid.push_back(static_cast<double>(i) / n);
  return grid;
}

void validate(const SweepConfig& c) {
  if (c.algorithms.empty()) throw ConfigError("config: no algorithms");
  if (c.K < 1 || c.d <= 2 * c.K) throw ConfigError("config: requires K >= 1 and d > 2K");
  if (c.M < 1) throw ConfigError("config: requires M >= 1");
  if (c.trials < 1) throw ConfigError("config: requires trials >= 1");
  if (c.trials > 0xffffffffLL) throw ConfigError("config: too many trials");
  if (c.threads < 1) throw ConfigError("config: requires threads >= 1");
  if (c.r_grid.empty()) throw ConfigError("config: empty r grid");
  for (double r : c.r_grid) {
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("config: r grid values must lie in (0, 1]");
  }
  const bool needs_l = std::any_of(c.algorithms.begin(), c.algorithms.end(), [](auto a) {
    return a == SweepAlgorithm::TopL || a == SweepAlgorithm::Theorem2;
  });
  if (needs_l && !(c.L >= c.K && 2 * c.L < c.d - c.K)) {
    throw ConfigError("config: Top-L needs K <= L < (d - K) / 2");
  }
  const bool needs_top_k = std::find(c.algorithms.begin(), c.algorithms.end(),
                                     SweepAlgorithm::TopK) != c.algorithms.end();
  if (needs_top_k && !(2 * c.K < c.d - c.K)) throw ConfigError("config: Top-K needs K < (d - K) / 2");
  if (std::find(c.algorithms.begin(), c.algorithms.end(), SweepAlgorithm::Theorem1) !=
          c.algorithms.end() &&
      c.K != 1) {
    throw ConfigError("config: theorem-1 needs K = 1");
  }
  if (const auto* u = std::get_if<UniformProfile>(&c.mu_profile)) {
    for (double r : c.r_grid) {
      if (u->hi < mu_min(c.d, c.K, r)) throw ConfigError("config: uniform bound below mu_min");
    }
  }
}

SweepConfig parse_config(std::istream& in) {
  SweepConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "algorithms") {
        c.algorithms.clear();
        for (const auto& name : split(value, ',')) c.algorithms.push_back(parse_sweep_algorithm(name));
      } else if (key == "d") {
        c.d = parse_number<std::int64_t>(key, value);
      } else if (key == "M") {
        c.M = parse_number<std::int64_t>(key, value);
      } else if (key == "K") {
        c.K = parse_number<std::int64_t>(key, value);
      } else if (key == "L") {
        c.L = parse_number<std::int64_t>(key, value);
      } else if (key == "r_grid") {
        c.r_grid.clear();
        for (const auto& r : split(value, ',')) c.r_grid.push_back(parse_number<double>(key, r));
      } else if (key == "r_steps") {
        c.r_grid = even_r_grid(parse_number<int>(key, value));
      } else if (key == "trials") {
        c.trials = parse_number<std::int64_t>(key, value);
      } else if (key == "seed") {
        c.master_seed = parse_number<std::uint64_t>(key, value);
      } else if (key == "mu_profile") {
        c.mu_profile = parse_mu_profile(value);
      } else if (key == "encoding") {
        c.encoding = parse_threshold_encoding(value);
      } else if (key == "selection") {
        if (value == "top-k") {
          c.selection = Selection::TopK;
        } else if (value == "vote-threshold") {
          c.selection = Selection::VoteThreshold;
        } else {
          throw ConfigError("config: selection must be top-k or vote-threshold");
        }
      } else if (key == "noise_free") {
        c.noise_free = parse_bool(key, value);
      } else if (key == "threads") {
        c.threads = parse_number<unsigned>(key, value);
      } else if (key == "csv") {
        c.csv_path = value;
      } else if (key == "plot") {
        c.plot_path = value;
      } else if (key == "trace") {
        c.trace_path = value;
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (c.r_grid.empty()) c.r_grid = even_r_grid(40);
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace snm
