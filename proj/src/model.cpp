#include "snm/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace snm {

double mu_min(std::int64_t d, std::int64_t K, double r) {
  if (K < 1 || d <= K || d - K < 2) {
    throw std::invalid_argument("mu_min: requires d > K >= 1 and d - K >= 2");
  }
  if (!(r >= 0.0)) throw std::invalid_argument("mu_min: requires r >= 0");
  return std::sqrt(2.0 * r * std::log(static_cast<double>(d - K)));
}

std::string to_string(const MuProfile& profile) {
  if (const auto* u = std::get_if<UniformProfile>(&profile)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "uniform:%.17g", u->hi);
    return buf;
  }
  return "minimal";
}

MuProfile parse_mu_profile(const std::string& text) {
  if (text == "minimal") return MinimalProfile{};
  const std::string prefix = "uniform:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string rest = text.substr(prefix.size());
    std::size_t used = 0;
    double hi = 0.0;
    try {
      hi = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) {
      throw std::invalid_argument("bad uniform profile bound: " + rest);
    }
    return UniformProfile{hi};
  }
  throw std::invalid_argument("unknown mu profile: " + text);
}

double SparseProblem::mu_max() const {
  return mu_.empty() ? 0.0 : *std::max_element(mu_.begin(), mu_.end());
}

SparseProblem SparseProblem::from_mean(std::vector<double> mu, double r) {
  std::vector<Index> support;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (!(mu[j] >= 0.0) || !std::isfinite(mu[j])) {
      throw std::invalid_argument("from_mean: entries must be finite and >= 0");
    }
    if (mu[j] > 0.0) support.push_back(static_cast<Index>(j));
  }
  return SparseProblem(std::move(mu), std::move(support), r);
}

SparseProblem make_problem(std::int64_t d, std::int64_t K, double r,
                           const MuProfile& profile,
                           const Placement& placement) {
  if (K < 1 || d <= 2 * K) {
    throw std::invalid_argument("make_problem: requires K >= 1 and d > 2K");
  }
  if (!(r > 0.0)) throw std::invalid_argument("make_problem: requires r > 0");
  const double floor_value = mu_min(d, K, r);

  std::vector<Index> support;
  PhiloxEngine engine(std::holds_alternative<SeedSpec>(placement)
                          ? std::get<SeedSpec>(placement)
                          : SeedSpec{});
  if (const auto* fixed = std::get_if<std::vector<Index>>(&placement)) {
    support = *fixed;
    if (static_cast<std::int64_t>(support.size()) != K) {
      throw std::invalid_argument("make_problem: support list must have K entries");
    }
    std::sort(support.begin(), support.end());
    if (std::adjacent_find(support.begin(), support.end()) != support.end()) {
      throw std::invalid_argument("make_problem: duplicate support index");
    }
    if (support.front() < 0 || support.back() >= d) {
      throw std::invalid_argument("make_problem: support index out of range");
    }
  } else {
    // Partial Fisher-Yates over a sparse swap map keeps this O(K).
    std::vector<std::pair<Index, Index>> swapped;
    auto lookup = [&](Index i) {
      for (const auto& [from, to] : swapped) {
        if (from == i) return to;
      }
      return i;
    };
    for (std::int64_t i = 0; i < K; ++i) {
      boost::random::uniform_int_distribution<std::int64_t> pick(i, d - 1);
      const auto j = static_cast<Index>(pick(engine));
      const Index vi = lookup(static_cast<Index>(i));
      const Index vj = lookup(j);
      support.push_back(vj);
      std::erase_if(swapped, [&](const auto& p) { return p.first == j; });
      swapped.emplace_back(j, vi);
    }
    std::sort(support.begin(), support.end());
  }

  std::vector<double> mu(static_cast<std::size_t>(d), 0.0);
  if (const auto* u = std::get_if<UniformProfile>(&profile)) {
    if (!(u->hi >= floor_value)) {
      throw std::invalid_argument("make_problem: uniform upper bound below mu_min");
    }
    boost::random::uniform_real_distribution<double> value(floor_value, u->hi);
    for (Index j : support) {
      mu[static_cast<std::size_t>(j)] = u->hi == floor_value ? floor_value : value(engine);
    }
  } else {
    for (Index j : support) mu[static_cast<std::size_t>(j)] = floor_value;
  }
  return SparseProblem::from_mean(std::move(mu), r);
}

void fill_observation(const SparseProblem& problem, const SeedSpec& seed,
                      std::span<double> out, bool noise_free) {
  const auto mu = problem.mu();
  if (out.size() != mu.size()) {
    throw std::invalid_argument("fill_observation: output size mismatch");
  }
  if (noise_free) {
    std::copy(mu.begin(), mu.end(), out.begin());
    return;
  }
  PhiloxEngine engine(seed);
  boost::random::normal_distribution<double> normal;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = mu[j] + normal(engine);
}

Sample sample_machine(const SparseProblem& problem, const SeedSpec& seed) {
  Sample s;
  s.machine_id = seed.machine_id;
  s.values.resize(static_cast<std::size_t>(problem.d()));
  fill_observation(problem, seed, s.values);
  return s;
}

}  // namespace snm
