// Copyright 2026 The nexthelp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nexthelp/scoring.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "nexthelp/error.hpp"

namespace nexthelp {
namespace {

constexpr double kStirlingThreshold = 15.0;

// Stirling series for ln Γ(z), z >= kStirlingThreshold. Coefficients are
// B_2n / (2n (2n - 1)).
double stirling_log_gamma(double z) {
  constexpr double kHalfLogTwoPi = 0.91893853320467274178;
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 +
                                                     inv2 * (1.0 / 156.0)))))));
  return (z - 0.5) * std::log(z) - z + kHalfLogTwoPi + series;
}

void check_ess(double ess) {
  if (!(ess > 0.0) || !std::isfinite(ess)) {
    throw Error(ErrorKind::kInvalidArgument, "ess must be positive");
  }
}

class FamilyScoreCache {
 public:
  FamilyScoreCache(const Dataset& data, double ess) : data_(data), ess_(ess) {}

  double family(std::size_t child, const std::vector<std::size_t>& parents) {
    auto key = std::make_pair(child, parents);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double s = family_log_score(
        tally_family(data_.variables, child, parents, data_.instances), ess_);
    cache_.emplace(std::move(key), s);
    return s;
  }

  double total(const Dag& dag) {
    double s = 0.0;
    for (std::size_t i = 0; i < dag.size(); ++i) {
      const auto ps = dag.parents(i);
      s += family(i, {ps.begin(), ps.end()});
    }
    return s;
  }

 private:
  const Dataset& data_;
  double ess_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, double> cache_;
};

// Picks the best of a scored candidate list: highest score, with scores
// within kScoreTieTolerance of the maximum resolved by simpler_structure.
std::size_t pick_best(const std::vector<Dag>& dags,
                      const std::vector<double>& scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  std::size_t best = dags.size();
  for (std::size_t m = 0; m < dags.size(); ++m) {
    if (scores[m] < top - kScoreTieTolerance) continue;
    if (best == dags.size() || simpler_structure(dags[m], dags[best])) best = m;
  }
  return best;
}

ScoredModel greedy_search(const Dataset& data, const SearchOptions& options) {
  FamilyScoreCache cache(data, options.ess);
  const std::size_t n = data.variables.size();
  Dag current = Dag::empty(data.variables);
  double current_score = cache.total(current);

  auto with_parents = [&](std::vector<std::vector<std::size_t>> parents)
      -> std::optional<Dag> {
    for (auto& ps : parents) {
      if (ps.size() > options.max_parents) return std::nullopt;
      std::sort(ps.begin(), ps.end());
    }
    if (!topological_sort(parents)) return std::nullopt;
    return Dag(data.variables, std::move(parents));
  };

  while (true) {
    std::vector<Dag> neighbours;
    const auto& base = current.parent_lists();
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t p = 0; p < n; ++p) {
        if (p == c) continue;
        const bool has = std::find(base[c].begin(), base[c].end(), p) != base[c].end();
        const bool has_reverse =
            std::find(base[p].begin(), base[p].end(), c) != base[p].end();
        if (has) {
          auto removed = base;
          std::erase(removed[c], p);
          if (auto d = with_parents(removed)) neighbours.push_back(std::move(*d));
          auto reversed = removed;
          reversed[p].push_back(c);
          if (auto d = with_parents(reversed)) neighbours.push_back(std::move(*d));
        } else if (!has_reverse) {
          auto added = base;
          added[c].push_back(p);
          if (auto d = with_parents(added)) neighbours.push_back(std::move(*d));
        }
      }
    }
    if (neighbours.empty()) break;
    std::vector<double> scores;
    scores.reserve(neighbours.size());
    for (const auto& d : neighbours) scores.push_back(cache.total(d));
    const std::size_t best = pick_best(neighbours, scores);
    if (scores[best] <= current_score + kScoreTieTolerance) break;
    current = std::move(neighbours[best]);
    current_score = scores[best];
  }
  return {std::move(current), current_score};
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "log_gamma needs a positive argument");
  }
  if (std::isinf(x)) return x;
  if (x >= kStirlingThreshold) return stirling_log_gamma(x);
  // Γ(x) = Γ(x + m) / (x (x+1) ... (x+m-1)) with x + m >= threshold.
  double product = 1.0;
  double z = x;
  while (z < kStirlingThreshold) {
    product *= z;
    z += 1.0;
  }
  return stirling_log_gamma(z) - std::log(product);
}

double family_log_score(const FamilyCounts& counts, double ess) {
  check_ess(ess);
  const double q = static_cast<double>(counts.configs());
  const double r = static_cast<double>(counts.states());
  const double row_prior = ess / q;
  const double cell_prior = ess / (r * q);
  const double log_gamma_row = log_gamma(row_prior);
  const double log_gamma_cell = log_gamma(cell_prior);
  double score = 0.0;
  for (std::size_t j = 0; j < counts.configs(); ++j) {
    const std::uint64_t n_ij = counts.row_total(j);
    if (n_ij == 0) continue;  // the row contributes a factor of exactly 1
    score += log_gamma_row - log_gamma(row_prior + static_cast<double>(n_ij));
    for (std::size_t k = 0; k < counts.states(); ++k) {
      const std::uint64_t n_ijk = counts.at(j, k);
      if (n_ijk == 0) continue;
      score += log_gamma(cell_prior + static_cast<double>(n_ijk)) - log_gamma_cell;
    }
  }
  return score;
}

double log_marginal_likelihood(const Dag& dag, const CountTable& counts,
                               double ess) {
  check_ess(ess);
  if (counts.families.size() != dag.size()) {
    throw Error(ErrorKind::kInvalidArgument, "count table does not match graph");
  }
  double score = 0.0;
  for (std::size_t i = 0; i < dag.size(); ++i) {
    const auto& f = counts.families[i];
    if (f.configs() != dag.parent_config_count(i) ||
        f.states() != dag.variable(i).cardinality()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "counts for '" + dag.variable(i).name + "' have the wrong shape");
    }
    score += family_log_score(f, ess);
  }
  return score;
}

double model_log_ratio(const Dag& first, const Dag& second,
                       std::span<const Assignment> instances, double ess) {
  if (first.variables() != second.variables()) {
    throw Error(ErrorKind::kInvalidArgument,
                "models are defined over different variables");
  }
  check_ess(ess);
  return log_marginal_likelihood(first, tally_counts(instances, first), ess) -
         log_marginal_likelihood(second, tally_counts(instances, second), ess);
}

std::vector<Dag> enumerate_dags(const std::vector<Variable>& variables,
                                std::size_t max_parents) {
  const std::size_t n = variables.size();
  if (n > kMaxExhaustiveVariables) {
    throw Error(ErrorKind::kInvalidArgument,
                std::to_string(n) + " variables is too many for exhaustive "
                "enumeration (limit " + std::to_string(kMaxExhaustiveVariables) +
                "); use greedy search");
  }
  // Candidate parent sets per node, by increasing bitmask.
  std::vector<std::vector<std::vector<std::size_t>>> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (mask & (1u << i)) continue;
      if (static_cast<std::size_t>(std::popcount(mask)) > max_parents) continue;
      std::vector<std::size_t> ps;
      for (std::size_t p = 0; p < n; ++p) {
        if (mask & (1u << p)) ps.push_back(p);
      }
      options[i].push_back(std::move(ps));
    }
  }
  std::vector<Dag> out;
  std::vector<std::size_t> pick(n, 0);
  while (true) {
    std::vector<std::vector<std::size_t>> parents(n);
    for (std::size_t i = 0; i < n; ++i) parents[i] = options[i][pick[i]];
    if (topological_sort(parents)) out.emplace_back(variables, std::move(parents));
    // Odometer increment, last node fastest.
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++pick[i] < options[i].size()) break;
      pick[i] = 0;
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

bool simpler_structure(const Dag& a, const Dag& b) {
  const std::size_t ea = a.edge_count();
  const std::size_t eb = b.edge_count();
  if (ea != eb) return ea < eb;
  return a.edges() < b.edges();
}

ScoredModel select_best_structure(const Dataset& data,
                                  const SearchOptions& options) {
  if (data.instances.empty()) {
    throw Error(ErrorKind::kData, "cannot select a structure from no data");
  }
  check_ess(options.ess);
  if (options.mode == SearchMode::kGreedy) return greedy_search(data, options);

  const auto dags = enumerate_dags(data.variables, options.max_parents);
  FamilyScoreCache cache(data, options.ess);
  std::vector<double> scores;
  scores.reserve(dags.size());
  for (const auto& d : dags) scores.push_back(cache.total(d));
  const std::size_t best = pick_best(dags, scores);
  return {dags[best], scores[best]};
}

}  // namespace nexthelp
