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

#ifndef NEXTHELP_SCORING_HPP_
#define NEXTHELP_SCORING_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "nexthelp/bbn_model.hpp"

namespace nexthelp {

// ln Γ(x) for x > 0. Shifts small arguments up with Γ(x+1) = xΓ(x) and
// evaluates the Stirling series; relative error stays below 1e-13 for
// x >= 0.25.
double log_gamma(double x);

// Log marginal likelihood of one family (a q x r count matrix):
//   Σ_j [lnΓ(ess/q) - lnΓ(ess/q + N_ij)
//        + Σ_k (lnΓ(ess/(r q) + N_ijk) - lnΓ(ess/(r q)))]
double family_log_score(const FamilyCounts& counts, double ess);

// ln P(D|M): the sum of family scores. Zero for an empty dataset.
double log_marginal_likelihood(const Dag& dag, const CountTable& counts,
                               double ess);

// ln P(D|M1) - ln P(D|M2) under equal structure priors. Positive favours M1.
double model_log_ratio(const Dag& first, const Dag& second,
                       std::span<const Assignment> instances, double ess);

struct ScoredModel {
  Dag dag;
  double log_score = 0.0;
};

// Structures compare as equal when their scores differ by at most this much.
inline constexpr double kScoreTieTolerance = 1e-9;

inline constexpr std::size_t kMaxExhaustiveVariables = 4;

// Every labeled DAG over the variables whose nodes have at most max_parents
// parents. Order is deterministic: node 0's parent set varies slowest, and
// parent sets are ordered by bitmask.
std::vector<Dag> enumerate_dags(const std::vector<Variable>& variables,
                                std::size_t max_parents);

enum class SearchMode { kExhaustive, kGreedy };

struct SearchOptions {
  SearchMode mode = SearchMode::kExhaustive;
  std::size_t max_parents = 2;
  double ess = 1.0;
};

// True when `a` is preferred to `b` among equal scores: fewer edges first,
// then the lexicographically smaller sorted edge list.
bool simpler_structure(const Dag& a, const Dag& b);

// Exhaustive: argmax over enumerate_dags. Greedy: hill climbing from the
// empty graph over single-edge add/remove/reverse moves.
ScoredModel select_best_structure(const Dataset& data,
                                  const SearchOptions& options);

}  // namespace nexthelp

#endif  // NEXTHELP_SCORING_HPP_
