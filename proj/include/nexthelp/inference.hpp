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

#ifndef NEXTHELP_INFERENCE_HPP_
#define NEXTHELP_INFERENCE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "nexthelp/bbn_model.hpp"
#include "nexthelp/random.hpp"

namespace nexthelp {

// A partial assignment: variable index -> observed state index.
class Evidence {
 public:
  Evidence() = default;

  void observe(std::size_t variable, std::size_t state) {
    observed_[variable] = state;
  }
  std::optional<std::size_t> state_of(std::size_t variable) const {
    const auto it = observed_.find(variable);
    if (it == observed_.end()) return std::nullopt;
    return it->second;
  }
  bool empty() const { return observed_.empty(); }
  const std::map<std::size_t, std::size_t>& observations() const {
    return observed_;
  }

 private:
  std::map<std::size_t, std::size_t> observed_;
};

// Builds evidence from (variable name, state token) pairs.
Evidence make_evidence(
    const Network& network,
    std::span<const std::pair<std::string_view, std::string_view>> observed);

struct Posterior {
  std::size_t variable = 0;
  std::vector<double> probabilities;
};

// Product of each variable's table entry under a complete assignment.
double joint_probability(const Network& network,
                         std::span<const std::size_t> assignment);

// P(query | evidence) by summing the joint over every completion of the
// evidence. Exponential in the number of unobserved variables.
Posterior posterior_exact(const Network& network, const Evidence& evidence,
                          std::size_t query);

// Likelihood weighting: unobserved variables are drawn in topological order,
// each sample weighted by the table probabilities of the observed values.
Posterior posterior_lw(const Network& network, const Evidence& evidence,
                       std::size_t query, std::size_t samples,
                       std::uint64_t seed);

// Draws a state index from a distribution.
std::size_t sample_categorical(std::span<const double> probabilities, Rng& rng);

// Ancestral sampling of complete assignments.
std::vector<Assignment> forward_sample(const Network& network,
                                       std::size_t count, Rng& rng);

struct NextActionPrediction {
  Posterior posterior;  // over the Naction states
  bool fallback = false;
};

// Distribution of Naction given Caction = current. When Naction's only
// parent is Caction the table row is returned directly. No current action,
// or a token that is not a Caction state, yields the Naction marginal with
// fallback set.
NextActionPrediction predict_next(const Network& network,
                                  std::optional<std::string_view> current);

}  // namespace nexthelp

#endif  // NEXTHELP_INFERENCE_HPP_
