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

#include "nexthelp/inference.hpp"

#include <string>

#include "nexthelp/error.hpp"

namespace nexthelp {
namespace {

constexpr std::size_t kMaxEnumeration = std::size_t{1} << 26;

void validate_evidence(const Network& network, const Evidence& evidence) {
  for (const auto& [var, state] : evidence.observations()) {
    if (var >= network.size()) {
      throw Error(ErrorKind::kInvalidArgument, "evidence on unknown variable");
    }
    if (state >= network.variable(var).cardinality()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "evidence state out of range for '" +
                      network.variable(var).name + "'");
    }
  }
}

void validate_query(const Network& network, const Evidence& evidence,
                    std::size_t query) {
  if (query >= network.size()) {
    throw Error(ErrorKind::kInvalidArgument, "query variable out of range");
  }
  if (evidence.state_of(query)) {
    throw Error(ErrorKind::kInvalidArgument,
                "query variable '" + network.variable(query).name +
                    "' is observed");
  }
  validate_evidence(network, evidence);
}

Posterior normalized(std::size_t query, std::vector<double> mass,
                     const char* empty_message) {
  double total = 0.0;
  for (double m : mass) total += m;
  if (!(total > 0.0)) throw Error(ErrorKind::kInference, empty_message);
  for (double& m : mass) m /= total;
  return {query, std::move(mass)};
}

std::optional<std::size_t> find(const Network& network, std::string_view name) {
  return network.dag().index_of(name);
}

}  // namespace

Evidence make_evidence(
    const Network& network,
    std::span<const std::pair<std::string_view, std::string_view>> observed) {
  Evidence evidence;
  for (const auto& [name, token] : observed) {
    const auto var = find(network, name);
    if (!var) {
      throw Error(ErrorKind::kInvalidArgument,
                  "unknown variable '" + std::string(name) + "'");
    }
    const auto state = network.variable(*var).state_index(token);
    if (!state) {
      throw Error(ErrorKind::kInvalidArgument,
                  "unknown state '" + std::string(token) + "' for '" +
                      std::string(name) + "'");
    }
    evidence.observe(*var, *state);
  }
  return evidence;
}

double joint_probability(const Network& network,
                         std::span<const std::size_t> assignment) {
  if (assignment.size() != network.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "assignment must cover every variable");
  }
  const Dag& dag = network.dag();
  double p = 1.0;
  for (std::size_t i = 0; i < network.size(); ++i) {
    if (assignment[i] >= network.variable(i).cardinality()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "state out of range for '" + network.variable(i).name + "'");
    }
    p *= network.cpt(i).at(parent_config_of(dag, i, assignment), assignment[i]);
    if (p == 0.0) return 0.0;
  }
  return p;
}

Posterior posterior_exact(const Network& network, const Evidence& evidence,
                          std::size_t query) {
  validate_query(network, evidence, query);
  const std::size_t n = network.size();
  std::vector<std::size_t> free;
  std::size_t completions = 1;
  Assignment a(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (const auto s = evidence.state_of(i)) {
      a[i] = *s;
    } else {
      free.push_back(i);
      completions *= network.variable(i).cardinality();
      if (completions > kMaxEnumeration) {
        throw Error(ErrorKind::kInvalidArgument,
                    "network too large for exact enumeration");
      }
    }
  }
  std::vector<double> mass(network.variable(query).cardinality(), 0.0);
  for (std::size_t c = 0; c < completions; ++c) {
    mass[a[query]] += joint_probability(network, a);
    for (auto v : free) {
      if (++a[v] < network.variable(v).cardinality()) break;
      a[v] = 0;
    }
  }
  return normalized(query, std::move(mass), "inconsistent evidence");
}

std::size_t sample_categorical(std::span<const double> probabilities, Rng& rng) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= 0.0) continue;
    cumulative += probabilities[k];
    last_positive = k;
    if (u < cumulative) return k;
  }
  return last_positive;  // rounding left u above the final cumulative sum
}

std::vector<Assignment> forward_sample(const Network& network,
                                       std::size_t count, Rng& rng) {
  const Dag& dag = network.dag();
  std::vector<Assignment> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Assignment a(network.size(), 0);
    for (auto i : dag.topological_order()) {
      a[i] = sample_categorical(network.cpt(i).row(parent_config_of(dag, i, a)), rng);
    }
    out.push_back(std::move(a));
  }
  return out;
}

Posterior posterior_lw(const Network& network, const Evidence& evidence,
                       std::size_t query, std::size_t samples,
                       std::uint64_t seed) {
  validate_query(network, evidence, query);
  if (samples == 0) {
    throw Error(ErrorKind::kInvalidArgument, "need at least one sample");
  }
  const Dag& dag = network.dag();
  Rng rng(seed);
  std::vector<double> mass(network.variable(query).cardinality(), 0.0);
  Assignment a(network.size(), 0);
  for (std::size_t s = 0; s < samples; ++s) {
    double weight = 1.0;
    for (auto i : dag.topological_order()) {
      const auto row = network.cpt(i).row(parent_config_of(dag, i, a));
      if (const auto observed = evidence.state_of(i)) {
        a[i] = *observed;
        weight *= row[*observed];
      } else {
        a[i] = sample_categorical(row, rng);
      }
    }
    mass[a[query]] += weight;
  }
  return normalized(query, std::move(mass), "no support found for the evidence");
}

NextActionPrediction predict_next(const Network& network,
                                  std::optional<std::string_view> current) {
  const auto cur = find(network, kCurrentAction);
  const auto next = find(network, kNextAction);
  if (!cur || !next) {
    throw Error(ErrorKind::kInvalidArgument,
                "network lacks the Caction and Naction variables");
  }
  std::optional<std::size_t> state;
  if (current) state = network.variable(*cur).state_index(*current);
  if (!state) return {posterior_exact(network, Evidence{}, *next), true};

  const auto parents = network.dag().parents(*next);
  if (parents.size() == 1 && parents[0] == *cur) {
    const auto row = network.cpt(*next).row(*state);
    return {{*next, {row.begin(), row.end()}}, false};
  }
  Evidence evidence;
  evidence.observe(*cur, *state);
  return {posterior_exact(network, evidence, *next), false};
}

}  // namespace nexthelp
