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

#ifndef NEXTHELP_BBN_MODEL_HPP_
#define NEXTHELP_BBN_MODEL_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nexthelp/event_log.hpp"

namespace nexthelp {

// A discrete variable. State order is significant: it fixes table layout.
struct Variable {
  std::string name;
  std::vector<std::string> states;

  std::size_t cardinality() const { return states.size(); }
  std::optional<std::size_t> state_index(std::string_view token) const;

  bool operator==(const Variable&) const = default;
};

struct Edge {
  std::size_t parent;
  std::size_t child;

  auto operator<=>(const Edge&) const = default;
};

// Variables plus, per variable, an ordered parent list. Construction checks
// acyclicity and parent-list hygiene.
class Dag {
 public:
  Dag(std::vector<Variable> variables,
      std::vector<std::vector<std::size_t>> parents);

  // All variables, no edges.
  static Dag empty(std::vector<Variable> variables);

  std::size_t size() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(std::size_t i) const { return variables_.at(i); }
  std::span<const std::size_t> parents(std::size_t i) const {
    return parents_.at(i);
  }
  const std::vector<std::vector<std::size_t>>& parent_lists() const {
    return parents_;
  }
  std::optional<std::size_t> index_of(std::string_view name) const;

  // q_i: product of parent cardinalities, 1 for a root.
  std::size_t parent_config_count(std::size_t i) const;

  const std::vector<std::size_t>& topological_order() const { return order_; }

  // Edges sorted by (parent, child).
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  bool operator==(const Dag& other) const {
    return variables_ == other.variables_ && parents_ == other.parents_;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::size_t> order_;
};

// Returns a topological order, or nullopt when the parent lists hold a cycle.
std::optional<std::vector<std::size_t>> topological_sort(
    const std::vector<std::vector<std::size_t>>& parents);

// One state index per variable.
using Assignment = std::vector<std::size_t>;

// Mixed-radix row index of a parent configuration, last parent fastest.
// parent_states lists one state per parent, in parent order.
std::size_t parent_config_index(const Dag& dag, std::size_t variable,
                                std::span<const std::size_t> parent_states);

// Same, reading the parent states out of a full assignment. Unchecked.
std::size_t parent_config_of(const Dag& dag, std::size_t variable,
                             std::span<const std::size_t> assignment);

struct Dataset {
  std::vector<Variable> variables;
  std::vector<Assignment> instances;
};

// Encodes token rows (one token per variable) into state indices.
Dataset encode_dataset(std::vector<Variable> variables,
                       std::span<const std::vector<std::string>> rows);

// N_ijk for one variable: a q x r matrix of counts.
class FamilyCounts {
 public:
  FamilyCounts(std::size_t configs, std::size_t states)
      : configs_(configs), states_(states), counts_(configs * states, 0) {}

  std::size_t configs() const { return configs_; }
  std::size_t states() const { return states_; }
  std::uint64_t at(std::size_t j, std::size_t k) const {
    return counts_[j * states_ + k];
  }
  std::uint64_t& at(std::size_t j, std::size_t k) {
    return counts_[j * states_ + k];
  }
  std::uint64_t row_total(std::size_t j) const;
  std::uint64_t total() const;

 private:
  std::size_t configs_;
  std::size_t states_;
  std::vector<std::uint64_t> counts_;
};

struct CountTable {
  std::vector<FamilyCounts> families;
  std::size_t dataset_size = 0;
};

// Counts for `child` under an arbitrary parent list (scoring uses this to
// evaluate candidate families without building a Dag).
FamilyCounts tally_family(const std::vector<Variable>& variables,
                          std::size_t child,
                          std::span<const std::size_t> parents,
                          std::span<const Assignment> instances);

CountTable tally_counts(std::span<const Assignment> instances, const Dag& dag);

// P(state | parent configuration), one row per configuration.
class Cpt {
 public:
  // Rows must each be a distribution (entries in [0,1], sum within 1e-9).
  Cpt(std::size_t configs, std::size_t states, std::vector<double> probs);

  std::size_t configs() const { return configs_; }
  std::size_t states() const { return states_; }
  double at(std::size_t j, std::size_t k) const {
    return probs_[j * states_ + k];
  }
  std::span<const double> row(std::size_t j) const {
    return {probs_.data() + j * states_, states_};
  }
  const std::vector<double>& values() const { return probs_; }

 private:
  std::size_t configs_;
  std::size_t states_;
  std::vector<double> probs_;
};

// Strength of the Dirichlet prior, shared by parameter estimation and the
// structure score.
struct PriorConfig {
  double ess = 1.0;
};

// Posterior mean: (N_ijk + ess/(r q)) / (N_ij + ess/q).
Cpt estimate_cpt(const FamilyCounts& counts, PriorConfig prior);
std::vector<Cpt> estimate_cpts(const CountTable& counts, PriorConfig prior);

class Network {
 public:
  Network(std::string name, Dag dag, std::vector<Cpt> cpts);

  const std::string& name() const { return name_; }
  const Dag& dag() const { return dag_; }
  std::size_t size() const { return dag_.size(); }
  const Variable& variable(std::size_t i) const { return dag_.variable(i); }
  const Cpt& cpt(std::size_t i) const { return cpts_.at(i); }
  const std::vector<Cpt>& cpts() const { return cpts_; }

 private:
  std::string name_;
  Dag dag_;
  std::vector<Cpt> cpts_;
};

// Tally + estimate in one go.
Network fit_network(std::string name, const Dag& dag,
                    std::span<const Assignment> instances, PriorConfig prior);

// Columns of a transition record that can become model variables.
enum class Field {
  kPaction,
  kPprop,
  kCaction,
  kCprop,
  kNaction,
  kNprop,
  kCpTimeBin,
};

using FieldSelection = std::vector<Field>;

// {paction, caction, naction}.
FieldSelection default_field_selection();

// Variable name a field becomes ("Paction", "Caction", "CPTime_d", ...).
std::string_view field_variable_name(Field field);
// Field from its lower-case key ("paction", "cptime_bin", ...).
std::optional<Field> parse_field(std::string_view key);
// Comma-separated list of keys.
FieldSelection parse_field_list(std::string_view list);

// Discretizes a current-previous delta: <=5, <=15, <=60, >60 seconds.
std::string_view cp_time_bin(std::int64_t delta_s);

// One categorical variable per selected field (in canonical field order),
// states sorted lexicographically over the observed values. An absent
// property becomes the "-" state.
Dataset records_to_instances(std::span<const TransitionRecord> records,
                             const FieldSelection& fields);

// Names used by the next-action model.
inline constexpr std::string_view kPreviousAction = "Paction";
inline constexpr std::string_view kCurrentAction = "Caction";
inline constexpr std::string_view kNextAction = "Naction";

// Paction -> Caction -> Naction over the given variables; any other
// variable stays parentless. Caction and Naction must be present.
Dag chain_dag(std::vector<Variable> variables);

}  // namespace nexthelp

#endif  // NEXTHELP_BBN_MODEL_HPP_
