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

#include "nexthelp/bbn_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "nexthelp/error.hpp"

namespace nexthelp {
namespace {

constexpr double kRowSumTolerance = 1e-9;

void validate_variables(const std::vector<Variable>& variables) {
  std::set<std::string_view> names;
  for (const auto& v : variables) {
    if (v.name.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "variable with empty name");
    }
    if (!names.insert(v.name).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  "duplicate variable name '" + v.name + "'");
    }
    if (v.states.empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "variable '" + v.name + "' has no states");
    }
    std::set<std::string_view> seen;
    for (const auto& s : v.states) {
      if (!seen.insert(s).second) {
        throw Error(ErrorKind::kInvalidArgument,
                    "variable '" + v.name + "' repeats state '" + s + "'");
      }
    }
  }
}

}  // namespace

std::optional<std::size_t> Variable::state_index(std::string_view token) const {
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k] == token) return k;
  }
  return std::nullopt;
}

std::optional<std::vector<std::size_t>> topological_sort(
    const std::vector<std::vector<std::size_t>>& parents) {
  const std::size_t n = parents.size();
  std::vector<std::size_t> pending(n);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = parents[i].size();
    for (auto p : parents[i]) children.at(p).push_back(i);
  }
  // Kahn's algorithm, always releasing the smallest ready index so the order
  // is deterministic.
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.insert(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (auto c : children[i]) {
      if (--pending[c] == 0) ready.insert(c);
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

Dag::Dag(std::vector<Variable> variables,
         std::vector<std::vector<std::size_t>> parents)
    : variables_(std::move(variables)), parents_(std::move(parents)) {
  validate_variables(variables_);
  const std::size_t n = variables_.size();
  if (parents_.size() != n) {
    throw Error(ErrorKind::kInvalidArgument,
                "parent lists do not match variable count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::size_t> seen;
    for (auto p : parents_[i]) {
      if (p >= n) {
        throw Error(ErrorKind::kInvalidArgument,
                    "parent index out of range for '" + variables_[i].name +
                        "'");
      }
      if (p == i) {
        throw Error(ErrorKind::kInvalidArgument,
                    "variable '" + variables_[i].name + "' is its own parent");
      }
      if (!seen.insert(p).second) {
        throw Error(ErrorKind::kInvalidArgument,
                    "duplicate parent for '" + variables_[i].name + "'");
      }
    }
  }
  auto order = topological_sort(parents_);
  if (!order) throw Error(ErrorKind::kInvalidArgument, "graph has a cycle");
  order_ = std::move(*order);
}

Dag Dag::empty(std::vector<Variable> variables) {
  std::vector<std::vector<std::size_t>> parents(variables.size());
  return Dag(std::move(variables), std::move(parents));
}

std::optional<std::size_t> Dag::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Dag::parent_config_count(std::size_t i) const {
  std::size_t q = 1;
  for (auto p : parents_.at(i)) q *= variables_[p].cardinality();
  return q;
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  for (std::size_t c = 0; c < parents_.size(); ++c) {
    for (auto p : parents_[c]) out.push_back({p, c});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Dag::edge_count() const {
  std::size_t n = 0;
  for (const auto& ps : parents_) n += ps.size();
  return n;
}

std::size_t parent_config_index(const Dag& dag, std::size_t variable,
                                std::span<const std::size_t> parent_states) {
  const auto parents = dag.parents(variable);
  if (parent_states.size() != parents.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "expected " + std::to_string(parents.size()) +
                    " parent states for '" + dag.variable(variable).name +
                    "', got " + std::to_string(parent_states.size()));
  }
  std::size_t j = 0;
  for (std::size_t m = 0; m < parents.size(); ++m) {
    const std::size_t r = dag.variable(parents[m]).cardinality();
    if (parent_states[m] >= r) {
      throw Error(ErrorKind::kInvalidArgument,
                  "state index out of range for parent '" +
                      dag.variable(parents[m]).name + "'");
    }
    j = j * r + parent_states[m];
  }
  return j;
}

std::size_t parent_config_of(const Dag& dag, std::size_t variable,
                             std::span<const std::size_t> assignment) {
  std::size_t j = 0;
  for (auto p : dag.parents(variable)) {
    j = j * dag.variable(p).cardinality() + assignment[p];
  }
  return j;
}

Dataset encode_dataset(std::vector<Variable> variables,
                       std::span<const std::vector<std::string>> rows) {
  validate_variables(variables);
  Dataset data;
  data.instances.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != variables.size()) {
      throw Error(ErrorKind::kData, "record " + std::to_string(r) +
                                        " has the wrong number of values");
    }
    Assignment a(variables.size());
    for (std::size_t i = 0; i < variables.size(); ++i) {
      const auto k = variables[i].state_index(rows[r][i]);
      if (!k) {
        throw Error(ErrorKind::kData,
                    "record " + std::to_string(r) + ": unknown state '" +
                        rows[r][i] + "' for variable '" + variables[i].name +
                        "'");
      }
      a[i] = *k;
    }
    data.instances.push_back(std::move(a));
  }
  data.variables = std::move(variables);
  return data;
}

std::uint64_t FamilyCounts::row_total(std::size_t j) const {
  std::uint64_t n = 0;
  for (std::size_t k = 0; k < states_; ++k) n += at(j, k);
  return n;
}

std::uint64_t FamilyCounts::total() const {
  std::uint64_t n = 0;
  for (auto c : counts_) n += c;
  return n;
}

FamilyCounts tally_family(const std::vector<Variable>& variables,
                          std::size_t child,
                          std::span<const std::size_t> parents,
                          std::span<const Assignment> instances) {
  std::size_t q = 1;
  for (auto p : parents) q *= variables.at(p).cardinality();
  const std::size_t r = variables.at(child).cardinality();
  FamilyCounts counts(q, r);
  for (std::size_t n = 0; n < instances.size(); ++n) {
    const auto& a = instances[n];
    if (a.size() != variables.size()) {
      throw Error(ErrorKind::kData, "record " + std::to_string(n) +
                                        " has the wrong number of values");
    }
    std::size_t j = 0;
    for (auto p : parents) {
      const std::size_t rp = variables[p].cardinality();
      if (a[p] >= rp) {
        throw Error(ErrorKind::kData, "record " + std::to_string(n) +
                                          ": unknown state for variable '" +
                                          variables[p].name + "'");
      }
      j = j * rp + a[p];
    }
    if (a[child] >= r) {
      throw Error(ErrorKind::kData, "record " + std::to_string(n) +
                                        ": unknown state for variable '" +
                                        variables[child].name + "'");
    }
    ++counts.at(j, a[child]);
  }
  return counts;
}

CountTable tally_counts(std::span<const Assignment> instances, const Dag& dag) {
  CountTable table;
  table.dataset_size = instances.size();
  table.families.reserve(dag.size());
  for (std::size_t i = 0; i < dag.size(); ++i) {
    table.families.push_back(
        tally_family(dag.variables(), i, dag.parents(i), instances));
  }
  return table;
}

Cpt::Cpt(std::size_t configs, std::size_t states, std::vector<double> probs)
    : configs_(configs), states_(states), probs_(std::move(probs)) {
  if (configs_ == 0 || states_ == 0 || probs_.size() != configs_ * states_) {
    throw Error(ErrorKind::kInvalidArgument, "table shape mismatch");
  }
  for (std::size_t j = 0; j < configs_; ++j) {
    double sum = 0.0;
    for (double p : row(j)) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "probability outside [0,1] in row " + std::to_string(j));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw Error(ErrorKind::kInvalidArgument,
                  "row " + std::to_string(j) + " is not normalized");
    }
  }
}

Cpt estimate_cpt(const FamilyCounts& counts, PriorConfig prior) {
  if (!(prior.ess > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "ess must be positive");
  }
  const std::size_t q = counts.configs();
  const std::size_t r = counts.states();
  const double row_prior = prior.ess / static_cast<double>(q);
  const double cell_prior = row_prior / static_cast<double>(r);
  std::vector<double> probs(q * r);
  for (std::size_t j = 0; j < q; ++j) {
    const double denom = static_cast<double>(counts.row_total(j)) + row_prior;
    for (std::size_t k = 0; k < r; ++k) {
      probs[j * r + k] = (static_cast<double>(counts.at(j, k)) + cell_prior) / denom;
    }
  }
  return Cpt(q, r, std::move(probs));
}

std::vector<Cpt> estimate_cpts(const CountTable& counts, PriorConfig prior) {
  std::vector<Cpt> cpts;
  cpts.reserve(counts.families.size());
  for (const auto& f : counts.families) cpts.push_back(estimate_cpt(f, prior));
  return cpts;
}

Network::Network(std::string name, Dag dag, std::vector<Cpt> cpts)
    : name_(std::move(name)), dag_(std::move(dag)), cpts_(std::move(cpts)) {
  if (cpts_.size() != dag_.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "one table per variable is required");
  }
  for (std::size_t i = 0; i < dag_.size(); ++i) {
    if (cpts_[i].configs() != dag_.parent_config_count(i) ||
        cpts_[i].states() != dag_.variable(i).cardinality()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "table shape does not match variable '" +
                      dag_.variable(i).name + "'");
    }
  }
}

Network fit_network(std::string name, const Dag& dag,
                    std::span<const Assignment> instances, PriorConfig prior) {
  return Network(std::move(name), dag,
                 estimate_cpts(tally_counts(instances, dag), prior));
}

namespace {

struct FieldInfo {
  Field field;
  std::string_view key;
  std::string_view variable;
};

constexpr FieldInfo kFields[] = {
    {Field::kPaction, "paction", "Paction"},
    {Field::kPprop, "pprop", "Pprop"},
    {Field::kCaction, "caction", "Caction"},
    {Field::kCprop, "cprop", "Cprop"},
    {Field::kNaction, "naction", "Naction"},
    {Field::kNprop, "nprop", "Nprop"},
    {Field::kCpTimeBin, "cptime_bin", "CPTime_d"},
};

std::string field_value(const TransitionRecord& r, Field f) {
  auto prop = [](const std::optional<std::string>& p) {
    return p ? *p : std::string(kNoProperty);
  };
  switch (f) {
    case Field::kPaction: return r.paction;
    case Field::kPprop: return prop(r.pprop);
    case Field::kCaction: return r.caction;
    case Field::kCprop: return prop(r.cprop);
    case Field::kNaction: return r.naction;
    case Field::kNprop: return prop(r.nprop);
    case Field::kCpTimeBin: return std::string(cp_time_bin(r.cp_time_delta_s));
  }
  return {};
}

}  // namespace

FieldSelection default_field_selection() {
  return {Field::kPaction, Field::kCaction, Field::kNaction};
}

std::string_view field_variable_name(Field field) {
  return kFields[static_cast<std::size_t>(field)].variable;
}

std::optional<Field> parse_field(std::string_view key) {
  for (const auto& info : kFields) {
    if (info.key == key) return info.field;
  }
  return std::nullopt;
}

FieldSelection parse_field_list(std::string_view list) {
  FieldSelection out;
  while (!list.empty()) {
    const std::size_t comma = list.find(',');
    std::string_view key = list.substr(0, comma);
    while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
    while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
    const auto f = parse_field(key);
    if (!f) {
      throw Error(ErrorKind::kInvalidArgument,
                  "unknown field '" + std::string(key) + "'");
    }
    out.push_back(*f);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return out;
}

std::string_view cp_time_bin(std::int64_t delta_s) {
  if (delta_s <= 5) return "le5";
  if (delta_s <= 15) return "le15";
  if (delta_s <= 60) return "le60";
  return "gt60";
}

Dataset records_to_instances(std::span<const TransitionRecord> records,
                             const FieldSelection& fields) {
  if (records.empty()) {
    throw Error(ErrorKind::kData, "no transition records");
  }
  std::set<Field> selected(fields.begin(), fields.end());
  if (selected.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty field selection");
  }
  const std::vector<Field> ordered(selected.begin(), selected.end());

  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  std::vector<std::set<std::string>> observed(ordered.size());
  for (const auto& r : records) {
    std::vector<std::string> row;
    row.reserve(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      row.push_back(field_value(r, ordered[i]));
      observed[i].insert(row.back());
    }
    rows.push_back(std::move(row));
  }
  std::vector<Variable> variables;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    variables.push_back({std::string(field_variable_name(ordered[i])),
                         {observed[i].begin(), observed[i].end()}});
  }
  return encode_dataset(std::move(variables), rows);
}

Dag chain_dag(std::vector<Variable> variables) {
  std::vector<std::vector<std::size_t>> parents(variables.size());
  std::optional<std::size_t> prev, cur, next;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == kPreviousAction) prev = i;
    if (variables[i].name == kCurrentAction) cur = i;
    if (variables[i].name == kNextAction) next = i;
  }
  if (!cur || !next) {
    throw Error(ErrorKind::kInvalidArgument,
                "chain structure needs Caction and Naction variables");
  }
  if (prev) parents[*cur].push_back(*prev);
  parents[*next].push_back(*cur);
  return Dag(std::move(variables), std::move(parents));
}

}  // namespace nexthelp
