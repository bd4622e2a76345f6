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

#include "nexthelp/network_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "nexthelp/error.hpp"

namespace nexthelp {
namespace {

constexpr double kImportRowTolerance = 1e-6;
constexpr double kExactRowTolerance = 1e-12;

bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (c == ' ' || c == '\t' || c == '{' || c == '}' || c == ',' ||
        c == '|' || c == '#' || c == '\n' || c == '\r') {
      return false;
    }
  }
  return true;
}

// States may contain inner spaces ("Intensity of Light->Sun") but not the
// format's own punctuation.
bool valid_state(std::string_view state) {
  if (state.empty() || state.front() == ' ' || state.back() == ' ') {
    return false;
  }
  return state.find_first_of(",{}#\t\n\r") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

struct PendingTable {
  std::size_t child = 0;
  std::vector<std::size_t> parents;
  std::size_t line = 0;
  std::vector<double> values;
  std::size_t rows = 0;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  Network read() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      std::string_view text = raw;
      if (const auto hash = text.find('#'); hash != std::string_view::npos) {
        text = text.substr(0, hash);
      }
      text = trim(text);
      if (text.empty()) continue;
      if (table_) {
        table_line(text);
      } else if (text.starts_with("net ") || text == "net") {
        net_line(text);
      } else if (text.starts_with("var ")) {
        var_line(text);
      } else if (text.starts_with("cpt ")) {
        cpt_line(text);
      } else {
        fail("unrecognized statement");
      }
    }
    if (in_.bad()) throw Error(ErrorKind::kIo, "failed reading network");
    if (table_) fail("unterminated cpt block for '" + name_of(table_->child) + "'");
    if (!name_) throw ParseError(line_, "missing 'net' declaration");
    if (variables_.empty()) throw ParseError(line_, "network declares no variables");
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (!tables_.count(i)) {
        throw ParseError(line_, "no cpt for variable '" + variables_[i].name + "'");
      }
    }

    std::vector<std::vector<std::size_t>> parents(variables_.size());
    for (const auto& [i, t] : tables_) parents[i] = t.parents;
    std::optional<Dag> dag;
    try {
      dag.emplace(variables_, parents);
    } catch (const Error& e) {
      throw ParseError(0, std::string("invalid structure: ") + e.what());
    }
    std::vector<Cpt> cpts;
    for (const auto& [i, t] : tables_) {
      cpts.emplace_back(dag->parent_config_count(i), variables_[i].cardinality(),
                        t.values);
    }
    return Network(*name_, std::move(*dag), std::move(cpts));
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, message);
  }

  std::string name_of(std::size_t i) const { return variables_[i].name; }

  std::size_t lookup(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) fail("undeclared variable '" + std::string(name) + "'");
    return it->second;
  }

  void net_line(std::string_view text) {
    if (name_) fail("duplicate 'net' declaration");
    const auto w = words(text);
    if (w.size() != 2 || !valid_name(w[1])) fail("expected 'net <name>'");
    name_ = std::string(w[1]);
  }

  void var_line(std::string_view text) {
    if (!name_) fail("'var' before 'net'");
    if (!tables_.empty()) fail("'var' after the first 'cpt'");
    const auto open = text.find('{');
    const auto close = text.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos ||
        close < open || !trim(text.substr(close + 1)).empty()) {
      fail("expected 'var <name> { <state>, ... }'");
    }
    const auto head = words(text.substr(0, open));
    if (head.size() != 2 || !valid_name(head[1])) fail("bad variable name");
    Variable v{std::string(head[1]), {}};
    std::string_view body = text.substr(open + 1, close - open - 1);
    while (true) {
      const auto comma = body.find(',');
      const auto state = trim(body.substr(0, comma));
      if (!valid_state(state)) fail("bad state in variable '" + v.name + "'");
      if (v.state_index(state)) {
        fail("duplicate state '" + std::string(state) + "'");
      }
      v.states.emplace_back(state);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    if (index_.count(v.name)) fail("duplicate variable '" + v.name + "'");
    index_[v.name] = variables_.size();
    variables_.push_back(std::move(v));
  }

  void cpt_line(std::string_view text) {
    if (!text.ends_with("{")) fail("expected '{' at end of cpt header");
    text = trim(text.substr(0, text.size() - 1));
    const auto bar = text.find('|');
    const auto head = words(text.substr(0, bar));
    if (head.size() != 2) fail("expected 'cpt <child> [| <parents>] {'");
    PendingTable t;
    t.child = lookup(head[1]);
    t.line = line_;
    if (tables_.count(t.child)) fail("duplicate cpt for '" + std::string(head[1]) + "'");
    if (bar != std::string_view::npos) {
      const auto ps = words(text.substr(bar + 1));
      if (ps.empty()) fail("'|' with no parents");
      for (auto p : ps) t.parents.push_back(lookup(p));
    }
    table_ = std::move(t);
  }

  void table_line(std::string_view text) {
    auto& t = *table_;
    const std::size_t r = variables_[t.child].cardinality();
    std::size_t q = 1;
    for (auto p : t.parents) q *= variables_[p].cardinality();
    if (text == "}") {
      if (t.rows != q) {
        fail("cpt '" + name_of(t.child) + "' has " + std::to_string(t.rows) +
             " rows, expected " + std::to_string(q));
      }
      tables_.emplace(t.child, std::move(t));
      table_.reset();
      return;
    }
    if (t.rows == q) fail("too many rows in cpt '" + name_of(t.child) + "'");
    const auto cells = words(text);
    if (cells.size() != r) {
      fail("expected " + std::to_string(r) + " probabilities, found " +
           std::to_string(cells.size()));
    }
    double sum = 0.0;
    std::vector<double> row;
    for (auto cell : cells) {
      double p = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), p);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !(p >= 0.0) ||
          p > 1.0) {
        fail("bad probability '" + std::string(cell) + "'");
      }
      row.push_back(p);
      sum += p;
    }
    if (std::abs(sum - 1.0) > kImportRowTolerance) {
      fail("row not normalized (sums to " + std::to_string(sum) + ")");
    }
    // Rows already normalized to table precision are kept bit-exact.
    const double scale = std::abs(sum - 1.0) > kExactRowTolerance ? sum : 1.0;
    for (double p : row) t.values.push_back(p / scale);
    ++t.rows;
  }

  std::istream& in_;
  std::size_t line_ = 0;
  std::optional<std::string> name_;
  std::vector<Variable> variables_;
  std::map<std::string, std::size_t> index_;
  std::map<std::size_t, PendingTable> tables_;
  std::optional<PendingTable> table_;
};

}  // namespace

void export_network(const Network& network, std::ostream& sink) {
  const Dag& dag = network.dag();
  if (!valid_name(network.name())) {
    throw Error(ErrorKind::kInvalidArgument, "network name is not a token");
  }
  sink << "net " << network.name() << '\n';
  for (const auto& v : dag.variables()) {
    if (!valid_name(v.name)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "variable name '" + v.name + "' is not a token");
    }
    sink << "var " << v.name << " {";
    for (std::size_t k = 0; k < v.states.size(); ++k) {
      if (!valid_state(v.states[k])) {
        throw Error(ErrorKind::kInvalidArgument,
                    "state '" + v.states[k] + "' cannot be written");
      }
      sink << (k == 0 ? " " : ", ") << v.states[k];
    }
    sink << " }\n";
  }
  char buf[32];
  for (std::size_t i = 0; i < dag.size(); ++i) {
    sink << "cpt " << dag.variable(i).name;
    if (!dag.parents(i).empty()) {
      sink << " |";
      for (auto p : dag.parents(i)) sink << ' ' << dag.variable(p).name;
    }
    sink << " {\n";
    const Cpt& cpt = network.cpt(i);
    for (std::size_t j = 0; j < cpt.configs(); ++j) {
      sink << ' ';
      for (double p : cpt.row(j)) {
        std::snprintf(buf, sizeof buf, "%.17g", p);
        sink << ' ' << buf;
      }
      sink << '\n';
    }
    sink << "}\n";
  }
  if (!sink) throw Error(ErrorKind::kIo, "failed writing network");
}

Network import_network(std::istream& source) { return Reader(source).read(); }

void save_network(const Network& network, const std::string& path) {
  std::ostringstream text;
  export_network(network, text);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out << text.str();
  if (!out) throw Error(ErrorKind::kIo, "failed writing '" + path + "'");
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  try {
    return import_network(in);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

}  // namespace nexthelp
