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

// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "nexthelp/ausm.hpp"
#include "nexthelp/error.hpp"
#include "nexthelp/eval.hpp"
#include "nexthelp/event_log.hpp"
#include "nexthelp/inference.hpp"
#include "nexthelp/network_io.hpp"
#include "nexthelp/scoring.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace nexthelp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

TransitionRecord transition(const std::string& p, const std::string& c,
                            const std::string& n) {
  return make_transition(ActionEvent{0, p, {}}, ActionEvent{1, c, {}},
                         ActionEvent{2, n, {}});
}

Network random_chain(std::mt19937_64& gen) {
  std::vector<Variable> vars;
  for (const char* name : {"Paction", "Caction", "Naction"}) {
    Variable v{name, {}};
    const std::size_t r = 2 + gen() % 4;
    for (std::size_t k = 0; k < r; ++k) v.states.push_back("s" + std::to_string(k));
    vars.push_back(v);
  }
  const Dag dag = chain_dag(vars);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t q = dag.parent_config_count(i);
    const std::size_t r = vars[i].cardinality();
    std::vector<double> values(q * r);
    for (std::size_t j = 0; j < q; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < r; ++k) s += values[j * r + k] = u(gen);
      for (std::size_t k = 0; k < r; ++k) values[j * r + k] /= s;
    }
    cpts.emplace_back(q, r, values);
  }
  return Network("chain", dag, cpts);
}

Outcome figure3_fidelity() {
  const SessionLog log = parse_log(fixture::figure3_text(), "figure3.log");
  const auto records = build_transitions(log);
  std::ostringstream first;
  write_transition_db(records, first);
  std::istringstream in(first.str());
  std::ostringstream second;
  write_transition_db(read_transition_db(in), second);
  Outcome o;
  const auto& e = log.events;
  o.pass = e.size() == 18 && e.front().timestamp_s == 494 &&
           e.front().action == "InsertObject" && e.front().property == "Plant" &&
           e.back().timestamp_s == 691 && e.back().action == "RunModel" &&
           !e.back().property && records.size() == 16 && first.str() == second.str();
  o.detail = std::to_string(e.size()) + " events, " + std::to_string(records.size()) +
             " records, database " +
             (first.str() == second.str() ? "byte-stable" : "changed on round trip");
  return o;
}

Outcome gamma_exactness() {
  const std::vector<Variable> one{{"A", {"a1", "a2"}}};
  const Dag root = Dag::empty(one);
  const std::vector<Assignment> split{{0}, {1}};
  const std::vector<Assignment> same{{0}, {0}};
  const double a = log_marginal_likelihood(root, tally_counts(split, root), 1.0);
  const double b = log_marginal_likelihood(root, tally_counts(same, root), 1.0);
  const double ea = std::abs(a - std::log(1.0 / 8.0));
  const double eb = std::abs(b - std::log(3.0 / 8.0));
  return {ea < 1e-12 && eb < 1e-12,
          fmt("counts (1,1) err %.1e, counts (2,0) err %.1e", ea, eb)};
}

Outcome model_comparison() {
  const auto vars = oracle::binary_variables(2);
  const std::vector<Assignment> data{{0, 0}, {0, 0}, {1, 1}, {1, 1}};
  const double ratio =
      model_log_ratio(Dag(vars, {{}, {0}}), Dag::empty(vars), data, 1.0);
  const double brute = oracle::log_marginal(vars, {{}, {0}}, data, 1.0) -
                       oracle::log_marginal(vars, {{}, {}}, data, 1.0);
  const double err = std::abs(ratio - std::log(200.0 / 27.0));
  const ScoredModel best = select_best_structure(Dataset{vars, data}, {});
  return {err < 1e-6 && std::abs(brute - ratio) < 1e-9 && best.dag.edge_count() == 1,
          fmt("log ratio %.6f (err %.1e), selected edges %g", ratio, err,
              static_cast<double>(best.dag.edge_count()))};
}

Outcome likelihood_equivalence() {
  std::mt19937_64 gen(4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Variable> vars{{"A", {}}, {"B", {}}};
    for (auto& v : vars) {
      const std::size_t r = 2 + gen() % 3;
      for (std::size_t k = 0; k < r; ++k) v.states.push_back("x" + std::to_string(k));
    }
    std::vector<Assignment> data(gen() % 51);
    for (auto& row : data) row = {gen() % vars[0].cardinality(), gen() % vars[1].cardinality()};
    const double ess = std::vector<double>{0.5, 1.0, 4.0}[trial % 3];
    worst = std::max(worst, std::abs(model_log_ratio(Dag(vars, {{}, {0}}),
                                                     Dag(vars, {{1}, {}}), data, ess)));
  }
  return {worst < 1e-9, fmt("100 datasets, max |score(A->B) - score(B->A)| = %.1e", worst)};
}

bool in_chain_class(const Dag& d) {
  std::set<std::pair<std::size_t, std::size_t>> skeleton;
  for (const auto& e : d.edges()) {
    skeleton.insert({std::min(e.parent, e.child), std::max(e.parent, e.child)});
  }
  return skeleton == std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}} &&
         d.parents(1).size() < 2;
}

Outcome structure_recovery() {
  const auto vars = oracle::binary_variables(3);
  const auto every = oracle::all_dags(3, 2);
  int recovered = 0;
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 gen(1000 + seed);
    std::vector<Assignment> rows;
    for (int s = 0; s < 500; ++s) {
      const std::size_t p = oracle::draw(gen, {0.9, 0.1});
      const std::size_t c = oracle::draw(gen, p ? std::vector{0.1, 0.9} : std::vector{0.9, 0.1});
      const std::size_t n = oracle::draw(gen, c ? std::vector{0.1, 0.9} : std::vector{0.9, 0.1});
      rows.push_back({p, c, n});
    }
    SearchOptions options;
    options.max_parents = 2;
    const ScoredModel best = select_best_structure(Dataset{vars, rows}, options);
    double top = -1e300;
    for (const auto& ps : every) top = std::max(top, oracle::log_marginal(vars, ps, rows, 1.0));
    if (std::abs(best.log_score - top) < 1e-9) ++agree;
    if (in_chain_class(best.dag)) ++recovered;
  }
  return {recovered >= 95 && agree == 100,
          std::to_string(recovered) + "/100 seeds in the chain class, " +
              std::to_string(agree) + "/100 match the brute-force optimum"};
}

Outcome inference_equivalence() {
  std::mt19937_64 gen(6);
  double worst_exact = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Network net = oracle::random_network(gen, 1 + gen() % 4, 2);
    const std::size_t query = gen() % net.size();
    std::vector<int> ev(net.size(), -1);
    Evidence e;
    for (std::size_t i = 0; i < net.size(); ++i) {
      if (i != query && gen() % 2) {
        ev[i] = static_cast<int>(gen() % 2);
        e.observe(i, static_cast<std::size_t>(ev[i]));
      }
    }
    const auto want = oracle::joint_bayes(oracle::plain(net), ev, query);
    const auto got = posterior_exact(net, e, query).probabilities;
    for (std::size_t k = 0; k < want.size(); ++k) {
      worst_exact = std::max(worst_exact, std::abs(got[k] - want[k]));
    }
  }
  double worst_fast = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Network net = random_chain(gen);
    for (std::size_t c = 0; c < net.variable(1).cardinality(); ++c) {
      const auto fast = predict_next(net, net.variable(1).states[c]).posterior.probabilities;
      Evidence e;
      e.observe(1, c);
      const auto slow = posterior_exact(net, e, 2).probabilities;
      for (std::size_t k = 0; k < slow.size(); ++k) {
        worst_fast = std::max(worst_fast, std::abs(fast[k] - slow[k]));
      }
    }
  }
  std::vector<Variable> vars{{"A", {"a1", "a2"}}, {"B", {"b1", "b2"}}};
  const Network ab("ab", Dag(vars, {{}, {0}}),
                   {Cpt(1, 2, {0.6, 0.4}), Cpt(2, 2, {0.9, 0.1, 0.2, 0.8})});
  Evidence b1;
  b1.observe(1, 0);
  const double hand = posterior_exact(ab, b1, 0).probabilities[0];
  const double hand_err = std::abs(hand - 0.54 / 0.62);
  return {worst_exact < 1e-9 && worst_fast < 1e-12 && hand_err < 1e-9,
          fmt("exact vs joint %.1e, fast path vs exact %.1e, P(a1|b1) = %.6f", worst_exact,
              worst_fast, hand)};
}

Outcome sampling_convergence() {
  std::mt19937_64 gen(70);
  int within = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Network net = oracle::random_network(gen, 2 + gen() % 3, 2);
    const std::size_t query = gen() % net.size();
    Evidence e;
    for (std::size_t i = 0; i < net.size(); ++i) {
      if (i != query && gen() % 2) e.observe(i, gen() % 2);
    }
    const auto want = posterior_exact(net, e, query).probabilities;
    const auto got = posterior_lw(net, e, query, 100000, 500 + trial).probabilities;
    double tv = 0.0;
    for (std::size_t k = 0; k < want.size(); ++k) tv += std::abs(want[k] - got[k]);
    tv /= 2.0;
    worst = std::max(worst, tv);
    if (tv < 0.02) ++within;
  }
  return {within >= 19,
          std::to_string(within) + "/20 cases within 0.02 TV" + fmt(" (worst %.4f)", worst)};
}

Outcome d_separation() {
  std::mt19937_64 gen(8);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Network net = random_chain(gen);
    for (std::size_t c = 0; c < net.variable(1).cardinality(); ++c) {
      Evidence just_c;
      just_c.observe(1, c);
      const auto base = posterior_exact(net, just_c, 2).probabilities;
      for (std::size_t p = 0; p < net.variable(0).cardinality(); ++p) {
        Evidence both = just_c;
        both.observe(0, p);
        const auto with_p = posterior_exact(net, both, 2).probabilities;
        for (std::size_t k = 0; k < base.size(); ++k) {
          worst = std::max(worst, std::abs(with_p[k] - base[k]));
        }
      }
    }
  }
  return {worst < 1e-12, fmt("100 chains, max Naction shift from Paction evidence %.1e", worst)};
}

Outcome streaming_batch() {
  std::mt19937_64 gen(9);
  const std::vector<std::string> actions{"InsertObject", "RunModel", "ConnectRelation",
                                         "Save"};
  int equal = 0;
  for (std::size_t n = 0; n <= 200; ++n) {
    SessionLog session;
    std::int64_t t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      t += static_cast<std::int64_t>(gen() % 60);
      std::optional<std::string> prop;
      if (gen() % 2) prop = "p" + std::to_string(gen() % 3);
      session.events.push_back(ActionEvent{t, actions[gen() % 4], prop});
    }
    InteractionState state;
    VectorSink sink;
    for (const auto& e : session.events) state.record_action(e, sink);
    if (sink.records() == build_transitions(session)) ++equal;
  }
  return {equal == 201, std::to_string(equal) + "/201 sequence lengths identical"};
}

Outcome cv_harness() {
  std::mt19937_64 gen(10);
  const std::vector<std::string> a{"A0", "A1", "A2", "A3", "A4"};
  std::vector<TransitionRecord> det;
  for (int i = 0; i < 500; ++i) {
    const std::size_t c = gen() % 5;
    det.push_back(transition(a[gen() % 5], a[c], a[(2 * c + 1) % 5]));
  }
  std::vector<TransitionRecord> uni;
  for (int i = 0; i < 2000; ++i) uni.push_back(transition(a[gen() % 4], a[gen() % 4], a[gen() % 4]));
  CvOptions options;
  const double det_mean = cross_validate(det, options).mean;
  const double uni_mean = cross_validate(uni, options).mean;
  bool monotone = true;
  double previous = 0.0;
  for (std::size_t k = 1; k <= 4; ++k) {
    options.top_k = k;
    const double acc = cross_validate(uni, options).mean;
    monotone = monotone && acc >= previous;
    previous = acc;
  }
  // Hit arithmetic on a replay of the same uniform records.
  const Dataset data = records_to_instances(uni, default_field_selection());
  const Network net =
      fit_network("uni", chain_dag(data.variables), data.instances, PriorConfig{});
  const ReplayReport r = offline_evaluate(net, uni, 3);
  const bool sums = r.hits[0] + r.hits[1] + r.hits[2] + r.miss == r.total;
  return {det_mean == 1.0 && std::abs(uni_mean - 0.25) <= 0.05 && monotone && sums,
          fmt("deterministic %.3f, uniform %.3f", det_mean, uni_mean) +
              (monotone ? ", top-k monotone" : ", top-k NOT monotone") +
              (sums ? ", hit counts add up" : ", hit counts do not add up")};
}

Outcome replay_calibration() {
  const std::vector<std::string> s{"A0", "A1", "A2", "A3"};
  std::vector<Variable> vars{{"Paction", s}, {"Caction", s}, {"Naction", s}};
  const Network net("uniform", chain_dag(vars),
                    {Cpt(1, 4, std::vector<double>(4, 0.25)),
                     Cpt(4, 4, std::vector<double>(16, 0.25)),
                     Cpt(4, 4, std::vector<double>(16, 0.25))});
  Rng rng(11);
  SessionLog session;
  for (std::int64_t i = 0; i < 10000; ++i) {
    const auto row = forward_sample(net, 1, rng).front();
    session.events.push_back(ActionEvent{i, s[row[2]], {}});
  }
  const ReplayReport report = replay_evaluate(net, session, HelpTopicMap{}, 3);
  const double overall = report.overall_percent();
  ReplayReport paper;
  paper.total = 141;
  paper.hits = {63, 34, 12};
  paper.miss = 32;
  const std::string text = render_report(paper);
  const bool format = text.find("(44.681%)") != std::string::npos &&
                      text.find("(77.305%)") != std::string::npos;
  return {std::abs(overall - 75.0) <= 3.0 && format,
          fmt("overall top-3 %.3f%%", overall) +
              (format ? ", three-decimal format ok" : ", format mismatch")};
}

Outcome serialization() {
  std::mt19937_64 gen(12);
  double worst = 0.0;
  bool structure_same = true;
  for (int trial = 0; trial < 100; ++trial) {
    const Network net = oracle::random_network(gen, 1 + gen() % 5, 4);
    std::stringstream buf;
    export_network(net, buf);
    const Network back = import_network(buf);
    structure_same = structure_same && back.dag() == net.dag();
    for (std::size_t i = 0; i < net.size(); ++i) {
      for (std::size_t j = 0; j < net.cpt(i).values().size(); ++j) {
        worst = std::max(worst, std::abs(back.cpt(i).values()[j] - net.cpt(i).values()[j]));
      }
    }
  }
  std::size_t line = 0;
  std::istringstream corrupt("net x\nvar A { a1, a2 }\ncpt A {\n  0.5 0.5 0.5\n}\n");
  try {
    import_network(corrupt);
  } catch (const ParseError& e) {
    line = e.line();
  }
  std::vector<Variable> vars{{"Paction", {"x"}}, {"Caction", {"x"}}, {"Naction", {"x"}}};
  auto loaded = std::make_shared<const Network>(
      "one", chain_dag(vars), std::vector<Cpt>{Cpt(1, 1, {1.0}), Cpt(1, 1, {1.0}), Cpt(1, 1, {1.0})});
  VectorSink sink;
  AdaptiveSupport support(loaded, HelpTopicMap{}, sink);
  fixture::TempPath bad("acceptance_corrupt_net");
  {
    std::ofstream out(bad.str());
    out << "net x\nvar A { a1, a2 }\ncpt A {\n  0.5\n}\n";
  }
  bool rejected = false;
  try {
    support.reload_network(bad.str());
  } catch (const ParseError&) {
    rejected = true;
  }
  const bool kept = support.network() == loaded;
  return {worst < 1e-12 && structure_same && line == 4 && rejected && kept,
          fmt("max round-trip error %.1e", worst) + ", corrupt file rejected at line " +
              std::to_string(line) + (kept ? ", loaded network kept" : ", network replaced")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Figure 3 fidelity", figure3_fidelity},
      {"Gamma-formula exactness", gamma_exactness},
      {"Model comparison", model_comparison},
      {"Likelihood equivalence", likelihood_equivalence},
      {"Structure recovery", structure_recovery},
      {"Inference oracle equivalence", inference_equivalence},
      {"Sampling convergence", sampling_convergence},
      {"D-separation", d_separation},
      {"Streaming/batch equivalence", streaming_batch},
      {"CV harness", cv_harness},
      {"Replay calibration", replay_calibration},
      {"Serialization", serialization},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
