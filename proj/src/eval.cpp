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

#include "nexthelp/eval.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nexthelp/error.hpp"
#include "nexthelp/inference.hpp"
#include "nexthelp/random.hpp"

namespace nexthelp {
namespace {

std::string percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f%%", value);
  return buf;
}

std::string number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

double ratio_percent(std::size_t part, std::size_t total) {
  return total == 0 ? 0.0
                    : 100.0 * static_cast<double>(part) / static_cast<double>(total);
}

// 1-based rank of `actual` in a query_help result, 0 if absent.
std::size_t rank_of(const PredictionResult& result, std::string_view actual) {
  for (std::size_t r = 0; r < result.ranked.size(); ++r) {
    if (result.ranked[r].action == actual) return r + 1;
  }
  return 0;
}

void tally(ReplayReport& report, ReplayStep step) {
  ++report.total;
  if (step.rank == 0) {
    ++report.miss;
  } else {
    ++report.hits[step.rank - 1];
  }
  report.steps.push_back(std::move(step));
}

ReplayStep make_step(const PredictionResult& result, const std::string& actual) {
  ReplayStep step;
  step.actual = actual;
  step.fallback = result.fallback;
  for (const auto& r : result.ranked) step.predicted.push_back(r.action);
  step.rank = rank_of(result, actual);
  return step;
}

}  // namespace

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t count,
                                                    std::size_t folds,
                                                    std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::kInvalidArgument, "need at least 2 folds");
  if (count < folds) {
    throw Error(ErrorKind::kData, std::to_string(count) +
                                      " records are too few for " +
                                      std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = count; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<std::vector<std::size_t>> out(folds);
  const std::size_t base = count / folds;
  const std::size_t extra = count % folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    out[f].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return out;
}

std::vector<std::vector<TransitionRecord>> kfold_split(
    std::span<const TransitionRecord> records, std::size_t folds,
    std::uint64_t seed) {
  std::vector<std::vector<TransitionRecord>> out;
  for (const auto& fold : kfold_indices(records.size(), folds, seed)) {
    auto& dst = out.emplace_back();
    dst.reserve(fold.size());
    for (auto i : fold) dst.push_back(records[i]);
  }
  return out;
}

CvReport cross_validate(std::span<const TransitionRecord> records,
                        const CvOptions& options) {
  if (records.empty()) throw Error(ErrorKind::kData, "no records to validate");
  if (options.top_k == 0) {
    throw Error(ErrorKind::kInvalidArgument, "top_k must be at least 1");
  }
  if (!(options.ess > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "ess must be positive");
  }
  const auto folds = kfold_indices(records.size(), options.folds, options.seed);

  CvReport report;
  report.records = records.size();
  report.folds = options.folds;
  report.top_k = options.top_k;
  report.ess = options.ess;
  report.seed = options.seed;
  report.rng = Rng::kAlgorithm;

  std::vector<char> held_out(records.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::fill(held_out.begin(), held_out.end(), 0);
    for (auto i : folds[f]) held_out[i] = 1;
    std::vector<TransitionRecord> training;
    training.reserve(records.size() - folds[f].size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!held_out[i]) training.push_back(records[i]);
    }
    if (training.empty()) {
      throw Error(ErrorKind::kData,
                  "fold " + std::to_string(f + 1) + " has no training records");
    }
    const Dataset data = records_to_instances(training, default_field_selection());
    const Network net = fit_network("cv", chain_dag(data.variables),
                                    data.instances, PriorConfig{options.ess});
    const Variable& cur = net.variable(*net.dag().index_of(kCurrentAction));
    const Variable& next = net.variable(*net.dag().index_of(kNextAction));

    // Ranking of Naction states per Caction state, computed once.
    std::vector<std::vector<std::size_t>> ranking(cur.cardinality());
    for (std::size_t s = 0; s < cur.cardinality(); ++s) {
      const auto p = predict_next(net, cur.states[s]);
      ranking[s] = rank_states(next, p.posterior.probabilities);
    }

    std::size_t hits = 0;
    for (auto i : folds[f]) {
      const auto c = cur.state_index(records[i].caction);
      const auto n = next.state_index(records[i].naction);
      if (!c || !n) continue;  // unseen in training: a miss
      const auto& order = ranking[*c];
      const std::size_t limit = std::min(options.top_k, order.size());
      if (std::find(order.begin(), order.begin() + limit, *n) !=
          order.begin() + limit) {
        ++hits;
      }
    }
    report.fold_accuracy.push_back(static_cast<double>(hits) /
                                   static_cast<double>(folds[f].size()));
  }

  const double k = static_cast<double>(report.fold_accuracy.size());
  double sum = 0.0;
  for (double a : report.fold_accuracy) sum += a;
  report.mean = sum / k;
  double squares = 0.0;
  for (double a : report.fold_accuracy) squares += (a - report.mean) * (a - report.mean);
  const double stddev = std::sqrt(squares / (k - 1.0));
  report.half_width = 1.96 * stddev / std::sqrt(k);
  return report;
}

double ReplayReport::hit_percent(std::size_t rank) const {
  return ratio_percent(hits.at(rank - 1), total);
}

double ReplayReport::miss_percent() const { return ratio_percent(miss, total); }

double ReplayReport::overall_percent() const {
  double sum = 0.0;
  for (std::size_t r = 1; r <= hits.size(); ++r) sum += hit_percent(r);
  return sum;
}

ReplayReport replay_evaluate(const Network& network, const SessionLog& session,
                             const HelpTopicMap& topics, std::size_t k) {
  if (session.events.size() < 3) {
    throw Error(ErrorKind::kData, "replay needs a session of at least 3 events");
  }
  if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be at least 1");
  ReplayReport report;
  report.hits.assign(k, 0);
  InteractionState state;
  VectorSink sink;
  for (std::size_t i = 0; i < session.events.size(); ++i) {
    const ActionEvent& event = session.events[i];
    if (i >= 2) {
      tally(report, make_step(query_help(state, network, topics, k), event.action));
    }
    state.record_action(event, sink);
  }
  return report;
}

ReplayReport offline_evaluate(const Network& network,
                              std::span<const TransitionRecord> records,
                              std::size_t k) {
  if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be at least 1");
  ReplayReport report;
  report.hits.assign(k, 0);
  const HelpTopicMap topics;
  for (const auto& r : records) {
    tally(report, make_step(query_help(std::string_view(r.caction), network,
                                       topics, k),
                            r.naction));
  }
  return report;
}

std::string render_report(const CvReport& report) {
  std::ostringstream out;
  out << "Cross-validation report\n";
  out << "records: " << report.records << '\n';
  out << "folds: " << report.folds << '\n';
  out << "metric: top-" << report.top_k << '\n';
  out << "ess: " << number(report.ess) << '\n';
  out << "seed: " << report.seed << '\n';
  out << "rng: " << report.rng << '\n';
  for (std::size_t f = 0; f < report.fold_accuracy.size(); ++f) {
    out << "fold " << (f + 1) << ": " << percent(100.0 * report.fold_accuracy[f])
        << '\n';
  }
  out << "mean accuracy: " << percent(100.0 * report.mean) << '\n';
  out << "half-width (95%): ±" << percent(100.0 * report.half_width) << '\n';
  out << "result: " << percent(100.0 * report.mean) << " (±"
      << percent(100.0 * report.half_width) << ")\n";
  return out.str();
}

std::string render_report(const ReplayReport& report) {
  std::ostringstream out;
  out << "Replay report\n";
  out << "queries: " << report.total << '\n';
  out << "k: " << report.k() << '\n';
  std::size_t hit_total = 0;
  for (std::size_t r = 1; r <= report.k(); ++r) {
    hit_total += report.hits[r - 1];
    out << "top-" << r << ": " << report.hits[r - 1] << " ("
        << percent(report.hit_percent(r)) << ")\n";
  }
  out << "miss: " << report.miss << " (" << percent(report.miss_percent()) << ")\n";
  out << "overall top-" << report.k() << ": " << hit_total << " ("
      << percent(report.overall_percent()) << ")\n";
  return out.str();
}

std::string render_report_tsv(const CvReport& report) {
  std::ostringstream out;
  out << "field\tvalue\n";
  out << "protocol\tcv\n";
  out << "records\t" << report.records << '\n';
  out << "folds\t" << report.folds << '\n';
  out << "top_k\t" << report.top_k << '\n';
  out << "ess\t" << number(report.ess) << '\n';
  out << "seed\t" << report.seed << '\n';
  out << "rng\t" << report.rng << '\n';
  char buf[32];
  for (std::size_t f = 0; f < report.fold_accuracy.size(); ++f) {
    std::snprintf(buf, sizeof buf, "%.6f", report.fold_accuracy[f]);
    out << "fold_" << (f + 1) << '\t' << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.6f", report.mean);
  out << "mean\t" << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", report.half_width);
  out << "half_width\t" << buf << '\n';
  return out.str();
}

std::string render_report_tsv(const ReplayReport& report) {
  std::ostringstream out;
  char buf[32];
  out << "field\tvalue\n";
  out << "protocol\treplay\n";
  out << "total\t" << report.total << '\n';
  out << "k\t" << report.k() << '\n';
  for (std::size_t r = 1; r <= report.k(); ++r) {
    std::snprintf(buf, sizeof buf, "%.3f", report.hit_percent(r));
    out << "hit_top" << r << '\t' << report.hits[r - 1] << '\n';
    out << "hit_top" << r << "_pct\t" << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.3f", report.miss_percent());
  out << "miss\t" << report.miss << '\n';
  out << "miss_pct\t" << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.3f", report.overall_percent());
  out << "overall_pct\t" << buf << '\n';
  return out.str();
}

std::string render_replay_trace(const ReplayReport& report) {
  std::ostringstream out;
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    const auto& s = report.steps[i];
    out << (i + 1) << '\t' << s.actual << '\t'
        << (s.rank == 0 ? std::string("miss") : "top-" + std::to_string(s.rank))
        << '\t';
    for (std::size_t r = 0; r < s.predicted.size(); ++r) {
      out << (r ? "," : "") << s.predicted[r];
    }
    if (s.fallback) out << "\t[fallback]";
    out << '\n';
  }
  return out.str();
}

}  // namespace nexthelp
