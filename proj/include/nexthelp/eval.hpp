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

#ifndef NEXTHELP_EVAL_HPP_
#define NEXTHELP_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nexthelp/ausm.hpp"
#include "nexthelp/bbn_model.hpp"
#include "nexthelp/event_log.hpp"

namespace nexthelp {

// Seeded Fisher-Yates shuffle of 0..count-1 followed by a contiguous
// partition; fold sizes differ by at most one (larger folds first).
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t count,
                                                    std::size_t folds,
                                                    std::uint64_t seed);

std::vector<std::vector<TransitionRecord>> kfold_split(
    std::span<const TransitionRecord> records, std::size_t folds,
    std::uint64_t seed);

struct CvOptions {
  std::size_t folds = 10;
  double ess = 1.0;
  std::size_t top_k = 1;
  std::uint64_t seed = 0;
};

struct CvReport {
  std::size_t records = 0;
  std::size_t folds = 0;
  std::vector<double> fold_accuracy;
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sample stddev / sqrt(folds)
  std::size_t top_k = 1;
  double ess = 1.0;
  std::uint64_t seed = 0;
  std::string rng;
};

// Parameters are refit per fold on the Paction -> Caction -> Naction chain.
// A held-out record whose current or next action never occurs in the
// training folds counts as a miss.
CvReport cross_validate(std::span<const TransitionRecord> records,
                        const CvOptions& options);

struct ReplayStep {
  std::string actual;
  std::vector<std::string> predicted;
  std::size_t rank = 0;  // 1-based position of `actual`, 0 on a miss
  bool fallback = false;
};

struct ReplayReport {
  std::size_t total = 0;
  std::vector<std::size_t> hits;  // hits[r] = hits at rank r + 1
  std::size_t miss = 0;
  std::vector<ReplayStep> steps;

  std::size_t k() const { return hits.size(); }
  double hit_percent(std::size_t rank) const;  // rank is 1-based
  double miss_percent() const;
  // Sum of the per-rank hit percentages.
  double overall_percent() const;
};

// Streams the session through an InteractionState; before each event from
// the third onward asks for the top k and records where the event landed.
ReplayReport replay_evaluate(const Network& network, const SessionLog& session,
                             const HelpTopicMap& topics,
                             std::size_t k = kDefaultTopK);

// Same tally computed directly from transition records (current -> next).
ReplayReport offline_evaluate(const Network& network,
                              std::span<const TransitionRecord> records,
                              std::size_t k = kDefaultTopK);

std::string render_report(const CvReport& report);
std::string render_report(const ReplayReport& report);
std::string render_report_tsv(const CvReport& report);
std::string render_report_tsv(const ReplayReport& report);
// One line per replay step: actual action, rank, predicted actions.
std::string render_replay_trace(const ReplayReport& report);

}  // namespace nexthelp

#endif  // NEXTHELP_EVAL_HPP_
