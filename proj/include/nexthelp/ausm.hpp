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

#ifndef NEXTHELP_AUSM_HPP_
#define NEXTHELP_AUSM_HPP_

#include <cstddef>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nexthelp/bbn_model.hpp"
#include "nexthelp/event_log.hpp"

namespace nexthelp {

struct HelpTopic {
  std::string id;
  std::string title;

  bool operator==(const HelpTopic&) const = default;
};

inline constexpr std::string_view kGenericTopicId = "HELP.GENERIC";
inline constexpr std::string_view kGenericTopicTitle = "General help";

// Action token -> help topic, with a default for unmapped actions.
class HelpTopicMap {
 public:
  HelpTopicMap()
      : default_{std::string(kGenericTopicId), std::string(kGenericTopicTitle)} {}

  // Throws on a duplicate action or an empty id/title.
  void add(std::string action, HelpTopic topic);
  void set_default(HelpTopic topic);

  const HelpTopic& lookup(std::string_view action) const;
  const HelpTopic& default_topic() const { return default_; }
  bool contains(std::string_view action) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, HelpTopic, std::less<>> entries_;
  HelpTopic default_;
};

// Lines "action\ttopic_id\ttopic title"; "*" as the action sets the default.
HelpTopicMap load_topic_map(std::istream& source);
HelpTopicMap load_topic_map_file(const std::string& path);

class TransitionSink {
 public:
  virtual ~TransitionSink() = default;
  virtual void append(const TransitionRecord& record) = 0;
};

class VectorSink : public TransitionSink {
 public:
  void append(const TransitionRecord& record) override {
    records_.push_back(record);
  }
  const std::vector<TransitionRecord>& records() const { return records_; }

 private:
  std::vector<TransitionRecord> records_;
};

// Appends to a transition database file, writing the header first when the
// file is new or empty.
class TransitionDbAppender : public TransitionSink {
 public:
  explicit TransitionDbAppender(const std::string& path);
  void append(const TransitionRecord& record) override;

 private:
  std::string path_;
  std::ofstream out_;
};

// The previous/current window over a live action stream.
class InteractionState {
 public:
  // The event becomes the newest in the window. Once a previous, current and
  // next are all present one record goes to the sink and the window slides.
  // If the sink throws, the record is kept as pending and retried before the
  // next event. Returns the number of records written by this call.
  std::size_t record_action(const ActionEvent& event, TransitionSink& sink);

  // Retries a pending record. Returns true if one was written.
  bool flush_pending(TransitionSink& sink);

  const std::optional<ActionEvent>& previous() const { return previous_; }
  const std::optional<ActionEvent>& current() const { return current_; }
  const std::optional<TransitionRecord>& pending() const { return pending_; }
  std::size_t appended() const { return appended_; }

 private:
  std::optional<ActionEvent> previous_;
  std::optional<ActionEvent> current_;
  std::optional<TransitionRecord> pending_;
  std::size_t appended_ = 0;
};

struct RankedAction {
  std::string action;
  double probability = 0.0;
  HelpTopic topic;
};

struct PredictionResult {
  std::vector<RankedAction> ranked;
  bool fallback = false;
};

inline constexpr std::size_t kDefaultTopK = 3;

// State indices by probability, highest first; equal probabilities are
// ordered by state token.
std::vector<std::size_t> rank_states(const Variable& variable,
                                     std::span<const double> probabilities);

PredictionResult query_help(std::optional<std::string_view> current_action,
                            const Network& network,
                            const HelpTopicMap& topics, std::size_t k);

PredictionResult query_help(const InteractionState& state,
                            const Network& network,
                            const HelpTopicMap& topics, std::size_t k);

// Adaptive user support module: records the action stream into a sink and
// answers help requests from the currently loaded network. The network can
// be swapped while queries run.
class AdaptiveSupport {
 public:
  AdaptiveSupport(std::shared_ptr<const Network> network, HelpTopicMap topics,
                  TransitionSink& sink);

  std::size_t record_action(const ActionEvent& event);
  PredictionResult query_help(std::size_t k = kDefaultTopK) const;

  // On failure the previous network stays active and the error propagates.
  void reload_network(const std::string& path);
  void replace_network(std::shared_ptr<const Network> network);

  std::shared_ptr<const Network> network() const;
  const HelpTopicMap& topics() const { return topics_; }
  std::size_t appended() const;
  std::optional<ActionEvent> current_action() const;

 private:
  mutable std::mutex network_mutex_;
  std::shared_ptr<const Network> network_;
  HelpTopicMap topics_;
  mutable std::mutex state_mutex_;
  InteractionState state_;
  TransitionSink& sink_;
};

}  // namespace nexthelp

#endif  // NEXTHELP_AUSM_HPP_
