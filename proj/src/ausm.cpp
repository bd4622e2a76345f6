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

#include "nexthelp/ausm.hpp"

#include <algorithm>
#include <filesystem>
#include <istream>
#include <numeric>

#include "nexthelp/error.hpp"
#include "nexthelp/inference.hpp"
#include "nexthelp/network_io.hpp"

namespace nexthelp {

void HelpTopicMap::add(std::string action, HelpTopic topic) {
  if (action.empty() || topic.id.empty() || topic.title.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "topic entry has an empty field");
  }
  if (entries_.count(action)) {
    throw Error(ErrorKind::kInvalidArgument,
                "duplicate topic for action '" + action + "'");
  }
  entries_.emplace(std::move(action), std::move(topic));
}

void HelpTopicMap::set_default(HelpTopic topic) {
  if (topic.id.empty() || topic.title.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "default topic has an empty field");
  }
  default_ = std::move(topic);
}

const HelpTopic& HelpTopicMap::lookup(std::string_view action) const {
  const auto it = entries_.find(action);
  return it == entries_.end() ? default_ : it->second;
}

bool HelpTopicMap::contains(std::string_view action) const {
  return entries_.find(action) != entries_.end();
}

HelpTopicMap load_topic_map(std::istream& source) {
  HelpTopicMap map;
  bool default_seen = false;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(source, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw ParseError(line_number, "expected 'action<TAB>topic_id<TAB>title'");
    }
    std::string action = line.substr(0, t1);
    HelpTopic topic{line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)};
    if (action.empty() || topic.id.empty() || topic.title.empty()) {
      throw ParseError(line_number, "empty field in topic entry");
    }
    if (action == "*") {
      if (default_seen) throw ParseError(line_number, "duplicate default topic");
      default_seen = true;
      map.set_default(std::move(topic));
      continue;
    }
    if (map.contains(action)) {
      throw ParseError(line_number, "duplicate action '" + action + "'");
    }
    map.add(std::move(action), std::move(topic));
  }
  if (source.bad()) throw Error(ErrorKind::kIo, "failed reading topic map");
  return map;
}

HelpTopicMap load_topic_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  try {
    return load_topic_map(in);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

TransitionDbAppender::TransitionDbAppender(const std::string& path)
    : path_(path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) ||
                     std::filesystem::file_size(path, ec) == 0;
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for append");
  if (fresh) {
    write_transition_db_header(out_);
    out_.flush();
  }
}

void TransitionDbAppender::append(const TransitionRecord& record) {
  write_transition_record(record, out_);
  out_.flush();
  if (!out_) throw Error(ErrorKind::kIo, "failed appending to '" + path_ + "'");
}

bool InteractionState::flush_pending(TransitionSink& sink) {
  if (!pending_) return false;
  sink.append(*pending_);
  pending_.reset();
  ++appended_;
  return true;
}

std::size_t InteractionState::record_action(const ActionEvent& event,
                                            TransitionSink& sink) {
  validate_event(event);
  std::size_t written = flush_pending(sink) ? 1 : 0;
  if (!current_) {
    current_ = event;
    return written;
  }
  if (!previous_) {
    previous_ = std::move(current_);
    current_ = event;
    return written;
  }
  TransitionRecord record = make_transition(*previous_, *current_, event);
  previous_ = std::move(current_);
  current_ = event;
  try {
    sink.append(record);
  } catch (...) {
    pending_ = std::move(record);
    throw;
  }
  ++appended_;
  return written + 1;
}

std::vector<std::size_t> rank_states(const Variable& variable,
                                     std::span<const double> probabilities) {
  std::vector<std::size_t> order(probabilities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (probabilities[a] != probabilities[b]) {
      return probabilities[a] > probabilities[b];
    }
    return variable.states[a] < variable.states[b];
  });
  return order;
}

PredictionResult query_help(std::optional<std::string_view> current_action,
                            const Network& network,
                            const HelpTopicMap& topics, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be at least 1");
  const auto prediction = predict_next(network, current_action);
  const Variable& next = network.variable(prediction.posterior.variable);
  const auto& probs = prediction.posterior.probabilities;
  const auto order = rank_states(next, probs);
  PredictionResult result;
  result.fallback = prediction.fallback;
  const std::size_t n = std::min(k, order.size());
  result.ranked.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::string& action = next.states[order[r]];
    result.ranked.push_back({action, probs[order[r]], topics.lookup(action)});
  }
  return result;
}

PredictionResult query_help(const InteractionState& state,
                            const Network& network,
                            const HelpTopicMap& topics, std::size_t k) {
  std::optional<std::string_view> current;
  if (state.current()) current = state.current()->action;
  return query_help(current, network, topics, k);
}

AdaptiveSupport::AdaptiveSupport(std::shared_ptr<const Network> network,
                                 HelpTopicMap topics, TransitionSink& sink)
    : network_(std::move(network)), topics_(std::move(topics)), sink_(sink) {
  if (!network_) throw Error(ErrorKind::kInvalidArgument, "no network");
}

std::size_t AdaptiveSupport::record_action(const ActionEvent& event) {
  std::lock_guard lock(state_mutex_);
  return state_.record_action(event, sink_);
}

PredictionResult AdaptiveSupport::query_help(std::size_t k) const {
  const auto net = network();
  const auto current = current_action();
  std::optional<std::string_view> token;
  if (current) token = current->action;
  return nexthelp::query_help(token, *net, topics_, k);
}

void AdaptiveSupport::reload_network(const std::string& path) {
  replace_network(std::make_shared<const Network>(load_network(path)));
}

void AdaptiveSupport::replace_network(std::shared_ptr<const Network> network) {
  if (!network) throw Error(ErrorKind::kInvalidArgument, "no network");
  std::lock_guard lock(network_mutex_);
  network_ = std::move(network);
}

std::shared_ptr<const Network> AdaptiveSupport::network() const {
  std::lock_guard lock(network_mutex_);
  return network_;
}

std::size_t AdaptiveSupport::appended() const {
  std::lock_guard lock(state_mutex_);
  return state_.appended();
}

std::optional<ActionEvent> AdaptiveSupport::current_action() const {
  std::lock_guard lock(state_mutex_);
  return state_.current();
}

}  // namespace nexthelp
