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

#ifndef NEXTHELP_EVENT_LOG_HPP_
#define NEXTHELP_EVENT_LOG_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nexthelp {

// One timestamped line of an interaction log.
struct ActionEvent {
  std::int64_t timestamp_s = 0;  // seconds since session start
  std::string action;
  std::optional<std::string> property;

  bool operator==(const ActionEvent&) const = default;
};

// Throws Error(kInvalidArgument) when the event breaks its invariants
// (empty action, tab or newline in a field, negative timestamp).
void validate_event(const ActionEvent& event);

struct SessionLog {
  std::string source_id;
  std::vector<ActionEvent> events;
  std::vector<std::string> warnings;
};

// One row of the transition database: a previous/current/next window over a
// session plus the current-minus-previous time delta.
struct TransitionRecord {
  std::string paction;
  std::optional<std::string> pprop;
  std::int64_t ptime_s = 0;
  std::string caction;
  std::optional<std::string> cprop;
  std::int64_t ctime_s = 0;
  std::string naction;
  std::optional<std::string> nprop;
  std::int64_t ntime_s = 0;
  std::int64_t cp_time_delta_s = 0;

  bool operator==(const TransitionRecord&) const = default;
};

// Parses "HH:MM:SS", allowing a single space on either side of each colon
// ("00 : 08 : 14"). Throws ParseError naming the offending text.
std::int64_t parse_timestamp(std::string_view text);

// Parses one log line: timestamp, separator, action, and an optional
// separator plus property. A separator is a run of tabs or of two or more
// spaces. Returns nullopt for a blank line.
std::optional<ActionEvent> parse_log_line(std::string_view line,
                                          std::size_t line_number);

// Parses a whole log. Hard errors abort with the first failing line; a
// timestamp that goes backwards only produces a warning.
SessionLog parse_log(std::string_view text, std::string source_id);

// Builds the sliding previous/current/next window: n events give n - 2
// records. Sessions shorter than 3 events give no records and a warning.
std::vector<TransitionRecord> build_transitions(
    const SessionLog& session, std::vector<std::string>* warnings = nullptr);

// The record that the window (previous, current, next) produces. Shared by
// the batch builder and the streaming recorder.
TransitionRecord make_transition(const ActionEvent& previous,
                                 const ActionEvent& current,
                                 const ActionEvent& next);

// Transition database: tab-separated, one header line, ten columns, "-" for
// an absent property.
inline constexpr std::string_view kTransitionDbHeader =
    "paction\tpprop\tptime\tcaction\tcprop\tctime\tnaction\tnprop\tntime\t"
    "cptime_d";
inline constexpr std::string_view kNoProperty = "-";

void write_transition_db_header(std::ostream& sink);
void write_transition_record(const TransitionRecord& record,
                             std::ostream& sink);
void write_transition_db(std::span<const TransitionRecord> records,
                         std::ostream& sink);
std::vector<TransitionRecord> read_transition_db(std::istream& source);

}  // namespace nexthelp

#endif  // NEXTHELP_EVENT_LOG_HPP_
