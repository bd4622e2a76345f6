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

#include "nexthelp/event_log.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>

#include "nexthelp/error.hpp"

namespace nexthelp {
namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

bool has_control(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Strips at most one space on each side of a timestamp field.
std::string_view strip_one_space(std::string_view field) {
  if (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  if (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  return field;
}

int two_digits(std::string_view field, std::string_view whole) {
  if (field.size() != 2 || !std::isdigit(static_cast<unsigned char>(field[0])) ||
      !std::isdigit(static_cast<unsigned char>(field[1]))) {
    throw ParseError(0, "timestamp field '" + std::string(field) +
                            "' is not two decimal digits in '" +
                            std::string(whole) + "'");
  }
  return (field[0] - '0') * 10 + (field[1] - '0');
}

std::int64_t parse_time_column(std::string_view field, std::size_t line,
                               std::string_view column) {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || value < 0) {
    throw ParseError(line, "column " + std::string(column) +
                               " is not a non-negative integer: '" +
                               std::string(field) + "'");
  }
  return value;
}

std::optional<std::string> parse_property_column(std::string_view field) {
  if (field == kNoProperty) return std::nullopt;
  return std::string(field);
}

void check_db_property(const std::optional<std::string>& prop,
                       const char* column) {
  if (!prop) return;
  if (*prop == kNoProperty) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string("property '-' is reserved for the absent value (") +
                    column + ")");
  }
  if (prop->empty() || has_control(*prop)) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string("property in ") + column +
                    " is empty or contains a tab or newline");
  }
}

void check_db_action(const std::string& action, const char* column) {
  if (action.empty() || has_control(action) ||
      action.find(' ') != std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string("invalid action token in ") + column + ": '" +
                    action + "'");
  }
}

}  // namespace

void validate_event(const ActionEvent& event) {
  if (event.timestamp_s < 0) {
    throw Error(ErrorKind::kInvalidArgument, "negative timestamp");
  }
  if (event.action.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty action");
  }
  if (event.action.find_first_of(" \t\n\r") != std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument,
                "action contains whitespace: '" + event.action + "'");
  }
  if (event.property && has_control(*event.property)) {
    throw Error(ErrorKind::kInvalidArgument,
                "property contains a tab or newline");
  }
}

std::int64_t parse_timestamp(std::string_view text) {
  const auto fields = split(text, ':');
  if (fields.size() != 3) {
    throw ParseError(0, "timestamp '" + std::string(text) + "' has " +
                            std::to_string(fields.size()) +
                            " fields, expected HH:MM:SS");
  }
  const int hours = two_digits(strip_one_space(fields[0]), text);
  const int minutes = two_digits(strip_one_space(fields[1]), text);
  const int seconds = two_digits(strip_one_space(fields[2]), text);
  if (minutes >= 60) {
    throw ParseError(0, "minutes out of range in '" + std::string(text) + "'");
  }
  if (seconds >= 60) {
    throw ParseError(0, "seconds out of range in '" + std::string(text) + "'");
  }
  return std::int64_t{hours} * 3600 + minutes * 60 + seconds;
}

std::optional<ActionEvent> parse_log_line(std::string_view line,
                                          std::size_t line_number) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (trim(line).empty()) return std::nullopt;

  // A timestamp never contains a tab or two consecutive spaces, so the first
  // such run ends it.
  const std::size_t tab = line.find('\t');
  const std::size_t spaces = line.find("  ");
  const std::size_t sep = std::min(tab, spaces);
  if (sep == std::string_view::npos) {
    // Either a bare timestamp (missing action) or not a log line at all.
    try {
      parse_timestamp(trim(line));
    } catch (const ParseError& e) {
      throw ParseError(line_number, e.what());
    }
    throw ParseError(line_number, "missing action after timestamp");
  }

  ActionEvent event;
  try {
    event.timestamp_s = parse_timestamp(line.substr(0, sep));
  } catch (const ParseError& e) {
    throw ParseError(line_number, e.what());
  }

  std::string_view rest = line.substr(sep);
  while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) {
    rest.remove_prefix(1);
  }
  const std::size_t action_end = rest.find_first_of(" \t");
  const std::string_view action = rest.substr(0, action_end);
  if (action.empty()) {
    throw ParseError(line_number, "missing action after timestamp");
  }
  event.action = std::string(action);

  if (action_end != std::string_view::npos) {
    std::string_view tail = rest.substr(action_end);
    if (!trim(tail).empty()) {
      if (!(tail.front() == '\t' || tail.starts_with("  "))) {
        throw ParseError(line_number,
                         "expected a tab or two spaces after action '" +
                             event.action + "'");
      }
      const std::string_view property = trim(tail);
      if (property.find('\t') != std::string_view::npos) {
        throw ParseError(line_number, "too many tab-separated columns");
      }
      event.property = std::string(property);
    }
  }
  return event;
}

SessionLog parse_log(std::string_view text, std::string source_id) {
  SessionLog log;
  log.source_id = std::move(source_id);
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_number;
    auto event = parse_log_line(text.substr(start, end - start), line_number);
    if (event) {
      if (!log.events.empty() &&
          event->timestamp_s < log.events.back().timestamp_s) {
        log.warnings.push_back(log.source_id + ": line " +
                               std::to_string(line_number) +
                               ": timestamp goes backwards");
      }
      log.events.push_back(std::move(*event));
    }
    start = end + 1;
  }
  return log;
}

TransitionRecord make_transition(const ActionEvent& previous,
                                 const ActionEvent& current,
                                 const ActionEvent& next) {
  TransitionRecord r;
  r.paction = previous.action;
  r.pprop = previous.property;
  r.ptime_s = previous.timestamp_s;
  r.caction = current.action;
  r.cprop = current.property;
  r.ctime_s = current.timestamp_s;
  r.naction = next.action;
  r.nprop = next.property;
  r.ntime_s = next.timestamp_s;
  // Out-of-order timestamps are tolerated upstream; the delta is clamped so
  // it stays a duration.
  r.cp_time_delta_s = std::max<std::int64_t>(0, r.ctime_s - r.ptime_s);
  return r;
}

std::vector<TransitionRecord> build_transitions(
    const SessionLog& session, std::vector<std::string>* warnings) {
  const auto& events = session.events;
  std::vector<TransitionRecord> records;
  if (events.size() < 3) {
    if (warnings) {
      warnings->push_back(session.source_id + ": " +
                          std::to_string(events.size()) +
                          " events, need at least 3 for a transition");
    }
    return records;
  }
  records.reserve(events.size() - 2);
  for (std::size_t i = 0; i + 2 < events.size(); ++i) {
    records.push_back(make_transition(events[i], events[i + 1], events[i + 2]));
  }
  return records;
}

void write_transition_db_header(std::ostream& sink) {
  sink << kTransitionDbHeader << '\n';
}

void write_transition_record(const TransitionRecord& r, std::ostream& sink) {
  check_db_action(r.paction, "paction");
  check_db_action(r.caction, "caction");
  check_db_action(r.naction, "naction");
  check_db_property(r.pprop, "pprop");
  check_db_property(r.cprop, "cprop");
  check_db_property(r.nprop, "nprop");
  if (r.ptime_s < 0 || r.ctime_s < 0 || r.ntime_s < 0 ||
      r.cp_time_delta_s < 0) {
    throw Error(ErrorKind::kInvalidArgument, "negative time in record");
  }
  auto prop = [](const std::optional<std::string>& p) -> std::string_view {
    return p ? std::string_view(*p) : kNoProperty;
  };
  sink << r.paction << '\t' << prop(r.pprop) << '\t' << r.ptime_s << '\t'
       << r.caction << '\t' << prop(r.cprop) << '\t' << r.ctime_s << '\t'
       << r.naction << '\t' << prop(r.nprop) << '\t' << r.ntime_s << '\t'
       << r.cp_time_delta_s << '\n';
  if (!sink) throw Error(ErrorKind::kIo, "failed writing transition record");
}

void write_transition_db(std::span<const TransitionRecord> records,
                         std::ostream& sink) {
  write_transition_db_header(sink);
  for (const auto& r : records) write_transition_record(r, sink);
}

std::vector<TransitionRecord> read_transition_db(std::istream& source) {
  std::vector<TransitionRecord> records;
  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  while (std::getline(source, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kTransitionDbHeader) {
        throw ParseError(line_number, "missing transition database header");
      }
      header_seen = true;
      continue;
    }
    const auto cols = split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(line_number, "expected 10 columns, found " +
                                        std::to_string(cols.size()));
    }
    TransitionRecord r;
    r.paction = std::string(cols[0]);
    r.pprop = parse_property_column(cols[1]);
    r.ptime_s = parse_time_column(cols[2], line_number, "ptime");
    r.caction = std::string(cols[3]);
    r.cprop = parse_property_column(cols[4]);
    r.ctime_s = parse_time_column(cols[5], line_number, "ctime");
    r.naction = std::string(cols[6]);
    r.nprop = parse_property_column(cols[7]);
    r.ntime_s = parse_time_column(cols[8], line_number, "ntime");
    r.cp_time_delta_s = parse_time_column(cols[9], line_number, "cptime_d");
    if (r.paction.empty() || r.caction.empty() || r.naction.empty()) {
      throw ParseError(line_number, "empty action column");
    }
    records.push_back(std::move(r));
  }
  if (source.bad()) throw Error(ErrorKind::kIo, "failed reading database");
  return records;
}

}  // namespace nexthelp
