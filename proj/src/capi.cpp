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

#include "nexthelp/nexthelp.h"

#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "nexthelp/ausm.hpp"
#include "nexthelp/bbn_model.hpp"
#include "nexthelp/error.hpp"
#include "nexthelp/eval.hpp"
#include "nexthelp/event_log.hpp"
#include "nexthelp/network_io.hpp"
#include "nexthelp/scoring.hpp"

using namespace nexthelp;

struct nh_records {
  std::vector<TransitionRecord> records;
  std::vector<std::string> warnings;
};

struct nh_network {
  std::shared_ptr<const Network> network;
  std::string structure;
};

struct nh_topics {
  HelpTopicMap map;
};

struct nh_prediction {
  PredictionResult result;
};

struct nh_assistant {
  std::unique_ptr<TransitionSink> sink;
  std::unique_ptr<AdaptiveSupport> support;
};

struct nh_report {
  std::string text;
  std::string tsv;
  std::string trace;
};

namespace {

thread_local std::string last_error;

nh_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return NH_ERR_INVALID_ARGUMENT;
    case ErrorKind::kParse: return NH_ERR_PARSE;
    case ErrorKind::kData: return NH_ERR_DATA;
    case ErrorKind::kIo: return NH_ERR_IO;
    case ErrorKind::kInference: return NH_ERR_INFERENCE;
  }
  return NH_ERR_INTERNAL;
}

template <typename F>
nh_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return NH_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return NH_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return NH_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return NH_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " is null");
  }
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, std::string("cannot open '") + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIo, std::string("failed reading '") + path + "'");
  return text.str();
}

SessionLog parse_log_file(const char* path) {
  const std::string text = read_file(path);
  try {
    return parse_log(text, path);
  } catch (const ParseError& e) {
    throw ParseError(0, std::string(path) + ": " + e.what());
  }
}

std::string describe_structure(const Network& network) {
  const auto edges = network.dag().edges();
  if (edges.empty()) return "(no edges)";
  std::string out;
  for (const auto& e : edges) {
    if (!out.empty()) out += "; ";
    out += network.variable(e.parent).name + " -> " + network.variable(e.child).name;
  }
  return out;
}

nh_network* wrap(Network network) {
  auto* handle = new nh_network;
  handle->network = std::make_shared<const Network>(std::move(network));
  handle->structure = describe_structure(*handle->network);
  return handle;
}

const HelpTopicMap& topics_or_default(const nh_topics* topics) {
  static const HelpTopicMap kEmpty;
  return topics ? topics->map : kEmpty;
}

}  // namespace

extern "C" {

const char* nh_version(void) { return "1.0.0"; }

const char* nh_last_error(void) { return last_error.c_str(); }

const char* nh_status_name(nh_status status) {
  switch (status) {
    case NH_OK: return "ok";
    case NH_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NH_ERR_PARSE: return "parse error";
    case NH_ERR_DATA: return "data error";
    case NH_ERR_IO: return "i/o error";
    case NH_ERR_INFERENCE: return "inference error";
    case NH_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

nh_status nh_records_create(nh_records** out) {
  return guarded([&] {
    require(out, "out");
    *out = new nh_records;
  });
}

nh_status nh_records_read_db(const char* path, nh_records** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kIo, std::string("cannot open '") + path + "'");
    auto handle = std::make_unique<nh_records>();
    try {
      handle->records = read_transition_db(in);
    } catch (const ParseError& e) {
      throw ParseError(0, std::string(path) + ": " + e.what());
    }
    *out = handle.release();
  });
}

nh_status nh_records_write_db(const nh_records* records, const char* path) {
  return guarded([&] {
    require(records, "records");
    require(path, "path");
    std::ostringstream text;
    write_transition_db(records->records, text);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, std::string("cannot open '") + path + "'");
    out << text.str();
    if (!out) throw Error(ErrorKind::kIo, std::string("failed writing '") + path + "'");
  });
}

nh_status nh_records_append_db(const nh_records* records, const char* path) {
  return guarded([&] {
    require(records, "records");
    require(path, "path");
    TransitionDbAppender sink(path);
    for (const auto& r : records->records) sink.append(r);
  });
}

nh_status nh_records_ingest_log(nh_records* records, const char* log_path,
                                size_t* events, size_t* added) {
  return guarded([&] {
    require(records, "records");
    require(log_path, "log_path");
    const SessionLog session = parse_log_file(log_path);
    auto transitions = build_transitions(session, &records->warnings);
    for (const auto& w : session.warnings) records->warnings.push_back(w);
    if (events) *events = session.events.size();
    if (added) *added = transitions.size();
    records->records.insert(records->records.end(),
                            std::make_move_iterator(transitions.begin()),
                            std::make_move_iterator(transitions.end()));
  });
}

size_t nh_records_count(const nh_records* records) {
  return records ? records->records.size() : 0;
}

size_t nh_records_warning_count(const nh_records* records) {
  return records ? records->warnings.size() : 0;
}

const char* nh_records_warning(const nh_records* records, size_t index) {
  if (!records || index >= records->warnings.size()) return nullptr;
  return records->warnings[index].c_str();
}

void nh_records_free(nh_records* records) { delete records; }

void nh_learn_options_init(nh_learn_options* options) {
  if (!options) return;
  options->ess = 1.0;
  options->mode = NH_STRUCTURE_CHAIN;
  options->max_parents = 2;
  options->fields = nullptr;
  options->name = nullptr;
}

nh_status nh_learn(const nh_records* records, const nh_learn_options* options,
                   nh_network** out, double* log_score) {
  return guarded([&] {
    require(records, "records");
    require(out, "out");
    nh_learn_options opts;
    nh_learn_options_init(&opts);
    if (options) opts = *options;
    if (!(opts.ess > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "ess must be positive");
    }
    const FieldSelection fields =
        opts.fields ? parse_field_list(opts.fields) : default_field_selection();
    const Dataset data = records_to_instances(records->records, fields);

    std::optional<Dag> dag;
    switch (opts.mode) {
      case NH_STRUCTURE_CHAIN:
        dag.emplace(chain_dag(data.variables));
        break;
      case NH_STRUCTURE_EXHAUSTIVE:
      case NH_STRUCTURE_GREEDY: {
        SearchOptions search;
        search.mode = opts.mode == NH_STRUCTURE_EXHAUSTIVE ? SearchMode::kExhaustive
                                                           : SearchMode::kGreedy;
        search.max_parents = opts.max_parents;
        search.ess = opts.ess;
        dag.emplace(select_best_structure(data, search).dag);
        break;
      }
      default:
        throw Error(ErrorKind::kInvalidArgument, "unknown structure mode");
    }
    const CountTable counts = tally_counts(data.instances, *dag);
    const double score = log_marginal_likelihood(*dag, counts, opts.ess);
    Network network(opts.name ? opts.name : "nexthelp", *dag,
                    estimate_cpts(counts, PriorConfig{opts.ess}));
    *out = wrap(std::move(network));
    if (log_score) *log_score = score;
  });
}

nh_status nh_network_load(const char* path, nh_network** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(load_network(path));
  });
}

nh_status nh_network_save(const nh_network* network, const char* path) {
  return guarded([&] {
    require(network, "network");
    require(path, "path");
    save_network(*network->network, path);
  });
}

const char* nh_network_structure(const nh_network* network) {
  return network ? network->structure.c_str() : "";
}

size_t nh_network_variable_count(const nh_network* network) {
  return network ? network->network->size() : 0;
}

void nh_network_free(nh_network* network) { delete network; }

nh_status nh_topics_create(nh_topics** out) {
  return guarded([&] {
    require(out, "out");
    *out = new nh_topics;
  });
}

nh_status nh_topics_load(const char* path, nh_topics** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<nh_topics>();
    handle->map = load_topic_map_file(path);
    *out = handle.release();
  });
}

void nh_topics_free(nh_topics* topics) { delete topics; }

nh_status nh_predict(const nh_network* network, const nh_topics* topics,
                     const char* current_action, size_t k,
                     nh_prediction** out) {
  return guarded([&] {
    require(network, "network");
    require(out, "out");
    std::optional<std::string_view> current;
    if (current_action) current = current_action;
    auto handle = std::make_unique<nh_prediction>();
    handle->result =
        query_help(current, *network->network, topics_or_default(topics), k);
    *out = handle.release();
  });
}

size_t nh_prediction_size(const nh_prediction* prediction) {
  return prediction ? prediction->result.ranked.size() : 0;
}

int nh_prediction_fallback(const nh_prediction* prediction) {
  return prediction && prediction->result.fallback ? 1 : 0;
}

nh_status nh_prediction_entry(const nh_prediction* prediction, size_t index,
                              const char** action, double* probability,
                              const char** topic_id, const char** topic_title) {
  return guarded([&] {
    require(prediction, "prediction");
    if (index >= prediction->result.ranked.size()) {
      throw Error(ErrorKind::kInvalidArgument, "prediction index out of range");
    }
    const auto& entry = prediction->result.ranked[index];
    if (action) *action = entry.action.c_str();
    if (probability) *probability = entry.probability;
    if (topic_id) *topic_id = entry.topic.id.c_str();
    if (topic_title) *topic_title = entry.topic.title.c_str();
  });
}

void nh_prediction_free(nh_prediction* prediction) { delete prediction; }

nh_status nh_assistant_create(const nh_network* network,
                              const nh_topics* topics, const char* db_path,
                              nh_assistant** out) {
  return guarded([&] {
    require(network, "network");
    require(out, "out");
    auto handle = std::make_unique<nh_assistant>();
    if (db_path) {
      handle->sink = std::make_unique<TransitionDbAppender>(db_path);
    } else {
      handle->sink = std::make_unique<VectorSink>();
    }
    handle->support = std::make_unique<AdaptiveSupport>(
        network->network, topics_or_default(topics), *handle->sink);
    *out = handle.release();
  });
}

nh_status nh_assistant_record(nh_assistant* assistant, int64_t timestamp_s,
                              const char* action, const char* property) {
  return guarded([&] {
    require(assistant, "assistant");
    require(action, "action");
    ActionEvent event{timestamp_s, action, std::nullopt};
    if (property && *property) event.property = property;
    assistant->support->record_action(event);
  });
}

nh_status nh_assistant_query(const nh_assistant* assistant, size_t k,
                             nh_prediction** out) {
  return guarded([&] {
    require(assistant, "assistant");
    require(out, "out");
    auto handle = std::make_unique<nh_prediction>();
    handle->result = assistant->support->query_help(k);
    *out = handle.release();
  });
}

nh_status nh_assistant_reload(nh_assistant* assistant, const char* network_path) {
  return guarded([&] {
    require(assistant, "assistant");
    require(network_path, "network_path");
    assistant->support->reload_network(network_path);
  });
}

size_t nh_assistant_transition_count(const nh_assistant* assistant) {
  return assistant ? assistant->support->appended() : 0;
}

void nh_assistant_free(nh_assistant* assistant) { delete assistant; }

void nh_cv_options_init(nh_cv_options* options) {
  if (!options) return;
  const CvOptions defaults;
  options->folds = defaults.folds;
  options->ess = defaults.ess;
  options->top_k = defaults.top_k;
  options->seed = defaults.seed;
}

nh_status nh_cross_validate(const nh_records* records,
                            const nh_cv_options* options, nh_report** out) {
  return guarded([&] {
    require(records, "records");
    require(out, "out");
    CvOptions opts;
    if (options) {
      opts.folds = options->folds;
      opts.ess = options->ess;
      opts.top_k = options->top_k;
      opts.seed = options->seed;
    }
    const CvReport report = cross_validate(records->records, opts);
    auto handle = std::make_unique<nh_report>();
    handle->text = render_report(report);
    handle->tsv = render_report_tsv(report);
    *out = handle.release();
  });
}

nh_status nh_replay_log(const nh_network* network, const nh_topics* topics,
                        const char* log_path, size_t k, nh_report** out) {
  return guarded([&] {
    require(network, "network");
    require(log_path, "log_path");
    require(out, "out");
    const SessionLog session = parse_log_file(log_path);
    const ReplayReport report =
        replay_evaluate(*network->network, session, topics_or_default(topics), k);
    auto handle = std::make_unique<nh_report>();
    handle->text = render_report(report);
    handle->tsv = render_report_tsv(report);
    handle->trace = render_replay_trace(report);
    *out = handle.release();
  });
}

const char* nh_report_text(const nh_report* report) {
  return report ? report->text.c_str() : "";
}

const char* nh_report_tsv(const nh_report* report) {
  return report ? report->tsv.c_str() : "";
}

const char* nh_report_trace(const nh_report* report) {
  return report ? report->trace.c_str() : "";
}

void nh_report_free(nh_report* report) { delete report; }

nh_status nh_parse_timestamp(const char* text, int64_t* seconds) {
  return guarded([&] {
    require(text, "text");
    require(seconds, "seconds");
    *seconds = parse_timestamp(text);
  });
}

}  // extern "C"
