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

// Command-line front end. Talks to the library exclusively through the C API.

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nexthelp/nexthelp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Owning wrappers for the C handles.
template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Records = std::unique_ptr<nh_records, Deleter<nh_records, nh_records_free>>;
using NetworkHandle = std::unique_ptr<nh_network, Deleter<nh_network, nh_network_free>>;
using Topics = std::unique_ptr<nh_topics, Deleter<nh_topics, nh_topics_free>>;
using Prediction =
    std::unique_ptr<nh_prediction, Deleter<nh_prediction, nh_prediction_free>>;
using Assistant =
    std::unique_ptr<nh_assistant, Deleter<nh_assistant, nh_assistant_free>>;
using Report = std::unique_ptr<nh_report, Deleter<nh_report, nh_report_free>>;

struct Failure {
  int exit_code;
};

void check(nh_status status) {
  if (status == NH_OK) return;
  std::cerr << "error: " << nh_last_error() << '\n';
  throw Failure{status == NH_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "error: " << message << '\n';
  throw Failure{kExitUsage};
}

struct RunConfig {
  double ess = 1.0;
  std::uint64_t seed = 0;
  std::size_t folds = 10;
  std::size_t top_k = 3;
  std::string fields;
  std::string mode = "fixed-chain";
  std::size_t max_parents = 2;
  std::string protocol;
  std::string db;
  std::string net;
  std::string topics;
  std::string out;
  std::string log;
  std::vector<std::string> logs;
  std::string action;
  bool tsv = false;
  bool trace = false;
};

Topics load_topics(const std::string& path) {
  nh_topics* topics = nullptr;
  check(path.empty() ? nh_topics_create(&topics) : nh_topics_load(path.c_str(), &topics));
  return Topics(topics);
}

NetworkHandle load_network(const std::string& path) {
  nh_network* network = nullptr;
  check(nh_network_load(path.c_str(), &network));
  return NetworkHandle(network);
}

void print_prediction(const nh_prediction* prediction) {
  if (nh_prediction_fallback(prediction)) {
    std::cout << "[fallback] no known current action; ranking by next-action "
                 "marginal\n";
  }
  for (std::size_t i = 0; i < nh_prediction_size(prediction); ++i) {
    const char* action = nullptr;
    const char* topic_id = nullptr;
    const char* title = nullptr;
    double p = 0.0;
    check(nh_prediction_entry(prediction, i, &action, &p, &topic_id, &title));
    char prob[32];
    std::snprintf(prob, sizeof prob, "%.6f", p);
    std::cout << (i + 1) << ". " << action << ' ' << prob << ' ' << topic_id
              << ' ' << title << '\n';
  }
}

int cmd_ingest(const RunConfig& cfg) {
  nh_records* raw = nullptr;
  check(nh_records_create(&raw));
  Records records(raw);
  std::size_t total_events = 0;
  for (const auto& path : cfg.logs) {
    std::size_t events = 0;
    std::size_t added = 0;
    check(nh_records_ingest_log(records.get(), path.c_str(), &events, &added));
    total_events += events;
    std::cout << path << ": " << events << " events, " << added << " records\n";
  }
  for (std::size_t i = 0; i < nh_records_warning_count(records.get()); ++i) {
    std::cerr << "warning: " << nh_records_warning(records.get(), i) << '\n';
  }
  check(nh_records_append_db(records.get(), cfg.db.c_str()));
  std::cout << "total: " << total_events << " events, "
            << nh_records_count(records.get()) << " records appended to "
            << cfg.db << '\n';
  return kExitOk;
}

int cmd_learn(const RunConfig& cfg) {
  nh_records* raw = nullptr;
  check(nh_records_read_db(cfg.db.c_str(), &raw));
  Records records(raw);
  if (nh_records_count(records.get()) == 0) {
    std::cerr << "error: database '" << cfg.db << "' holds no records\n";
    return kExitData;
  }
  nh_learn_options options;
  nh_learn_options_init(&options);
  options.ess = cfg.ess;
  options.max_parents = cfg.max_parents;
  if (!cfg.fields.empty()) options.fields = cfg.fields.c_str();
  if (cfg.mode == "fixed-chain") {
    options.mode = NH_STRUCTURE_CHAIN;
  } else if (cfg.mode == "exhaustive") {
    options.mode = NH_STRUCTURE_EXHAUSTIVE;
  } else if (cfg.mode == "greedy") {
    options.mode = NH_STRUCTURE_GREEDY;
  } else {
    usage_error("unknown mode '" + cfg.mode + "'");
  }
  nh_network* net = nullptr;
  double score = 0.0;
  check(nh_learn(records.get(), &options, &net, &score));
  NetworkHandle network(net);
  check(nh_network_save(network.get(), cfg.out.c_str()));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", score);
  std::cout << "records: " << nh_records_count(records.get()) << '\n'
            << "mode: " << cfg.mode << '\n'
            << "structure: " << nh_network_structure(network.get()) << '\n'
            << "log score: " << buf << '\n'
            << "wrote " << cfg.out << '\n';
  return kExitOk;
}

int cmd_predict(const RunConfig& cfg) {
  const NetworkHandle network = load_network(cfg.net);
  const Topics topics = load_topics(cfg.topics);
  nh_prediction* raw = nullptr;
  check(nh_predict(network.get(), topics.get(),
                   cfg.action.empty() ? nullptr : cfg.action.c_str(), cfg.top_k,
                   &raw));
  const Prediction prediction(raw);
  print_prediction(prediction.get());
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, bool top_k_given) {
  nh_report* raw = nullptr;
  if (cfg.protocol == "cv") {
    if (cfg.db.empty()) usage_error("cv needs --db");
    nh_records* rec = nullptr;
    check(nh_records_read_db(cfg.db.c_str(), &rec));
    const Records records(rec);
    nh_cv_options options;
    nh_cv_options_init(&options);
    options.folds = cfg.folds;
    options.ess = cfg.ess;
    options.seed = cfg.seed;
    options.top_k = top_k_given ? cfg.top_k : 1;
    check(nh_cross_validate(records.get(), &options, &raw));
  } else {
    if (cfg.log.empty()) usage_error("replay needs a raw interaction log (--log)");
    if (cfg.net.empty()) usage_error("replay needs --net");
    const NetworkHandle network = load_network(cfg.net);
    const Topics topics = load_topics(cfg.topics);
    check(nh_replay_log(network.get(), topics.get(), cfg.log.c_str(), cfg.top_k, &raw));
  }
  const Report report(raw);
  if (cfg.trace) std::cout << nh_report_trace(report.get());
  std::cout << (cfg.tsv ? nh_report_tsv(report.get()) : nh_report_text(report.get()));
  return kExitOk;
}

bool valid_action_token(const std::string& token) {
  if (token.empty()) return false;
  for (unsigned char c : token) {
    if (!std::isalnum(c) && c != '_' && c != '-' && c != '.') return false;
  }
  return true;
}

int cmd_assist(const RunConfig& cfg) {
  const NetworkHandle network = load_network(cfg.net);
  const Topics topics = load_topics(cfg.topics);
  nh_assistant* raw = nullptr;
  check(nh_assistant_create(network.get(), topics.get(),
                            cfg.db.empty() ? nullptr : cfg.db.c_str(), &raw));
  const Assistant assistant(raw);

  std::int64_t clock = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream words(line);
    std::string first;
    if (!(words >> first)) continue;
    if (first == "quit") break;
    if (first == "?") {
      nh_prediction* p = nullptr;
      check(nh_assistant_query(assistant.get(), cfg.top_k, &p));
      const Prediction prediction(p);
      print_prediction(prediction.get());
      std::cout.flush();
      continue;
    }
    // Optional leading "HH:MM:SS"; otherwise the previous timestamp is reused.
    if (first.find(':') != std::string::npos) {
      std::int64_t seconds = 0;
      if (nh_parse_timestamp(first.c_str(), &seconds) != NH_OK) {
        std::cerr << "warning: ignoring line with bad timestamp: " << line << '\n';
        continue;
      }
      if (!(words >> first)) {
        std::cerr << "warning: ignoring line without action: " << line << '\n';
        continue;
      }
      clock = seconds;
    }
    if (!valid_action_token(first)) {
      std::cerr << "warning: ignoring malformed action line: " << line << '\n';
      continue;
    }
    std::string property;
    std::getline(words >> std::ws, property);
    const nh_status status = nh_assistant_record(
        assistant.get(), clock, first.c_str(),
        property.empty() ? nullptr : property.c_str());
    if (status != NH_OK) {
      std::cerr << "warning: " << nh_last_error() << '\n';
    }
  }
  std::cout << nh_assistant_transition_count(assistant.get())
            << " transitions recorded\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Next-action prediction and adaptive help from interaction logs"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* ingest = app.add_subcommand("ingest", "Parse logs into the transition database");
  ingest->add_option("--db", cfg.db, "Transition database (appended)")->required();
  ingest->add_option("logs", cfg.logs, "Interaction log files, one session each")
      ->required()
      ->check(CLI::ExistingFile);

  auto* learn = app.add_subcommand("learn", "Learn a network from the database");
  learn->add_option("--db", cfg.db, "Transition database")->required();
  learn->add_option("--out", cfg.out, "Network file to write")->required();
  learn->add_option("--mode", cfg.mode, "fixed-chain | exhaustive | greedy")
      ->capture_default_str();
  learn->add_option("--fields", cfg.fields,
                    "Comma-separated fields (paction,pprop,caction,cprop,naction,"
                    "nprop,cptime_bin)");
  learn->add_option("--ess", cfg.ess, "Equivalent sample size")->capture_default_str();
  learn->add_option("--max-parents", cfg.max_parents, "Parent limit for search")
      ->capture_default_str();

  auto* predict = app.add_subcommand("predict", "Rank the next actions");
  predict->add_option("--net", cfg.net, "Network file")->required();
  predict->add_option("--topics", cfg.topics, "Help topic map");
  auto* predict_k = predict->add_option("--top-k", cfg.top_k, "Number of actions");
  predict_k->capture_default_str();
  predict->add_option("action", cfg.action, "Current action (omit for cold start)");

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validation or replay");
  evaluate->add_option("--protocol", cfg.protocol, "cv | replay")
      ->required()
      ->check(CLI::IsMember({"cv", "replay"}));
  evaluate->add_option("--db", cfg.db, "Transition database (cv)");
  evaluate->add_option("--log", cfg.log, "Raw interaction log (replay)");
  evaluate->add_option("--net", cfg.net, "Network file (replay)");
  evaluate->add_option("--topics", cfg.topics, "Help topic map (replay)");
  evaluate->add_option("--folds", cfg.folds, "Fold count (cv)")->capture_default_str();
  evaluate->add_option("--ess", cfg.ess, "Equivalent sample size (cv)")
      ->capture_default_str();
  evaluate->add_option("--seed", cfg.seed, "Shuffle seed (cv)")->capture_default_str();
  auto* evaluate_k = evaluate->add_option(
      "--top-k", cfg.top_k, "Ranks counted as hits (cv default 1, replay default 3)");
  evaluate->add_flag("--tsv", cfg.tsv, "Print the tab-separated report");
  evaluate->add_flag("--trace", cfg.trace, "Print each replay step");

  auto* assist = app.add_subcommand("assist", "Interactive help loop on stdin");
  assist->add_option("--net", cfg.net, "Network file")->required();
  assist->add_option("--topics", cfg.topics, "Help topic map");
  assist->add_option("--db", cfg.db, "Append transitions to this database");
  assist->add_option("--top-k", cfg.top_k, "Number of topics")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (cfg.top_k == 0) {
    std::cerr << "error: --top-k must be at least 1\n";
    return kExitUsage;
  }
  if (!(cfg.ess > 0.0)) {
    std::cerr << "error: --ess must be positive\n";
    return kExitUsage;
  }
  if (cfg.folds < 2) {
    std::cerr << "error: --folds must be at least 2\n";
    return kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(cfg);
    if (*learn) return cmd_learn(cfg);
    if (*predict) return cmd_predict(cfg);
    if (*evaluate) return cmd_evaluate(cfg, evaluate_k->count() > 0);
    if (*assist) return cmd_assist(cfg);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  (void)predict_k;
  return kExitUsage;
}
