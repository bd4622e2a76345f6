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

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "doctest.h"
#include "nexthelp/nexthelp.h"
#include "support/fixtures.hpp"

using fixture::TempPath;

namespace {

nh_records* figure3_records() {
  nh_records* records = nullptr;
  REQUIRE(nh_records_create(&records) == NH_OK);
  size_t events = 0;
  size_t added = 0;
  REQUIRE(nh_records_ingest_log(records, fixture::data_path("figure3.log").c_str(),
                                &events, &added) == NH_OK);
  CHECK(events == 18);
  CHECK(added == 16);
  return records;
}

nh_network* chain_from(const nh_records* records) {
  nh_learn_options options;
  nh_learn_options_init(&options);
  nh_network* net = nullptr;
  REQUIRE(nh_learn(records, &options, &net, nullptr) == NH_OK);
  return net;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::strlen(nh_version()) > 0);
  CHECK(std::string(nh_status_name(NH_OK)) == "ok");
  CHECK(std::string(nh_status_name(NH_ERR_PARSE)) == "parse error");
  int64_t s = 0;
  CHECK(nh_parse_timestamp("00 : 08 : 14", &s) == NH_OK);
  CHECK(s == 494);
  CHECK(nh_parse_timestamp("8:14", &s) == NH_ERR_PARSE);
  CHECK(std::strlen(nh_last_error()) > 0);
  CHECK(nh_parse_timestamp(nullptr, &s) == NH_ERR_INVALID_ARGUMENT);
}

TEST_CASE("records round trip through the database") {
  nh_records* records = figure3_records();
  CHECK(nh_records_count(records) == 16);
  CHECK(nh_records_ingest_log(records, fixture::data_path("figure3.log").c_str(),
                              nullptr, nullptr) == NH_OK);
  CHECK(nh_records_count(records) == 32);

  TempPath db("capi_db");
  CHECK(nh_records_write_db(records, db.str().c_str()) == NH_OK);
  CHECK(nh_records_append_db(records, db.str().c_str()) == NH_OK);
  nh_records* back = nullptr;
  REQUIRE(nh_records_read_db(db.str().c_str(), &back) == NH_OK);
  CHECK(nh_records_count(back) == 64);
  nh_records_free(back);

  nh_records* missing = nullptr;
  CHECK(nh_records_read_db("/nonexistent/db.tsv", &missing) == NH_ERR_IO);
  CHECK(missing == nullptr);
  CHECK(nh_records_ingest_log(records, "/nonexistent/x.log", nullptr, nullptr) ==
        NH_ERR_IO);

  TempPath bad("capi_bad_log");
  {
    std::ofstream out(bad.str());
    out << "00:00:01\tStart\nnot a timestamp\tAction\n";
  }
  CHECK(nh_records_ingest_log(records, bad.str().c_str(), nullptr, nullptr) ==
        NH_ERR_PARSE);
  CHECK(std::string(nh_last_error()).find("line 2") != std::string::npos);
  CHECK(nh_records_count(records) == 32);
  nh_records_free(records);
  nh_records_free(nullptr);
}

TEST_CASE("learn, save, load and predict") {
  nh_records* records = figure3_records();
  nh_network* net = chain_from(records);
  CHECK(std::string(nh_network_structure(net)) ==
        "Paction -> Caction; Caction -> Naction");
  CHECK(nh_network_variable_count(net) == 3);

  TempPath file("capi_net");
  REQUIRE(nh_network_save(net, file.str().c_str()) == NH_OK);
  nh_network* loaded = nullptr;
  REQUIRE(nh_network_load(file.str().c_str(), &loaded) == NH_OK);

  for (const nh_network* n : {static_cast<const nh_network*>(net),
                              static_cast<const nh_network*>(loaded)}) {
    nh_prediction* p = nullptr;
    REQUIRE(nh_predict(n, nullptr, "InsertObject", 100, &p) == NH_OK);
    CHECK_FALSE(nh_prediction_fallback(p));
    double sum = 0.0;
    double last = 1.0;
    for (size_t i = 0; i < nh_prediction_size(p); ++i) {
      const char* action = nullptr;
      double prob = 0.0;
      const char* id = nullptr;
      REQUIRE(nh_prediction_entry(p, i, &action, &prob, &id, nullptr) == NH_OK);
      CHECK(prob <= last);
      last = prob;
      sum += prob;
      CHECK(std::string(id) == "HELP.GENERIC");
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK(nh_prediction_entry(p, 999, nullptr, nullptr, nullptr, nullptr) ==
          NH_ERR_INVALID_ARGUMENT);
    nh_prediction_free(p);
  }

  nh_prediction* cold = nullptr;
  REQUIRE(nh_predict(net, nullptr, nullptr, 3, &cold) == NH_OK);
  CHECK(nh_prediction_fallback(cold));
  CHECK(nh_prediction_size(cold) == 3);
  nh_prediction_free(cold);

  nh_prediction* zero = nullptr;
  CHECK(nh_predict(net, nullptr, "InsertObject", 0, &zero) == NH_ERR_INVALID_ARGUMENT);

  nh_learn_options options;
  nh_learn_options_init(&options);
  options.mode = NH_STRUCTURE_EXHAUSTIVE;
  double score = 0.0;
  nh_network* searched = nullptr;
  REQUIRE(nh_learn(records, &options, &searched, &score) == NH_OK);
  CHECK(score < 0.0);
  nh_network_free(searched);

  options.fields = "paction,bogus";
  nh_network* none = nullptr;
  CHECK(nh_learn(records, &options, &none, nullptr) == NH_ERR_INVALID_ARGUMENT);
  CHECK(none == nullptr);

  nh_records* empty = nullptr;
  nh_records_create(&empty);
  nh_learn_options_init(&options);
  CHECK(nh_learn(empty, &options, &none, nullptr) != NH_OK);
  nh_records_free(empty);

  nh_network_free(loaded);
  nh_network_free(net);
  nh_records_free(records);
}

TEST_CASE("assistant") {
  nh_records* records = figure3_records();
  nh_network* net = chain_from(records);
  TempPath topics_file("capi_topics");
  {
    std::ofstream out(topics_file.str());
    out << "ConnectRelation\tHELP.CONNECT\tHow to connect a relation\n";
  }
  nh_topics* topics = nullptr;
  REQUIRE(nh_topics_load(topics_file.str().c_str(), &topics) == NH_OK);

  TempPath db("capi_assist_db");
  nh_assistant* assistant = nullptr;
  REQUIRE(nh_assistant_create(net, topics, db.str().c_str(), &assistant) == NH_OK);
  nh_prediction* p = nullptr;
  REQUIRE(nh_assistant_query(assistant, 3, &p) == NH_OK);
  CHECK(nh_prediction_fallback(p));
  nh_prediction_free(p);

  CHECK(nh_assistant_record(assistant, 0, "Start", nullptr) == NH_OK);
  CHECK(nh_assistant_record(assistant, 5, "InsertObject", "Stock") == NH_OK);
  CHECK(nh_assistant_record(assistant, 9, "ConnectRelation", nullptr) == NH_OK);
  CHECK(nh_assistant_record(assistant, 9, "", nullptr) == NH_ERR_INVALID_ARGUMENT);
  CHECK(nh_assistant_transition_count(assistant) == 1);

  REQUIRE(nh_assistant_query(assistant, 3, &p) == NH_OK);
  CHECK_FALSE(nh_prediction_fallback(p));
  nh_prediction_free(p);

  CHECK(nh_assistant_reload(assistant, "/nonexistent/net.txt") == NH_ERR_IO);
  REQUIRE(nh_assistant_query(assistant, 3, &p) == NH_OK);
  CHECK(nh_prediction_size(p) == 3);
  nh_prediction_free(p);
  nh_assistant_free(assistant);

  nh_records* written = nullptr;
  REQUIRE(nh_records_read_db(db.str().c_str(), &written) == NH_OK);
  CHECK(nh_records_count(written) == 1);
  nh_records_free(written);

  nh_topics_free(topics);
  nh_network_free(net);
  nh_records_free(records);
}

TEST_CASE("evaluation reports") {
  nh_records* records = figure3_records();
  nh_cv_options cv;
  nh_cv_options_init(&cv);
  CHECK(cv.folds == 10);
  CHECK(cv.top_k == 1);
  nh_report* report = nullptr;
  REQUIRE(nh_cross_validate(records, &cv, &report) == NH_OK);
  CHECK(std::string(nh_report_text(report)).find("mean accuracy: ") != std::string::npos);
  CHECK(std::string(nh_report_trace(report)).empty());
  nh_report_free(report);

  cv.folds = 40;
  CHECK(nh_cross_validate(records, &cv, &report) != NH_OK);

  nh_network* net = chain_from(records);
  REQUIRE(nh_replay_log(net, nullptr, fixture::data_path("figure3.log").c_str(), 3,
                        &report) == NH_OK);
  CHECK(std::string(nh_report_text(report)).find("queries: 16") != std::string::npos);
  CHECK(std::string(nh_report_tsv(report)).find("protocol\treplay") != std::string::npos);
  CHECK_FALSE(std::string(nh_report_trace(report)).empty());
  nh_report_free(report);
  nh_network_free(net);
  nh_records_free(records);
}
