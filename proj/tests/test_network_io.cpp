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

#include <random>
#include <sstream>

#include "doctest.h"
#include "nexthelp/error.hpp"
#include "nexthelp/network_io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace nexthelp;

namespace {

Network chain_network() {
  const auto records =
      build_transitions(parse_log(fixture::figure3_text(), "figure3"));
  const Dataset d = records_to_instances(records, default_field_selection());
  return fit_network("figure3", chain_dag(d.variables), d.instances, {1.0});
}

std::string exported(const Network& net) {
  std::ostringstream out;
  export_network(net, out);
  return out.str();
}

Network imported(const std::string& text) {
  std::istringstream in(text);
  return import_network(in);
}

std::size_t error_line(const std::string& text) {
  try {
    imported(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

void check_same(const Network& a, const Network& b, double tol) {
  CHECK(a.name() == b.name());
  CHECK(a.dag() == b.dag());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.cpt(i).values();
    const auto& y = b.cpt(i).values();
    REQUIRE(x.size() == y.size());
    for (std::size_t v = 0; v < x.size(); ++v) CHECK(std::abs(x[v] - y[v]) <= tol);
  }
}

}  // namespace

TEST_CASE("chain round trip") {
  const Network net = chain_network();
  const std::string text = exported(net);
  CHECK(text.starts_with("net figure3\nvar Paction { BarChartActivation, "));
  CHECK(text.find("cpt Naction | Caction {") != std::string::npos);
  CHECK(text.find("cpt Paction {") != std::string::npos);
  const Network back = imported(text);
  check_same(net, back, 0.0);
  CHECK(exported(back) == text);
}

TEST_CASE("randomized round trip") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 100; ++trial) {
    const Network net = oracle::random_network(gen, 1 + gen() % 5, 4, 1e-6);
    check_same(net, imported(exported(net)), 1e-12);
  }
}

TEST_CASE("states with spaces and arrows survive") {
  const Dag dag({{"Cprop", {"-", "Intensity of Light->Sun"}}}, {{}});
  const Network net("props", dag, {Cpt(1, 2, {0.25, 0.75})});
  const Network back = imported(exported(net));
  CHECK(back.variable(0).states[1] == "Intensity of Light->Sun");
}

TEST_CASE("hand-written files") {
  const std::string good =
      "# comment\n"
      "net tiny\n"
      "var A { a1, a2 }   # trailing comment\n"
      "var B { b1, b2 }\n"
      "cpt A {\n  0.6 0.4\n}\n"
      "cpt B | A {\n  0.9 0.1\n  0.2 0.8\n}\n";
  const Network net = imported(good);
  CHECK(net.dag().parents(1).size() == 1);
  CHECK(net.cpt(1).at(1, 1) == doctest::Approx(0.8));

  CHECK(error_line("net x\nvar A { a1 }\ncpt A | Z {\n 1\n}\n") == 3);
  CHECK(error_line("net x\nvar A { a1, a2 }\ncpt A {\n 0.5 0.3\n}\n") == 4);
  CHECK(error_line("net x\nvar A { a1, a2 }\ncpt A {\n 0.5 0.5 0.0\n}\n") == 4);
  CHECK(error_line("net x\nvar A { a1, a2 }\ncpt A {\n 0.5 0.5\n") == 4);
  CHECK(error_line("net x\nvar A { a1, a1 }\n") == 2);
  CHECK(error_line("net x\nvar A { a1 }\ncpt A {\n 1\n}\nvar B { b }\n") == 6);
  CHECK(error_line("net x\nvar A { a1 }\nfoo\n") == 3);
  CHECK(error_line("net x\nvar A { a1 }\ncpt A {\n 1\n}\ncpt A {\n 1\n}\n") == 6);
  // A missing table is only detectable at the end of the file.
  CHECK_THROWS_AS(imported("net x\nvar A { a1 }\n"), ParseError);
  // Cycles are rejected.
  CHECK_THROWS_AS(imported("net x\nvar A { a }\nvar B { b }\n"
                           "cpt A | B {\n 1\n}\ncpt B | A {\n 1\n}\n"),
                  ParseError);

  SUBCASE("slightly off rows are renormalized") {
    const Network n = imported("net x\nvar A { a1, a2 }\ncpt A {\n 0.3333333 0.6666666\n}\n");
    CHECK(n.cpt(0).at(0, 0) + n.cpt(0).at(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("file helpers") {
  fixture::TempPath path("nexthelp_net");
  const Network net = chain_network();
  save_network(net, path.str());
  check_same(net, load_network(path.str()), 0.0);
  CHECK_THROWS_AS(load_network(path.str() + ".missing"), Error);
}
