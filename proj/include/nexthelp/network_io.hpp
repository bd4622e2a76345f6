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

#ifndef NEXTHELP_NETWORK_IO_HPP_
#define NEXTHELP_NETWORK_IO_HPP_

#include <iosfwd>
#include <string>

#include "nexthelp/bbn_model.hpp"

namespace nexthelp {

// Line-oriented network text format ("#" starts a comment):
//
//   net <name>
//   var <name> { <state>, <state>, ... }
//   cpt <child> | <parent> <parent> ... {
//     <p> <p> ...        one row per parent configuration, last parent fastest
//   }
//
// A root uses "cpt <child> {" with a single row. Every var precedes every
// cpt, and each var has exactly one cpt.
void export_network(const Network& network, std::ostream& sink);

// Rows may deviate from 1 by at most 1e-6 and are renormalized on load.
// Throws ParseError with the offending line number.
Network import_network(std::istream& source);

void save_network(const Network& network, const std::string& path);
Network load_network(const std::string& path);

}  // namespace nexthelp

#endif  // NEXTHELP_NETWORK_IO_HPP_
