// Copyright 2026 The Harness Authors
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

#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace harness {

using json = nlohmann::json;

// Canonical serialization: object keys sorted, no insignificant whitespace,
// floating point values printed with exactly six decimals. Integers are
// printed as integers. The output is byte-stable across platforms.
std::string canonical_dump(const json& value);

// Pretty variant of the canonical form (two-space indent, same number and
// key rules). Used for files humans read; digests always use canonical_dump.
std::string canonical_dump_pretty(const json& value);

// Rounds to six decimals so that parse(canonical_dump(x)) == x exactly.
double round6(double value);

}  // namespace harness
