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

#include <chrono>
#include <string>

#include "harness/common/canonical_json.hpp"

namespace harness {

// POSTs a JSON body to an http:// URL and parses the JSON response.
// Connection failures, timeouts and 5xx answers raise TransportError; other
// non-2xx answers and unparseable bodies raise Error(internal).
json post_json(const std::string& url, const json& body,
               std::chrono::seconds timeout = std::chrono::seconds(30));

}  // namespace harness
