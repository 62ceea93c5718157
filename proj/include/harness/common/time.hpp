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
#include <cstdint>
#include <functional>
#include <string>

namespace harness {

using Clock = std::chrono::system_clock;
using Timestamp = Clock::time_point;

// ISO-8601 UTC with millisecond precision, e.g. 2026-10-16T08:15:02.120Z.
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(const std::string& text);

// Injectable so retry backoff does not sleep in tests.
using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

}  // namespace harness
