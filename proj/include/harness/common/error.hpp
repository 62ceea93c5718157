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

#include <stdexcept>
#include <string>
#include <string_view>

namespace harness {

// Error classes mirror the API error codes so the service layer can map
// them without string inspection.
enum class ErrorCode { validation, not_found, conflict, backend_unavailable, internal };

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string detail = {})
      : Error(ErrorCode::validation, message, std::move(detail)) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message)
      : Error(ErrorCode::not_found, message) {}
};

class ConflictError : public Error {
 public:
  explicit ConflictError(const std::string& message)
      : Error(ErrorCode::conflict, message) {}
};

// Transport-class failure of a remote backend. The only retryable error.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message)
      : Error(ErrorCode::backend_unavailable, message) {}
};

// Semantic failure of an agent (unparseable output after repair, invalid
// structure). Terminal for the stage.
class AgentError : public Error {
 public:
  AgentError(std::string agent, const std::string& message)
      : Error(ErrorCode::internal, message), agent_(std::move(agent)) {}

  const std::string& agent() const noexcept { return agent_; }

 private:
  std::string agent_;
};

}  // namespace harness
