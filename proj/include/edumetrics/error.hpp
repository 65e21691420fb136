// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace edumetrics {

/// Input does not match the expected file layout (missing columns, unreadable
/// stream, schema violation). Maps to CLI exit status 2.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input is well formed but the requested metric is undefined for it
/// (empty distribution, no joinable views, ...). Maps to CLI exit status 1.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid or missing configuration. Maps to CLI exit status 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

/// Recoverable per-row problems collected while parsing a stream.
struct ParseDiagnostics {
  std::size_t lines_read = 0;
  std::vector<RowError> errors;

  std::size_t error_count() const { return errors.size(); }
  void add(std::size_t line, std::string message) {
    errors.push_back({line, std::move(message)});
  }
};

}  // namespace edumetrics
