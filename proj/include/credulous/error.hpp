#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cred {

// Every failure the library raises carries a short machine-readable code
// (e.g. "degenerate_labels") next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Raised for bad user-supplied configuration; the CLI maps it to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cred
