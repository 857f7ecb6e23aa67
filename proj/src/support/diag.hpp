// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <sstream>
#include <string>

namespace wsc {

// Source location for diagnostics. line/col are 1-based; 0 means unknown.
struct Location {
  std::string file;
  int line = 0;
  int col = 0;

  std::string str() const {
    if (line == 0) return file.empty() ? std::string("<unknown>") : file;
    std::ostringstream os;
    os << (file.empty() ? "<input>" : file) << ":" << line << ":" << col;
    return os.str();
  }
};

// All compiler/simulator failures are reported through this exception.
// `kind` selects the CLI exit code.
enum class ErrorKind { Config, Parse, Verify, Pass, Simulate, Io };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg, Location loc = {})
      : std::runtime_error(loc.line ? loc.str() + ": " + msg : msg),
        kind_(kind), loc_(std::move(loc)) {}

  ErrorKind kind() const { return kind_; }
  const Location& loc() const { return loc_; }

private:
  ErrorKind kind_;
  Location loc_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg, Location loc = {}) {
  throw Error(kind, msg, std::move(loc));
}

} // namespace wsc
