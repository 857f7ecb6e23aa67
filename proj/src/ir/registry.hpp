// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/ir.hpp"

#include <functional>
#include <string>
#include <unordered_map>

namespace wsc::ir {

// Per-op registration: structural verifier plus a couple of traits the
// generic verifier needs.
struct OpInfo {
  std::string name;
  bool is_terminator = false;
  // Regions of this op must end in a terminator (single-block bodies).
  bool regions_terminated = true;
  std::function<void(const Operation&)> verify; // throws Error on failure
};

class Registry {
public:
  static Registry& instance();

  void add(OpInfo info);
  const OpInfo* lookup(const std::string& name) const;
  const OpInfo& require(const Operation& op) const;

private:
  std::unordered_map<std::string, OpInfo> ops_;
};

// Registers every dialect used by this project. Idempotent.
void register_dialects();

// Full verification: generic structure (value visibility, terminators, symbol
// uniqueness, registered names) plus per-op verifiers.
void verify(const IrModule& m);

// Convenience for verifiers.
[[noreturn]] void verify_fail(const Operation& op, const std::string& msg);
void expect(const Operation& op, bool cond, const std::string& msg);

} // namespace wsc::ir
