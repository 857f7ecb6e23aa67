// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/ir.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace wsc::ir {

// Stringly-typed per-pass options; passes pull what they need.
struct PassOptions {
  std::map<std::string, std::string> values;

  bool has(const std::string& k) const { return values.count(k) != 0; }
  int64_t get_int(const std::string& k, int64_t dflt) const;
  std::string get_str(const std::string& k, const std::string& dflt) const;
  bool get_bool(const std::string& k, bool dflt) const;
};

using PassFn = std::function<void(IrModule&, const PassOptions&)>;

void register_pass(const std::string& name, PassFn fn);
bool pass_registered(const std::string& name);

struct PassSpec {
  std::string name;
  PassOptions options;
};

struct PassPipeline {
  std::vector<PassSpec> passes;
};

// Runs each pass in order, re-verifying the module after every pass. Failures
// name the offending pass.
void run_pipeline(IrModule& m, const PassPipeline& p);

} // namespace wsc::ir
