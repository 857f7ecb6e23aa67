// SPDX-License-Identifier: Apache-2.0
#include "ir/pass.hpp"

#include "ir/registry.hpp"
#include "support/diag.hpp"

#include <unordered_map>

namespace wsc::ir {

int64_t PassOptions::get_int(const std::string& k, int64_t dflt) const {
  auto it = values.find(k);
  return it == values.end() ? dflt : std::stoll(it->second);
}

std::string PassOptions::get_str(const std::string& k, const std::string& dflt) const {
  auto it = values.find(k);
  return it == values.end() ? dflt : it->second;
}

bool PassOptions::get_bool(const std::string& k, bool dflt) const {
  auto it = values.find(k);
  if (it == values.end()) return dflt;
  return it->second == "1" || it->second == "true";
}

namespace {
std::unordered_map<std::string, PassFn>& pass_table() {
  static std::unordered_map<std::string, PassFn> t;
  return t;
}
} // namespace

void register_pass(const std::string& name, PassFn fn) { pass_table()[name] = std::move(fn); }

bool pass_registered(const std::string& name) { return pass_table().count(name) != 0; }

void run_pipeline(IrModule& m, const PassPipeline& p) {
  register_dialects();
  for (auto& spec : p.passes) {
    auto it = pass_table().find(spec.name);
    if (it == pass_table().end())
      fail(ErrorKind::Pass, "unknown pass '" + spec.name + "'");
    try {
      it->second(m, spec.options);
    } catch (const Error& e) {
      fail(e.kind(), "pass '" + spec.name + "' failed: " + e.what(), e.loc());
    }
    try {
      verify(m);
    } catch (const Error& e) {
      fail(ErrorKind::Verify,
           "module invalid after pass '" + spec.name + "': " + std::string(e.what()));
    }
  }
}

} // namespace wsc::ir
