// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/ir.hpp"

#include <string>

namespace wsc::ir {

// Prints the module in the generic textual form. Deterministic: value names
// are assigned in print order.
std::string print_ir(const IrModule& m);
std::string print_op(const Operation& op);

// Parses the textual form. `filename` is used in diagnostics only.
IrModule parse_ir(const std::string& text, const std::string& filename = "<input>");

IrModule parse_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace wsc::ir
