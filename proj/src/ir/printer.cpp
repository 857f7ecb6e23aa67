// SPDX-License-Identifier: Apache-2.0
#include "ir/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace wsc::ir {

namespace {

struct Printer {
  std::ostringstream os;
  std::map<Value, std::string> names;
  int next_id = 0;

  std::string name_of(Value v) {
    auto it = names.find(v);
    if (it != names.end()) return it->second;
    std::string n = "%" + std::to_string(next_id++);
    names[v] = n;
    return n;
  }

  void indent(int depth) {
    for (int i = 0; i < depth; ++i) os << "  ";
  }

  void print_block(const Block& b, int depth, bool header) {
    if (header || b.num_args() > 0) {
      indent(depth);
      os << "^bb(";
      for (int i = 0; i < b.num_args(); ++i) {
        if (i) os << ", ";
        os << name_of(const_cast<Block&>(b).arg(i)) << " : " << b.arg_type(i).str();
      }
      os << "):\n";
    }
    for (auto& op : b.ops()) print_oper(*op, depth);
  }

  void print_oper(const Operation& op, int depth) {
    indent(depth);
    if (op.num_results() > 0) {
      for (int i = 0; i < op.num_results(); ++i) {
        if (i) os << ", ";
        os << name_of(const_cast<Operation&>(op).result(i));
      }
      os << " = ";
    }
    os << '"' << op.name() << "\"(";
    for (int i = 0; i < op.num_operands(); ++i) {
      if (i) os << ", ";
      os << name_of(op.operand(i));
    }
    os << ")";
    if (!op.attrs().empty()) {
      os << " {";
      bool first = true;
      for (auto& [k, v] : op.attrs()) {
        if (!first) os << ", ";
        first = false;
        os << k << " = " << v.str();
      }
      os << "}";
    }
    if (op.num_regions() > 0) {
      os << " (";
      for (int r = 0; r < op.num_regions(); ++r) {
        if (r) os << ", ";
        os << "{\n";
        for (auto& b : op.region(r).blocks())
          print_block(*b, depth + 1, op.region(r).blocks().size() > 1);
        indent(depth);
        os << "}";
      }
      os << ")";
    }
    os << " : (";
    for (int i = 0; i < op.num_operands(); ++i) {
      if (i) os << ", ";
      os << op.operand(i).type().str();
    }
    os << ") -> (";
    for (int i = 0; i < op.num_results(); ++i) {
      if (i) os << ", ";
      os << op.result_type(i).str();
    }
    os << ")\n";
  }
};

} // namespace

std::string print_ir(const IrModule& m) {
  Printer p;
  for (auto& op : m.block().ops()) p.print_oper(*op, 0);
  return p.os.str();
}

std::string print_op(const Operation& op) {
  Printer p;
  p.print_oper(op, 0);
  return p.os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write file: " + path);
  out << content;
}

IrModule parse_file(const std::string& path) { return parse_ir(read_file(path), path); }

} // namespace wsc::ir
