// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/attr.hpp"
#include "ir/type.hpp"
#include "support/diag.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace wsc::ir {

class Operation;
class Block;
class Region;
class IrModule;

// An SSA value: either result `index` of `op`, or argument `index` of `block`.
struct Value {
  Operation* op = nullptr;
  Block* block = nullptr;
  uint32_t index = 0;

  bool valid() const { return op || block; }
  bool is_block_arg() const { return block != nullptr; }
  Type type() const;

  bool operator==(const Value& o) const {
    return op == o.op && block == o.block && index == o.index;
  }
  bool operator!=(const Value& o) const { return !(*this == o); }
  bool operator<(const Value& o) const {
    if (op != o.op) return op < o.op;
    if (block != o.block) return block < o.block;
    return index < o.index;
  }
};

class Region {
public:
  Region() = default;
  explicit Region(Operation* parent) : parent_(parent) {}
  Region(const Region&) = delete;
  Region& operator=(const Region&) = delete;

  Operation* parent() const { return parent_; }
  void set_parent(Operation* p) { parent_ = p; }

  Block& add_block(std::vector<Type> arg_types = {});
  const std::vector<std::unique_ptr<Block>>& blocks() const { return blocks_; }
  std::vector<std::unique_ptr<Block>>& blocks() { return blocks_; }
  bool empty() const { return blocks_.empty(); }
  Block& front() { return *blocks_.front(); }
  const Block& front() const { return *blocks_.front(); }

private:
  Operation* parent_ = nullptr;
  std::vector<std::unique_ptr<Block>> blocks_;
};

class Block {
public:
  explicit Block(Region* parent, std::vector<Type> arg_types)
      : parent_(parent), arg_types_(std::move(arg_types)) {}
  Block(const Block&) = delete;
  Block& operator=(const Block&) = delete;

  Region* parent() const { return parent_; }
  int num_args() const { return static_cast<int>(arg_types_.size()); }
  Value arg(int i) { return Value{nullptr, this, static_cast<uint32_t>(i)}; }
  Type arg_type(int i) const { return arg_types_[i]; }
  const std::vector<Type>& arg_types() const { return arg_types_; }
  void set_arg_types(std::vector<Type> t) { arg_types_ = std::move(t); }

  const std::vector<std::unique_ptr<Operation>>& ops() const { return ops_; }
  std::vector<std::unique_ptr<Operation>>& ops() { return ops_; }
  bool empty() const { return ops_.empty(); }
  Operation& back() { return *ops_.back(); }
  const Operation& back() const { return *ops_.back(); }

  // Appends and takes ownership.
  Operation& append(std::unique_ptr<Operation> op);
  Operation& insert(size_t pos, std::unique_ptr<Operation> op);
  std::unique_ptr<Operation> take(const Operation* op); // removes, returns ownership
  void erase(const Operation* op);
  int index_of(const Operation* op) const;

private:
  Region* parent_ = nullptr;
  std::vector<Type> arg_types_;
  std::vector<std::unique_ptr<Operation>> ops_;
};

class Operation {
public:
  Operation(std::string name, Location loc = {}) : name_(std::move(name)), loc_(std::move(loc)) {}
  Operation(const Operation&) = delete;
  Operation& operator=(const Operation&) = delete;

  const std::string& name() const { return name_; }
  const Location& loc() const { return loc_; }
  void set_loc(Location l) { loc_ = std::move(l); }

  Block* parent() const { return parent_; }
  void set_parent(Block* b) { parent_ = b; }
  Operation* parent_op() const {
    return parent_ && parent_->parent() ? parent_->parent()->parent() : nullptr;
  }

  // Operands
  int num_operands() const { return static_cast<int>(operands_.size()); }
  Value operand(int i) const { return operands_[i]; }
  const std::vector<Value>& operands() const { return operands_; }
  void set_operand(int i, Value v) { operands_[i] = v; }
  void add_operand(Value v) { operands_.push_back(v); }
  void set_operands(std::vector<Value> v) { operands_ = std::move(v); }

  // Results
  int num_results() const { return static_cast<int>(result_types_.size()); }
  Value result(int i = 0) { return Value{this, nullptr, static_cast<uint32_t>(i)}; }
  Type result_type(int i = 0) const { return result_types_[i]; }
  const std::vector<Type>& result_types() const { return result_types_; }
  void set_result_types(std::vector<Type> t) { result_types_ = std::move(t); }

  // Attributes (ordered map: deterministic printing)
  const std::map<std::string, Attribute>& attrs() const { return attrs_; }
  bool has_attr(const std::string& k) const { return attrs_.count(k) != 0; }
  const Attribute* attr(const std::string& k) const {
    auto it = attrs_.find(k);
    return it == attrs_.end() ? nullptr : &it->second;
  }
  Attribute attr_req(const std::string& k) const;
  void set_attr(const std::string& k, Attribute a) { attrs_[k] = std::move(a); }
  void remove_attr(const std::string& k) { attrs_.erase(k); }

  int64_t int_attr(const std::string& k) const { return attr_req(k).as_int(); }
  float float_attr(const std::string& k) const { return attr_req(k).as_float(); }
  const std::string& str_attr(const std::string& k) const { return attr_req(k).as_string(); }
  const std::string& sym_attr(const std::string& k) const { return attr_req(k).as_symbol(); }

  // Regions
  int num_regions() const { return static_cast<int>(regions_.size()); }
  Region& region(int i) { return *regions_[i]; }
  const Region& region(int i) const { return *regions_[i]; }
  Region& add_region();
  std::vector<std::unique_ptr<Region>>& regions() { return regions_; }
  const std::vector<std::unique_ptr<Region>>& regions() const { return regions_; }

private:
  std::string name_;
  Location loc_;
  Block* parent_ = nullptr;
  std::vector<Value> operands_;
  std::vector<Type> result_types_;
  std::map<std::string, Attribute> attrs_;
  std::vector<std::unique_ptr<Region>> regions_;
};

// Top-level module: a single implicit block of top-level operations.
class IrModule {
public:
  IrModule() : body_(std::make_unique<Region>()) { body_->add_block(); }
  IrModule(IrModule&&) = default;
  IrModule& operator=(IrModule&&) = default;

  Block& block() { return body_->front(); }
  const Block& block() const { return body_->front(); }
  Region& body() { return *body_; }
  const Region& body() const { return *body_; }

  Operation* lookup_symbol(const std::string& name) const;

private:
  std::unique_ptr<Region> body_;
};

// --- construction helpers ---------------------------------------------------

std::unique_ptr<Operation> make_op(const std::string& name, std::vector<Value> operands,
                                   std::vector<Type> results,
                                   std::map<std::string, Attribute> attrs = {}, int num_regions = 0,
                                   Location loc = {});

class OpBuilder {
public:
  explicit OpBuilder(Block& b) : block_(&b), pos_(b.ops().size()) {}
  OpBuilder(Block& b, size_t pos) : block_(&b), pos_(pos) {}

  Block& block() { return *block_; }
  size_t pos() const { return pos_; }
  void set_insertion(Block& b, size_t pos) {
    block_ = &b;
    pos_ = pos;
  }

  Operation& create(const std::string& name, std::vector<Value> operands,
                    std::vector<Type> results, std::map<std::string, Attribute> attrs = {},
                    int num_regions = 0);

  Value const_index(int64_t v);
  Value const_i32(int64_t v);
  Value const_f32(float v);
  Value const_splat(float v, std::vector<int64_t> shape);

private:
  Block* block_;
  size_t pos_;
};

// --- traversal / mutation ----------------------------------------------------

// Pre-order walk over all operations in a region tree.
void walk(Region& r, const std::function<void(Operation&)>& fn);
void walk(IrModule& m, const std::function<void(Operation&)>& fn);
void walk(const IrModule& m, const std::function<void(const Operation&)>& fn);

// Replace every use of `from` with `to` within the given region subtree.
void replace_uses(Region& r, Value from, Value to);
void replace_uses(IrModule& m, Value from, Value to);

// Count uses of a value within a region subtree.
int count_uses(const Region& r, Value v);

// Deep copy of an operation (remapping values via `map`; operands not found in
// the map are copied verbatim).
std::unique_ptr<Operation> clone_op(const Operation& op, std::map<Value, Value>& map);
IrModule clone_module(const IrModule& m);

// Structural equality: compares the def-use graph, op names, attributes and
// types; ignores value numbering.
bool structurally_equal(const IrModule& a, const IrModule& b);
bool structurally_equal(const Operation& a, const Operation& b);

} // namespace wsc::ir
