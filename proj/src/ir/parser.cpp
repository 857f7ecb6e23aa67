// SPDX-License-Identifier: Apache-2.0
#include "ir/io.hpp"
#include "ir/registry.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>

namespace wsc::ir {

namespace {

enum class Tok {
  Eof, Ident, Number, String, SsaId, CaretId, AtId, HashId,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Less, Greater, Comma, Colon, Equal, Arrow, Minus
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  bool is_float = false;
  int line = 1, col = 1;
};

class Lexer {
public:
  Lexer(const std::string& src, std::string file) : src_(src), file_(std::move(file)) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (eof()) return t;
    char c = peek();
    if (c == '%') { advance(); t.kind = Tok::SsaId; t.text = lex_suffix(); return t; }
    if (c == '^') { advance(); t.kind = Tok::CaretId; t.text = lex_suffix(); return t; }
    if (c == '@') { advance(); t.kind = Tok::AtId; t.text = lex_suffix(); return t; }
    if (c == '#') { advance(); t.kind = Tok::HashId; t.text = lex_dotted(); return t; }
    if (c == '"') { t.kind = Tok::String; t.text = lex_string(); return t; }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(t, false);
    if (c == '-') {
      advance();
      if (!eof() && peek() == '>') { advance(); t.kind = Tok::Arrow; return t; }
      if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) return lex_number(t, true);
      t.kind = Tok::Minus;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '!') {
      t.kind = Tok::Ident;
      t.text = lex_dotted(c == '!');
      return t;
    }
    advance();
    switch (c) {
    case '(': t.kind = Tok::LParen; return t;
    case ')': t.kind = Tok::RParen; return t;
    case '{': t.kind = Tok::LBrace; return t;
    case '}': t.kind = Tok::RBrace; return t;
    case '[': t.kind = Tok::LBracket; return t;
    case ']': t.kind = Tok::RBracket; return t;
    case '<': t.kind = Tok::Less; return t;
    case '>': t.kind = Tok::Greater; return t;
    case ',': t.kind = Tok::Comma; return t;
    case ':': t.kind = Tok::Colon; return t;
    case '=': t.kind = Tok::Equal; return t;
    default: error(t, std::string("unexpected character '") + c + "'");
    }
  }

  // Grabs the balanced <...> body starting after a consumed '<'.
  std::string balanced_angle() {
    std::string out;
    int depth = 1;
    while (!eof()) {
      char c = peek();
      if (c == '<') ++depth;
      if (c == '>') {
        --depth;
        if (depth == 0) { advance(); return out; }
      }
      out += c;
      advance();
    }
    Token t;
    t.line = line_; t.col = col_;
    error(t, "unterminated '<'");
  }

  [[noreturn]] void error(const Token& t, const std::string& msg) {
    fail(ErrorKind::Parse, msg, Location{file_, t.line, t.col});
  }
  Location loc_at(const Token& t) const { return Location{file_, t.line, t.col}; }

private:
  bool eof() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  void advance() {
    if (src_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
    ++pos_;
  }
  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }
  std::string lex_suffix() {
    std::string s;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
      s += peek();
      advance();
    }
    return s;
  }
  std::string lex_dotted(bool leading_bang = false) {
    std::string s;
    if (leading_bang) { s += '!'; advance(); }
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '.')) {
      s += peek();
      advance();
    }
    return s;
  }
  std::string lex_string() {
    advance(); // opening quote
    std::string s;
    while (!eof() && peek() != '"') {
      s += peek();
      advance();
    }
    if (eof()) {
      Token t; t.line = line_; t.col = col_;
      error(t, "unterminated string literal");
    }
    advance();
    return s;
  }
  Token lex_number(Token& t, bool neg) {
    t.kind = Tok::Number;
    if (neg) t.text = "-";
    while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                      peek() == 'e' || peek() == 'E' ||
                      ((peek() == '+' || peek() == '-') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
      if (peek() == '.' || peek() == 'e' || peek() == 'E') t.is_float = true;
      t.text += peek();
      advance();
    }
    return t;
  }

  const std::string& src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// --- type sub-parsing on angle-bracket payloads -------------------------------

std::vector<std::string> split_top_x(const std::string& s) {
  // Splits "[-1,2]x[-1,2]xtensor<512xf32>" on 'x' at nesting depth 0.
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '<' || c == '[') ++depth;
    if (c == '>' || c == ']') --depth;
    if (c == 'x' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
      continue;
    }
    cur += c;
  }
  parts.push_back(cur);
  return parts;
}

int64_t to_i64(const std::string& s, const Location& loc) {
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') fail(ErrorKind::Parse, "expected integer in '" + s + "'", loc);
  return v;
}

TensorTy parse_tensor_payload(const std::string& body, const Location& loc) {
  auto parts = split_top_x(body);
  if (parts.empty() || parts.back() != "f32")
    fail(ErrorKind::Parse, "tensor element type must be f32", loc);
  TensorTy t;
  for (size_t i = 0; i + 1 < parts.size(); ++i) t.shape.push_back(to_i64(parts[i], loc));
  if (t.shape.empty() || t.shape.size() > 2)
    fail(ErrorKind::Parse, "tensor rank must be 1 or 2", loc);
  return t;
}

std::pair<Bounds, int64_t> parse_bounds_payload(const std::string& body, const Location& loc) {
  auto parts = split_top_x(body);
  if (parts.size() < 2) fail(ErrorKind::Parse, "grid type needs bounds and element", loc);
  Bounds b;
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p.size() < 2 || p.front() != '[' || p.back() != ']')
      fail(ErrorKind::Parse, "expected [lb,ub] bound, got '" + p + "'", loc);
    auto comma = p.find(',');
    if (comma == std::string::npos) fail(ErrorKind::Parse, "expected [lb,ub] bound", loc);
    b.dims.emplace_back(to_i64(p.substr(1, comma - 1), loc),
                        to_i64(p.substr(comma + 1, p.size() - comma - 2), loc));
  }
  const std::string& elem = parts.back();
  int64_t zt = 0;
  if (elem == "f32") {
    zt = 0;
  } else if (elem.rfind("tensor<", 0) == 0 && elem.back() == '>') {
    TensorTy t = parse_tensor_payload(elem.substr(7, elem.size() - 8), loc);
    if (t.shape.size() != 1) fail(ErrorKind::Parse, "grid tensor element must be rank 1", loc);
    zt = t.shape[0];
  } else {
    fail(ErrorKind::Parse, "grid element must be f32 or tensor<..xf32>, got '" + elem + "'", loc);
  }
  return {b, zt};
}

// --- parser -------------------------------------------------------------------

class Parser {
public:
  Parser(const std::string& src, const std::string& file) : lex_(src, file) { bump(); }

  IrModule parse_module() {
    IrModule m;
    while (cur_.kind != Tok::Eof) m.block().append(parse_op());
    return m;
  }

private:
  Lexer lex_;
  Token cur_;
  std::map<std::string, Value> values_;

  void bump() { cur_ = lex_.next(); }
  bool at(Tok k) const { return cur_.kind == k; }
  Token expect(Tok k, const std::string& what) {
    if (cur_.kind != k) lex_.error(cur_, "expected " + what);
    Token t = cur_;
    bump();
    return t;
  }
  [[noreturn]] void err(const std::string& msg) { lex_.error(cur_, msg); }

  std::unique_ptr<Operation> parse_op() {
    // result ids
    std::vector<std::string> result_names;
    if (at(Tok::SsaId)) {
      result_names.push_back(cur_.text);
      bump();
      while (at(Tok::Comma)) {
        bump();
        result_names.push_back(expect(Tok::SsaId, "ssa id").text);
      }
      expect(Tok::Equal, "'='");
    }
    Token nameTok = expect(Tok::String, "op name string");
    auto op = std::make_unique<Operation>(nameTok.text, lex_.loc_at(nameTok));

    expect(Tok::LParen, "'('");
    std::vector<std::string> operand_names;
    if (!at(Tok::RParen)) {
      operand_names.push_back(expect(Tok::SsaId, "operand").text);
      while (at(Tok::Comma)) {
        bump();
        operand_names.push_back(expect(Tok::SsaId, "operand").text);
      }
    }
    expect(Tok::RParen, "')'");

    if (at(Tok::LBrace)) parse_attr_dict(*op);

    if (at(Tok::LParen)) {
      bump();
      while (true) {
        parse_region(op->add_region());
        if (at(Tok::Comma)) { bump(); continue; }
        break;
      }
      expect(Tok::RParen, "')' after regions");
    }

    expect(Tok::Colon, "':' before function type");
    auto [ins, outs] = parse_func_signature();
    if (ins.size() != operand_names.size()) err("operand count does not match type signature");
    if (outs.size() != result_names.size()) err("result count does not match type signature");
    op->set_result_types(outs);

    std::vector<Value> operands;
    for (size_t i = 0; i < operand_names.size(); ++i) {
      auto it = values_.find(operand_names[i]);
      if (it == values_.end()) err("use of undefined value %" + operand_names[i]);
      if (!(it->second.type() == ins[i]))
        err("type mismatch for %" + operand_names[i] + ": value has " +
            it->second.type().str() + ", signature says " + ins[i].str());
      operands.push_back(it->second);
    }
    op->set_operands(std::move(operands));
    for (size_t i = 0; i < result_names.size(); ++i) values_[result_names[i]] = op->result(static_cast<int>(i));
    return op;
  }

  void parse_region(Region& r) {
    expect(Tok::LBrace, "'{' to start region");
    // Optional block header(s).
    while (!at(Tok::RBrace)) {
      std::vector<Type> arg_types;
      std::vector<std::string> arg_names;
      if (at(Tok::CaretId)) {
        bump();
        if (at(Tok::LParen)) {
          bump();
          if (!at(Tok::RParen)) {
            while (true) {
              arg_names.push_back(expect(Tok::SsaId, "block arg").text);
              expect(Tok::Colon, "':'");
              arg_types.push_back(parse_type());
              if (at(Tok::Comma)) { bump(); continue; }
              break;
            }
          }
          expect(Tok::RParen, "')'");
        }
        expect(Tok::Colon, "':' after block header");
      }
      Block& b = r.add_block(arg_types);
      for (size_t i = 0; i < arg_names.size(); ++i) values_[arg_names[i]] = b.arg(static_cast<int>(i));
      while (!at(Tok::RBrace) && !at(Tok::CaretId)) b.append(parse_op());
    }
    expect(Tok::RBrace, "'}'");
    if (r.empty()) r.add_block(); // empty region keeps one empty block
  }

  void parse_attr_dict(Operation& op) {
    expect(Tok::LBrace, "'{'");
    if (!at(Tok::RBrace)) {
      while (true) {
        std::string key = expect(Tok::Ident, "attribute name").text;
        expect(Tok::Equal, "'='");
        op.set_attr(key, parse_attr());
        if (at(Tok::Comma)) { bump(); continue; }
        break;
      }
    }
    expect(Tok::RBrace, "'}'");
  }

  Attribute parse_attr() {
    if (at(Tok::Number)) {
      Token t = cur_;
      bump();
      if (t.is_float) {
        if (at(Tok::Colon)) {
          bump();
          Token ty = expect(Tok::Ident, "f32");
          if (ty.text != "f32") err("float attribute must be f32");
        }
        return Attribute::flt(std::strtof(t.text.c_str(), nullptr));
      }
      ScalarKind k = ScalarKind::I64;
      if (at(Tok::Colon)) {
        bump();
        Token ty = expect(Tok::Ident, "integer type");
        if (ty.text == "i1") k = ScalarKind::I1;
        else if (ty.text == "i32") k = ScalarKind::I32;
        else if (ty.text == "i64") k = ScalarKind::I64;
        else if (ty.text == "index") k = ScalarKind::Index;
        else if (ty.text == "f32") return Attribute::flt(std::strtof(t.text.c_str(), nullptr));
        else err("unknown attribute type '" + ty.text + "'");
      }
      return Attribute::integer(to_i64(t.text, lex_.loc_at(t)), k);
    }
    if (at(Tok::String)) {
      Token t = cur_;
      bump();
      return Attribute::str(t.text);
    }
    if (at(Tok::AtId)) {
      Token t = cur_;
      bump();
      return Attribute::symbol(t.text);
    }
    if (at(Tok::LBracket)) {
      bump();
      std::vector<Attribute> elems;
      if (!at(Tok::RBracket)) {
        while (true) {
          elems.push_back(parse_attr());
          if (at(Tok::Comma)) { bump(); continue; }
          break;
        }
      }
      expect(Tok::RBracket, "']'");
      return Attribute::array(std::move(elems));
    }
    if (at(Tok::LBrace)) {
      bump();
      std::map<std::string, Attribute> entries;
      if (!at(Tok::RBrace)) {
        while (true) {
          std::string key = expect(Tok::Ident, "dict key").text;
          expect(Tok::Equal, "'='");
          entries[key] = parse_attr();
          if (at(Tok::Comma)) { bump(); continue; }
          break;
        }
      }
      expect(Tok::RBrace, "'}'");
      return Attribute::dict(std::move(entries));
    }
    if (at(Tok::HashId)) {
      Token t = cur_;
      bump();
      if (!at(Tok::Less)) err("expected '<'");
      // cur_ holds '<'; the lexer position is just past it, so scan raw.
      std::string body = lex_.balanced_angle();
      bump();
      return parse_hash_attr(t, body);
    }
    if (at(Tok::Ident)) {
      if (cur_.text == "true") { bump(); return Attribute::boolean(true); }
      if (cur_.text == "false") { bump(); return Attribute::boolean(false); }
      if (cur_.text == "dense") {
        bump();
        expect(Tok::Less, "'<'");
        Token num = expect(Tok::Number, "splat value");
        expect(Tok::Greater, "'>'");
        expect(Tok::Colon, "':'");
        Type t = parse_type();
        auto* tt = t.as<TensorTy>();
        if (!tt) err("dense attribute requires tensor type");
        return Attribute::splat(std::strtof(num.text.c_str(), nullptr), *tt);
      }
      // fall through: a type attribute
      return Attribute::type(parse_type());
    }
    if (at(Tok::LParen)) return Attribute::type(parse_type());
    err("expected attribute value");
  }

  Attribute parse_hash_attr(const Token& t, const std::string& body) {
    Location loc = lex_.loc_at(t);
    if (t.text == "dmp.topo") {
      auto parts = split_top_x(body);
      if (parts.size() != 2) fail(ErrorKind::Parse, "topo expects PXxPY", loc);
      return Attribute::topo(to_i64(parts[0], loc), to_i64(parts[1], loc));
    }
    if (t.text == "csl_stencil.exchange") {
      // body: "to [dx, dy]"
      auto lb = body.find('[');
      auto comma = body.find(',', lb);
      auto rb = body.find(']', comma);
      if (lb == std::string::npos || comma == std::string::npos || rb == std::string::npos)
        fail(ErrorKind::Parse, "malformed exchange attribute", loc);
      auto trim = [](std::string s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        return s;
      };
      return Attribute::exchange(to_i64(trim(body.substr(lb + 1, comma - lb - 1)), loc),
                                 to_i64(trim(body.substr(comma + 1, rb - comma - 1)), loc));
    }
    if (t.text == "dmp.swap") {
      // body: "op N to [dx, dy] width W z [zb,ze]"
      SwapAttr s;
      std::istringstream is(body);
      std::string word;
      auto need = [&](const char* w) {
        if (!(is >> word) || word != w) fail(ErrorKind::Parse, "malformed swap attribute", loc);
      };
      auto num = [&]() {
        int64_t v;
        char c;
        // strip separators around numbers
        while (is.get(c) && (std::isspace(static_cast<unsigned char>(c)) || c == '[' || c == ',' || c == ']')) {}
        is.unget();
        if (!(is >> v)) fail(ErrorKind::Parse, "malformed swap attribute", loc);
        return v;
      };
      need("op");
      s.operand = num();
      need("to");
      s.dx = num();
      { char c; while (is.get(c) && (c == ',' || std::isspace(static_cast<unsigned char>(c)))) {}; is.unget(); }
      s.dy = num();
      { char c; while (is.get(c) && (c == ']' || std::isspace(static_cast<unsigned char>(c)))) {}; is.unget(); }
      need("width");
      s.width = num();
      need("z");
      s.zb = num();
      { char c; while (is.get(c) && (c == ',' || std::isspace(static_cast<unsigned char>(c)))) {}; is.unget(); }
      s.ze = num();
      return Attribute::swap(s);
    }
    fail(ErrorKind::Parse, "unknown attribute '#" + t.text + "'", loc);
  }

  // Consumes '<...>' where cur_ must be the '<' token, returning the raw body.
  std::string raw_angle_body() {
    if (!at(Tok::Less)) err("expected '<'");
    std::string body = lex_.balanced_angle();
    bump();
    return body;
  }

  Type parse_type() {
    if (at(Tok::LParen)) {
      auto [ins, outs] = parse_func_signature();
      return Type::func(ins, outs);
    }
    Token t = expect(Tok::Ident, "type");
    Location loc = lex_.loc_at(t);
    if (t.text == "f32") return Type::f32();
    if (t.text == "i32") return Type::i32();
    if (t.text == "i64") return Type::i64();
    if (t.text == "i1") return Type::i1();
    if (t.text == "index") return Type::index();
    if (t.text == "!csl.dsd") return Type::dsd();
    if (t.text == "tensor") {
      std::string body = raw_angle_body();
      return Type(TypeData(parse_tensor_payload(body, loc)));
    }
    if (t.text == "memref") {
      std::string body = raw_angle_body();
      TensorTy tt = parse_tensor_payload(body, loc);
      if (tt.shape.size() != 1) fail(ErrorKind::Parse, "memref must be rank 1", loc);
      return Type::memref(tt.shape[0]);
    }
    if (t.text == "!stencil.field" || t.text == "!stencil.temp") {
      std::string body = raw_angle_body();
      auto [b, zt] = parse_bounds_payload(body, loc);
      return t.text == "!stencil.field" ? Type::field(b, zt) : Type::temp(b, zt);
    }
    fail(ErrorKind::Parse, "unknown type '" + t.text + "'", loc);
  }

  std::pair<std::vector<Type>, std::vector<Type>> parse_func_signature() {
    expect(Tok::LParen, "'('");
    std::vector<Type> ins;
    if (!at(Tok::RParen)) {
      while (true) {
        ins.push_back(parse_type());
        if (at(Tok::Comma)) { bump(); continue; }
        break;
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    std::vector<Type> outs;
    if (at(Tok::LParen)) {
      bump();
      if (!at(Tok::RParen)) {
        while (true) {
          outs.push_back(parse_type());
          if (at(Tok::Comma)) { bump(); continue; }
          break;
        }
      }
      expect(Tok::RParen, "')'");
    } else {
      outs.push_back(parse_type());
    }
    return {ins, outs};
  }
};

} // namespace

IrModule parse_ir(const std::string& text, const std::string& filename) {
  register_dialects();
  Parser p(text, filename);
  IrModule m = p.parse_module();
  verify(m);
  return m;
}

} // namespace wsc::ir
