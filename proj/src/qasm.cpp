// Copyright 2026 The stochdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stochdd/qasm.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <unordered_map>

#include "stochdd/errors.hpp"

namespace stochdd {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Id,
  Number,
  String,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Semicolon,
  Arrow,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  Eq,  // ==
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space_and_comments();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        advance();
      }
      t.kind = Tok::Id;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      bool saw_digit = false;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        advance();
        saw_digit = true;
      }
      if (pos_ < src_.size() && src_[pos_] == '.') {
        advance();
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          advance();
          saw_digit = true;
        }
      }
      if (!saw_digit) {
        throw ParseError(t.line, t.column, "malformed number");
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
          advance();
        }
        if (pos_ >= src_.size() ||
            !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          throw ParseError(t.line, t.column, "malformed exponent");
        }
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          advance();
        }
      }
      t.kind = Tok::Number;
      t.text = std::string(src_.substr(start, pos_ - start));
      t.number = std::strtod(t.text.c_str(), nullptr);
      return t;
    }
    if (c == '"') {
      advance();
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        advance();
      }
      if (pos_ >= src_.size()) {
        throw ParseError(t.line, t.column, "unterminated string");
      }
      t.kind = Tok::String;
      t.text = std::string(src_.substr(start, pos_ - start));
      advance();  // closing quote
      return t;
    }
    advance();
    switch (c) {
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case '[': t.kind = Tok::LBracket; return t;
      case ']': t.kind = Tok::RBracket; return t;
      case '{': t.kind = Tok::LBrace; return t;
      case '}': t.kind = Tok::RBrace; return t;
      case ',': t.kind = Tok::Comma; return t;
      case ';': t.kind = Tok::Semicolon; return t;
      case '+': t.kind = Tok::Plus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '/': t.kind = Tok::Slash; return t;
      case '^': t.kind = Tok::Caret; return t;
      case '-':
        if (pos_ < src_.size() && src_[pos_] == '>') {
          advance();
          t.kind = Tok::Arrow;
        } else {
          t.kind = Tok::Minus;
        }
        return t;
      case '=':
        if (pos_ < src_.size() && src_[pos_] == '=') {
          advance();
          t.kind = Tok::Eq;
          return t;
        }
        throw ParseError(t.line, t.column, "unexpected '='");
      default:
        throw ParseError(t.line, t.column,
                         std::string("unexpected character '") + c + "'");
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') {
          advance();
        }
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// ---------------------------------------------------------------------------
// Angle expressions (pi arithmetic, evaluated against macro parameters)
// ---------------------------------------------------------------------------

struct Expr {
  enum class Kind { Number, Pi, Param, Unary, Binary, Call } kind;
  double number = 0.0;
  std::string name;  // parameter or function name
  char op = 0;
  std::unique_ptr<Expr> lhs;
  std::unique_ptr<Expr> rhs;
};

using ExprPtr = std::unique_ptr<Expr>;
using Env = std::unordered_map<std::string, double>;

double eval_expr(const Expr& e, const Env& env, int line, int col) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return e.number;
    case Expr::Kind::Pi:
      return std::numbers::pi;
    case Expr::Kind::Param: {
      auto it = env.find(e.name);
      if (it == env.end()) {
        throw ParseError(line, col, "unknown identifier '" + e.name +
                                        "' in angle expression");
      }
      return it->second;
    }
    case Expr::Kind::Unary:
      return -eval_expr(*e.lhs, env, line, col);
    case Expr::Kind::Call: {
      const double v = eval_expr(*e.lhs, env, line, col);
      if (e.name == "sin") return std::sin(v);
      if (e.name == "cos") return std::cos(v);
      if (e.name == "tan") return std::tan(v);
      if (e.name == "exp") return std::exp(v);
      if (e.name == "ln") return std::log(v);
      if (e.name == "sqrt") return std::sqrt(v);
      throw ParseError(line, col, "unknown function '" + e.name + "'");
    }
    case Expr::Kind::Binary: {
      const double a = eval_expr(*e.lhs, env, line, col);
      const double b = eval_expr(*e.rhs, env, line, col);
      switch (e.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
      }
      throw ParseError(line, col, "bad operator in angle expression");
    }
  }
  throw ParseError(line, col, "bad angle expression");
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct QubitRef {       // a resolved operand at instantiation time
  std::string reg;      // register name (top level) or formal argument name
  std::optional<std::size_t> index;
};

struct MacroCall {  // one statement inside a gate body
  std::string name;
  std::vector<ExprPtr> params;
  std::vector<std::string> args;  // formal qubit names
  int line = 1;
  int column = 1;
};

struct MacroDef {
  std::vector<std::string> param_names;
  std::vector<std::string> arg_names;
  std::vector<MacroCall> body;
};

struct Builtin {
  GateKind kind;
  std::size_t num_params;
  std::size_t num_qubits;
  std::size_t num_controls;  // leading arguments treated as controls
  std::vector<double> prefix_params;  // e.g. u2 = U3 with theta pinned to pi/2
};

const std::unordered_map<std::string, Builtin>& builtin_table() {
  static const std::unordered_map<std::string, Builtin> table = {
      {"id", {GateKind::I, 0, 1, 0, {}}},
      {"x", {GateKind::X, 0, 1, 0, {}}},
      {"y", {GateKind::Y, 0, 1, 0, {}}},
      {"z", {GateKind::Z, 0, 1, 0, {}}},
      {"h", {GateKind::H, 0, 1, 0, {}}},
      {"s", {GateKind::S, 0, 1, 0, {}}},
      {"sdg", {GateKind::Sdg, 0, 1, 0, {}}},
      {"t", {GateKind::T, 0, 1, 0, {}}},
      {"tdg", {GateKind::Tdg, 0, 1, 0, {}}},
      {"rx", {GateKind::RX, 1, 1, 0, {}}},
      {"ry", {GateKind::RY, 1, 1, 0, {}}},
      {"rz", {GateKind::RZ, 1, 1, 0, {}}},
      {"p", {GateKind::Phase, 1, 1, 0, {}}},
      {"u1", {GateKind::Phase, 1, 1, 0, {}}},
      {"u2", {GateKind::U3, 2, 1, 0, {std::numbers::pi / 2}}},
      {"u3", {GateKind::U3, 3, 1, 0, {}}},
      {"u", {GateKind::U3, 3, 1, 0, {}}},
      {"U", {GateKind::U3, 3, 1, 0, {}}},
      {"cx", {GateKind::CX, 0, 2, 1, {}}},
      {"CX", {GateKind::CX, 0, 2, 1, {}}},
      {"cz", {GateKind::CZ, 0, 2, 1, {}}},
      {"cp", {GateKind::Phase, 1, 2, 1, {}}},
      {"cu1", {GateKind::Phase, 1, 2, 1, {}}},
      {"ccx", {GateKind::CCX, 0, 3, 2, {}}},
      {"swap", {GateKind::Swap, 0, 2, 0, {}}},
  };
  return table;
}

class Parser {
 public:
  Parser(std::string_view source, std::string_view name,
         std::vector<std::string>* notes)
      : lexer_(source), name_(name), notes_(notes) {
    advance();
  }

  Circuit parse() {
    parse_header();
    while (cur_.kind != Tok::End) {
      parse_statement();
    }
    circuit_.num_qubits = total_qubits_;
    circuit_.name = name_;
    if (total_qubits_ == 0) {
      throw ParseError(cur_.line, cur_.column, "no qreg declared");
    }
    return std::move(circuit_);
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(cur_.line, cur_.column, message);
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) {
      fail(std::string("expected ") + what);
    }
    advance();
  }

  std::string expect_id(const char* what) {
    if (cur_.kind != Tok::Id) {
      fail(std::string("expected ") + what);
    }
    std::string s = cur_.text;
    advance();
    return s;
  }

  std::size_t expect_index() {
    if (cur_.kind != Tok::Number || cur_.text.find_first_of(".eE") !=
                                        std::string::npos) {
      fail("expected integer index");
    }
    if (!(cur_.number >= 0.0 && cur_.number <= 1e9)) {
      fail("index out of range");
    }
    const auto v = static_cast<std::size_t>(cur_.number);
    advance();
    return v;
  }

  void parse_header() {
    if (cur_.kind == Tok::Id && cur_.text == "OPENQASM") {
      advance();
      if (cur_.kind != Tok::Number) {
        fail("expected version after OPENQASM");
      }
      if (cur_.text != "2.0" && cur_.text != "2") {
        throw UnsupportedConstructError(cur_.line, cur_.column,
                                        "OPENQASM " + cur_.text);
      }
      advance();
      expect(Tok::Semicolon, "';'");
    }
  }

  void parse_statement() {
    if (cur_.kind != Tok::Id) {
      fail("expected statement");
    }
    const std::string head = cur_.text;
    if (head == "include") {
      advance();
      if (cur_.kind != Tok::String) {
        fail("expected file name after include");
      }
      if (notes_ != nullptr) {
        notes_->push_back("ignored include \"" + cur_.text + "\"");
      }
      advance();
      expect(Tok::Semicolon, "';'");
    } else if (head == "qreg" || head == "creg") {
      parse_register(head == "qreg");
    } else if (head == "gate") {
      parse_gate_def();
    } else if (head == "if" || head == "opaque" || head == "reset") {
      throw UnsupportedConstructError(cur_.line, cur_.column, head);
    } else if (head == "barrier") {
      advance();
      skip_until_semicolon();
    } else if (head == "measure") {
      parse_measure();
    } else {
      parse_gate_call();
    }
  }

  void skip_until_semicolon() {
    while (cur_.kind != Tok::Semicolon && cur_.kind != Tok::End) {
      advance();
    }
    expect(Tok::Semicolon, "';'");
  }

  void parse_register(bool quantum) {
    advance();
    const int line = cur_.line, col = cur_.column;
    const std::string reg = expect_id("register name");
    expect(Tok::LBracket, "'['");
    const std::size_t size = expect_index();
    expect(Tok::RBracket, "']'");
    expect(Tok::Semicolon, "';'");
    if (size == 0) {
      throw ParseError(line, col, "zero-sized register");
    }
    auto& table = quantum ? qregs_ : cregs_;
    if (table.contains(reg)) {
      throw ParseError(line, col, "register '" + reg + "' redeclared");
    }
    if (quantum) {
      table[reg] = {total_qubits_, size};
      total_qubits_ += size;
    } else {
      table[reg] = {total_clbits_, size};
      total_clbits_ += size;
    }
  }

  ExprPtr parse_expr() { return parse_additive(); }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const char op = cur_.kind == Tok::Plus ? '+' : '-';
      advance();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Binary;
      e->op = op;
      e->lhs = std::move(lhs);
      e->rhs = parse_multiplicative();
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_power();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const char op = cur_.kind == Tok::Star ? '*' : '/';
      advance();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Binary;
      e->op = op;
      e->lhs = std::move(lhs);
      e->rhs = parse_power();
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr parse_power() {
    ExprPtr lhs = parse_unary();
    if (cur_.kind == Tok::Caret) {
      advance();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Binary;
      e->op = '^';
      e->lhs = std::move(lhs);
      e->rhs = parse_power();  // right associative
      return e;
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (cur_.kind == Tok::Minus) {
      advance();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Unary;
      e->lhs = parse_unary();
      return e;
    }
    if (cur_.kind == Tok::Plus) {
      advance();
      return parse_unary();
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    auto e = std::make_unique<Expr>();
    if (cur_.kind == Tok::Number) {
      e->kind = Expr::Kind::Number;
      e->number = cur_.number;
      advance();
      return e;
    }
    if (cur_.kind == Tok::LParen) {
      advance();
      e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (cur_.kind == Tok::Id) {
      const std::string id = cur_.text;
      advance();
      if (id == "pi") {
        e->kind = Expr::Kind::Pi;
        return e;
      }
      if (cur_.kind == Tok::LParen) {
        advance();
        e->kind = Expr::Kind::Call;
        e->name = id;
        e->lhs = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      e->kind = Expr::Kind::Param;
      e->name = id;
      return e;
    }
    fail("expected angle expression");
  }

  void parse_gate_def() {
    advance();
    const int line = cur_.line, col = cur_.column;
    const std::string name = expect_id("gate name");
    if (macros_.contains(name)) {
      throw ParseError(line, col, "gate '" + name + "' redefined");
    }
    MacroDef def;
    if (cur_.kind == Tok::LParen) {
      advance();
      while (cur_.kind != Tok::RParen) {
        def.param_names.push_back(expect_id("parameter name"));
        if (cur_.kind == Tok::Comma) {
          advance();
        } else {
          break;
        }
      }
      expect(Tok::RParen, "')'");
    }
    while (true) {
      def.arg_names.push_back(expect_id("qubit argument"));
      if (cur_.kind == Tok::Comma) {
        advance();
      } else {
        break;
      }
    }
    expect(Tok::LBrace, "'{'");
    while (cur_.kind != Tok::RBrace) {
      if (cur_.kind == Tok::End) {
        fail("unterminated gate body");
      }
      if (cur_.kind != Tok::Id) {
        fail("expected gate call in gate body");
      }
      if (cur_.text == "barrier") {
        advance();
        skip_until_semicolon();
        continue;
      }
      if (cur_.text == "if" || cur_.text == "opaque" || cur_.text == "reset" ||
          cur_.text == "measure") {
        throw UnsupportedConstructError(cur_.line, cur_.column,
                                        cur_.text + " inside gate body");
      }
      MacroCall call;
      call.line = cur_.line;
      call.column = cur_.column;
      call.name = cur_.text;
      advance();
      if (cur_.kind == Tok::LParen) {
        advance();
        while (cur_.kind != Tok::RParen) {
          call.params.push_back(parse_expr());
          if (cur_.kind == Tok::Comma) {
            advance();
          } else {
            break;
          }
        }
        expect(Tok::RParen, "')'");
      }
      while (true) {
        call.args.push_back(expect_id("qubit argument"));
        if (cur_.kind == Tok::Comma) {
          advance();
        } else {
          break;
        }
      }
      expect(Tok::Semicolon, "';'");
      def.body.push_back(std::move(call));
    }
    expect(Tok::RBrace, "'}'");
    macros_.emplace(name, std::move(def));
  }

  QubitRef parse_operand() {
    QubitRef ref;
    ref.reg = expect_id("qubit operand");
    if (cur_.kind == Tok::LBracket) {
      advance();
      ref.index = expect_index();
      expect(Tok::RBracket, "']'");
    }
    return ref;
  }

  Qubit resolve_qubit(const QubitRef& ref, int line, int col) const {
    auto it = qregs_.find(ref.reg);
    if (it == qregs_.end()) {
      throw ParseError(line, col, "unknown qreg '" + ref.reg + "'");
    }
    if (!ref.index.has_value()) {
      throw ParseError(line, col, "expected indexed qubit");
    }
    if (*ref.index >= it->second.size) {
      throw ParseError(line, col, "index out of range for qreg '" + ref.reg +
                                      "'");
    }
    return static_cast<Qubit>(it->second.offset + *ref.index);
  }

  void parse_measure() {
    const int line = cur_.line, col = cur_.column;
    advance();
    const QubitRef q = parse_operand();
    expect(Tok::Arrow, "'->'");
    const QubitRef c = parse_operand();
    expect(Tok::Semicolon, "';'");
    auto qit = qregs_.find(q.reg);
    if (qit == qregs_.end()) {
      throw ParseError(line, col, "unknown qreg '" + q.reg + "'");
    }
    auto cit = cregs_.find(c.reg);
    if (cit == cregs_.end()) {
      throw ParseError(line, col, "unknown creg '" + c.reg + "'");
    }
    if (q.index.has_value() != c.index.has_value()) {
      throw ParseError(line, col, "measure operands must both be indexed or "
                                  "both be whole registers");
    }
    if (q.index.has_value()) {
      if (*q.index >= qit->second.size || *c.index >= cit->second.size) {
        throw ParseError(line, col, "measure index out of range");
      }
      circuit_.ops.push_back(
          {GateKind::Measure,
           {},
           {static_cast<Qubit>(qit->second.offset + *q.index)},
           {}});
      return;
    }
    if (qit->second.size != cit->second.size) {
      throw ParseError(line, col, "measure register sizes differ");
    }
    for (std::size_t i = 0; i < qit->second.size; ++i) {
      circuit_.ops.push_back(
          {GateKind::Measure,
           {},
           {static_cast<Qubit>(qit->second.offset + i)},
           {}});
    }
  }

  // Emits one resolved gate (builtin or macro) on concrete qubits.
  void emit_gate(const std::string& name, const std::vector<double>& params,
                 const std::vector<Qubit>& qubits, int line, int col,
                 int depth) {
    if (depth > 128) {
      throw ParseError(line, col, "macro expansion too deep (cycle?)");
    }
    if (auto mit = macros_.find(name); mit != macros_.end()) {
      const MacroDef& def = mit->second;
      if (params.size() != def.param_names.size()) {
        throw ParseError(line, col, "gate '" + name + "' expects " +
                                        std::to_string(def.param_names.size()) +
                                        " parameter(s)");
      }
      if (qubits.size() != def.arg_names.size()) {
        throw ParseError(line, col, "gate '" + name + "' expects " +
                                        std::to_string(def.arg_names.size()) +
                                        " qubit(s)");
      }
      Env env;
      std::unordered_map<std::string, Qubit> binding;
      for (std::size_t i = 0; i < params.size(); ++i) {
        env[def.param_names[i]] = params[i];
      }
      for (std::size_t i = 0; i < qubits.size(); ++i) {
        binding[def.arg_names[i]] = qubits[i];
      }
      for (const MacroCall& call : def.body) {
        std::vector<double> sub_params;
        sub_params.reserve(call.params.size());
        for (const ExprPtr& e : call.params) {
          sub_params.push_back(eval_expr(*e, env, call.line, call.column));
        }
        std::vector<Qubit> sub_qubits;
        sub_qubits.reserve(call.args.size());
        for (const std::string& arg : call.args) {
          auto bit = binding.find(arg);
          if (bit == binding.end()) {
            throw ParseError(call.line, call.column,
                             "unknown qubit '" + arg + "' in gate body");
          }
          sub_qubits.push_back(bit->second);
        }
        emit_gate(call.name, sub_params, sub_qubits, call.line, call.column,
                  depth + 1);
      }
      return;
    }
    auto bit = builtin_table().find(name);
    if (bit == builtin_table().end()) {
      throw UnsupportedConstructError(line, col, name);
    }
    const Builtin& b = bit->second;
    if (params.size() != b.num_params) {
      throw ParseError(line, col, "gate '" + name + "' expects " +
                                      std::to_string(b.num_params) +
                                      " parameter(s)");
    }
    if (qubits.size() != b.num_qubits) {
      throw ParseError(line, col, "gate '" + name + "' expects " +
                                      std::to_string(b.num_qubits) +
                                      " qubit(s)");
    }
    GateOp op;
    op.kind = b.kind;
    op.params = b.prefix_params;
    op.params.insert(op.params.end(), params.begin(), params.end());
    op.controls.assign(qubits.begin(),
                       qubits.begin() + static_cast<long>(b.num_controls));
    op.targets.assign(qubits.begin() + static_cast<long>(b.num_controls),
                      qubits.end());
    circuit_.ops.push_back(std::move(op));
  }

  void parse_gate_call() {
    const int line = cur_.line, col = cur_.column;
    const std::string name = cur_.text;
    advance();
    std::vector<double> params;
    if (cur_.kind == Tok::LParen) {
      advance();
      while (cur_.kind != Tok::RParen) {
        const ExprPtr e = parse_expr();
        params.push_back(eval_expr(*e, {}, line, col));
        if (cur_.kind == Tok::Comma) {
          advance();
        } else {
          break;
        }
      }
      expect(Tok::RParen, "')'");
    }
    std::vector<QubitRef> operands;
    while (true) {
      operands.push_back(parse_operand());
      if (cur_.kind == Tok::Comma) {
        advance();
      } else {
        break;
      }
    }
    expect(Tok::Semicolon, "';'");

    // Broadcast: unindexed registers expand elementwise and must all have
    // the same length; indexed operands stay fixed.
    std::size_t broadcast = 1;
    for (const QubitRef& ref : operands) {
      if (ref.index.has_value()) continue;
      auto it = qregs_.find(ref.reg);
      if (it == qregs_.end()) {
        throw ParseError(line, col, "unknown qreg '" + ref.reg + "'");
      }
      if (broadcast == 1) {
        broadcast = it->second.size;
      } else if (broadcast != it->second.size) {
        throw ParseError(line, col,
                         "broadcast registers must have equal sizes");
      }
    }
    for (std::size_t rep = 0; rep < broadcast; ++rep) {
      std::vector<Qubit> qubits;
      qubits.reserve(operands.size());
      for (const QubitRef& ref : operands) {
        QubitRef concrete = ref;
        if (!concrete.index.has_value()) {
          concrete.index = rep;
        }
        qubits.push_back(resolve_qubit(concrete, line, col));
      }
      emit_gate(name, params, qubits, line, col, 0);
    }
  }

  struct Range {
    std::size_t offset = 0;
    std::size_t size = 0;
  };

  Lexer lexer_;
  Token cur_;
  std::string name_;
  std::vector<std::string>* notes_;
  std::map<std::string, Range> qregs_;
  std::map<std::string, Range> cregs_;
  std::unordered_map<std::string, MacroDef> macros_;
  std::size_t total_qubits_ = 0;
  std::size_t total_clbits_ = 0;
  Circuit circuit_;
};

}  // namespace

Circuit parse_qasm(std::string_view source, std::string_view name,
                   std::vector<std::string>* notes) {
  Parser parser(source, name, notes);
  return parser.parse();
}

}  // namespace stochdd
