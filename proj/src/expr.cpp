// Copyright 2026 the dogopt authors
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

#include "dogopt/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "dogopt/errors.hpp"

namespace dogopt {

namespace {

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { Ident, Int, Real, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int64_t int_value = 0;
  double real_value = 0.0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  bool accept_punct(const std::string& p) {
    if (current_.kind == Token::Kind::Punct && current_.text == p) {
      advance();
      return true;
    }
    return false;
  }

  void expect_punct(const std::string& p) {
    if (!accept_punct(p)) {
      throw ParseError("expected '" + p + "' near '" + current_.text +
                       "' in expression");
    }
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (pos_ >= text_.size()) {
      current_ = Token{Token::Kind::End, "<end>", 0, 0.0};
      return;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      current_ = Token{Token::Kind::Ident, text_.substr(start, pos_ - start), 0, 0.0};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      bool is_real = false;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '.' && pos_ + 1 < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        is_real = true;
        ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        size_t mark = pos_;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          is_real = true;
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        } else {
          pos_ = mark;  // 'e' belongs to a following identifier, not the number
        }
      }
      std::string lit = text_.substr(start, pos_ - start);
      Token t;
      t.text = lit;
      if (is_real) {
        t.kind = Token::Kind::Real;
        t.real_value = std::stod(lit);
      } else {
        t.kind = Token::Kind::Int;
        t.int_value = std::stoll(lit);
      }
      current_ = t;
      return;
    }
    if (c == '"') {
      ++pos_;
      std::string out;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        char d = text_[pos_];
        if (d == '\\' && pos_ + 1 < text_.size()) {
          char e = text_[pos_ + 1];
          switch (e) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case '\\': out.push_back('\\'); break;
            case '"': out.push_back('"'); break;
            default:
              throw ParseError(std::string("bad escape '\\") + e + "' in string literal");
          }
          pos_ += 2;
        } else {
          out.push_back(d);
          ++pos_;
        }
      }
      if (pos_ >= text_.size()) throw ParseError("unterminated string literal");
      ++pos_;  // closing quote
      current_ = Token{Token::Kind::String, out, 0, 0.0};
      return;
    }
    static const char* two_char[] = {"==", "!=", "<=", ">=", "&&", "||"};
    for (const char* p : two_char) {
      if (text_.compare(pos_, 2, p) == 0) {
        current_ = Token{Token::Kind::Punct, p, 0, 0.0};
        pos_ += 2;
        return;
      }
    }
    static const std::string one_char = "+-*/()[],;.=<>!";
    if (one_char.find(c) != std::string::npos) {
      current_ = Token{Token::Kind::Punct, std::string(1, c), 0, 0.0};
      ++pos_;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "' in expression");
  }

  const std::string& text_;
  size_t pos_ = 0;
  Token current_;
};

// ---------------------------------------------------------------------------
// Parser (precedence climbing)
// ---------------------------------------------------------------------------

ExprPtr make_literal(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Literal;
  e->literal = std::move(v);
  return e;
}

ExprPtr make_attr(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Attr;
  e->attr = std::move(name);
  return e;
}

ExprPtr make_unary(UnOp op, ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Unary;
  e->un_op = op;
  e->args = {std::move(operand)};
  return e;
}

ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->bin_op = op;
  e->args = {std::move(lhs), std::move(rhs)};
  return e;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  ExprPtr parse_full() {
    ExprPtr e = parse_or();
    if (lex_.peek().kind != Token::Kind::End) {
      throw ParseError("trailing input after expression: '" + lex_.peek().text + "'");
    }
    return e;
  }

  std::vector<Assignment> parse_statements() {
    std::vector<Assignment> out;
    while (lex_.peek().kind != Token::Kind::End) {
      Token t = lex_.next();
      if (t.kind != Token::Kind::Ident || t.text != "out") {
        throw ParseError("assignment must start with 'out.', got '" + t.text + "'");
      }
      lex_.expect_punct(".");
      Token name = lex_.next();
      if (name.kind != Token::Kind::Ident) {
        throw ParseError("expected attribute name after 'out.'");
      }
      lex_.expect_punct("=");
      Assignment a;
      a.target = name.text;
      a.expr = parse_or();
      out.push_back(std::move(a));
      if (!lex_.accept_punct(";")) break;
    }
    if (lex_.peek().kind != Token::Kind::End) {
      throw ParseError("trailing input after assignments: '" + lex_.peek().text + "'");
    }
    if (out.empty()) throw ParseError("UDF body has no assignments");
    return out;
  }

 private:
  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "||") {
      lex_.next();
      e = make_binary(BinOp::Or, e, parse_and());
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "&&") {
      lex_.next();
      e = make_binary(BinOp::And, e, parse_cmp());
    }
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Punct) {
      BinOp op;
      if (t.text == "==") op = BinOp::Eq;
      else if (t.text == "!=") op = BinOp::Ne;
      else if (t.text == "<") op = BinOp::Lt;
      else if (t.text == "<=") op = BinOp::Le;
      else if (t.text == ">") op = BinOp::Gt;
      else if (t.text == ">=") op = BinOp::Ge;
      else return e;
      lex_.next();
      return make_binary(op, e, parse_add());
    }
    return e;
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (lex_.peek().kind == Token::Kind::Punct &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      BinOp op = lex_.next().text == "+" ? BinOp::Add : BinOp::Sub;
      e = make_binary(op, e, parse_mul());
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (lex_.peek().kind == Token::Kind::Punct &&
           (lex_.peek().text == "*" || lex_.peek().text == "/")) {
      BinOp op = lex_.next().text == "*" ? BinOp::Mul : BinOp::Div;
      e = make_binary(op, e, parse_unary());
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (lex_.accept_punct("-")) return make_unary(UnOp::Neg, parse_unary());
    if (lex_.accept_punct("!")) return make_unary(UnOp::Not, parse_unary());
    return parse_primary();
  }

  ExprPtr parse_primary() {
    if (lex_.accept_punct("(")) {
      ExprPtr e = parse_or();
      lex_.expect_punct(")");
      return e;
    }
    if (lex_.accept_punct("[")) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::List;
      if (!lex_.accept_punct("]")) {
        do {
          e->args.push_back(parse_or());
        } while (lex_.accept_punct(","));
        lex_.expect_punct("]");
      }
      return e;
    }
    Token t = lex_.next();
    switch (t.kind) {
      case Token::Kind::Int: return make_literal(Value(t.int_value));
      case Token::Kind::Real: return make_literal(Value(t.real_value));
      case Token::Kind::String: return make_literal(Value(t.text));
      case Token::Kind::Ident: {
        if (t.text == "true") return make_literal(Value(true));
        if (t.text == "false") return make_literal(Value(false));
        if (t.text == "in") {
          lex_.expect_punct(".");
          Token name = lex_.next();
          if (name.kind != Token::Kind::Ident) {
            throw ParseError("expected attribute name after 'in.'");
          }
          return make_attr(name.text);
        }
        // Function call.
        lex_.expect_punct("(");
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Call;
        e->fn = t.text;
        if (!lex_.accept_punct(")")) {
          do {
            e->args.push_back(parse_or());
          } while (lex_.accept_punct(","));
          lex_.expect_punct(")");
        }
        validate_call(*e);
        return e;
      }
      default:
        throw ParseError("unexpected token '" + t.text + "' in expression");
    }
  }

  static void validate_call(const Expr& e) {
    size_t n = e.args.size();
    if (e.fn == "startswith" || e.fn == "concat") {
      if (n != 2) throw ParseError(e.fn + " takes 2 arguments");
    } else if (e.fn == "length") {
      if (n != 1) throw ParseError("length takes 1 argument");
    } else if (e.fn == "count") {
      if (n != 0) throw ParseError("count takes no arguments");
    } else if (e.fn == "sum" || e.fn == "min" || e.fn == "max" || e.fn == "mean") {
      if (n != 1) throw ParseError(e.fn + " takes 1 argument");
    } else {
      throw ParseError("unknown function '" + e.fn + "'");
    }
  }

  Lexer lex_;
};

void render(const ExprPtr& e, std::ostream& os) {
  switch (e->kind) {
    case Expr::Kind::Literal:
      if (e->literal.is_string()) {
        os << '"';
        for (char c : e->literal.as_string()) {
          if (c == '"' || c == '\\') os << '\\';
          os << c;
        }
        os << '"';
      } else {
        os << e->literal.to_string();
      }
      break;
    case Expr::Kind::Attr:
      os << "in." << e->attr;
      break;
    case Expr::Kind::Unary:
      os << (e->un_op == UnOp::Neg ? "-" : "!") << "(";
      render(e->args[0], os);
      os << ")";
      break;
    case Expr::Kind::Binary: {
      static const char* names[] = {"+", "-", "*", "/", "==", "!=",
                                    "<", "<=", ">", ">=", "&&", "||"};
      os << "(";
      render(e->args[0], os);
      os << " " << names[static_cast<int>(e->bin_op)] << " ";
      render(e->args[1], os);
      os << ")";
      break;
    }
    case Expr::Kind::Call: {
      os << e->fn << "(";
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i) os << ", ";
        render(e->args[i], os);
      }
      os << ")";
      break;
    }
    case Expr::Kind::List: {
      os << "[";
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i) os << ", ";
        render(e->args[i], os);
      }
      os << "]";
      break;
    }
  }
}

void collect_attrs_into(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == Expr::Kind::Attr) {
    out.insert(e->attr);
    return;
  }
  for (const auto& a : e->args) collect_attrs_into(a, out);
}

Value eval_numeric_bin(BinOp op, const Value& l, const Value& r) {
  if (!l.is_number() || !r.is_number()) {
    throw TypeError(std::string("arithmetic requires numbers, got ") + l.type_name() +
                    " and " + r.type_name());
  }
  if (op == BinOp::Div) {
    double d = r.as_real();
    if (d == 0.0) throw TypeError("division by zero");
    return Value(l.as_real() / d);
  }
  if (l.is_int() && r.is_int()) {
    int64_t a = l.as_int(), b = r.as_int();
    switch (op) {
      case BinOp::Add: return Value(a + b);
      case BinOp::Sub: return Value(a - b);
      case BinOp::Mul: return Value(a * b);
      default: break;
    }
  }
  double a = l.as_real(), b = r.as_real();
  switch (op) {
    case BinOp::Add: return Value(a + b);
    case BinOp::Sub: return Value(a - b);
    case BinOp::Mul: return Value(a * b);
    default: break;
  }
  throw TypeError("bad arithmetic operator");
}

Value eval_compare(BinOp op, const Value& l, const Value& r) {
  int c;
  if (l.is_number() && r.is_number()) {
    double a = l.as_real(), b = r.as_real();
    c = a == b ? 0 : (a < b ? -1 : 1);
  } else if (l.type_rank() == r.type_rank() && !l.is_null()) {
    c = compare_values(l, r);
  } else {
    throw TypeError(std::string("cannot compare ") + l.type_name() + " with " +
                    r.type_name());
  }
  switch (op) {
    case BinOp::Eq: return Value(c == 0);
    case BinOp::Ne: return Value(c != 0);
    case BinOp::Lt: return Value(c < 0);
    case BinOp::Le: return Value(c <= 0);
    case BinOp::Gt: return Value(c > 0);
    case BinOp::Ge: return Value(c >= 0);
    default: break;
  }
  throw TypeError("bad comparison operator");
}

Value eval_call(const Expr& e, const std::vector<Value>& args) {
  if (e.fn == "startswith") {
    const std::string& s = args[0].as_string();
    const std::string& p = args[1].as_string();
    return Value(s.rfind(p, 0) == 0);
  }
  if (e.fn == "concat") {
    return Value(args[0].as_string() + args[1].as_string());
  }
  if (e.fn == "length") {
    if (args[0].is_string()) return Value(static_cast<int64_t>(args[0].as_string().size()));
    if (args[0].is_list()) return Value(static_cast<int64_t>(args[0].as_list().size()));
    throw TypeError(std::string("length expects string or list, got ") + args[0].type_name());
  }
  throw TypeError("aggregator '" + e.fn + "' used outside a grouping context");
}

}  // namespace

ExprPtr parse_expression(const std::string& text) {
  return Parser(text).parse_full();
}

std::vector<Assignment> parse_assignments(const std::string& text) {
  return Parser(text).parse_statements();
}

std::string expr_to_string(const ExprPtr& expr) {
  std::ostringstream os;
  render(expr, os);
  return os.str();
}

std::string assignments_to_string(const std::vector<Assignment>& assigns) {
  std::ostringstream os;
  for (size_t i = 0; i < assigns.size(); ++i) {
    if (i) os << "; ";
    os << "out." << assigns[i].target << " = ";
    render(assigns[i].expr, os);
  }
  return os.str();
}

std::set<std::string> collect_attrs(const ExprPtr& expr) {
  std::set<std::string> out;
  collect_attrs_into(expr, out);
  return out;
}

bool is_identity_copy(const Assignment& assign) {
  return assign.expr->kind == Expr::Kind::Attr && assign.expr->attr == assign.target;
}

bool is_aggregator_name(const std::string& fn) {
  return fn == "sum" || fn == "count" || fn == "min" || fn == "max" || fn == "mean";
}

bool contains_aggregator(const ExprPtr& expr) {
  if (expr->kind == Expr::Kind::Call && is_aggregator_name(expr->fn)) return true;
  for (const auto& a : expr->args) {
    if (contains_aggregator(a)) return true;
  }
  return false;
}

const Value& RowView::get(const std::string& attr) const {
  for (size_t i = 0; i < schema->size(); ++i) {
    if ((*schema)[i] == attr) return (*row)[i];
  }
  throw UnknownAttribute("attribute '" + attr + "' not in schema");
}

Value eval_expr(const ExprPtr& expr, const RowView& view) {
  switch (expr->kind) {
    case Expr::Kind::Literal:
      return expr->literal;
    case Expr::Kind::Attr:
      return view.get(expr->attr);
    case Expr::Kind::Unary: {
      if (expr->un_op == UnOp::Not) {
        return Value(!eval_expr(expr->args[0], view).as_bool());
      }
      Value v = eval_expr(expr->args[0], view);
      if (v.is_int()) return Value(-v.as_int());
      if (v.is_real()) return Value(-v.as_real());
      throw TypeError(std::string("cannot negate ") + v.type_name());
    }
    case Expr::Kind::Binary: {
      BinOp op = expr->bin_op;
      if (op == BinOp::And) {
        if (!eval_expr(expr->args[0], view).as_bool()) return Value(false);
        return Value(eval_expr(expr->args[1], view).as_bool());
      }
      if (op == BinOp::Or) {
        if (eval_expr(expr->args[0], view).as_bool()) return Value(true);
        return Value(eval_expr(expr->args[1], view).as_bool());
      }
      Value l = eval_expr(expr->args[0], view);
      Value r = eval_expr(expr->args[1], view);
      if (op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul || op == BinOp::Div) {
        return eval_numeric_bin(op, l, r);
      }
      return eval_compare(op, l, r);
    }
    case Expr::Kind::Call: {
      std::vector<Value> args;
      args.reserve(expr->args.size());
      for (const auto& a : expr->args) args.push_back(eval_expr(a, view));
      return eval_call(*expr, args);
    }
    case Expr::Kind::List: {
      ValueList items;
      items.reserve(expr->args.size());
      for (const auto& a : expr->args) items.push_back(eval_expr(a, view));
      return Value(std::move(items));
    }
  }
  throw TypeError("unreachable expression kind");
}

namespace {

Value eval_aggregator(const Expr& e, const Schema& schema, const std::vector<Row>& rows,
                      const std::optional<Value>& init) {
  if (e.fn == "count") {
    int64_t seed = init ? init->as_int() : 0;
    return Value(seed + static_cast<int64_t>(rows.size()));
  }
  std::vector<Value> samples;
  samples.reserve(rows.size());
  for (const auto& row : rows) {
    RowView view{&schema, &row};
    samples.push_back(eval_expr(e.args[0], view));
  }
  if (e.fn == "sum" || e.fn == "mean") {
    bool all_int = !init || init->is_int();
    for (const auto& v : samples) {
      if (!v.is_number()) {
        throw TypeError(std::string("sum/mean over non-number ") + v.type_name());
      }
      all_int = all_int && v.is_int();
    }
    if (e.fn == "sum" && all_int) {
      int64_t total = init ? init->as_int() : 0;
      for (const auto& v : samples) total += v.as_int();
      return Value(total);
    }
    double total = init ? init->as_real() : 0.0;
    for (const auto& v : samples) total += v.as_real();
    if (e.fn == "sum") return Value(total);
    if (samples.empty()) throw TypeError("mean of an empty collection");
    return Value(total / static_cast<double>(samples.size()));
  }
  // min / max
  if (init) samples.push_back(*init);
  if (samples.empty()) throw TypeError(e.fn + " of an empty collection");
  const Value* best = &samples[0];
  for (const auto& v : samples) {
    if (v.type_rank() != best->type_rank() && !(v.is_number() && best->is_number())) {
      throw TypeError(std::string("mixed types in ") + e.fn);
    }
    int c = v.is_number() && best->is_number()
                ? (v.as_real() == best->as_real() ? 0 : (v.as_real() < best->as_real() ? -1 : 1))
                : compare_values(v, *best);
    if ((e.fn == "min" && c < 0) || (e.fn == "max" && c > 0)) best = &v;
  }
  return *best;
}

}  // namespace

Value eval_group_expr(const ExprPtr& expr, const Schema& schema,
                      const std::vector<Row>& rows,
                      const std::set<std::string>& scalar_attrs,
                      const std::optional<Value>& init) {
  switch (expr->kind) {
    case Expr::Kind::Literal:
      return expr->literal;
    case Expr::Kind::Attr: {
      if (!scalar_attrs.count(expr->attr)) {
        throw TypeError("attribute 'in." + expr->attr +
                        "' referenced outside an aggregator in a grouping context");
      }
      if (rows.empty()) throw TypeError("empty group has no key row");
      RowView view{&schema, &rows[0]};
      return view.get(expr->attr);
    }
    case Expr::Kind::Call:
      if (is_aggregator_name(expr->fn)) {
        return eval_aggregator(*expr, schema, rows, init);
      }
      [[fallthrough]];
    default: {
      // Non-aggregator structure: evaluate children in group context, then
      // apply the row-level operator on the resulting constants.
      auto clone = std::make_shared<Expr>(*expr);
      clone->args.clear();
      for (const auto& a : expr->args) {
        clone->args.push_back(
            make_literal(eval_group_expr(a, schema, rows, scalar_attrs, init)));
      }
      Schema empty_schema;
      Row empty_row;
      RowView view{&empty_schema, &empty_row};
      return eval_expr(clone, view);
    }
  }
}

}  // namespace dogopt
