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
//
// Mini expression language used by UDF metadata. The grammar covers attribute
// references (`in.name`), literals, arithmetic, comparisons, boolean
// connectives, string helpers (startswith/concat/length), list construction,
// and the aggregators sum/count/min/max/mean in grouping contexts.

#ifndef DOGOPT_EXPR_HPP_
#define DOGOPT_EXPR_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dogopt/value.hpp"

namespace dogopt {

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Literal, Attr, Unary, Binary, Call, List };

  Kind kind = Kind::Literal;
  Value literal;
  std::string attr;             // Kind::Attr
  UnOp un_op = UnOp::Neg;       // Kind::Unary
  BinOp bin_op = BinOp::Add;    // Kind::Binary
  std::string fn;               // Kind::Call
  std::vector<ExprPtr> args;    // operands / call args / list items
};

/// One `out.<target> = <expr>` statement of a map/group/agg UDF body.
struct Assignment {
  std::string target;
  ExprPtr expr;
};

ExprPtr parse_expression(const std::string& text);
std::vector<Assignment> parse_assignments(const std::string& text);

/// Renders an expression back to canonical source text (parse round-trips).
std::string expr_to_string(const ExprPtr& expr);
std::string assignments_to_string(const std::vector<Assignment>& assigns);

/// All attribute names read by the expression, aggregator arguments included.
std::set<std::string> collect_attrs(const ExprPtr& expr);

/// True when the assignment is `out.a = in.a` for the same name `a`.
bool is_identity_copy(const Assignment& assign);

bool contains_aggregator(const ExprPtr& expr);
bool is_aggregator_name(const std::string& fn);

/// Schema-aligned tuple of values.
using Row = std::vector<Value>;
using Schema = std::vector<std::string>;

/// Row bound to its schema for attribute lookup during evaluation.
struct RowView {
  const Schema* schema;
  const Row* row;

  const Value& get(const std::string& attr) const;
};

/// Evaluates a row-level expression. Aggregator calls raise TypeError here.
Value eval_expr(const ExprPtr& expr, const RowView& view);

/// Evaluates a grouping-context expression over the rows of one group.
/// Attribute references outside aggregator arguments must name one of
/// `scalar_attrs` (group keys); they resolve against the first row.
/// `init` seeds sum/count and joins min/max as an extra candidate; mean is
/// (init + sum)/count.
Value eval_group_expr(const ExprPtr& expr, const Schema& schema,
                      const std::vector<Row>& rows,
                      const std::set<std::string>& scalar_attrs,
                      const std::optional<Value>& init);

}  // namespace dogopt

#endif  // DOGOPT_EXPR_HPP_
