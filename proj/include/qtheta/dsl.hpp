#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtheta/series.hpp"
#include "qtheta/theta.hpp"

namespace qtheta::dsl {

enum class Kind {
  theta,       // f(a,b)
  psi,         // Psi(a,b)
  euler,       // f_m
  monomial,    // c*q^e
  triangular,  // T
  pochhammer,  // P(x1,...,xk; base)
  sum,
  difference,
  product,
  quotient,
  power,
  extract,  // E(x; m, j)
  inflate,  // I(x; m)
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Kind kind = Kind::monomial;
  // leaves
  Monomial a, b;               // theta, psi
  std::vector<Monomial> args;  // pochhammer factors
  Monomial base;               // pochhammer base
  std::int64_t coeff = 1;      // monomial coefficient
  Exponent exp = 0;            // monomial exponent, euler m
  // interior
  ExprPtr lhs, rhs;    // binary; lhs is the operand of unary nodes
  std::int64_t m = 0;  // power exponent, extract/inflate modulus
  std::int64_t j = 0;  // extract residue
};

bool operator==(const Expr& x, const Expr& y);

/// Parse an expression. Throws ParseError with a 0-based character position.
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' (mono | unary) | power
///   power := atom ('^' INT)*
///   atom  := f(mono,mono) | Psi(mono,mono) | f_INT | T | P(mono,...;mono)
///          | E(expr;INT,INT) | I(expr;INT) | mono | '(' expr ')'
///   mono  := ['-'] q ['^' INT] | ['-'] INT
ExprPtr parse(std::string_view text);

/// Canonical text; parse(print(e)) == e.
std::string print(const Expr& e);

/// Bottom-up evaluation. Children are evaluated to whatever order makes the
/// parent's guaranteed order at least n; the result is truncated to n (or
/// less, if a Laurent prefactor costs precision). Throws OrderError if the
/// guaranteed order drops below 1.
Series eval(const Expr& e, Ring ring, Exponent n);

/// Evaluator with a shared memo of subexpression values, keyed by printed
/// form, ring and order. Safe to use from several threads.
class Evaluator {
 public:
  Series eval(const Expr& e, Ring ring, Exponent n);

 private:
  Series eval_node(const Expr& e, Ring ring, Exponent n);

  std::mutex mutex_;
  std::map<std::string, Series> memo_;
};

// ---------------------------------------------------------------------------
// check scripts

struct CheckMode {
  bool exact = true;
  int w = 0;  // modulus 2^w when !exact

  Ring ring() const { return exact ? Ring::exact() : Ring::mod2w(w); }
  std::string to_string() const;
};

struct CheckItem {
  std::string id;
  ExprPtr lhs;
  ExprPtr rhs;
  CheckMode mode;
  Exponent order = 0;
  std::size_t line = 0;
};

inline constexpr Exponent kDefaultExactOrder = 2000;
inline constexpr Exponent kDefaultCongruenceOrder = 5000;

/// Line format: `<id> : <lhs> (==|~=) <rhs> [| exact | mod 2^w] [| order N]`.
/// `#` starts a comment. Throws ParseError with the 1-based line number.
std::vector<CheckItem> parse_check_script(std::string_view text);
std::vector<CheckItem> load_check_script(const std::string& path);

enum class ItemStatus { pass, fail, error };
const char* to_string(ItemStatus s);

struct ItemResult {
  std::string id;
  ItemStatus status = ItemStatus::error;
  std::string mode;
  Exponent requested_order = 0;
  Exponent compared_to = 0;
  std::optional<Mismatch> mismatch;
  std::string message;  // evaluation error text
  double seconds = 0;
};

struct RunOptions {
  std::optional<Exponent> order;  // overrides every item's order
  unsigned jobs = 1;
};

struct RunReport {
  std::vector<ItemResult> items;  // script order
  bool passed() const;
};

RunReport run_checks(const std::vector<CheckItem>& items, const RunOptions& opts);

}  // namespace qtheta::dsl
