#include "qtheta/dsl.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "qtheta/parallel.hpp"

namespace qtheta::dsl {

bool operator==(const Expr& x, const Expr& y) {
  if (x.kind != y.kind) return false;
  auto same_child = [](const ExprPtr& p, const ExprPtr& q) {
    if (!p || !q) return !p && !q;
    return *p == *q;
  };
  switch (x.kind) {
    case Kind::theta:
    case Kind::psi: return x.a == y.a && x.b == y.b;
    case Kind::euler: return x.exp == y.exp;
    case Kind::monomial: return x.coeff == y.coeff && x.exp == y.exp;
    case Kind::triangular: return true;
    case Kind::pochhammer: return x.args == y.args && x.base == y.base;
    case Kind::sum:
    case Kind::difference:
    case Kind::product:
    case Kind::quotient: return same_child(x.lhs, y.lhs) && same_child(x.rhs, y.rhs);
    case Kind::power:
    case Kind::inflate: return x.m == y.m && same_child(x.lhs, y.lhs);
    case Kind::extract: return x.m == y.m && x.j == y.j && same_child(x.lhs, y.lhs);
  }
  return false;
}

// ---------------------------------------------------------------------------
// parser

namespace {

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr binary(Kind k, ExprPtr l, ExprPtr r) {
  Expr e;
  e.kind = k;
  e.lhs = std::move(l);
  e.rhs = std::move(r);
  return make(std::move(e));
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  ExprPtr parse_all() {
    auto e = expr();
    skip();
    if (i_ < s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, i_); }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])) != 0) ++i_;
  }
  char peek() {
    skip();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  // Character after the next one, ignoring whitespace in between.
  char peek2() {
    skip();
    std::size_t k = i_ + 1;
    while (k < s_.size() && std::isspace(static_cast<unsigned char>(s_[k])) != 0) ++k;
    return k < s_.size() ? s_[k] : '\0';
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++i_;
    return true;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::int64_t integer() {
    skip();
    std::int64_t v = 0;
    const char* first = s_.data() + i_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec == std::errc::result_out_of_range) fail("integer out of range");
    if (ec != std::errc{} || ptr == first || *first == '-') fail("expected an integer");
    i_ += static_cast<std::size_t>(ptr - first);
    return v;
  }
  std::string identifier() {
    skip();
    const std::size_t start = i_;
    while (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) != 0 || s_[i_] == '_')) ++i_;
    return std::string(s_.substr(start, i_ - start));
  }
  bool at_digit() { return std::isdigit(static_cast<unsigned char>(peek())) != 0; }
  bool at_q() {
    if (peek() != 'q') return false;
    const std::size_t k = i_ + 1;
    return k >= s_.size() || (std::isalnum(static_cast<unsigned char>(s_[k])) == 0 && s_[k] != '_');
  }

  ExprPtr expr() {
    auto left = term();
    while (true) {
      if (eat('+'))
        left = binary(Kind::sum, left, term());
      else if (eat('-'))
        left = binary(Kind::difference, left, term());
      else
        return left;
    }
  }

  ExprPtr term() {
    auto left = unary();
    while (true) {
      if (eat('*'))
        left = binary(Kind::product, left, unary());
      else if (eat('/'))
        left = binary(Kind::quotient, left, unary());
      else
        return left;
    }
  }

  ExprPtr unary() {
    if (peek() == '-') {
      const char next = peek2();
      if (next == 'q' || std::isdigit(static_cast<unsigned char>(next)) != 0) return power();
      ++i_;
      Expr neg;
      neg.kind = Kind::monomial;
      neg.coeff = -1;
      return binary(Kind::product, make(neg), unary());
    }
    return power();
  }

  ExprPtr power() {
    auto base = atom();
    while (eat('^')) {
      const std::size_t at = i_;
      const auto k = integer();
      if (k < 1) {
        i_ = at;
        fail("power exponent must be >= 1");
      }
      Expr e;
      e.kind = Kind::power;
      e.lhs = base;
      e.m = k;
      base = make(std::move(e));
    }
    return base;
  }

  // ['-'] q ['^' INT] | ['-'] INT
  Expr mono() {
    Expr e;
    e.kind = Kind::monomial;
    const bool neg = eat('-');
    if (at_q()) {
      ++i_;
      e.coeff = neg ? -1 : 1;
      e.exp = 1;
      if (eat('^')) e.exp = integer();
      return e;
    }
    if (!at_digit()) fail("expected a monomial");
    e.coeff = neg ? -integer() : integer();
    e.exp = 0;
    return e;
  }

  Monomial signed_mono() {
    const std::size_t at = (skip(), i_);
    const Expr e = mono();
    if (e.coeff != 1 && e.coeff != -1) {
      i_ = at;
      fail("theta and product arguments must be +-q^k");
    }
    return Monomial{static_cast<int>(e.coeff), e.exp};
  }

  ExprPtr atom() {
    const char c = peek();
    if (c == '(') {
      ++i_;
      auto e = expr();
      expect(')');
      return e;
    }
    if (c == '-' || at_q() || at_digit()) return make(mono());
    const std::size_t at = i_;
    const std::string name = identifier();
    if (name.empty()) fail("expected an expression");
    Expr e;
    if (name == "f_") {
      e.kind = Kind::euler;
      e.exp = integer();
      if (e.exp < 1) fail("f_m needs m >= 1");
      return make(std::move(e));
    }
    if (name == "T") {
      e.kind = Kind::triangular;
      return make(std::move(e));
    }
    if (name == "f" || name == "Psi") {
      e.kind = name == "f" ? Kind::theta : Kind::psi;
      expect('(');
      e.a = signed_mono();
      expect(',');
      e.b = signed_mono();
      expect(')');
      try {
        if (e.kind == Kind::theta)
          ThetaSpec{e.a, e.b}.validate();
        else
          FalseThetaSpec{e.a, e.b}.validate();
      } catch (const DomainError& err) {
        i_ = at;
        fail(err.what());
      }
      return make(std::move(e));
    }
    if (name == "P") {
      e.kind = Kind::pochhammer;
      expect('(');
      do e.args.push_back(signed_mono());
      while (eat(','));
      expect(';');
      e.base = signed_mono();
      expect(')');
      if (e.base.exp < 1) fail("product base needs a positive q-exponent");
      return make(std::move(e));
    }
    if (name == "E") {
      e.kind = Kind::extract;
      expect('(');
      e.lhs = expr();
      expect(';');
      e.m = integer();
      expect(',');
      e.j = integer();
      expect(')');
      if (e.m < 1 || e.j >= e.m) fail("E(x; m, j) needs 0 <= j < m");
      return make(std::move(e));
    }
    if (name == "I") {
      e.kind = Kind::inflate;
      expect('(');
      e.lhs = expr();
      expect(';');
      e.m = integer();
      expect(')');
      if (e.m < 1) fail("I(x; m) needs m >= 1");
      return make(std::move(e));
    }
    i_ = at;
    fail("unknown atom '" + name + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

// Binding strength for printing: sums 1, products 2, powers 3, atoms 4.
int precedence(const Expr& e) {
  switch (e.kind) {
    case Kind::sum:
    case Kind::difference: return 1;
    case Kind::product:
    case Kind::quotient: return 2;
    case Kind::power: return 3;
    case Kind::monomial: return (e.coeff < 0 || e.exp != 0) ? 3 : 4;
    default: return 4;
  }
}

std::string mono_text(std::int64_t coeff, Exponent exp) {
  if (exp == 0) return std::to_string(coeff);
  std::string s = coeff < 0 ? "-q" : "q";
  if (exp != 1) s += "^" + std::to_string(exp);
  return s;
}

void print_to(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_to(child, out);
    out += ')';
  } else {
    print_to(child, out);
  }
}

void print_to(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Kind::theta:
    case Kind::psi:
      out += e.kind == Kind::theta ? "f(" : "Psi(";
      out += e.a.to_string() + "," + e.b.to_string() + ")";
      return;
    case Kind::euler: out += "f_" + std::to_string(e.exp); return;
    case Kind::monomial:
      if (e.exp != 0 && e.coeff != 1 && e.coeff != -1) {
        // Only reachable for hand-built trees; spell it as a product.
        out += "(" + std::to_string(e.coeff) + "*" + mono_text(1, e.exp) + ")";
        return;
      }
      out += mono_text(e.coeff, e.exp);
      return;
    case Kind::triangular: out += "T"; return;
    case Kind::pochhammer:
      out += "P(";
      for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? "," : "") + e.args[i].to_string();
      out += ";" + e.base.to_string() + ")";
      return;
    case Kind::sum:
    case Kind::difference:
    case Kind::product:
    case Kind::quotient: {
      const int p = precedence(e);
      const char* op = e.kind == Kind::sum ? "+" : e.kind == Kind::difference ? "-" : e.kind == Kind::product ? "*" : "/";
      print_child(*e.lhs, p, out);
      out += op;
      print_child(*e.rhs, p + 1, out);
      return;
    }
    case Kind::power:
      print_child(*e.lhs, 4, out);
      out += "^" + std::to_string(e.m);
      return;
    case Kind::extract:
      out += "E(";
      print_to(*e.lhs, out);
      out += ";" + std::to_string(e.m) + "," + std::to_string(e.j) + ")";
      return;
    case Kind::inflate:
      out += "I(";
      print_to(*e.lhs, out);
      out += ";" + std::to_string(e.m) + ")";
      return;
  }
}

}  // namespace

ExprPtr parse(std::string_view text) { return Parser(text).parse_all(); }

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

Series power_series(const Series& x, std::int64_t k) {
  Series result;
  bool have = false;
  Series base = x;
  while (k > 0) {
    if (k & 1) {
      result = have ? result * base : base;
      have = true;
    }
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Series reciprocal(const Series& d, Exponent n) {
  if (d.min_exp() != 0) {
    // A denominator with leading zeros below its first stored exponent
    // behaves like min_exp 0 once padded; anything else is not a unit.
    throw DomainError("denominator must start at q^0");
  }
  const Exponent k = std::min(n, d.order());
  return d.ring().is_gf2() ? invert_newton(d, k) : invert(d, k);
}

}  // namespace

Series Evaluator::eval(const Expr& e, Ring ring, Exponent n) {
  if (n < 1) throw OrderError("evaluation order must be >= 1");
  Series s = eval_node(e, ring, n);
  if (s.order() < 1) throw OrderError("guaranteed order " + std::to_string(s.order()) + " < 1 for " + print(e));
  return s.order() > n ? truncate(s, n) : s;
}

Series Evaluator::eval_node(const Expr& e, Ring ring, Exponent n) {
  if (n < 1) throw OrderError("guaranteed order underflow while evaluating " + print(e));
  const bool leaf = e.kind == Kind::theta || e.kind == Kind::psi || e.kind == Kind::euler ||
                    e.kind == Kind::triangular || e.kind == Kind::pochhammer || e.kind == Kind::monomial;
  std::string key;
  if (!leaf || e.kind == Kind::pochhammer) {
    key = print(e) + "|" + ring.to_string() + "|" + std::to_string(n);
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }

  Series out;
  switch (e.kind) {
    case Kind::theta: out = theta_series(ThetaSpec{e.a, e.b}, n, ring); break;
    case Kind::psi: out = false_theta_series(FalseThetaSpec{e.a, e.b}, n, ring); break;
    case Kind::euler: out = euler_series(EulerSpec{e.exp}, n, ring); break;
    case Kind::triangular: out = triangular_series(n, ring); break;
    case Kind::pochhammer: out = pochhammer_series(e.args, e.base, n, ring); break;
    case Kind::monomial: out = Series::monomial(ring, e.coeff, e.exp, n); break;
    case Kind::sum: out = eval_node(*e.lhs, ring, n) + eval_node(*e.rhs, ring, n); break;
    case Kind::difference: out = eval_node(*e.lhs, ring, n) - eval_node(*e.rhs, ring, n); break;
    case Kind::product: {
      Series x = eval_node(*e.lhs, ring, n);
      Series y = eval_node(*e.rhs, ring, n);
      // A negative min_exp on one side costs precision on the other.
      if (x.min_exp() < 0) y = eval_node(*e.rhs, ring, n - x.min_exp());
      if (y.min_exp() < 0) x = eval_node(*e.lhs, ring, n - y.min_exp());
      out = x * y;
      break;
    }
    case Kind::quotient: {
      const Series d = eval_node(*e.rhs, ring, n);
      const Series x = eval_node(*e.lhs, ring, n);
      out = x * reciprocal(d, n);
      break;
    }
    case Kind::power: {
      Series x = eval_node(*e.lhs, ring, n);
      if (x.min_exp() < 0) throw DomainError("power of a Laurent series is not supported");
      out = power_series(x, e.m);
      break;
    }
    case Kind::extract: {
      const Series x = eval_node(*e.lhs, ring, e.m * (n - 1) + e.j + 1);
      out = extract(x, Progression(e.m, e.j));
      break;
    }
    case Kind::inflate: {
      const Series x = eval_node(*e.lhs, ring, (n + e.m - 1) / e.m);
      out = inflate(x, e.m);
      break;
    }
  }
  if (!key.empty()) {
    std::lock_guard lock(mutex_);
    memo_.emplace(key, out);
  }
  return out;
}

Series eval(const Expr& e, Ring ring, Exponent n) {
  Evaluator ev;
  return ev.eval(e, ring, n);
}

// ---------------------------------------------------------------------------
// check scripts

std::string CheckMode::to_string() const { return exact ? "exact" : "mod 2^" + std::to_string(w); }

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

CheckMode parse_mode(const std::string& text) {
  if (text == "exact") return {true, 0};
  std::string compact;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  if (compact.rfind("mod2^", 0) == 0) {
    int w = 0;
    const auto tail = std::string_view(compact).substr(5);
    const auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), w);
    if (ec == std::errc{} && p == tail.data() + tail.size() && w >= 1 && w <= 64) return {false, w};
  }
  if (compact == "mod2") return {false, 1};
  throw Error("bad mode '" + text + "' (expected exact or mod 2^w)");
}

}  // namespace

std::vector<CheckItem> parse_check_script(std::string_view text) {
  std::vector<CheckItem> items;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    if (trim(line).empty()) continue;
    auto bad = [&](const std::string& msg) -> ParseError {
      return ParseError("line " + std::to_string(line_no) + ": " + msg, line_no);
    };
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw bad("expected '<id> : <lhs> == <rhs>'");
    CheckItem item;
    item.line = line_no;
    item.id = trim(line.substr(0, colon));
    if (item.id.empty() || item.id.find_first_of(" \t") != std::string::npos) throw bad("bad item id");
    if (!ids.insert(item.id).second) throw bad("duplicate id '" + item.id + "'");

    std::vector<std::string> fields;
    {
      std::string_view rest = line.substr(colon + 1);
      std::size_t p;
      while ((p = rest.find('|')) != std::string_view::npos) {
        fields.push_back(trim(rest.substr(0, p)));
        rest = rest.substr(p + 1);
      }
      fields.push_back(trim(rest));
    }
    const std::string& body = fields[0];
    const auto eq = body.find("==");
    const auto cong = body.find("~=");
    if ((eq == std::string::npos) == (cong == std::string::npos)) throw bad("expected exactly one of == or ~=");
    const bool exact_op = eq != std::string::npos;
    const auto op = exact_op ? eq : cong;
    try {
      item.lhs = parse(body.substr(0, op));
    } catch (const ParseError& e) {
      throw bad("lhs: " + std::string(e.what()));
    }
    try {
      item.rhs = parse(body.substr(op + 2));
    } catch (const ParseError& e) {
      throw bad("rhs: " + std::string(e.what()));
    }

    item.mode = exact_op ? CheckMode{true, 0} : CheckMode{false, 1};
    std::optional<Exponent> order;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const std::string& fld = fields[f];
      if (fld.rfind("order", 0) == 0) {
        const std::string num = trim(std::string_view(fld).substr(5));
        Exponent v = 0;
        const auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
        if (ec != std::errc{} || p != num.data() + num.size() || v < 1) throw bad("bad order '" + num + "'");
        order = v;
      } else {
        try {
          item.mode = parse_mode(fld);
        } catch (const Error& e) {
          throw bad(e.what());
        }
      }
    }
    if (exact_op && !item.mode.exact) throw bad("'==' requires exact mode");
    if (!exact_op && item.mode.exact) throw bad("'~=' requires a mod 2^w mode");
    item.order = order.value_or(item.mode.exact ? kDefaultExactOrder : kDefaultCongruenceOrder);
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<CheckItem> load_check_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open check script " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_check_script(buf.str());
}

const char* to_string(ItemStatus s) {
  switch (s) {
    case ItemStatus::pass: return "pass";
    case ItemStatus::fail: return "fail";
    case ItemStatus::error: return "error";
  }
  return "?";
}

bool RunReport::passed() const {
  for (const auto& i : items)
    if (i.status != ItemStatus::pass) return false;
  return !items.empty();
}

RunReport run_checks(const std::vector<CheckItem>& items, const RunOptions& opts) {
  RunReport rep;
  rep.items.resize(items.size());
  Evaluator ev;
  parallel_for(items.size(), opts.jobs, [&](std::size_t k) {
    const CheckItem& item = items[k];
    ItemResult r;
    r.id = item.id;
    r.mode = item.mode.to_string();
    r.requested_order = opts.order.value_or(item.order);
    const auto start = std::chrono::steady_clock::now();
    try {
      const Ring ring = item.mode.ring();
      const Series a = ev.eval(*item.lhs, ring, r.requested_order);
      const Series b = ev.eval(*item.rhs, ring, r.requested_order);
      const Exponent upto = std::min(a.order(), b.order());
      if (upto < 1) throw OrderError("nothing to compare");
      const Comparison c = eq_upto(a, b, upto);
      r.compared_to = c.compared_to;
      r.mismatch = c.mismatch;
      r.status = c.equal ? ItemStatus::pass : ItemStatus::fail;
    } catch (const std::exception& e) {
      r.status = ItemStatus::error;
      r.message = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.items[k] = std::move(r);
  });
  return rep;
}

}  // namespace qtheta::dsl
