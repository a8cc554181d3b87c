#include <doctest.h>

#include "../common/properties.hpp"
#include "qtheta/dsl.hpp"

using namespace qtheta;
using namespace qtheta::dsl;

namespace {

Series ev(const std::string& text, Exponent n, Ring ring = Ring::exact()) { return dsl::eval(*parse(text), ring, n); }

std::size_t error_position(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.position();
  }
  return std::string::npos;
}

}  // namespace

TEST_CASE("parse examples") {
  auto e = parse("f(q,q^9)*f(q^3,q^7)");
  REQUIRE(e->kind == Kind::product);
  CHECK(e->lhs->kind == Kind::theta);
  CHECK(e->lhs->a == Monomial{1, 1});
  CHECK(e->lhs->b == Monomial{1, 9});
  CHECK(e->rhs->a == Monomial{1, 3});
  CHECK(e->rhs->b == Monomial{1, 7});

  e = parse("f_2^2/f_1");
  REQUIRE(e->kind == Kind::quotient);
  REQUIRE(e->lhs->kind == Kind::power);
  CHECK(e->lhs->m == 2);
  CHECK(e->lhs->lhs->kind == Kind::euler);
  CHECK(e->lhs->lhs->exp == 2);
  CHECK(e->rhs->kind == Kind::euler);

  e = parse("E(f(q,q^9); 2, 0)");
  REQUIRE(e->kind == Kind::extract);
  CHECK(e->m == 2);
  CHECK(e->j == 0);

  e = parse("I(T;3)");
  REQUIRE(e->kind == Kind::inflate);
  CHECK(e->lhs->kind == Kind::triangular);

  e = parse("P(-q,q^2;q^5)");
  REQUIRE(e->kind == Kind::pochhammer);
  CHECK(e->args.size() == 2);
  CHECK(e->base == Monomial{1, 5});

  e = parse("-q^3");
  CHECK(e->kind == Kind::monomial);
  CHECK(e->coeff == -1);
  CHECK(e->exp == 3);

  e = parse("1 - f_1");
  CHECK(e->kind == Kind::difference);
  e = parse("-f_1");
  CHECK(e->kind == Kind::product);

  // precedence: + below *, * below ^
  e = parse("f_1 + f_2*f_3^2");
  REQUIRE(e->kind == Kind::sum);
  REQUIRE(e->rhs->kind == Kind::product);
  CHECK(e->rhs->rhs->kind == Kind::power);
  // left associative
  e = parse("f_1/f_2/f_3");
  REQUIRE(e->kind == Kind::quotient);
  CHECK(e->lhs->kind == Kind::quotient);
}

TEST_CASE("parse errors carry positions") {
  CHECK(error_position("f(q,q^9") == 7);
  CHECK(error_position("g(q)") == 0);
  CHECK(error_position("f_1 +") == 5);
  CHECK(error_position("f(2*q,q)") != std::string::npos);
  CHECK(error_position("f(q,q^-1)") != std::string::npos);
  CHECK(error_position("f_1^0") != std::string::npos);
  CHECK(error_position("E(f_1;2,2)") != std::string::npos);
  CHECK(error_position("f_0") != std::string::npos);
  CHECK(error_position("f_1 f_2") != std::string::npos);
  CHECK(error_position("") != std::string::npos);
  CHECK(error_position("f(0,0)") != std::string::npos);
}

TEST_CASE("print round trip on written forms") {
  for (const char* text : {"f(q,q^9)*f(q^3,q^7)", "f_2^2/f_1", "E(f(q,q^9);2,0)", "q^3", "-q*f_1", "f_1-(f_2-f_3)",
                           "f_1/(f_2*f_3)", "(f_1+f_2)^3", "(-q)^2", "2*f(-q,-q^2)", "I(E(Psi(-q^13,q);8,7);2)",
                           "P(-q,-q^9,q^10;q^10)", "T-1", "f_1*-1"}) {
    const auto e = parse(text);
    const auto back = parse(print(*e));
    CHECK_MESSAGE(*back == *e, text << " printed as " << print(*e));
  }
  CHECK(print(*parse("f( q , q^9 ) * f_1")) == "f(q,q^9)*f_1");
}

TEST_CASE("eval examples") {
  CHECK(eq_upto(ev("f(-q,-q^2)", 16), euler_series(EulerSpec{1}, 16), 16));
  const Series p = ev("Psi(-q^5,q)", 10);
  CHECK(p.coeff(0) == 1);
  CHECK(p.coeff(1) == -1);
  CHECK(p.coeff(5) == -1);
  CHECK(p.coeff(8) == 1);
  CHECK(p.nonzero_count() == 4);

  const Series m = ev("q^3", 10);
  CHECK(m.nonzero_count() == 1);
  CHECK(m.coeff(3) == 1);
  CHECK(m.order() == 10);

  const Series r = ev("1/Psi(-q^5,q)", 5);
  for (Exponent e = 0; e < 5; ++e) CHECK(r.coeff(e) == 1);

  // extraction/inflation with demand-driven child orders
  const Series even = ev("E(f(q,q^9);2,0)", 15);
  CHECK(even.order() == 15);
  CHECK(even.coeff(6) == 1);
  CHECK(even.coeff(14) == 1);
  CHECK(ev("E(f(q,q^9);2,1)", 5).nonzero_count() == 2);
  CHECK(eq_upto(ev("I(f_1;2)", 40), ev("f_2", 40), 40));

  // Laurent prefactor: q^-1 cancels against a q factor
  CHECK(eq_upto(ev("E(q*f_1;1,0)", 20), ev("q*f_1", 20), 20));
}

TEST_CASE("eval errors") {
  CHECK_THROWS_AS(ev("1/(2+q)", 5), DomainError);
  CHECK_THROWS_AS(ev("1/q", 5), DomainError);
  CHECK_THROWS_AS(ev("f_1", 0), OrderError);
  // mod 2: 1 + f(-1,q) has constant term 1 + 1 + 1 ... handled as a domain error
  CHECK_THROWS_AS(ev("1/f(-1,q)", 5), DomainError);
}

TEST_CASE("the evaluator memo is consistent") {
  Evaluator ev1;
  const auto e = parse("f(q,q^9)^2*f_1/f_2");
  const Series a = ev1.eval(*e, Ring::exact(), 300);
  const Series b = ev1.eval(*e, Ring::exact(), 300);
  CHECK(eq_upto(a, b, 300));
  const Series c = ev1.eval(*e, Ring::gf2(), 300);
  CHECK(eq_upto(reduce_mod(a, 1), c, 300));
}

TEST_CASE("check script format") {
  const auto items = parse_check_script(R"(# comment
eq_a : f(-q,-q^2) == f_1 | exact | order 50

cong_b : f(q,q^9)^2 ~= f(q^2,q^18) | mod 2 | order 300   # trailing comment
cong_c : f_1^4 ~= f_4 | mod 2^2
eq_d : T == f_2^2/f_1
)");
  REQUIRE(items.size() == 4);
  CHECK(items[0].id == "eq_a");
  CHECK(items[0].mode.exact);
  CHECK(items[0].order == 50);
  CHECK(items[0].line == 2);
  CHECK_FALSE(items[1].mode.exact);
  CHECK(items[1].mode.w == 1);
  CHECK(items[1].order == 300);
  CHECK(items[2].mode.w == 2);
  CHECK(items[2].order == kDefaultCongruenceOrder);
  CHECK(items[3].mode.exact);
  CHECK(items[3].order == kDefaultExactOrder);
  CHECK(items[2].mode.to_string() == "mod 2^2");

  auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_check_script(text);
    } catch (const ParseError& e) {
      return e.position();
    }
    return 0;
  };
  CHECK(line_of("a : f_1 == f_1\nb : f_1 == f_1 | mod 2\n") == 2);   // == needs exact
  CHECK(line_of("a : f_1 ~= f_1 | exact\n") == 1);                    // ~= needs mod
  CHECK(line_of("a : f_1 == f_1\na : f_2 == f_2\n") == 2);            // duplicate id
  CHECK(line_of("\n\na f_1 == f_1\n") == 3);                          // missing colon
  CHECK(line_of("a : f_1 = f_1\n") == 1);
  CHECK(line_of("a : f_1 == f(q\n") == 1);
  CHECK(line_of("a : f_1 == f_1 | order 0\n") == 1);
  CHECK(line_of("a : f_1 ~= f_1 | mod 3\n") == 1);
}

TEST_CASE("run_checks") {
  const auto items = parse_check_script(R"(
good : f(q,q^4)*f(q^2,q^3) == f_2*f_5^3/(f_1*f_10) | exact | order 300
bad : f(q,q^4)*f(q^2,q^3) == f_2*f_5^3/(f_1*f_10) + q^7 | exact | order 300
broken : f_1 == 1/(2+q) | exact | order 10
cong : 1/Psi(-q^9,q) ~= f(q,q^9)/f(q^2,q^18) | mod 2 | order 2000
)");
  for (unsigned jobs : {1U, 3U}) {
    const RunReport rep = run_checks(items, RunOptions{std::nullopt, jobs});
    REQUIRE(rep.items.size() == 4);
    CHECK_FALSE(rep.passed());
    CHECK(rep.items[0].id == "good");
    CHECK(rep.items[0].status == ItemStatus::pass);
    CHECK(rep.items[0].compared_to == 300);
    CHECK(rep.items[1].status == ItemStatus::fail);
    REQUIRE(rep.items[1].mismatch);
    CHECK(rep.items[1].mismatch->exponent == 7);
    CHECK(rep.items[2].status == ItemStatus::error);
    CHECK_FALSE(rep.items[2].message.empty());
    CHECK(rep.items[3].status == ItemStatus::pass);
    CHECK(rep.items[3].mode == "mod 2^1");
  }
  const RunReport shortened = run_checks(items, RunOptions{Exponent{5}, 1});
  CHECK(shortened.items[1].status == ItemStatus::pass);  // the q^7 fault is beyond order 5
  CHECK(shortened.items[0].requested_order == 5);
}

TEST_CASE("property: parse/print round trip") {
  const auto r = testing::dsl_round_trip(testing::kDefaultSeed + 7, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: eval commutes with reduction") {
  const auto r = testing::dsl_eval_commutes(testing::kDefaultSeed + 8, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}
