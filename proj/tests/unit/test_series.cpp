#include <doctest.h>

#include <vector>

#include "../common/properties.hpp"
#include "qtheta/series.hpp"

using namespace qtheta;

namespace {

std::vector<long> coeffs(const Series& s, Exponent from, Exponent to) {
  std::vector<long> out;
  for (Exponent e = from; e < to; ++e) out.push_back(s.coeff(e).get_si());
  return out;
}

// Naive O(N^2) Cauchy product on explicit windows.
Series naive_mul(const Series& a, const Series& b) {
  const Exponent lo = a.min_exp() + b.min_exp();
  const Exponent hi = std::min(a.order() + b.min_exp(), b.order() + a.min_exp());
  std::vector<mpz_class> c(static_cast<std::size_t>(std::max<Exponent>(hi - lo, 0)));
  for (Exponent i = a.min_exp(); i < a.order(); ++i)
    for (Exponent j = b.min_exp(); j < b.order(); ++j)
      if (i + j < hi) c[static_cast<std::size_t>(i + j - lo)] += a.coeff(i) * b.coeff(j);
  return Series::make(a.ring(), lo, std::span<const mpz_class>(c));
}

}  // namespace

TEST_CASE("make_series canonical forms") {
  const Series one = Series::make(Ring::exact(), 0, {1});
  CHECK(one.order() == 1);
  CHECK(one.coeff(0) == 1);

  const Series m = Series::make(Ring::gf2(), 0, {3, 2, 5});
  CHECK(coeffs(m, 0, 3) == std::vector<long>{1, 0, 1});

  const Series laurent = Series::make(Ring::exact(), -1, {1, 0, 1});
  CHECK(laurent.min_exp() == -1);
  CHECK(laurent.order() == 2);
  CHECK(coeffs(laurent, -1, 2) == std::vector<long>{1, 0, 1});
  CHECK(laurent.coeff(-5) == 0);
  CHECK_THROWS_AS(laurent.coeff(2), OrderError);

  const Series w3 = Series::make(Ring::mod2w(3), 0, {-1, 9, 16});
  CHECK(coeffs(w3, 0, 3) == std::vector<long>{7, 1, 0});
}

TEST_CASE("ring parse and print") {
  CHECK(Ring::parse("exact") == Ring::exact());
  CHECK(Ring::parse("mod2w:3") == Ring::mod2w(3));
  CHECK(Ring::parse("mod2^1") == Ring::gf2());
  CHECK(Ring::mod2w(7).to_string() == "mod2w:7");
  CHECK_THROWS(Ring::mod2w(0));
  CHECK_THROWS(Ring::mod2w(65));
  CHECK_THROWS(Ring::parse("mod3"));
}

TEST_CASE("add, sub, neg") {
  const Ring Z = Ring::exact();
  const Series a = Series::make(Z, 0, {1, 1});
  const Series b = Series::make(Z, 0, {1, -1});
  CHECK(coeffs(a + b, 0, 2) == std::vector<long>{2, 0});
  CHECK(eq_upto(a + (-a), Series::zero(Z, 2), 2));

  const Series lo = Series::make(Z, -1, {1});  // q^-1, order 0
  const Series hi = Series::make(Z, 1, {1});   // q, order 2
  const Series s = lo + hi;
  CHECK(s.min_exp() == -1);
  CHECK(s.order() == 0);  // pessimistic: min of the two orders

  const Series lo2 = Series::make(Z, -1, {1, 0, 0, 0});
  const Series s2 = lo2 + hi;
  CHECK(s2.order() == 2);
  CHECK(coeffs(s2, -1, 2) == std::vector<long>{1, 0, 1});

  CHECK_THROWS_AS(a + Series::make(Ring::gf2(), 0, {1}), RingMismatch);
}

TEST_CASE("mul windows and examples") {
  const Ring Z = Ring::exact();
  const Series a = Series::make(Z, 0, {1, 1, 0});
  const Series b = Series::make(Z, 0, {1, -1, 0});
  const Series p = a * b;
  CHECK(p.order() == 3);
  CHECK(coeffs(p, 0, 3) == std::vector<long>{1, 0, -1});

  const Series f2 = Series::make(Ring::gf2(), 0, {1, 1, 0});
  CHECK(coeffs(f2 * f2, 0, 3) == std::vector<long>{1, 0, 1});

  // order = min(order_a + min_b, order_b + min_a)
  const Series x = Series::make(Z, 2, {1, 1, 1});   // [2, 5)
  const Series y = Series::make(Z, -1, {1, 1});     // [-1, 1)
  const Series xy = x * y;
  CHECK(xy.min_exp() == 1);
  CHECK(xy.order() == 3);
  CHECK(eq_upto(xy, naive_mul(x, y), 3));

  CHECK_THROWS_AS(a * f2, RingMismatch);
}

TEST_CASE("mul matches naive Cauchy product") {
  testing::Gen g(11);
  for (int i = 0; i < 300; ++i) {
    const Ring ring = g.ring();
    const Series a = g.series(ring, g.uniform(-2, 3), g.uniform(1, 150));
    const Series b = g.series(ring, g.uniform(-2, 3), g.uniform(1, 150));
    const Series fast = a * b;
    const Series slow = naive_mul(a, b);
    REQUIRE(fast.order() == slow.order());
    if (fast.order() > fast.min_exp()) CHECK(eq_upto(fast, slow, fast.order()));
  }
}

TEST_CASE("exact multiplication does not overflow") {
  mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), 2, 62);
  const std::vector<mpz_class> c{big, big, big};
  const Series a = Series::make(Ring::exact(), 0, std::span<const mpz_class>(c));
  const Series sq = a * a;
  CHECK(sq.coeff(2) == 3 * big * big);
}

TEST_CASE("invert examples") {
  const Ring Z = Ring::exact();
  const Series g = invert(Series::make(Z, 0, {1, -1, 0, 0, 0}), 5);
  CHECK(coeffs(g, 0, 5) == std::vector<long>{1, 1, 1, 1, 1});

  const Series neg = invert(Series::make(Z, 0, {-1, 1}), 2);
  CHECK(coeffs(neg, 0, 2) == std::vector<long>{-1, -1});

  // non-unit constant, Laurent input, order beyond the known window
  CHECK_THROWS_AS(invert(Series::make(Z, 0, {2, 1}), 2), DomainError);
  CHECK_THROWS_AS(invert(Series::make(Ring::mod2w(3), 0, {4, 1}), 2), DomainError);
  CHECK_THROWS_AS(invert(Series::make(Z, -1, {1, 1}), 1), DomainError);
  CHECK_THROWS(invert(Series::make(Z, 0, {1, 1}), 3));

  // mod 2^w units are the odd residues
  const Series m = invert(Series::make(Ring::mod2w(4), 0, {3, 1, 0, 0}), 4);
  CHECK(eq_upto(Series::make(Ring::mod2w(4), 0, {3, 1, 0, 0}) * m, Series::make(Ring::mod2w(4), 0, {1, 0, 0, 0}), 4));
}

TEST_CASE("Newton and reference inversion agree on long inputs") {
  testing::Gen g(21);
  for (Ring ring : {Ring::gf2(), Ring::mod2w(5), Ring::exact()}) {
    const Series a = g.unit_series(ring, 3000);
    CHECK(eq_upto(invert(a, 3000), invert_newton(a, 3000), 3000));
  }
}

TEST_CASE("extract examples") {
  const Ring Z = Ring::exact();
  std::vector<long> raw(30, 0);
  for (int e : {0, 1, 9, 12, 28}) raw[static_cast<std::size_t>(e)] = 1;
  const Series s = Series::make(Z, 0, std::span<const std::int64_t>(
                                          std::vector<std::int64_t>(raw.begin(), raw.end())));

  const Series even = extract(s, Progression(2, 0));
  CHECK(even.order() == 15);
  CHECK(even.nonzero_terms().size() == 3);
  CHECK(even.coeff(0) == 1);
  CHECK(even.coeff(6) == 1);
  CHECK(even.coeff(14) == 1);

  const Series odd = extract(s, Progression(2, 1));
  CHECK(odd.coeff(0) == 1);
  CHECK(odd.coeff(4) == 1);
  CHECK(odd.nonzero_count() == 2);

  CHECK(eq_upto(extract(s, Progression(1, 0)), s, 30));
  // result order = ceil((order - j) / m)
  CHECK(extract(s, Progression(4, 3)).order() == 7);
  CHECK_THROWS_AS(Progression(3, 3), DomainError);
  CHECK_THROWS_AS(Progression(0, 0), DomainError);
  CHECK_THROWS_AS(extract(Series::make(Z, -1, {1, 1}), Progression(2, 0)), DomainError);
}

TEST_CASE("inflate and shift examples") {
  const Ring Z = Ring::exact();
  const Series s = Series::make(Z, 0, {1, 1});
  const Series t = inflate(s, 3);
  CHECK(t.order() == 6);
  CHECK(coeffs(t, 0, 6) == std::vector<long>{1, 0, 0, 1, 0, 0});
  CHECK(eq_upto(inflate(s, 1), s, 2));
  CHECK_THROWS_AS(inflate(s, 0), DomainError);

  const Series one = Series::make(Z, 0, {1});
  const Series q3 = shift(one, 3);
  CHECK(q3.min_exp() == 3);
  CHECK(q3.order() == 4);
  CHECK(q3.coeff(3) == 1);
  const Series back = shift(shift(s, 2), -2);
  CHECK(back.min_exp() == 0);
  CHECK(eq_upto(back, s, 2));
  const Series l = shift(Series::make(Z, -1, {1, 1}), 1);
  CHECK(l.min_exp() == 0);
  CHECK(coeffs(l, 0, 2) == std::vector<long>{1, 1});
}

TEST_CASE("reduce_mod examples") {
  const Ring Z = Ring::exact();
  CHECK(coeffs(reduce_mod(Series::make(Z, 0, {1, -1}), 1), 0, 2) == std::vector<long>{1, 1});
  CHECK(reduce_mod(Series::make(Z, 0, {0, 2}), 1).nonzero_count() == 0);
  CHECK(reduce_mod(Series::make(Z, 0, {-1}), 2).coeff(0) == 3);
  CHECK(reduce_mod(Series::make(Ring::mod2w(8), 0, {255}), 3).coeff(0) == 7);
  CHECK_THROWS_AS(reduce_mod(Series::make(Ring::gf2(), 0, {1}), 2), DomainError);

  mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), 2, 100);
  const std::vector<mpz_class> c{big - 1};
  const Series r = reduce_mod(Series::make(Z, 0, std::span<const mpz_class>(c)), 64);
  CHECK(r.residue(0, 64) == ~std::uint64_t{0});
}

TEST_CASE("eq_upto reports the first mismatch") {
  const Ring Z = Ring::exact();
  const Series a = Series::make(Z, 0, {1, 1});
  const Series b = Series::make(Z, 0, {1, 0});
  CHECK(eq_upto(a, a, 2));
  CHECK(eq_upto(a, b, 1));
  const Comparison c = eq_upto(a, b, 2);
  CHECK_FALSE(c.equal);
  REQUIRE(c.mismatch);
  CHECK(c.mismatch->exponent == 1);
  CHECK(c.mismatch->lhs == "1");
  CHECK(c.mismatch->rhs == "0");
  CHECK_THROWS_AS(eq_upto(a, b, 3), OrderError);
  CHECK_THROWS_AS(eq_upto(a, reduce_mod(b, 1), 1), RingMismatch);

  // GF(2) fast path reports across word boundaries
  std::vector<std::int64_t> v(200, 0);
  const Series z = Series::make(Ring::gf2(), 0, std::span<const std::int64_t>(v));
  v[131] = 1;
  const Series o = Series::make(Ring::gf2(), 0, std::span<const std::int64_t>(v));
  const Comparison g = eq_upto(z, o, 200);
  REQUIRE(g.mismatch);
  CHECK(g.mismatch->exponent == 131);
}

TEST_CASE("to_string") {
  const Series s = Series::make(Ring::exact(), 0, {1, -1, 0, 2});
  CHECK(s.to_string() == "1 - q + 2*q^3 + O(q^4)");
}

TEST_CASE("property: ring axioms") {
  const auto r = testing::ring_axioms(testing::kDefaultSeed, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: invert is two-sided") {
  const auto r = testing::invert_two_sided(testing::kDefaultSeed + 1, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: extract/inflate") {
  const auto r = testing::extract_inflate(testing::kDefaultSeed + 2, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: Frobenius mod 2") {
  const auto r = testing::frobenius_mod2(testing::kDefaultSeed + 3, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: reduction commutes with ring operations") {
  const auto r = testing::residue_commutation(testing::kDefaultSeed + 4, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}
