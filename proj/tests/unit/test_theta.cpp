#include <doctest.h>

#include <map>

#include "../common/properties.hpp"
#include "qtheta/theta.hpp"

using namespace qtheta;

namespace {

Monomial q(Exponent e, int sign = 1) { return Monomial{sign, e}; }

// Direct summation of the bilateral definition over a generous n-range.
std::map<Exponent, long> direct_theta(Monomial a, Monomial b, Exponent n, bool false_theta) {
  std::map<Exponent, long> out;
  for (Exponent k = -200; k <= 200; ++k) {
    const Exponent up = k * (k + 1) / 2, down = k * (k - 1) / 2;
    const Exponent e = a.exp * up + b.exp * down;
    if (e >= n) continue;
    long s = 1;
    if (up % 2) s *= a.sign;
    if (down % 2) s *= b.sign;
    if (false_theta && k < 0) s = -s;
    out[e] += s;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

std::map<Exponent, long> as_map(const Series& s) {
  std::map<Exponent, long> out;
  for (const auto& [e, c] : s.nonzero_terms()) out[e] = c.get_si();
  return out;
}

Series sum(const Series& a, const Series& b) { return a + b; }

}  // namespace

TEST_CASE("theta_series examples") {
  const Series t = theta_series(ThetaSpec{q(1), q(9)}, 30);
  CHECK(as_map(t) == std::map<Exponent, long>{{0, 1}, {1, 1}, {9, 1}, {12, 1}, {28, 1}});

  const Series f1 = theta_series(ThetaSpec{q(1, -1), q(2, -1)}, 16);
  CHECK(as_map(f1) == std::map<Exponent, long>{{0, 1}, {1, -1}, {2, -1}, {5, 1}, {7, 1}, {12, -1}, {15, -1}});
  CHECK(eq_upto(f1, euler_series(EulerSpec{1}, 16), 16));
}

TEST_CASE("theta and false theta match direct summation") {
  testing::Gen g(5);
  for (int i = 0; i < 200; ++i) {
    const ThetaSpec s = g.theta_spec(9);
    const Exponent n = g.uniform(1, 300);
    CHECK(as_map(theta_series(s, n)) == direct_theta(s.a, s.b, n, false));
    CHECK(as_map(false_theta_series(FalseThetaSpec{s.a, s.b}, n)) == direct_theta(s.a, s.b, n, true));
  }
}

TEST_CASE("false theta examples") {
  const Series p = false_theta_series(FalseThetaSpec{q(5, -1), q(1)}, 10);
  CHECK(as_map(p) == std::map<Exponent, long>{{0, 1}, {1, -1}, {5, -1}, {8, 1}});

  for (auto [r, s] : {std::pair{9, 1}, {7, 3}, {13, 1}, {11, 3}, {9, 5}, {5, 1}}) {
    const FalseThetaSpec spec{q(r, -1), q(s)};
    CHECK(false_theta_series(spec, 50).coeff(0) == 1);
    // Psi == f mod 2: they differ by twice the negative-index tail.
    CHECK(eq_upto(reduce_mod(false_theta_series(spec, 500), 1),
                  reduce_mod(theta_series(ThetaSpec{spec.a, spec.b}, 500), 1), 500));
  }
}

TEST_CASE("generator domain errors") {
  CHECK_THROWS_AS(theta_series(ThetaSpec{q(0), q(0)}, 5), DomainError);
  CHECK_THROWS_AS(theta_series(ThetaSpec{q(-1), q(3)}, 5), DomainError);
  CHECK_THROWS_AS(false_theta_series(FalseThetaSpec{q(2), q(-1)}, 5), DomainError);
  CHECK_THROWS_AS(euler_series(EulerSpec{0}, 5), DomainError);
  // u = 0 is accepted when v >= 1
  CHECK_NOTHROW(theta_series(ThetaSpec{q(0, -1), q(1)}, 5));
}

TEST_CASE("Euler series") {
  const Series f1 = euler_series(EulerSpec{1}, 16);
  CHECK(as_map(f1) == std::map<Exponent, long>{{0, 1}, {1, -1}, {2, -1}, {5, 1}, {7, 1}, {12, -1}, {15, -1}});
  for (Exponent n : {1, 7, 40, 333}) {
    const Series f2 = euler_series(EulerSpec{2}, n);
    const Series inf = inflate(euler_series(EulerSpec{1}, (n + 1) / 2), 2);
    CHECK(eq_upto(f2, inf, n));
  }
  // f(-q,-q) = f_1^2 / f_2
  const Exponent N = 400;
  const Series f1n = euler_series(EulerSpec{1}, N);
  const Series rhs = f1n * f1n * invert(euler_series(EulerSpec{2}, N), N);
  CHECK(eq_upto(theta_series(ThetaSpec{q(1, -1), q(1, -1)}, N), rhs, N));
  // agrees with the product definition
  const Monomial xs[] = {q(3)};
  CHECK(eq_upto(euler_series(EulerSpec{3}, N), pochhammer_series(xs, q(3), N), N));
}

TEST_CASE("triple product examples") {
  CHECK(eq_upto(triple_product_series(ThetaSpec{q(1), q(9)}, 500), theta_series(ThetaSpec{q(1), q(9)}, 500), 500));
  CHECK(eq_upto(triple_product_series(ThetaSpec{q(1, -1), q(2, -1)}, 300), euler_series(EulerSpec{1}, 300), 300));
  const Exponent N = 300;
  const Series rhs = euler_series(EulerSpec{1}, N) * euler_series(EulerSpec{4}, N) *
                     invert(euler_series(EulerSpec{2}, N), N);
  CHECK(eq_upto(triple_product_series(ThetaSpec{q(1, -1), q(3, -1)}, N), rhs, N));
}

TEST_CASE("two-term split examples") {
  auto parts = entry30_parts(ThetaSpec{q(1), q(9)});
  CHECK(parts.first.prefactor == q(0));
  CHECK(parts.first.spec == ThetaSpec{q(12), q(28)});
  CHECK(parts.second.prefactor == q(1));
  CHECK(parts.second.spec == ThetaSpec{q(8), q(32)});

  parts = entry30_parts(ThetaSpec{q(3), q(7)});
  CHECK(parts.first.spec == ThetaSpec{q(16), q(24)});
  CHECK(parts.second.prefactor == q(3));
  CHECK(parts.second.spec == ThetaSpec{q(4), q(36)});

  parts = entry30_parts(ThetaSpec{q(5), q(9)});
  CHECK(parts.first.spec == ThetaSpec{q(24), q(32)});
  CHECK(parts.second.prefactor == q(5));
  CHECK(parts.second.spec == ThetaSpec{q(4), q(52)});

  CHECK_THROWS_AS(entry30_parts(ThetaSpec{q(9), q(1)}), DomainError);

  for (const ThetaSpec s : {ThetaSpec{q(1), q(9)}, ThetaSpec{q(3), q(7)}, ThetaSpec{q(1), q(13)},
                            ThetaSpec{q(3), q(11)}, ThetaSpec{q(5), q(9)}, ThetaSpec{q(1, -1), q(4)}}) {
    const auto p = entry30_parts(s);
    CHECK(eq_upto(theta_series(s, 800), sum(evaluate(p.first, 800), evaluate(p.second, 800)), 800));
  }
}

TEST_CASE("product formula examples") {
  auto p = entry29_parts(ThetaSpec{q(1), q(9)}, ThetaSpec{q(3), q(7)});
  CHECK(p.first.left == ThetaSpec{q(4), q(16)});
  CHECK(p.first.right == ThetaSpec{q(8), q(12)});
  CHECK(p.second.prefactor == q(1));
  // f(b/c, ac^2d) then f(b/d, acd^2)
  CHECK(p.second.left == ThetaSpec{q(6), q(14)});
  CHECK(p.second.right == ThetaSpec{q(2), q(18)});

  p = entry29_parts(ThetaSpec{q(1), q(13)}, ThetaSpec{q(3), q(11)});
  CHECK(p.first.left == ThetaSpec{q(4), q(24)});
  CHECK(p.first.right == ThetaSpec{q(12), q(16)});
  CHECK(p.second.left == ThetaSpec{q(10), q(18)});
  CHECK(p.second.right == ThetaSpec{q(2), q(26)});

  p = entry29_parts(ThetaSpec{q(1), q(13)}, ThetaSpec{q(5), q(9)});
  CHECK(p.first.left == ThetaSpec{q(6), q(22)});
  CHECK(p.first.right == ThetaSpec{q(10), q(18)});
  CHECK(p.second.left == ThetaSpec{q(8), q(20)});
  CHECK(p.second.right == ThetaSpec{q(4), q(24)});

  CHECK_THROWS_AS(entry29_parts(ThetaSpec{q(1), q(9)}, ThetaSpec{q(3), q(8)}), DomainError);

  const std::pair<ThetaSpec, ThetaSpec> cases[] = {
      {ThetaSpec{q(1), q(9)}, ThetaSpec{q(3), q(7)}},   {ThetaSpec{q(1), q(13)}, ThetaSpec{q(3), q(11)}},
      {ThetaSpec{q(1), q(13)}, ThetaSpec{q(5), q(9)}},  {ThetaSpec{q(3), q(11)}, ThetaSpec{q(5), q(9)}},
  };
  for (const auto& [ab, cd] : cases) {
    const auto parts = entry29_parts(ab, cd);
    const Exponent N = 600;
    CHECK(eq_upto(theta_series(ab, N) * theta_series(cd, N),
                  sum(evaluate(parts.first, N), evaluate(parts.second, N)), N));
  }
}

TEST_CASE("product identities") {
  const Exponent N = 500;
  auto f = [&](Exponent m) { return euler_series(EulerSpec{m}, N); };
  // f(q,q^4) f(q^2,q^3) = f_2 f_5^3 / (f_1 f_10)
  const Series lhs = theta_series(ThetaSpec{q(1), q(4)}, N) * theta_series(ThetaSpec{q(2), q(3)}, N);
  const Series rhs = f(2) * f(5) * f(5) * f(5) * invert(f(1) * f(10), N);
  CHECK(eq_upto(lhs, rhs, N));
  // sum_{m >= 0} q^{m(m+1)/2} = f_2^2 / f_1
  CHECK(eq_upto(triangular_series(N), f(2) * f(2) * invert(f(1), N), N));
}

TEST_CASE("squares of theta series mod 2") {
  testing::Gen g(17);
  for (int i = 0; i < 200; ++i) {
    const ThetaSpec s = g.theta_spec(12);
    const Exponent N = 300;
    const Series t = reduce_mod(theta_series(s, N), 1);
    const Series doubled = reduce_mod(theta_series(ThetaSpec{s.a.pow(2), s.b.pow(2)}, N), 1);
    CHECK(eq_upto(t * t, doubled, N));
  }
}

TEST_CASE("property: theta symmetry") {
  const auto r = testing::theta_symmetry(testing::kDefaultSeed + 5, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: triple product") {
  const auto r = testing::triple_product(testing::kDefaultSeed + 6, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}
