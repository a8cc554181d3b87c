#pragma once

#include <span>
#include <string>
#include <vector>

#include "qtheta/series.hpp"

namespace qtheta {

/// sign * q^exp with sign in {+1, -1}.
struct Monomial {
  int sign = 1;
  Exponent exp = 0;

  static Monomial q(Exponent e, int sign = 1) { return Monomial{sign, e}; }

  Monomial operator*(const Monomial& o) const { return {sign * o.sign, exp + o.exp}; }
  Monomial operator/(const Monomial& o) const { return {sign * o.sign, exp - o.exp}; }
  Monomial pow(int k) const { return {(k % 2 != 0) ? sign : 1, exp * k}; }

  std::string to_string() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Ramanujan's general theta function f(a, b) = sum_n a^{n(n+1)/2} b^{n(n-1)/2}.
struct ThetaSpec {
  Monomial a;
  Monomial b;

  /// Throws DomainError unless both exponents are nonnegative and sum to >= 1.
  void validate() const;
  std::string to_string() const;
  friend bool operator==(const ThetaSpec&, const ThetaSpec&) = default;
};

/// False theta Psi(a, b): the n <= -1 half of f(a, b) enters with a minus sign.
struct FalseThetaSpec {
  Monomial a;
  Monomial b;

  void validate() const;
  std::string to_string() const;
};

/// f_m = (q^m; q^m)_inf.
struct EulerSpec {
  Exponent m = 1;
};

/// Nonzero terms of f(a, b) with exponent below n (repeated exponents merged).
std::vector<Term> theta_terms(const ThetaSpec& spec, Exponent n);
std::vector<Term> false_theta_terms(const FalseThetaSpec& spec, Exponent n);

Series theta_series(const ThetaSpec& spec, Exponent n, Ring ring = Ring::exact());
Series false_theta_series(const FalseThetaSpec& spec, Exponent n, Ring ring = Ring::exact());
/// Pentagonal-number expansion of f_1, inflated by m.
Series euler_series(const EulerSpec& spec, Exponent n, Ring ring = Ring::exact());
/// sum_{m >= 0} q^{m(m+1)/2}.
Series triangular_series(Exponent n, Ring ring = Ring::exact());

/// (x_1, ..., x_k; base)_inf = prod_i prod_{j >= 0} (1 - x_i base^j), expanded
/// factor by factor. base.exp must be >= 1 and every x_i.exp >= 0.
Series pochhammer_series(std::span<const Monomial> xs, Monomial base, Exponent n,
                         Ring ring = Ring::exact());

/// f(a, b) as the product (-a, -b, ab; ab)_inf.
Series triple_product_series(const ThetaSpec& spec, Exponent n, Ring ring = Ring::exact());

struct ThetaTerm {
  Monomial prefactor;
  ThetaSpec spec;
};

/// f(a,b) = f(a^3 b, a b^3) + a f(b/a, a^5 b^3). Requires b.exp >= a.exp.
struct Entry30Parts {
  ThetaTerm first;
  ThetaTerm second;
};
Entry30Parts entry30_parts(const ThetaSpec& spec);

struct ThetaProductTerm {
  Monomial prefactor;
  ThetaSpec left;
  ThetaSpec right;
};

/// For ab = cd:
/// f(a,b) f(c,d) = f(ac, bd) f(ad, bc) + a f(b/c, a c^2 d) f(b/d, a c d^2).
struct Entry29Parts {
  ThetaProductTerm first;
  ThetaProductTerm second;
};
Entry29Parts entry29_parts(const ThetaSpec& ab, const ThetaSpec& cd);

/// Evaluate prefactor * f(spec) to order n.
Series evaluate(const ThetaTerm& t, Exponent n, Ring ring = Ring::exact());
Series evaluate(const ThetaProductTerm& t, Exponent n, Ring ring = Ring::exact());

}  // namespace qtheta
