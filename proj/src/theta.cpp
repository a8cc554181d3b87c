#include "qtheta/theta.hpp"

#include <algorithm>
#include <map>

namespace qtheta {

std::string Monomial::to_string() const {
  std::string s = sign < 0 ? "-" : "";
  if (exp == 0) return s + "1";
  s += "q";
  if (exp != 1) s += "^" + std::to_string(exp);
  return s;
}

namespace {

void validate_pair(const Monomial& a, const Monomial& b, const char* what) {
  if (a.exp < 0 || b.exp < 0)
    throw DomainError(std::string(what) + " arguments need nonnegative q-exponents, got " + a.to_string() +
                      ", " + b.to_string());
  if (a.exp + b.exp < 1)
    throw DomainError(std::string(what) + " needs |ab| < 1, i.e. a positive q-degree of ab");
  if (std::abs(a.sign) != 1 || std::abs(b.sign) != 1) throw DomainError("monomial sign must be +1 or -1");
}

// Walk n = 0, 1, 2, ... and n = -1, -2, ... collecting sign * q^E(n) with
// E(n) = u n(n+1)/2 + v n(n-1)/2. E is nondecreasing in |n| on each side
// when u, v >= 0, so each side stops at the first exponent >= limit.
std::vector<Term> bilateral_terms(const Monomial& a, const Monomial& b, Exponent limit, bool negate_tail) {
  std::map<Exponent, std::int64_t> acc;
  auto visit = [&](Exponent n) {
    const Exponent up = n * (n + 1) / 2;
    const Exponent down = n * (n - 1) / 2;
    const Exponent e = a.exp * up + b.exp * down;
    if (e < 0) throw DomainError("negative exponent in theta expansion");
    if (e >= limit) return false;
    int sign = 1;
    if (up % 2 != 0) sign *= a.sign;
    if (down % 2 != 0) sign *= b.sign;
    if (negate_tail && n < 0) sign = -sign;
    acc[e] += sign;
    return true;
  };
  for (Exponent n = 0; visit(n); ++n) {
  }
  for (Exponent n = -1; visit(n); --n) {
  }
  std::vector<Term> out;
  for (const auto& [e, c] : acc)
    if (c != 0) out.push_back({e, c});
  return out;
}

}  // namespace

void ThetaSpec::validate() const { validate_pair(a, b, "f(a,b)"); }

std::string ThetaSpec::to_string() const { return "f(" + a.to_string() + "," + b.to_string() + ")"; }

void FalseThetaSpec::validate() const { validate_pair(a, b, "Psi(a,b)"); }

std::string FalseThetaSpec::to_string() const { return "Psi(" + a.to_string() + "," + b.to_string() + ")"; }

std::vector<Term> theta_terms(const ThetaSpec& spec, Exponent n) {
  spec.validate();
  return bilateral_terms(spec.a, spec.b, n, false);
}

std::vector<Term> false_theta_terms(const FalseThetaSpec& spec, Exponent n) {
  spec.validate();
  return bilateral_terms(spec.a, spec.b, n, true);
}

Series theta_series(const ThetaSpec& spec, Exponent n, Ring ring) {
  const auto terms = theta_terms(spec, n);
  return Series::from_terms(ring, 0, terms, n);
}

Series false_theta_series(const FalseThetaSpec& spec, Exponent n, Ring ring) {
  const auto terms = false_theta_terms(spec, n);
  return Series::from_terms(ring, 0, terms, n);
}

Series euler_series(const EulerSpec& spec, Exponent n, Ring ring) {
  if (spec.m < 1) throw DomainError("f_m needs m >= 1");
  // Pentagonal numbers: f_1 = sum_k (-1)^k q^{k(3k-1)/2}.
  std::vector<Term> terms;
  for (Exponent k = 0;; ++k) {
    bool any = false;
    for (Exponent kk : {k, -k - 1}) {
      const Exponent e = spec.m * (kk * (3 * kk - 1) / 2);
      if (e >= n) continue;
      terms.push_back({e, (kk % 2 == 0) ? 1 : -1});
      any = true;
    }
    if (!any) break;
  }
  return Series::from_terms(ring, 0, terms, n);
}

Series triangular_series(Exponent n, Ring ring) {
  std::vector<Term> terms;
  for (Exponent m = 0; m * (m + 1) / 2 < n; ++m) terms.push_back({m * (m + 1) / 2, 1});
  return Series::from_terms(ring, 0, terms, n);
}

Series pochhammer_series(std::span<const Monomial> xs, Monomial base, Exponent n, Ring ring) {
  if (base.exp < 1) throw DomainError("Pochhammer base needs a positive q-exponent");
  if (n < 0) throw DomainError("negative order");
  std::vector<mpz_class> c(static_cast<std::size_t>(n));
  if (n > 0) c[0] = 1;
  for (const Monomial& x : xs) {
    if (x.exp < 0) throw DomainError("Pochhammer argument needs a nonnegative q-exponent");
    Monomial term = x;  // x * base^j
    while (term.exp < n) {
      // multiply by (1 - term) = 1 + s q^d
      const long s = -term.sign;
      const auto d = static_cast<std::size_t>(term.exp);
      if (d == 0) {
        for (auto& v : c) v *= (1 + s);
      } else {
        for (std::size_t e = c.size(); e-- > d;) {
          if (s > 0)
            c[e] += c[e - d];
          else
            c[e] -= c[e - d];
        }
      }
      term = term * base;
    }
  }
  Series exact = Series::make(Ring::exact(), 0, std::span<const mpz_class>(c));
  return ring.is_exact() ? exact : reduce_mod(exact, ring.width);
}

Series triple_product_series(const ThetaSpec& spec, Exponent n, Ring ring) {
  spec.validate();
  const Monomial ab = spec.a * spec.b;
  const Monomial xs[] = {Monomial{-spec.a.sign, spec.a.exp}, Monomial{-spec.b.sign, spec.b.exp}, ab};
  return pochhammer_series(xs, ab, n, ring);
}

Entry30Parts entry30_parts(const ThetaSpec& spec) {
  spec.validate();
  const Monomial& a = spec.a;
  const Monomial& b = spec.b;
  if (b.exp < a.exp)
    throw DomainError("two-term split of " + spec.to_string() + " needs the second exponent >= the first");
  return {
      {Monomial{1, 0}, ThetaSpec{a.pow(3) * b, a * b.pow(3)}},
      {a, ThetaSpec{b / a, a.pow(5) * b.pow(3)}},
  };
}

Entry29Parts entry29_parts(const ThetaSpec& ab, const ThetaSpec& cd) {
  ab.validate();
  cd.validate();
  const Monomial& a = ab.a;
  const Monomial& b = ab.b;
  const Monomial& c = cd.a;
  const Monomial& d = cd.b;
  if (!(a * b == c * d))
    throw DomainError("product formula needs ab = cd, got " + (a * b).to_string() + " vs " + (c * d).to_string());
  if (b.exp < std::max(c.exp, d.exp))
    throw DomainError("product formula needs b/c and b/d to have nonnegative exponents");
  return {
      {Monomial{1, 0}, ThetaSpec{a * c, b * d}, ThetaSpec{a * d, b * c}},
      {a, ThetaSpec{b / c, a * c.pow(2) * d}, ThetaSpec{b / d, a * c * d.pow(2)}},
  };
}

Series evaluate(const ThetaTerm& t, Exponent n, Ring ring) {
  const Series pre = Series::monomial(ring, t.prefactor.sign, t.prefactor.exp, n);
  return pre * theta_series(t.spec, n, ring);
}

Series evaluate(const ThetaProductTerm& t, Exponent n, Ring ring) {
  const Series pre = Series::monomial(ring, t.prefactor.sign, t.prefactor.exp, n);
  return pre * theta_series(t.left, n, ring) * theta_series(t.right, n, ring);
}

}  // namespace qtheta
