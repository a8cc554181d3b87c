#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qtheta/error.hpp"
#include "qtheta/ring.hpp"

namespace qtheta {

using Exponent = std::int64_t;

/// One sparse term c*q^e, used by generators before densifying.
struct Term {
  Exponent exponent = 0;
  std::int64_t coeff = 0;
};

/// Selects the exponents m*n + j of a series (the arithmetic progression
/// j mod m) for dissection.
class Progression {
 public:
  Progression(Exponent modulus, Exponent residue);

  Exponent modulus() const noexcept { return modulus_; }
  Exponent residue() const noexcept { return residue_; }

 private:
  Exponent modulus_;
  Exponent residue_;
};

/// A truncated Laurent series sum_{min_exp <= e < order} c_e q^e whose
/// coefficients are known exactly below `order` and are zero below
/// `min_exp`.
///
/// Storage depends on the ring: arbitrary-precision integers for the exact
/// ring, 64 coefficients per word for mod 2, and one word per coefficient
/// for the other mod 2^w rings. Values are immutable once built.
class Series {
 public:
  /// The empty exact series known to order 0.
  Series() = default;

  static Series make(Ring ring, Exponent min_exp, std::span<const mpz_class> coeffs);
  static Series make(Ring ring, Exponent min_exp, std::initializer_list<long> coeffs);
  static Series make(Ring ring, Exponent min_exp, std::span<const std::int64_t> coeffs);

  /// The series that is identically zero below `order`.
  static Series zero(Ring ring, Exponent order);
  /// c*q^exponent known to `order`. If exponent >= order the window is empty.
  static Series monomial(Ring ring, std::int64_t coeff, Exponent exponent, Exponent order);
  /// Densify a list of terms into [min_exp, order). Terms at or above order
  /// are dropped, repeated exponents accumulate. Throws DomainError for a
  /// term below min_exp.
  static Series from_terms(Ring ring, Exponent min_exp, std::span<const Term> terms,
                           Exponent order);

  const Ring& ring() const noexcept { return ring_; }
  Exponent min_exp() const noexcept { return min_exp_; }
  Exponent order() const noexcept { return order_; }
  /// Number of stored coefficients, order - min_exp.
  Exponent size() const noexcept { return order_ - min_exp_; }

  /// Coefficient of q^e as an integer (canonical residue for mod 2^w).
  /// Zero below min_exp; throws OrderError for e >= order.
  mpz_class coeff(Exponent e) const;
  /// Coefficient of q^e reduced into [0, 2^w). Works for every ring.
  std::uint64_t residue(Exponent e, int w) const;
  bool odd(Exponent e) const { return residue(e, 1) != 0; }
  bool is_zero(Exponent e) const;

  /// Nonzero coefficients in increasing exponent order.
  std::vector<std::pair<Exponent, mpz_class>> nonzero_terms() const;
  std::size_t nonzero_count() const;

  /// "1 - q + 2*q^3 + O(q^10)".
  std::string to_string(std::size_t max_terms = 12) const;

  // Raw storage, for kernels and serialization.
  const std::vector<mpz_class>& big() const noexcept { return big_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  /// Adopt raw storage (already canonical, sized for [min_exp, order)).
  static Series adopt_big(Exponent min_exp, Exponent order, std::vector<mpz_class> coeffs);
  static Series adopt_words(Ring ring, Exponent min_exp, Exponent order,
                            std::vector<std::uint64_t> words);

 private:
  Ring ring_{};
  Exponent min_exp_ = 0;
  Exponent order_ = 0;
  std::vector<mpz_class> big_;         // exact ring
  std::vector<std::uint64_t> words_;   // mod 2^w; bit-packed when w == 1
};

std::ostream& operator<<(std::ostream& os, const Series& s);

Series operator+(const Series& a, const Series& b);
Series operator-(const Series& a, const Series& b);
Series operator-(const Series& a);
Series operator*(const Series& a, const Series& b);

/// Multiply by an integer constant.
Series scale(const Series& a, std::int64_t c);

/// Restrict to exponents below n (n <= order).
Series truncate(const Series& a, Exponent n);

/// Reciprocal to order n by back-substitution; O(n * nnz(a)).
/// Requires min_exp == 0, a unit constant term and n <= order.
Series invert(const Series& a, Exponent n);
/// Reciprocal by Newton doubling. Mod 2 uses b <- a * b(q^2); other rings
/// use b <- b * (2 - a*b).
Series invert_newton(const Series& a, Exponent n);

/// Coefficients at m*n + j, re-indexed to n. Requires min_exp >= 0.
Series extract(const Series& a, const Progression& sel);
/// q -> q^m.
Series inflate(const Series& a, Exponent m);
/// Multiply by q^d.
Series shift(const Series& a, Exponent d);
/// Reduce exact coefficients (or mod 2^v with v >= w) into [0, 2^w).
Series reduce_mod(const Series& a, int w);

struct Mismatch {
  Exponent exponent = 0;
  std::string lhs;
  std::string rhs;
};

struct Comparison {
  bool equal = true;
  Exponent compared_to = 0;
  std::optional<Mismatch> mismatch;

  explicit operator bool() const noexcept { return equal; }
};

/// Compare coefficients below n. Throws OrderError if n exceeds either
/// operand's order and RingMismatch for different rings.
Comparison eq_upto(const Series& a, const Series& b, Exponent n);

}  // namespace qtheta
