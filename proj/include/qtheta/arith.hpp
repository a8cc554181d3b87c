#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace qtheta {

/// floor(sqrt(n)) for n >= 0, integer arithmetic only.
std::int64_t isqrt(std::int64_t n);
bool is_square(std::int64_t n);
bool is_prime(std::int64_t n);

/// First `count` primes p with p mod modulus in `residues`.
std::vector<std::int64_t> primes_in_classes(const std::vector<std::int64_t>& residues, std::int64_t modulus,
                                            std::size_t count);

/// Legendre symbol (a/p) for an odd prime p, by Euler's criterion.
int legendre(std::int64_t a, std::int64_t p);

/// Exponent of the largest power of p dividing n (n != 0).
unsigned nu_p(const mpz_class& n, std::int64_t p);
inline unsigned nu_p(std::int64_t n, std::int64_t p) { return nu_p(mpz_class(static_cast<long>(n)), p); }

/// n = a x^2 + y^2.
struct TwoSquareForm {
  std::int64_t a = 1;
};

/// n = A k^2 + B k with k ranging over all integers.
struct OneVarForm {
  std::int64_t A = 1;
  std::int64_t B = 0;
};

/// A witness (x, y) with x, y >= 0, if one exists.
std::optional<std::pair<std::int64_t, std::int64_t>> represented_two_square(std::int64_t n, TwoSquareForm form);
/// A witness k (either sign), if one exists.
std::optional<std::int64_t> represented_one_var(std::int64_t n, OneVarForm form);

}  // namespace qtheta
