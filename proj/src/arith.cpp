#include "qtheta/arith.hpp"

#include <algorithm>
#include <string>

#include "qtheta/error.hpp"

namespace qtheta {

std::int64_t isqrt(std::int64_t n) {
  if (n < 0) throw DomainError("isqrt of negative number");
  if (n < 2) return n;
  // Newton from above; x_{k+1} = (x_k + n / x_k) / 2 decreases to floor(sqrt(n)).
  auto x = static_cast<std::uint64_t>(n);
  std::uint64_t y = (x + 1) / 2;
  while (y < x) {
    x = y;
    y = (x + static_cast<std::uint64_t>(n) / x) / 2;
  }
  return static_cast<std::int64_t>(x);
}

bool is_square(std::int64_t n) {
  if (n < 0) return false;
  const std::int64_t r = isqrt(n);
  return r * r == n;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t d = 3; d <= n / d; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::int64_t> primes_in_classes(const std::vector<std::int64_t>& residues, std::int64_t modulus,
                                            std::size_t count) {
  if (modulus < 1) throw DomainError("residue modulus must be positive");
  std::vector<std::int64_t> out;
  for (std::int64_t p = 2; out.size() < count; ++p) {
    if (std::find(residues.begin(), residues.end(), p % modulus) == residues.end()) continue;
    if (is_prime(p)) out.push_back(p);
  }
  return out;
}

int legendre(std::int64_t a, std::int64_t p) {
  if (p < 3 || !is_prime(p)) throw DomainError("Legendre symbol needs an odd prime, got " + std::to_string(p));
  const auto m = static_cast<unsigned __int128>(p);
  std::int64_t r = a % p;
  if (r < 0) r += p;
  if (r == 0) return 0;
  unsigned __int128 base = static_cast<unsigned __int128>(r);
  unsigned __int128 acc = 1;
  for (std::int64_t e = (p - 1) / 2; e > 0; e >>= 1) {
    if ((e & 1) != 0) acc = acc * base % m;
    base = base * base % m;
  }
  return acc == 1 ? 1 : -1;
}

unsigned nu_p(const mpz_class& n, std::int64_t p) {
  if (n == 0) throw DomainError("valuation of zero is undefined");
  if (p < 2) throw DomainError("valuation base must be >= 2");
  mpz_class v = abs(n);
  unsigned count = 0;
  while (mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(p)) != 0) {
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(p));
    ++count;
  }
  return count;
}

std::optional<std::pair<std::int64_t, std::int64_t>> represented_two_square(std::int64_t n, TwoSquareForm form) {
  if (n < 0 || form.a < 1) return std::nullopt;
  for (std::int64_t x = 0; form.a * x * x <= n; ++x) {
    const std::int64_t rest = n - form.a * x * x;
    const std::int64_t y = isqrt(rest);
    if (y * y == rest) return std::pair{x, y};
  }
  return std::nullopt;
}

std::optional<std::int64_t> represented_one_var(std::int64_t n, OneVarForm form) {
  if (form.A < 1) throw DomainError("one-variable form needs A >= 1");
  // A k^2 + B k - n = 0  =>  k = (-B +- sqrt(B^2 + 4 A n)) / (2 A)
  const std::int64_t disc = form.B * form.B + 4 * form.A * n;
  if (disc < 0 || !is_square(disc)) return std::nullopt;
  const std::int64_t root = isqrt(disc);
  for (std::int64_t num : {-form.B + root, -form.B - root}) {
    if (num % (2 * form.A) == 0) {
      const std::int64_t k = num / (2 * form.A);
      if (form.A * k * k + form.B * k == n) return k;
    }
  }
  return std::nullopt;
}

}  // namespace qtheta
