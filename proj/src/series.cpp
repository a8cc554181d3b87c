#include "qtheta/series.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <sstream>
#include <utility>

#include "gf2.hpp"

namespace qtheta {

Ring Ring::mod2w(int w) {
  if (w < 1 || w > 64) throw DomainError("mod 2^w ring needs 1 <= w <= 64, got " + std::to_string(w));
  return Ring{Kind::mod2w, w};
}

std::string Ring::to_string() const {
  return is_exact() ? std::string("exact") : "mod2w:" + std::to_string(width);
}

Ring Ring::parse(std::string_view text) {
  if (text == "exact") return exact();
  for (std::string_view prefix : {"mod2w:", "mod2^", "mod 2^"}) {
    if (text.substr(0, prefix.size()) == prefix) {
      const std::string rest(text.substr(prefix.size()));
      std::size_t used = 0;
      int w = 0;
      try {
        w = std::stoi(rest, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != rest.size()) break;
      return mod2w(w);
    }
  }
  throw DomainError("unknown ring '" + std::string(text) + "' (expected exact or mod2^w)");
}

Progression::Progression(Exponent modulus, Exponent residue) : modulus_(modulus), residue_(residue) {
  if (modulus < 1) throw DomainError("progression modulus must be positive");
  if (residue < 0 || residue >= modulus)
    throw DomainError("progression residue " + std::to_string(residue) + " not in [0, " +
                      std::to_string(modulus) + ")");
}

namespace {

using gf2::Bits;
using Index = std::size_t;

inline Index idx(Exponent e) { return static_cast<Index>(e); }

void require_same_ring(const Series& a, const Series& b) {
  if (a.ring() != b.ring())
    throw RingMismatch("ring mismatch: " + a.ring().to_string() + " vs " + b.ring().to_string());
}

std::uint64_t reduce_big(const mpz_class& v, int w) {
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(w));
  return static_cast<std::uint64_t>(mpz_get_ui(r.get_mpz_t()));
}

// Inverse of an odd number modulo 2^64.
std::uint64_t inverse_odd(std::uint64_t a) {
  std::uint64_t x = a;  // correct to 3 bits
  for (int i = 0; i < 5; ++i) x *= 2 - a * x;
  return x;
}

// Bits of `s` for exponents [lo, hi); zero below min_exp.
Bits window_bits(const Series& s, Exponent lo, Exponent hi) {
  Bits w(gf2::words_for(hi - lo), 0);
  gf2::xor_shifted(w, hi - lo, s.words(), s.min_exp() - lo);
  return w;
}

// Coefficient words (w > 1) for exponents [lo, hi).
std::vector<std::uint64_t> window_words(const Series& s, Exponent lo, Exponent hi) {
  std::vector<std::uint64_t> w(idx(std::max<Exponent>(hi - lo, 0)), 0);
  const Exponent from = std::max(lo, s.min_exp());
  const Exponent to = std::min(hi, s.order());
  for (Exponent e = from; e < to; ++e) w[idx(e - lo)] = s.words()[idx(e - s.min_exp())];
  return w;
}

std::vector<mpz_class> window_big(const Series& s, Exponent lo, Exponent hi) {
  std::vector<mpz_class> w(idx(std::max<Exponent>(hi - lo, 0)));
  const Exponent from = std::max(lo, s.min_exp());
  const Exponent to = std::min(hi, s.order());
  for (Exponent e = from; e < to; ++e) w[idx(e - lo)] = s.big()[idx(e - s.min_exp())];
  return w;
}

// Same series known to a larger order, treating the missing coefficients as
// zero (i.e. as a polynomial). Used by Newton iteration only.
Series pad(const Series& s, Exponent order) {
  const Exponent lo = std::min(s.min_exp(), order);
  if (s.ring().is_exact()) return Series::adopt_big(lo, order, window_big(s, lo, order));
  if (s.ring().is_gf2()) return Series::adopt_words(s.ring(), lo, order, window_bits(s, lo, order));
  return Series::adopt_words(s.ring(), lo, order, window_words(s, lo, order));
}

struct Nonzero {
  Index pos;
  mpz_class value;
};

std::vector<Nonzero> nonzeros(const std::vector<mpz_class>& v, Index limit) {
  std::vector<Nonzero> out;
  for (Index i = 0; i < v.size() && i < limit; ++i)
    if (sgn(v[i]) != 0) out.push_back({i, v[i]});
  return out;
}

mpz_class from_i128(__int128 v) {
  if (v >= INT64_MIN && v <= INT64_MAX) return mpz_class(static_cast<long>(v));
  const bool neg = v < 0;
  unsigned __int128 mag = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  const std::uint64_t parts[2] = {static_cast<std::uint64_t>(mag), static_cast<std::uint64_t>(mag >> 64)};
  mpz_class r;
  mpz_import(r.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, parts);
  if (neg) r = -r;
  return r;
}

// Truncated Cauchy product of exact coefficient vectors. Uses 128-bit
// accumulation when a magnitude bound proves it cannot overflow.
std::vector<mpz_class> mul_exact(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, Index len) {
  std::vector<mpz_class> r(len);
  if (len == 0) return r;
  auto na = nonzeros(a, len);
  auto nb = nonzeros(b, len);
  if (na.empty() || nb.empty()) return r;
  if (na.size() > nb.size()) std::swap(na, nb);

  auto max_bits = [](const std::vector<Nonzero>& v) {
    std::size_t m = 0;
    for (const auto& t : v) m = std::max(m, mpz_sizeinbase(t.value.get_mpz_t(), 2));
    return m;
  };
  const std::size_t bits_a = max_bits(na);
  const std::size_t bits_b = max_bits(nb);
  const std::size_t bound = bits_a + bits_b + static_cast<std::size_t>(std::bit_width(na.size()));
  if (bits_a <= 63 && bits_b <= 63 && bound <= 125) {
    std::vector<__int128> acc(len, 0);
    std::vector<std::pair<Index, std::int64_t>> sa, sb;
    for (const auto& t : na) sa.emplace_back(t.pos, t.value.get_si());
    for (const auto& t : nb) sb.emplace_back(t.pos, t.value.get_si());
    for (const auto& [i, x] : sa) {
      for (const auto& [j, y] : sb) {
        if (i + j >= len) break;
        acc[i + j] += static_cast<__int128>(x) * y;
      }
    }
    for (Index k = 0; k < len; ++k)
      if (acc[k] != 0) r[k] = from_i128(acc[k]);
    return r;
  }
  for (const auto& x : na) {
    for (const auto& y : nb) {
      if (x.pos + y.pos >= len) break;
      mpz_addmul(r[x.pos + y.pos].get_mpz_t(), x.value.get_mpz_t(), y.value.get_mpz_t());
    }
  }
  return r;
}

std::vector<std::uint64_t> mul_words(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                     Index len, std::uint64_t mask) {
  std::vector<std::uint64_t> r(len, 0);
  std::vector<Index> nzb;
  for (Index j = 0; j < b.size() && j < len; ++j)
    if (b[j] != 0) nzb.push_back(j);
  for (Index i = 0; i < a.size() && i < len; ++i) {
    const std::uint64_t x = a[i];
    if (x == 0) continue;
    for (Index j : nzb) {
      if (i + j >= len) break;
      r[i + j] += x * b[j];
    }
  }
  for (auto& v : r) v &= mask;
  return r;
}

void require_unit_series(const Series& a, Exponent n) {
  if (a.min_exp() != 0)
    throw DomainError("invert needs min_exp == 0, got " + std::to_string(a.min_exp()));
  if (n < 0) throw DomainError("invert order must be nonnegative");
  if (n > a.order())
    throw OrderError("invert to order " + std::to_string(n) + " but operand is known only to order " +
                     std::to_string(a.order()));
  if (n == 0) return;
  const mpz_class c0 = a.coeff(0);
  const bool unit = a.ring().is_exact() ? (c0 == 1 || c0 == -1) : mpz_odd_p(c0.get_mpz_t()) != 0;
  if (!unit) throw DomainError("constant term " + c0.get_str() + " is not a unit in " + a.ring().to_string());
}

}  // namespace

// ---------------------------------------------------------------------------
// construction

Series Series::adopt_big(Exponent min_exp, Exponent order, std::vector<mpz_class> coeffs) {
  Series s;
  s.ring_ = Ring::exact();
  s.min_exp_ = std::min(min_exp, order);
  s.order_ = order;
  s.big_ = std::move(coeffs);
  s.big_.resize(idx(s.order_ - s.min_exp_));
  return s;
}

Series Series::adopt_words(Ring ring, Exponent min_exp, Exponent order, std::vector<std::uint64_t> words) {
  Series s;
  s.ring_ = ring;
  s.min_exp_ = std::min(min_exp, order);
  s.order_ = order;
  s.words_ = std::move(words);
  if (ring.is_gf2()) {
    s.words_.resize(gf2::words_for(s.size()), 0);
    gf2::clear_tail(s.words_, s.size());
  } else {
    s.words_.resize(idx(s.size()), 0);
  }
  return s;
}

Series Series::make(Ring ring, Exponent min_exp, std::span<const mpz_class> coeffs) {
  const Exponent order = min_exp + static_cast<Exponent>(coeffs.size());
  if (ring.is_exact()) return adopt_big(min_exp, order, {coeffs.begin(), coeffs.end()});
  if (ring.is_gf2()) {
    Bits w(gf2::words_for(static_cast<Exponent>(coeffs.size())), 0);
    for (Index i = 0; i < coeffs.size(); ++i)
      if (mpz_odd_p(coeffs[i].get_mpz_t())) gf2::flip(w, static_cast<Exponent>(i));
    return adopt_words(ring, min_exp, order, std::move(w));
  }
  std::vector<std::uint64_t> w(coeffs.size());
  for (Index i = 0; i < coeffs.size(); ++i) w[i] = reduce_big(coeffs[i], ring.width);
  return adopt_words(ring, min_exp, order, std::move(w));
}

Series Series::make(Ring ring, Exponent min_exp, std::initializer_list<long> coeffs) {
  std::vector<mpz_class> v;
  v.reserve(coeffs.size());
  for (long c : coeffs) v.emplace_back(c);
  return make(ring, min_exp, std::span<const mpz_class>(v));
}

Series Series::make(Ring ring, Exponent min_exp, std::span<const std::int64_t> coeffs) {
  std::vector<mpz_class> v;
  v.reserve(coeffs.size());
  for (auto c : coeffs) v.emplace_back(static_cast<long>(c));
  return make(ring, min_exp, std::span<const mpz_class>(v));
}

Series Series::zero(Ring ring, Exponent order) {
  if (ring.is_exact()) return adopt_big(order, order, {});
  return adopt_words(ring, order, order, {});
}

Series Series::monomial(Ring ring, std::int64_t coeff, Exponent exponent, Exponent order) {
  const Term t{exponent, coeff};
  return from_terms(ring, std::min(exponent, order), std::span<const Term>(&t, 1), order);
}

Series Series::from_terms(Ring ring, Exponent min_exp, std::span<const Term> terms, Exponent order) {
  const Exponent lo = std::min(min_exp, order);
  const Index len = idx(order - lo);
  for (const auto& t : terms)
    if (t.exponent < lo)
      throw DomainError("term at exponent " + std::to_string(t.exponent) + " below min_exp " + std::to_string(lo));
  if (ring.is_exact()) {
    std::vector<mpz_class> v(len);
    for (const auto& t : terms)
      if (t.exponent < order) v[idx(t.exponent - lo)] += static_cast<long>(t.coeff);
    return adopt_big(lo, order, std::move(v));
  }
  if (ring.is_gf2()) {
    Bits w(gf2::words_for(order - lo), 0);
    for (const auto& t : terms)
      if (t.exponent < order && (t.coeff & 1) != 0) gf2::flip(w, t.exponent - lo);
    return adopt_words(ring, lo, order, std::move(w));
  }
  std::vector<std::uint64_t> w(len, 0);
  for (const auto& t : terms)
    if (t.exponent < order) w[idx(t.exponent - lo)] += static_cast<std::uint64_t>(t.coeff);
  for (auto& x : w) x &= ring.mask();
  return adopt_words(ring, lo, order, std::move(w));
}

// ---------------------------------------------------------------------------
// access

mpz_class Series::coeff(Exponent e) const {
  if (e >= order_)
    throw OrderError("coefficient of q^" + std::to_string(e) + " requested, series known to order " +
                     std::to_string(order_));
  if (e < min_exp_) return 0;
  const Exponent i = e - min_exp_;
  if (ring_.is_exact()) return big_[idx(i)];
  if (ring_.is_gf2()) return gf2::get(words_, i) ? 1 : 0;
  return mpz_class(static_cast<unsigned long>(words_[idx(i)]));
}

std::uint64_t Series::residue(Exponent e, int w) const {
  if (w < 1 || w > 64) throw DomainError("residue width must be in [1, 64]");
  if (!ring_.is_exact() && w > ring_.width)
    throw DomainError("cannot read mod 2^" + std::to_string(w) + " residue from " + ring_.to_string());
  if (e >= order_)
    throw OrderError("coefficient of q^" + std::to_string(e) + " requested, series known to order " +
                     std::to_string(order_));
  if (e < min_exp_) return 0;
  const Exponent i = e - min_exp_;
  const std::uint64_t mask = Ring{Ring::Kind::mod2w, w}.mask();
  if (ring_.is_exact()) return reduce_big(big_[idx(i)], w);
  if (ring_.is_gf2()) return gf2::get(words_, i) ? 1 : 0;
  return words_[idx(i)] & mask;
}

bool Series::is_zero(Exponent e) const {
  if (ring_.is_exact()) return sgn(coeff(e)) == 0;
  return residue(e, ring_.width) == 0;
}

std::vector<std::pair<Exponent, mpz_class>> Series::nonzero_terms() const {
  std::vector<std::pair<Exponent, mpz_class>> out;
  if (ring_.is_gf2()) {
    for (Index k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w != 0) {
        const int b = std::countr_zero(w);
        out.emplace_back(min_exp_ + static_cast<Exponent>(k * 64) + b, 1);
        w &= w - 1;
      }
    }
    return out;
  }
  for (Exponent e = min_exp_; e < order_; ++e)
    if (!is_zero(e)) out.emplace_back(e, coeff(e));
  return out;
}

std::size_t Series::nonzero_count() const {
  if (ring_.is_gf2()) return gf2::popcount(words_);
  if (ring_.is_exact())
    return static_cast<std::size_t>(std::count_if(big_.begin(), big_.end(), [](const mpz_class& v) { return sgn(v) != 0; }));
  return static_cast<std::size_t>(std::count_if(words_.begin(), words_.end(), [](auto v) { return v != 0; }));
}

std::string Series::to_string(std::size_t max_terms) const {
  std::ostringstream os;
  std::size_t shown = 0;
  for (const auto& [e, c] : nonzero_terms()) {
    if (shown == max_terms) {
      os << " + ...";
      break;
    }
    const bool neg = sgn(c) < 0;
    const mpz_class mag = abs(c);
    if (shown == 0)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    if (e == 0)
      os << mag.get_str();
    else {
      if (mag != 1) os << mag.get_str() << "*";
      os << "q";
      if (e != 1) os << "^" << e;
    }
    ++shown;
  }
  if (shown == 0) os << "0";
  os << " + O(q^" << order_ << ")";
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Series& s) { return os << s.to_string(); }

// ---------------------------------------------------------------------------
// arithmetic

namespace {

Series add_sub(const Series& a, const Series& b, bool subtract) {
  require_same_ring(a, b);
  const Exponent hi = std::min(a.order(), b.order());
  const Exponent lo = std::min({a.min_exp(), b.min_exp(), hi});
  const Ring ring = a.ring();
  if (ring.is_exact()) {
    auto v = window_big(a, lo, hi);
    const Exponent to = std::min(hi, b.order());
    for (Exponent e = std::max(lo, b.min_exp()); e < to; ++e) {
      const auto& x = b.big()[idx(e - b.min_exp())];
      if (subtract)
        v[idx(e - lo)] -= x;
      else
        v[idx(e - lo)] += x;
    }
    return Series::adopt_big(lo, hi, std::move(v));
  }
  if (ring.is_gf2()) {
    auto w = window_bits(a, lo, hi);
    gf2::xor_shifted(w, hi - lo, b.words(), b.min_exp() - lo);
    return Series::adopt_words(ring, lo, hi, std::move(w));
  }
  auto w = window_words(a, lo, hi);
  const auto y = window_words(b, lo, hi);
  for (Index i = 0; i < w.size(); ++i) w[i] = (subtract ? w[i] - y[i] : w[i] + y[i]) & ring.mask();
  return Series::adopt_words(ring, lo, hi, std::move(w));
}

}  // namespace

Series operator+(const Series& a, const Series& b) { return add_sub(a, b, false); }
Series operator-(const Series& a, const Series& b) { return add_sub(a, b, true); }

Series operator-(const Series& a) {
  if (a.ring().is_exact()) {
    auto v = a.big();
    for (auto& x : v) x = -x;
    return Series::adopt_big(a.min_exp(), a.order(), std::move(v));
  }
  if (a.ring().is_gf2()) return a;
  auto w = a.words();
  for (auto& x : w) x = (0 - x) & a.ring().mask();
  return Series::adopt_words(a.ring(), a.min_exp(), a.order(), std::move(w));
}

Series operator*(const Series& a, const Series& b) {
  require_same_ring(a, b);
  const Exponent hi = std::min(a.order() + b.min_exp(), b.order() + a.min_exp());
  const Exponent lo = std::min(a.min_exp() + b.min_exp(), hi);
  const Index len = idx(hi - lo);
  const Ring ring = a.ring();
  if (ring.is_exact()) return Series::adopt_big(lo, hi, mul_exact(a.big(), b.big(), len));
  if (ring.is_gf2()) return Series::adopt_words(ring, lo, hi, gf2::mul_trunc(a.words(), b.words(), hi - lo));
  return Series::adopt_words(ring, lo, hi, mul_words(a.words(), b.words(), len, ring.mask()));
}

Series scale(const Series& a, std::int64_t c) {
  if (a.ring().is_exact()) {
    auto v = a.big();
    for (auto& x : v) x *= static_cast<long>(c);
    return Series::adopt_big(a.min_exp(), a.order(), std::move(v));
  }
  if (a.ring().is_gf2()) return (c & 1) != 0 ? a : Series::adopt_words(a.ring(), a.min_exp(), a.order(), {});
  auto w = a.words();
  for (auto& x : w) x = (x * static_cast<std::uint64_t>(c)) & a.ring().mask();
  return Series::adopt_words(a.ring(), a.min_exp(), a.order(), std::move(w));
}

Series truncate(const Series& a, Exponent n) {
  if (n > a.order())
    throw OrderError("truncate to " + std::to_string(n) + " beyond known order " + std::to_string(a.order()));
  const Exponent lo = std::min(a.min_exp(), n);
  if (a.ring().is_exact()) return Series::adopt_big(lo, n, window_big(a, lo, n));
  if (a.ring().is_gf2()) return Series::adopt_words(a.ring(), lo, n, window_bits(a, lo, n));
  return Series::adopt_words(a.ring(), lo, n, window_words(a, lo, n));
}

Series invert(const Series& a, Exponent n) {
  require_unit_series(a, n);
  const Ring ring = a.ring();
  if (n == 0) return Series::zero(ring, 0);

  if (ring.is_exact()) {
    const auto terms = nonzeros(a.big(), idx(n));  // includes the constant term
    const mpz_class& c0 = a.big()[0];
    std::vector<mpz_class> b(idx(n));
    b[0] = c0;  // 1/(+-1) = +-1
    mpz_class acc;
    for (Index m = 1; m < idx(n); ++m) {
      acc = 0;
      for (Index t = 1; t < terms.size() && terms[t].pos <= m; ++t)
        mpz_addmul(acc.get_mpz_t(), terms[t].value.get_mpz_t(), b[m - terms[t].pos].get_mpz_t());
      b[m] = c0 < 0 ? acc : mpz_class(-acc);
    }
    return Series::adopt_big(0, n, std::move(b));
  }

  if (ring.is_gf2()) {
    std::vector<Exponent> support;
    for (Exponent k = 1; k < n; ++k)
      if (gf2::get(a.words(), k)) support.push_back(k);
    Bits b(gf2::words_for(n), 0);
    b[0] = 1;
    for (Exponent m = 1; m < n; ++m) {
      bool bit = false;
      for (Exponent k : support) {
        if (k > m) break;
        bit ^= gf2::get(b, m - k);
      }
      if (bit) gf2::flip(b, m);
    }
    return Series::adopt_words(ring, 0, n, std::move(b));
  }

  const std::uint64_t mask = ring.mask();
  const std::uint64_t inv0 = inverse_odd(a.words()[0]);
  std::vector<std::pair<Index, std::uint64_t>> support;
  for (Index k = 1; k < idx(n); ++k)
    if (a.words()[k] != 0) support.emplace_back(k, a.words()[k]);
  std::vector<std::uint64_t> b(idx(n), 0);
  b[0] = inv0 & mask;
  for (Index m = 1; m < idx(n); ++m) {
    std::uint64_t acc = 0;
    for (const auto& [k, v] : support) {
      if (k > m) break;
      acc += v * b[m - k];
    }
    b[m] = (0 - inv0 * acc) & mask;
  }
  return Series::adopt_words(ring, 0, n, std::move(b));
}

Series invert_newton(const Series& a, Exponent n) {
  require_unit_series(a, n);
  const Ring ring = a.ring();
  if (n == 0) return Series::zero(ring, 0);

  if (ring.is_gf2()) {
    Bits b{1};
    Exponent len = 1;
    const std::span<const gf2::Word> aw = a.words();
    while (len < n) {
      const Exponent next = std::min(2 * len, n);
      // Over GF(2): b (2 - a b) = a b^2 = a * b(q^2).
      const Bits sq = gf2::spread(b, len);
      b = gf2::mul_trunc(aw, sq, next);
      len = next;
    }
    return Series::adopt_words(ring, 0, n, std::move(b));
  }

  Series b = ring.is_exact() ? Series::make(ring, 0, {a.coeff(0).get_si()})
                             : Series::adopt_words(ring, 0, 1, {inverse_odd(a.words()[0]) & ring.mask()});
  Exponent len = 1;
  while (len < n) {
    const Exponent next = std::min(2 * len, n);
    const Series bp = pad(b, next);
    const Series ab = truncate(a, next) * bp;
    const Series two = Series::monomial(ring, 2, 0, next);
    b = bp * (two - ab);
    len = next;
  }
  return truncate(b, n);
}

Series extract(const Series& a, const Progression& sel) {
  if (a.min_exp() < 0) throw DomainError("extract needs min_exp >= 0");
  const Exponent m = sel.modulus();
  const Exponent j = sel.residue();
  auto ceil_div = [](Exponent x, Exponent d) { return x <= 0 ? -((-x) / d) : (x + d - 1) / d; };
  const Exponent hi = std::max<Exponent>(0, ceil_div(a.order() - j, m));
  const Exponent lo = std::min(hi, std::max<Exponent>(0, ceil_div(a.min_exp() - j, m)));
  const Index len = idx(hi - lo);
  const Ring ring = a.ring();
  if (ring.is_exact()) {
    std::vector<mpz_class> v(len);
    for (Exponent n = lo; n < hi; ++n) v[idx(n - lo)] = a.big()[idx(m * n + j - a.min_exp())];
    return Series::adopt_big(lo, hi, std::move(v));
  }
  if (ring.is_gf2()) {
    Bits w(gf2::words_for(hi - lo), 0);
    for (Exponent n = lo; n < hi; ++n)
      if (gf2::get(a.words(), m * n + j - a.min_exp())) gf2::flip(w, n - lo);
    return Series::adopt_words(ring, lo, hi, std::move(w));
  }
  std::vector<std::uint64_t> w(len);
  for (Exponent n = lo; n < hi; ++n) w[idx(n - lo)] = a.words()[idx(m * n + j - a.min_exp())];
  return Series::adopt_words(ring, lo, hi, std::move(w));
}

Series inflate(const Series& a, Exponent m) {
  if (m < 1) throw DomainError("inflate factor must be positive");
  const Exponent lo = m * a.min_exp();
  const Exponent hi = m * a.order();
  const Ring ring = a.ring();
  if (ring.is_exact()) {
    std::vector<mpz_class> v(idx(hi - lo));
    for (Exponent i = 0; i < a.size(); ++i) v[idx(m * i)] = a.big()[idx(i)];
    return Series::adopt_big(lo, hi, std::move(v));
  }
  if (ring.is_gf2()) {
    if (m == 2) return Series::adopt_words(ring, lo, hi, gf2::spread(a.words(), a.size()));
    Bits w(gf2::words_for(hi - lo), 0);
    for (Exponent i = 0; i < a.size(); ++i)
      if (gf2::get(a.words(), i)) gf2::flip(w, m * i);
    return Series::adopt_words(ring, lo, hi, std::move(w));
  }
  std::vector<std::uint64_t> w(idx(hi - lo), 0);
  for (Exponent i = 0; i < a.size(); ++i) w[idx(m * i)] = a.words()[idx(i)];
  return Series::adopt_words(ring, lo, hi, std::move(w));
}

Series shift(const Series& a, Exponent d) {
  if (a.ring().is_exact()) return Series::adopt_big(a.min_exp() + d, a.order() + d, a.big());
  return Series::adopt_words(a.ring(), a.min_exp() + d, a.order() + d, a.words());
}

Series reduce_mod(const Series& a, int w) {
  const Ring target = Ring::mod2w(w);
  if (a.ring().is_exact()) return Series::make(target, a.min_exp(), std::span<const mpz_class>(a.big()));
  if (a.ring().width < w)
    throw DomainError("cannot lift " + a.ring().to_string() + " to " + target.to_string());
  if (a.ring() == target) return a;
  if (target.is_gf2()) {
    Bits b(gf2::words_for(a.size()), 0);
    for (Exponent i = 0; i < a.size(); ++i)
      if ((a.words()[idx(i)] & 1U) != 0) gf2::flip(b, i);
    return Series::adopt_words(target, a.min_exp(), a.order(), std::move(b));
  }
  auto v = a.words();
  for (auto& x : v) x &= target.mask();
  return Series::adopt_words(target, a.min_exp(), a.order(), std::move(v));
}

Comparison eq_upto(const Series& a, const Series& b, Exponent n) {
  require_same_ring(a, b);
  if (n > a.order() || n > b.order())
    throw OrderError("comparison to order " + std::to_string(n) + " exceeds known orders " +
                     std::to_string(a.order()) + " and " + std::to_string(b.order()));
  Comparison out;
  out.compared_to = n;
  const Exponent lo = std::min(a.min_exp(), b.min_exp());
  if (a.ring().is_gf2() && lo < n) {
    const auto wa = window_bits(a, lo, n);
    const auto wb = window_bits(b, lo, n);
    for (Index k = 0; k < wa.size(); ++k) {
      const std::uint64_t diff = wa[k] ^ wb[k];
      if (diff != 0) {
        const Exponent e = lo + static_cast<Exponent>(k * 64) + std::countr_zero(diff);
        out.equal = false;
        out.mismatch = Mismatch{e, a.coeff(e).get_str(), b.coeff(e).get_str()};
        return out;
      }
    }
    return out;
  }
  for (Exponent e = lo; e < n; ++e) {
    const mpz_class x = a.coeff(e);
    const mpz_class y = b.coeff(e);
    if (x != y) {
      out.equal = false;
      out.mismatch = Mismatch{e, x.get_str(), y.get_str()};
      return out;
    }
  }
  return out;
}

}  // namespace qtheta
