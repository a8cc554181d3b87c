#include "gf2.hpp"

#include <algorithm>
#include <bit>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

namespace qtheta::gf2 {

void clear_tail(std::span<Word> w, std::int64_t bits) {
  const std::size_t full = static_cast<std::size_t>(std::max<std::int64_t>(bits, 0) / 64);
  if (full >= w.size()) return;
  const int rem = static_cast<int>(std::max<std::int64_t>(bits, 0) % 64);
  std::size_t k = full;
  if (rem != 0) {
    w[k] &= (Word{1} << rem) - 1;
    ++k;
  }
  std::fill(w.begin() + static_cast<std::ptrdiff_t>(k), w.end(), Word{0});
}

void xor_shifted(std::span<Word> dst, std::int64_t dst_bits, std::span<const Word> src,
                 std::int64_t offset) {
  const auto nd = static_cast<std::int64_t>(std::min(dst.size(), words_for(dst_bits)));
  const auto ns = static_cast<std::int64_t>(src.size());
  if (nd == 0 || ns == 0) return;
  if (offset >= 0) {
    const std::int64_t ws = offset / 64;
    const int bs = static_cast<int>(offset % 64);
    for (std::int64_t k = 0; k < ns && k + ws < nd; ++k) {
      const Word v = src[static_cast<std::size_t>(k)];
      dst[static_cast<std::size_t>(k + ws)] ^= v << bs;
      if (bs != 0 && k + ws + 1 < nd) dst[static_cast<std::size_t>(k + ws + 1)] ^= v >> (64 - bs);
    }
  } else {
    const std::int64_t ws = (-offset) / 64;
    const int bs = static_cast<int>((-offset) % 64);
    for (std::int64_t k = 0; k < nd && k + ws < ns; ++k) {
      Word v = src[static_cast<std::size_t>(k + ws)] >> bs;
      if (bs != 0 && k + ws + 1 < ns) v |= src[static_cast<std::size_t>(k + ws + 1)] << (64 - bs);
      dst[static_cast<std::size_t>(k)] ^= v;
    }
  }
  clear_tail(dst, dst_bits);
}

std::size_t popcount(std::span<const Word> w) {
  std::size_t n = 0;
  for (Word x : w) n += static_cast<std::size_t>(std::popcount(x));
  return n;
}

namespace {

inline void clmul_portable(Word a, Word b, Word& lo, Word& hi) {
  lo = 0;
  hi = 0;
  while (b != 0) {
    const int i = std::countr_zero(b);
    lo ^= a << i;
    if (i != 0) hi ^= a >> (64 - i);
    b &= b - 1;
  }
}

// Schoolbook product over words, truncated to nw words.
void dense_portable(std::span<const Word> a, std::span<const Word> b, std::span<Word> r) {
  const std::size_t nw = r.size();
  for (std::size_t i = 0; i < a.size() && i < nw; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < nw; ++j) {
      Word lo, hi;
      clmul_portable(a[i], b[j], lo, hi);
      r[i + j] ^= lo;
      if (i + j + 1 < nw) r[i + j + 1] ^= hi;
    }
  }
}

#if defined(__x86_64__)
__attribute__((target("pclmul,sse4.1"))) void dense_pclmul(std::span<const Word> a,
                                                          std::span<const Word> b,
                                                          std::span<Word> r) {
  const std::size_t nw = r.size();
  for (std::size_t i = 0; i < a.size() && i < nw; ++i) {
    if (a[i] == 0) continue;
    const __m128i va = _mm_cvtsi64_si128(static_cast<long long>(a[i]));
    for (std::size_t j = 0; j < b.size() && i + j < nw; ++j) {
      const __m128i vb = _mm_cvtsi64_si128(static_cast<long long>(b[j]));
      const __m128i p = _mm_clmulepi64_si128(va, vb, 0x00);
      r[i + j] ^= static_cast<Word>(_mm_cvtsi128_si64(p));
      if (i + j + 1 < nw) r[i + j + 1] ^= static_cast<Word>(_mm_extract_epi64(p, 1));
    }
  }
}

bool have_pclmul() {
  static const bool ok = __builtin_cpu_supports("pclmul");
  return ok;
}
#endif

}  // namespace

Bits mul_trunc(std::span<const Word> a, std::span<const Word> b, std::int64_t bits) {
  const std::size_t nw = words_for(bits);
  Bits r(nw, 0);
  if (nw == 0) return r;
  a = a.subspan(0, std::min(a.size(), nw));
  b = b.subspan(0, std::min(b.size(), nw));

  const std::size_t pa = popcount(a);
  const std::size_t pb = popcount(b);
  // Sparse path: one shifted XOR of the dense operand per set bit.
  const std::size_t sparse_cost = std::min(pa, pb) * nw;
  const std::size_t dense_cost = 2 * nw * nw;
  if (sparse_cost <= dense_cost) {
    const bool a_sparse = pa <= pb;
    const auto sp = a_sparse ? a : b;
    const auto dn = a_sparse ? b : a;
    for (std::size_t k = 0; k < sp.size(); ++k) {
      Word w = sp[k];
      while (w != 0) {
        const int i = std::countr_zero(w);
        xor_shifted(r, bits, dn, static_cast<std::int64_t>(k * 64) + i);
        w &= w - 1;
      }
    }
    return r;
  }
#if defined(__x86_64__)
  if (have_pclmul()) {
    dense_pclmul(a, b, r);
    clear_tail(r, bits);
    return r;
  }
#endif
  dense_portable(a, b, r);
  clear_tail(r, bits);
  return r;
}

Bits spread(std::span<const Word> a, std::int64_t bits) {
  Bits r(words_for(2 * bits), 0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    // Interleave zeros: bit i of the low/high half goes to bit 2i.
    for (int half = 0; half < 2; ++half) {
      Word x = (a[k] >> (32 * half)) & 0xffffffffULL;
      x = (x | (x << 16)) & 0x0000ffff0000ffffULL;
      x = (x | (x << 8)) & 0x00ff00ff00ff00ffULL;
      x = (x | (x << 4)) & 0x0f0f0f0f0f0f0f0fULL;
      x = (x | (x << 2)) & 0x3333333333333333ULL;
      x = (x | (x << 1)) & 0x5555555555555555ULL;
      const std::size_t idx = 2 * k + static_cast<std::size_t>(half);
      if (idx < r.size()) r[idx] = x;
    }
  }
  clear_tail(r, 2 * bits);
  return r;
}

}  // namespace qtheta::gf2
