#pragma once

// Bit-packed polynomial kernels over GF(2). Bit i of word k holds the
// coefficient of x^(64k + i); bits past the logical length are kept zero.

#include <cstdint>
#include <span>
#include <vector>

namespace qtheta::gf2 {

using Word = std::uint64_t;
using Bits = std::vector<Word>;

inline std::size_t words_for(std::int64_t bits) {
  return bits <= 0 ? 0 : static_cast<std::size_t>((bits + 63) / 64);
}

inline bool get(std::span<const Word> w, std::int64_t i) {
  return (w[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1U;
}

inline void flip(std::span<Word> w, std::int64_t i) {
  w[static_cast<std::size_t>(i >> 6)] ^= Word{1} << (i & 63);
}

/// Zero every bit at position >= bits.
void clear_tail(std::span<Word> w, std::int64_t bits);

/// dst bit (j + offset) ^= src bit j, for all j where both positions are in
/// range. offset may be negative.
void xor_shifted(std::span<Word> dst, std::int64_t dst_bits, std::span<const Word> src,
                 std::int64_t offset);

std::size_t popcount(std::span<const Word> w);

/// Low `bits` coefficients of a*b.
Bits mul_trunc(std::span<const Word> a, std::span<const Word> b, std::int64_t bits);

/// q -> q^2 on a bit string of length `bits` (result has 2*bits bits).
Bits spread(std::span<const Word> a, std::int64_t bits);

}  // namespace qtheta::gf2
