#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qtheta {

/// Coefficient ring of a series: exact integers, or integers modulo 2^w.
struct Ring {
  enum class Kind : std::uint8_t { exact, mod2w };

  Kind kind = Kind::exact;
  int width = 0;  // only meaningful for mod2w, 1 <= width <= 64

  static Ring exact() noexcept { return {}; }
  static Ring mod2w(int w);
  static Ring gf2() { return mod2w(1); }

  bool is_exact() const noexcept { return kind == Kind::exact; }
  bool is_gf2() const noexcept { return kind == Kind::mod2w && width == 1; }

  /// All-ones mask of the low `width` bits.
  std::uint64_t mask() const noexcept {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  }

  /// "exact" or "mod2w:<w>" (the series cache header spelling).
  std::string to_string() const;
  /// Accepts "exact", "mod2w:<w>" and "mod2^<w>".
  static Ring parse(std::string_view text);

  friend bool operator==(const Ring&, const Ring&) = default;
};

}  // namespace qtheta
