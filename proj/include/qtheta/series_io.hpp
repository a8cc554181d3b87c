#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "qtheta/series.hpp"

namespace qtheta {

/// QSER1 format: "QSER1\n", a header line
/// "ring=<exact|mod2w:w> min_exp=<i> order=<N>\n", then the coefficients.
/// Exact: one signed decimal per line. mod2w: w-bit fields packed little-endian
/// into little-endian 64-bit words (bit i of word k is exponent min_exp+64k+i
/// when w = 1).
void write_series(std::ostream& out, const Series& s);
Series read_series(std::istream& in);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Directory-backed cache keyed by sha256(expression | ring | order).
/// Failures to read or write are silent: the cache is never required.
class SeriesCache {
 public:
  explicit SeriesCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
  /// QTHETA_CACHE, or ".qtheta-cache" when unset.
  static SeriesCache from_env();

  static std::string key(std::string_view expression, const Ring& ring, Exponent order);

  std::optional<Series> load(const std::string& key) const;
  void store(const std::string& key, const Series& s) const;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace qtheta
