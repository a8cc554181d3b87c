#include "qtheta/series_io.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

namespace qtheta {

namespace {

constexpr std::string_view kMagic = "QSER1\n";

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error("truncated QSER1 payload");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

std::size_t packed_words(Exponent count, int w) {
  return static_cast<std::size_t>((count * w + 63) / 64);
}

}  // namespace

void write_series(std::ostream& out, const Series& s) {
  out << kMagic << "ring=" << s.ring().to_string() << " min_exp=" << s.min_exp() << " order=" << s.order() << '\n';
  if (s.ring().is_exact()) {
    for (const auto& c : s.big()) out << c.get_str() << '\n';
    return;
  }
  if (s.ring().is_gf2()) {
    for (auto w : s.words()) put_u64(out, w);
    return;
  }
  const int w = s.ring().width;
  std::vector<std::uint64_t> packed(packed_words(s.size(), w), 0);
  for (Exponent i = 0; i < s.size(); ++i) {
    const std::uint64_t v = s.words()[static_cast<std::size_t>(i)];
    const auto bit = static_cast<std::size_t>(i) * static_cast<std::size_t>(w);
    packed[bit / 64] |= v << (bit % 64);
    if (bit % 64 + static_cast<std::size_t>(w) > 64) packed[bit / 64 + 1] |= v >> (64 - bit % 64);
  }
  for (auto x : packed) put_u64(out, x);
}

Series read_series(std::istream& in) {
  std::string magic(kMagic.size(), '\0');
  if (!in.read(magic.data(), static_cast<std::streamsize>(magic.size())) || magic != kMagic)
    throw Error("not a QSER1 stream");
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string ring_tok, min_tok, order_tok;
  hs >> ring_tok >> min_tok >> order_tok;
  auto value = [](const std::string& tok, std::string_view key) {
    if (tok.rfind(std::string(key) + "=", 0) != 0) throw Error("bad QSER1 header field " + tok);
    return tok.substr(key.size() + 1);
  };
  const Ring ring = Ring::parse(value(ring_tok, "ring"));
  const Exponent min_exp = std::stoll(value(min_tok, "min_exp"));
  const Exponent order = std::stoll(value(order_tok, "order"));
  if (order < min_exp) throw Error("QSER1 order below min_exp");
  const Exponent count = order - min_exp;
  if (ring.is_exact()) {
    std::vector<mpz_class> c(static_cast<std::size_t>(count));
    std::string line;
    for (auto& v : c) {
      if (!std::getline(in, line) || v.set_str(line, 10) != 0) throw Error("bad QSER1 coefficient");
    }
    return Series::adopt_big(min_exp, order, std::move(c));
  }
  const int w = ring.width;
  std::vector<std::uint64_t> packed(packed_words(count, w));
  for (auto& x : packed) x = get_u64(in);
  if (ring.is_gf2()) return Series::adopt_words(ring, min_exp, order, std::move(packed));
  std::vector<std::uint64_t> words(static_cast<std::size_t>(count));
  for (Exponent i = 0; i < count; ++i) {
    const auto bit = static_cast<std::size_t>(i) * static_cast<std::size_t>(w);
    std::uint64_t v = packed[bit / 64] >> (bit % 64);
    if (bit % 64 + static_cast<std::size_t>(w) > 64) v |= packed[bit / 64 + 1] << (64 - bit % 64);
    words[static_cast<std::size_t>(i)] = v & ring.mask();
  }
  return Series::adopt_words(ring, min_exp, order, std::move(words));
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

SeriesCache SeriesCache::from_env() {
  const char* env = std::getenv("QTHETA_CACHE");
  return SeriesCache(env && *env ? env : ".qtheta-cache");
}

std::string SeriesCache::key(std::string_view expression, const Ring& ring, Exponent order) {
  std::string material(expression);
  material += '|' + ring.to_string() + '|' + std::to_string(order);
  return sha256_hex(material);
}

std::optional<Series> SeriesCache::load(const std::string& key) const {
  std::ifstream in(dir_ / (key + ".qser"), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return read_series(in);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void SeriesCache::store(const std::string& key, const Series& s) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) return;
  const auto final_path = dir_ / (key + ".qser");
  const auto tmp = dir_ / (key + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return;
    write_series(out, s);
    if (!out) return;
  }
  std::filesystem::rename(tmp, final_path, ec);
}

}  // namespace qtheta
