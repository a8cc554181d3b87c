#include "qtheta/famspec.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace qtheta {

namespace {

struct Bad {
  std::string what;
};

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return i_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[i_]; }
  bool eat(char c) {
    if (peek() != c) return false;
    ++i_;
    return true;
  }
  void expect(char c) {
    if (!eat(c)) throw Bad{std::string("expected '") + c + "' in '" + std::string(s_) + "'"};
  }
  bool at_digit() const { return std::isdigit(static_cast<unsigned char>(peek())) != 0; }
  std::int64_t integer() {
    std::int64_t v = 0;
    const auto* first = s_.data() + i_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc{} || ptr == first) throw Bad{"expected an integer in '" + std::string(s_) + "'"};
    i_ += static_cast<std::size_t>(ptr - first);
    return v;
  }
  void finish() const {
    if (!done()) throw Bad{"trailing text in '" + std::string(s_) + "'"};
  }
  // Lookahead: is the integer at the cursor followed by '^'?
  bool integer_then_caret() const {
    std::size_t j = i_;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j])) != 0) ++j;
    return j > i_ && j < s_.size() && s_[j] == '^';
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

AffineExponent parse_affine(Cursor& c) {
  AffineExponent e;
  bool first = true;
  while (!c.done() && c.peek() != ')') {
    int sign = 1;
    if (c.eat('-'))
      sign = -1;
    else if (!c.eat('+') && !first)
      throw Bad{"expected + or - in exponent"};
    first = false;
    std::int64_t coeff = 1;
    bool have_num = false;
    if (c.at_digit()) {
      coeff = c.integer();
      have_num = true;
    }
    if (c.eat('k'))
      e.k_coeff += sign * coeff;
    else if (c.eat('m'))
      e.m_coeff += sign * coeff;
    else if (have_num)
      e.constant += sign * coeff;
    else
      throw Bad{"bad exponent term"};
  }
  return e;
}

PowerProduct parse_product(Cursor& c) {
  PowerProduct p;
  do {
    PowerBase base;
    if (c.eat('p')) {
      base = PowerBase::prime;
    } else if (c.integer_then_caret()) {
      if (c.integer() != 2) throw Bad{"only 2 and p may be raised to a power"};
      base = PowerBase::two;
    } else {
      p.coeff *= c.integer();
      continue;
    }
    c.expect('^');
    AffineExponent e;
    if (c.eat('(')) {
      e = parse_affine(c);
      c.expect(')');
    } else {
      e.constant = c.integer();
    }
    p.factors.emplace_back(base, e);
  } while (c.eat('*'));
  return p;
}

OffsetFormula parse_offset_cursor(Cursor& c) {
  OffsetFormula f;
  if (!c.eat('(')) {
    f.numerator = parse_product(c);
    return f;
  }
  f.numerator = parse_product(c);
  if (c.peek() == '+' || c.peek() == '-') {
    const int sign = c.eat('-') ? -1 : (c.eat('+'), 1);
    f.addend = sign * c.integer();
  }
  c.expect(')');
  c.expect('/');
  f.divisor = c.integer();
  if (f.divisor < 1) throw Bad{"divisor must be positive"};
  return f;
}

IndexRange parse_range(std::string_view v) {
  Cursor c(v);
  IndexRange r;
  r.first = c.integer();
  r.last = r.first;
  if (c.eat('.')) {
    c.expect('.');
    r.last = c.integer();
  }
  c.finish();
  if (r.last < r.first || r.first < 0) throw Bad{"bad range '" + std::string(v) + "'"};
  return r;
}

std::int64_t parse_int(std::string_view v) {
  Cursor c(v);
  const bool neg = c.eat('-');
  const auto x = c.integer();
  c.finish();
  return neg ? -x : x;
}

std::pair<int, int> parse_pair(std::string_view v) {
  Cursor c(v);
  const auto r = c.integer();
  c.expect(',');
  const auto s = c.integer();
  c.finish();
  return {static_cast<int>(r), static_cast<int>(s)};
}

std::vector<std::int64_t> parse_list(std::string_view v) {
  Cursor c(v);
  std::vector<std::int64_t> out;
  do out.push_back(c.integer());
  while (c.eat(','));
  c.finish();
  return out;
}

int parse_modulus_bits(std::string_view v) {
  Cursor c(v);
  std::int64_t m = 0;
  if (c.integer_then_caret()) {
    if (c.integer() != 2) throw Bad{"modulus must be a power of two"};
    c.expect('^');
    m = c.integer();
    c.finish();
    return static_cast<int>(m);
  }
  m = c.integer();
  c.finish();
  int bits = 0;
  while ((std::int64_t{1} << bits) < m) ++bits;
  if ((std::int64_t{1} << bits) != m || bits < 1) throw Bad{"modulus must be a power of two >= 2"};
  return bits;
}

OneVarForm parse_one_var(std::string_view v) {
  // Ak^2+Bk, Ak^2-Bk, Ak^2
  Cursor c(v);
  OneVarForm f;
  f.A = c.at_digit() ? c.integer() : 1;
  c.expect('k');
  c.expect('^');
  if (c.integer() != 2) throw Bad{"form must be quadratic"};
  f.B = 0;
  if (!c.done()) {
    const int sign = c.eat('-') ? -1 : (c.expect('+'), 1);
    f.B = sign * (c.at_digit() ? c.integer() : 1);
    c.expect('k');
  }
  c.finish();
  return f;
}

TwoSquareForm parse_two_square(std::string_view v) {
  // ax^2+y^2
  Cursor c(v);
  TwoSquareForm f;
  f.a = c.at_digit() ? c.integer() : 1;
  c.expect('x');
  c.expect('^');
  if (c.integer() != 2) throw Bad{"form must be quadratic"};
  c.expect('+');
  c.expect('y');
  c.expect('^');
  if (c.integer() != 2) throw Bad{"form must be quadratic"};
  c.finish();
  return f;
}

std::pair<Exponent, Exponent> parse_linear_n(std::string_view v) {
  // An+B
  Cursor c(v);
  const auto a = c.integer();
  c.expect('n');
  std::int64_t b = 0;
  if (!c.done()) {
    const int sign = c.eat('-') ? -1 : (c.expect('+'), 1);
    b = sign * c.integer();
  }
  c.finish();
  return {a, b};
}

Exponent parse_plain_index(std::string_view v, const char* what) {
  const auto f = parse_offset(v);
  if (!f.numerator.factors.empty()) throw Bad{std::string(what) + " must be a constant"};
  const auto num = f.numerator.coeff + f.addend;
  if (num % f.divisor != 0) throw Bad{std::string(what) + " is not integral"};
  return num / f.divisor;
}

// kind id key=value ... with optional "quoted" values.
struct Record {
  std::string kind;
  std::string id;
  std::map<std::string, std::string, std::less<>> fields;

  std::string_view need(std::string_view key) const {
    const auto it = fields.find(key);
    if (it == fields.end()) throw Bad{"record '" + id + "' is missing " + std::string(key) + "="};
    return it->second;
  }
  std::string_view get(std::string_view key, std::string_view fallback) const {
    const auto it = fields.find(key);
    return it == fields.end() ? fallback : std::string_view(it->second);
  }
};

Record tokenize(std::string_view line) {
  Record rec;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) != 0) ++i;
  };
  auto word = [&] {
    const std::size_t start = i;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) == 0 && line[i] != '=') ++i;
    return std::string(line.substr(start, i - start));
  };
  skip_ws();
  rec.kind = word();
  skip_ws();
  rec.id = word();
  if (rec.id.empty()) throw Bad{"record without an id"};
  while (true) {
    skip_ws();
    if (i >= line.size()) break;
    std::string key = word();
    if (i >= line.size() || line[i] != '=') throw Bad{"expected key=value near '" + key + "'"};
    ++i;
    std::string value;
    if (i < line.size() && line[i] == '"') {
      const auto end = line.find('"', i + 1);
      if (end == std::string_view::npos) throw Bad{"unterminated quote"};
      value = std::string(line.substr(i + 1, end - i - 1));
      i = end + 1;
    } else {
      const std::size_t start = i;
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) == 0) ++i;
      value = std::string(line.substr(start, i - start));
    }
    if (!rec.fields.emplace(std::move(key), std::move(value)).second) throw Bad{"duplicate key in " + rec.id};
  }
  return rec;
}

FamilySpec to_family(const Record& rec) {
  FamilySpec f;
  f.id = rec.id;
  f.provenance = std::string(rec.get("tag", ""));
  f.r = static_cast<int>(parse_int(rec.need("r")));
  f.s = static_cast<int>(parse_int(rec.need("s")));
  const auto base = rec.need("base");
  if (base == "prime") {
    f.base_kind = BaseKind::prime;
    f.residues = parse_list(rec.need("residues"));
    f.residue_modulus = parse_int(rec.need("mod"));
  } else if (base == "two") {
    f.base_kind = BaseKind::two;
  } else {
    throw Bad{"base must be prime or two"};
  }
  f.stride = parse_power_product(rec.need("stride"));
  f.offset = parse_offset(rec.need("offset"));
  if (f.base_kind == BaseKind::two && (f.stride.uses_prime() || f.offset.numerator.uses_prime()))
    throw Bad{"family " + f.id + " uses p but has base=two"};
  const auto ex = rec.get("exclude", "no");
  if (ex != "yes" && ex != "no") throw Bad{"exclude must be yes or no"};
  f.exclude_base_divisible_n = ex == "yes";
  f.modulus_bits = parse_modulus_bits(rec.get("modulus", "2"));
  f.k_range = parse_range(rec.get("k", "0"));
  f.m_range = parse_range(rec.get("m", "0"));
  f.prime_count = static_cast<std::size_t>(parse_int(rec.get("primes", "2")));
  return f;
}

RelationSpec to_relation(const Record& rec) {
  RelationSpec r;
  r.id = rec.id;
  r.provenance = std::string(rec.get("tag", ""));
  auto side = [&](const std::string& prefix) {
    IndexMap m;
    std::tie(m.r, m.s) = parse_pair(rec.need(prefix));
    m.stride = parse_power_product(rec.need(prefix + "_stride"));
    m.offset = parse_offset(rec.need(prefix + "_offset"));
    if (m.stride.uses_prime() || m.offset.numerator.uses_prime()) throw Bad{"relations take powers of 2 only"};
    return m;
  };
  r.lhs = side("lhs");
  r.rhs = side("rhs");
  r.k_range = parse_range(rec.get("k", "0"));
  r.modulus_bits = parse_modulus_bits(rec.get("modulus", "2"));
  return r;
}

CharacterizationSpec to_characterization(const Record& rec) {
  CharacterizationSpec c;
  c.id = rec.id;
  c.provenance = std::string(rec.get("tag", ""));
  c.r = static_cast<int>(parse_int(rec.need("r")));
  c.s = static_cast<int>(parse_int(rec.need("s")));
  c.stride = parse_plain_index(rec.need("stride"), "stride");
  c.offset = parse_plain_index(rec.need("offset"), "offset");
  c.form = parse_one_var(rec.need("form"));
  const auto mode = rec.need("mode");
  if (mode == "iff")
    c.mode = CharacterizationMode::iff;
  else if (mode == "implies")
    c.mode = CharacterizationMode::implies;
  else
    throw Bad{"mode must be iff or implies"};
  c.n_max = parse_int(rec.need("nmax"));
  return c;
}

ObstructionSpec to_obstruction(const Record& rec) {
  ObstructionSpec o;
  o.id = rec.id;
  o.provenance = std::string(rec.get("tag", ""));
  o.r = static_cast<int>(parse_int(rec.need("r")));
  o.s = static_cast<int>(parse_int(rec.need("s")));
  o.stride = parse_plain_index(rec.need("stride"), "stride");
  o.offset = parse_plain_index(rec.need("offset"), "offset");
  std::tie(o.value_scale, o.value_shift) = parse_linear_n(rec.need("value"));
  o.form = parse_two_square(rec.need("form"));
  o.n_max = parse_int(rec.need("nmax"));
  return o;
}

}  // namespace

PowerProduct parse_power_product(std::string_view text) {
  try {
    Cursor c(text);
    auto p = parse_product(c);
    c.finish();
    return p;
  } catch (const Bad& b) {
    throw ParseError(b.what, 0);
  }
}

OffsetFormula parse_offset(std::string_view text) {
  try {
    Cursor c(text);
    auto f = parse_offset_cursor(c);
    c.finish();
    return f;
  } catch (const Bad& b) {
    throw ParseError(b.what, 0);
  }
}

FamilyFile parse_famspec(std::string_view text) {
  FamilyFile out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    std::string_view body(line);
    if (hash != std::string::npos && line.find('"') > hash) body = body.substr(0, hash);
    if (body.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const Record rec = tokenize(body);
      if (!seen.emplace(rec.id, line_no).second) throw Bad{"duplicate id '" + rec.id + "'"};
      if (rec.kind == "family")
        out.families.push_back(to_family(rec));
      else if (rec.kind == "relation")
        out.relations.push_back(to_relation(rec));
      else if (rec.kind == "characterization")
        out.characterizations.push_back(to_characterization(rec));
      else if (rec.kind == "obstruction")
        out.obstructions.push_back(to_obstruction(rec));
      else
        throw Bad{"unknown record kind '" + rec.kind + "'"};
    } catch (const Bad& b) {
      throw ParseError("famspec line " + std::to_string(line_no) + ": " + b.what, line_no);
    } catch (const ParseError& e) {
      throw ParseError("famspec line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return out;
}

FamilyFile load_famspec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open family file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_famspec(buf.str());
}

}  // namespace qtheta
