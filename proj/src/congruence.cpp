#include "qtheta/congruence.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "qtheta/parallel.hpp"
#include "qtheta/theta.hpp"

namespace qtheta {

CoefficientTable::CoefficientTable(int r, int s, Series series) : r_(r), s_(s), series_(std::move(series)) {}

CoefficientTable c_table(int r, int s, Ring ring, Exponent n, Inversion how) {
  if (!(r > s && s >= 1)) throw DomainError("c_{r,s} needs r > s >= 1");
  if (n < 1) throw DomainError("table order must be positive");
  const FalseThetaSpec psi{Monomial{-1, r}, Monomial{1, s}};
  const Series denom = false_theta_series(psi, n, ring);
  const bool newton = how == Inversion::newton || (how == Inversion::automatic && ring.is_gf2());
  return CoefficientTable(r, s, newton ? invert_newton(denom, n) : invert(denom, n));
}

namespace {

void require_residue_width(const CoefficientTable& table, int w) {
  if (w < 1 || w > 64) throw DomainError("modulus 2^w needs 1 <= w <= 64");
  if (!table.ring().is_exact() && table.ring().width < w)
    throw DomainError("table ring " + table.ring().to_string() + " cannot decide residues mod 2^" + std::to_string(w));
}

bool fits(const mpz_class& v) { return v.fits_slong_p() != 0; }

}  // namespace

ProgressionReport check_progression(const CoefficientTable& table, Exponent stride, Exponent offset, int w) {
  if (stride < 1) throw DomainError("stride must be >= 1");
  if (offset < 0) throw DomainError("offset must be >= 0");
  require_residue_width(table, w);
  if (offset >= table.order())
    throw OrderError("progression " + std::to_string(stride) + "n+" + std::to_string(offset) +
                     " has no index below order " + std::to_string(table.order()));
  ProgressionReport rep{stride, offset, w, 0, std::nullopt};
  for (Exponent n = 0, i = offset; i < table.order(); ++n, i += stride) {
    ++rep.checked;
    const auto r = table.residue(i, w);
    if (r != 0 && !rep.first_violation) {
      rep.first_violation = Violation{n, i, std::to_string(r)};
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::string AffineExponent::to_string() const {
  std::string out;
  auto add = [&](std::int64_t c, const char* var) {
    if (c == 0) return;
    if (!out.empty()) out += c > 0 ? "+" : "-";
    else if (c < 0) out += "-";
    const std::int64_t mag = c < 0 ? -c : c;
    if (mag != 1 || *var == '\0') out += std::to_string(mag);
    out += var;
  };
  add(k_coeff, "k");
  add(m_coeff, "m");
  add(constant, "");
  return out.empty() ? "0" : out;
}

mpz_class PowerProduct::at(std::int64_t prime, std::int64_t k, std::int64_t m) const {
  mpz_class v = static_cast<long>(coeff);
  for (const auto& [base, e] : factors) {
    const std::int64_t x = e.at(k, m);
    if (x < 0) throw DomainError("negative exponent " + e.to_string() + " at k=" + std::to_string(k));
    mpz_class b;
    mpz_ui_pow_ui(b.get_mpz_t(), base == PowerBase::two ? 2UL : static_cast<unsigned long>(prime),
                  static_cast<unsigned long>(x));
    v *= b;
  }
  return v;
}

bool PowerProduct::uses_prime() const {
  return std::any_of(factors.begin(), factors.end(), [](const auto& f) { return f.first == PowerBase::prime; });
}

std::string PowerProduct::to_string() const {
  std::string out = std::to_string(coeff);
  for (const auto& [base, e] : factors) out += std::string("*") + (base == PowerBase::two ? "2" : "p") + "^(" + e.to_string() + ")";
  return out;
}

std::string OffsetFormula::to_string() const {
  std::string out = "(" + numerator.to_string();
  if (addend != 0) out += (addend > 0 ? "+" : "") + std::to_string(addend);
  out += ")/" + std::to_string(divisor);
  return out;
}

std::vector<std::int64_t> eligible_bases(const FamilySpec& spec, std::size_t count) {
  if (count < 1) throw DomainError("need at least one base");
  if (spec.base_kind == BaseKind::two) return {2};
  return primes_in_classes(spec.residues, spec.residue_modulus, count);
}

std::string Instantiation::key() const {
  return "p=" + std::to_string(base) + ",k=" + std::to_string(k) + ",m=" + std::to_string(m);
}

namespace {

mpz_class evaluate_offset(const OffsetFormula& f, std::int64_t base, std::int64_t k, std::int64_t m) {
  if (f.divisor < 1) throw DomainError("offset divisor must be positive");
  const mpz_class numer = f.numerator.at(base, k, m) + static_cast<long>(f.addend);
  if (mpz_divisible_ui_p(numer.get_mpz_t(), static_cast<unsigned long>(f.divisor)) == 0)
    throw DomainError("offset " + f.to_string() + " is not integral at p=" + std::to_string(base) +
                      ", k=" + std::to_string(k) + ", m=" + std::to_string(m) + " (numerator " + numer.get_str() + ")");
  return numer / static_cast<long>(f.divisor);
}

}  // namespace

Instantiation instantiate_family(const FamilySpec& spec, std::int64_t base, std::int64_t k, std::int64_t m) {
  if (k < 0 || m < 0) throw DomainError("family indices must be nonnegative");
  if (spec.base_kind == BaseKind::prime) {
    if (!is_prime(base)) throw DomainError(std::to_string(base) + " is not prime");
    const std::int64_t res = base % spec.residue_modulus;
    if (std::find(spec.residues.begin(), spec.residues.end(), res) == spec.residues.end())
      throw DomainError(std::to_string(base) + " is not in an eligible residue class");
  } else if (base != 2) {
    throw DomainError("power-of-two family takes base 2 only");
  }
  Instantiation inst{base, k, m, spec.stride.at(base, k, m), evaluate_offset(spec.offset, base, k, m)};
  if (inst.stride < 1) throw DomainError("stride must be positive");
  return inst;
}

const char* to_string(InstanceStatus s) {
  switch (s) {
    case InstanceStatus::pass: return "pass";
    case InstanceStatus::fail: return "fail";
    case InstanceStatus::insufficient: return "insufficient";
  }
  return "?";
}

std::size_t FamilyReport::count(InstanceStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(instances.begin(), instances.end(), [s](const InstanceReport& r) { return r.status == s; }));
}

FamilyReport verify_family(const FamilySpec& spec, const CoefficientTable& table, const VerifyOptions& opts) {
  if (table.r() != spec.r || table.s() != spec.s)
    throw DomainError("family " + spec.id + " needs c_{" + std::to_string(spec.r) + "," + std::to_string(spec.s) + "}");
  require_residue_width(table, spec.modulus_bits);
  const auto bases = opts.bases.empty() ? eligible_bases(spec, spec.prime_count) : opts.bases;
  const IndexRange kr = opts.k_range.value_or(spec.k_range);
  const IndexRange mr = opts.m_range.value_or(spec.m_range);

  std::vector<Instantiation> todo;
  for (auto b : bases)
    for (auto k = kr.first; k <= kr.last; ++k)
      for (auto m = mr.first; m <= mr.last; ++m) todo.push_back(instantiate_family(spec, b, k, m));

  FamilyReport rep{spec.id, std::vector<InstanceReport>(todo.size())};
  const Exponent limit = table.order();
  parallel_for(todo.size(), opts.jobs, [&](std::size_t t) {
    InstanceReport ir{todo[t], InstanceStatus::insufficient, 0, std::nullopt};
    const auto& inst = todo[t];
    if (fits(inst.stride) && fits(inst.offset) && inst.offset.get_si() < limit) {
      const Exponent stride = inst.stride.get_si();
      const Exponent offset = inst.offset.get_si();
      for (Exponent n = 0; offset + stride * n < limit; ++n) {
        if (spec.exclude_base_divisible_n && n % inst.base == 0) continue;
        if (opts.samples != 0 && ir.checked >= static_cast<Exponent>(opts.samples)) break;
        const Exponent i = offset + stride * n;
        ++ir.checked;
        const auto r = table.residue(i, spec.modulus_bits);
        if (r != 0) {
          ir.first_violation = Violation{n, i, std::to_string(r)};
          break;
        }
      }
      if (ir.first_violation)
        ir.status = InstanceStatus::fail;
      else if (ir.checked > 0 && (opts.samples == 0 || ir.checked >= static_cast<Exponent>(opts.samples)))
        ir.status = InstanceStatus::pass;
    }
    rep.instances[t] = std::move(ir);
  });
  return rep;
}

// ---------------------------------------------------------------------------

bool RelationReport::passed() const {
  bool any = false;
  for (const auto& i : instances) {
    if (i.first_mismatch_n) return false;
    any = any || i.checked > 0;
  }
  return any;
}

RelationReport verify_relation(const RelationSpec& spec, const TableLookup& tables) {
  const CoefficientTable& lt = tables(spec.lhs.r, spec.lhs.s);
  const CoefficientTable& rt = tables(spec.rhs.r, spec.rhs.s);
  require_residue_width(lt, spec.modulus_bits);
  require_residue_width(rt, spec.modulus_bits);
  RelationReport rep{spec.id, {}};
  for (auto k = spec.k_range.first; k <= spec.k_range.last; ++k) {
    RelationInstance ri;
    ri.k = k;
    ri.lhs_stride = spec.lhs.stride.at(2, k, 0);
    ri.lhs_offset = evaluate_offset(spec.lhs.offset, 2, k, 0);
    ri.rhs_stride = spec.rhs.stride.at(2, k, 0);
    ri.rhs_offset = evaluate_offset(spec.rhs.offset, 2, k, 0);
    if (fits(ri.lhs_stride) && fits(ri.lhs_offset) && fits(ri.rhs_stride) && fits(ri.rhs_offset)) {
      const Exponent a = ri.lhs_stride.get_si(), b = ri.lhs_offset.get_si();
      const Exponent c = ri.rhs_stride.get_si(), d = ri.rhs_offset.get_si();
      for (Exponent n = 0; a * n + b < lt.order() && c * n + d < rt.order(); ++n) {
        ++ri.checked;
        if (lt.residue(a * n + b, spec.modulus_bits) != rt.residue(c * n + d, spec.modulus_bits)) {
          ri.first_mismatch_n = n;
          break;
        }
      }
    }
    rep.instances.push_back(std::move(ri));
  }
  return rep;
}

// ---------------------------------------------------------------------------

CharacterizationReport check_iff_characterization(const CoefficientTable& table, Exponent stride, Exponent offset,
                                                  OneVarForm form, Exponent n_max, CharacterizationMode mode) {
  if (stride < 1 || offset < 0 || n_max < 0) throw DomainError("bad characterization parameters");
  if (stride * n_max + offset >= table.order())
    throw OrderError("index " + std::to_string(stride * n_max + offset) + " beyond table order " +
                     std::to_string(table.order()));
  CharacterizationReport rep;
  for (Exponent n = 0; n <= n_max; ++n) {
    const bool odd = table.residue(stride * n + offset, 1) != 0;
    const bool rep_ok = represented_one_var(n, form).has_value();
    ++rep.checked;
    if (rep_ok) ++rep.represented;
    const bool bad = mode == CharacterizationMode::iff ? (odd != rep_ok) : (!rep_ok && odd);
    if (bad) {
      rep.first_counterexample = n;
      break;
    }
  }
  return rep;
}

CharacterizationReport check_two_square_obstruction(const CoefficientTable& table, Exponent stride, Exponent offset,
                                                    Exponent value_scale, Exponent value_shift, TwoSquareForm form,
                                                    Exponent n_max) {
  if (stride < 1 || offset < 0 || n_max < 0) throw DomainError("bad obstruction parameters");
  if (stride * n_max + offset >= table.order())
    throw OrderError("index " + std::to_string(stride * n_max + offset) + " beyond table order " +
                     std::to_string(table.order()));
  CharacterizationReport rep;
  for (Exponent n = 0; n <= n_max; ++n) {
    ++rep.checked;
    if (represented_two_square(value_scale * n + value_shift, form)) {
      ++rep.represented;
      continue;
    }
    if (table.residue(stride * n + offset, 1) != 0) {
      rep.first_counterexample = n;
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<Candidate> scan_progressions(const CoefficientTable& table, Exponent stride_max, Exponent min_hits) {
  if (table.ring().is_exact()) throw DomainError("progression scan needs a mod 2^w table");
  std::vector<Candidate> found;
  const Exponent limit = table.order();
  for (Exponent d = 1; d <= stride_max; ++d) {
    for (Exponent j = 0; j < d; ++j) {
      const bool implied = std::any_of(found.begin(), found.end(), [&](const Candidate& c) {
        return d % c.stride == 0 && j % c.stride == c.offset;
      });
      if (implied) continue;
      Exponent hits = 0;
      bool all_even = true;
      for (Exponent i = j; i < limit; i += d) {
        if (table.residue(i, 1) != 0) {
          all_even = false;
          break;
        }
        ++hits;
      }
      if (all_even && hits >= min_hits && hits > 0) found.push_back({d, j, hits});
    }
  }
  return found;
}

}  // namespace qtheta
