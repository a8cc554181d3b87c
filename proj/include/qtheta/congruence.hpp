#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qtheta/arith.hpp"
#include "qtheta/series.hpp"

namespace qtheta {

/// c_{r,s}(0..order-1): coefficients of 1 / Psi(-q^r, q^s) in one ring.
class CoefficientTable {
 public:
  CoefficientTable(int r, int s, Series series);

  int r() const noexcept { return r_; }
  int s() const noexcept { return s_; }
  const Ring& ring() const noexcept { return series_.ring(); }
  Exponent order() const noexcept { return series_.order(); }
  const Series& series() const noexcept { return series_; }

  mpz_class at(Exponent n) const { return series_.coeff(n); }
  std::uint64_t residue(Exponent n, int w) const { return series_.residue(n, w); }

 private:
  int r_;
  int s_;
  Series series_;
};

enum class Inversion { automatic, reference, newton };

/// Build c_{r,s} to order n. `automatic` uses Newton doubling mod 2 and
/// back-substitution otherwise.
CoefficientTable c_table(int r, int s, Ring ring, Exponent n, Inversion how = Inversion::automatic);

struct Violation {
  Exponent n = 0;      // progression index
  Exponent index = 0;  // stride * n + offset
  std::string value;   // coefficient residue
};

struct ProgressionReport {
  Exponent stride = 0;
  Exponent offset = 0;
  int modulus_bits = 1;
  Exponent checked = 0;
  std::optional<Violation> first_violation;

  bool passed() const noexcept { return checked > 0 && !first_violation; }
};

/// Checks c(stride*n + offset) == 0 mod 2^w for every index below the table
/// order. Throws OrderError if no index fits.
ProgressionReport check_progression(const CoefficientTable& table, Exponent stride, Exponent offset, int w = 1);

// ---------------------------------------------------------------------------
// prime-parameterized families

/// e = k_coeff * k + m_coeff * m + constant.
struct AffineExponent {
  std::int64_t k_coeff = 0;
  std::int64_t m_coeff = 0;
  std::int64_t constant = 0;

  std::int64_t at(std::int64_t k, std::int64_t m) const { return k_coeff * k + m_coeff * m + constant; }
  std::string to_string() const;
};

enum class PowerBase { two, prime };

/// coeff * prod base_i^{e_i(k, m)}.
struct PowerProduct {
  std::int64_t coeff = 1;
  std::vector<std::pair<PowerBase, AffineExponent>> factors;

  mpz_class at(std::int64_t prime, std::int64_t k, std::int64_t m) const;
  bool uses_prime() const;
  std::string to_string() const;
};

/// (numerator + addend) / divisor.
struct OffsetFormula {
  PowerProduct numerator;
  std::int64_t addend = 0;
  std::int64_t divisor = 1;

  std::string to_string() const;
};

struct IndexRange {
  std::int64_t first = 0;
  std::int64_t last = 0;
};

enum class BaseKind { two, prime };

/// One congruence family c_{r,s}(stride * n + offset) == 0 (mod 2^w).
struct FamilySpec {
  std::string id;
  std::string provenance;
  int r = 0;
  int s = 0;
  BaseKind base_kind = BaseKind::two;
  std::vector<std::int64_t> residues;  // eligibility of the prime base
  std::int64_t residue_modulus = 1;
  PowerProduct stride;
  OffsetFormula offset;
  bool exclude_base_divisible_n = false;
  int modulus_bits = 1;
  IndexRange k_range;
  IndexRange m_range;
  std::size_t prime_count = 2;
};

std::vector<std::int64_t> eligible_bases(const FamilySpec& spec, std::size_t count);

struct Instantiation {
  std::int64_t base = 2;
  std::int64_t k = 0;
  std::int64_t m = 0;
  mpz_class stride;
  mpz_class offset;

  std::string key() const;
};

/// Evaluate stride and offset; throws DomainError if the offset numerator is
/// not divisible (a transcription error) or an exponent is negative.
Instantiation instantiate_family(const FamilySpec& spec, std::int64_t base, std::int64_t k, std::int64_t m);

enum class InstanceStatus { pass, fail, insufficient };
const char* to_string(InstanceStatus s);

struct InstanceReport {
  Instantiation inst;
  InstanceStatus status = InstanceStatus::insufficient;
  Exponent checked = 0;
  std::optional<Violation> first_violation;
};

struct VerifyOptions {
  std::vector<std::int64_t> bases;  // empty: eligible_bases(spec, spec.prime_count)
  std::optional<IndexRange> k_range;
  std::optional<IndexRange> m_range;
  std::size_t samples = 30;  // 0: every admissible n below the table order
  unsigned jobs = 1;
};

struct FamilyReport {
  std::string id;
  std::vector<InstanceReport> instances;  // ordered by (base, k, m)

  std::size_t count(InstanceStatus s) const;
  /// No violation anywhere and at least one fully sampled instantiation.
  bool passed() const { return count(InstanceStatus::fail) == 0 && count(InstanceStatus::pass) > 0; }
};

/// Sample the first `samples` admissible n (skipping base | n when the family
/// excludes them) for every (base, k, m). An instantiation with fewer fitting
/// indices is reported as insufficient, after checking the ones that fit.
FamilyReport verify_family(const FamilySpec& spec, const CoefficientTable& table, const VerifyOptions& opts);

// ---------------------------------------------------------------------------
// congruences between subsequences

/// c_{r,s}(stride * n + offset) for a k-parameterized index map.
struct IndexMap {
  int r = 0;
  int s = 0;
  PowerProduct stride;
  OffsetFormula offset;
};

struct RelationSpec {
  std::string id;
  std::string provenance;
  IndexMap lhs;
  IndexMap rhs;
  IndexRange k_range;
  int modulus_bits = 1;
};

struct RelationInstance {
  std::int64_t k = 0;
  mpz_class lhs_stride, lhs_offset, rhs_stride, rhs_offset;
  Exponent checked = 0;
  std::optional<Exponent> first_mismatch_n;
};

struct RelationReport {
  std::string id;
  std::vector<RelationInstance> instances;
  bool passed() const;
};

using TableLookup = std::function<const CoefficientTable&(int r, int s)>;

/// For each k: c_lhs(a n + b) == c_rhs(c n + d) mod 2^w for every n with
/// both indices below the respective table orders.
RelationReport verify_relation(const RelationSpec& spec, const TableLookup& tables);

// ---------------------------------------------------------------------------
// quadratic-form characterizations

enum class CharacterizationMode {
  iff,      // odd exactly when represented
  implies,  // not represented => even
};

struct CharacterizationReport {
  Exponent checked = 0;
  Exponent represented = 0;
  std::optional<Exponent> first_counterexample;
  bool passed() const noexcept { return checked > 0 && !first_counterexample; }
};

/// For n = 0..n_max, compare the parity of c(stride*n + offset) with whether
/// n = A k^2 + B k has an integer solution.
CharacterizationReport check_iff_characterization(const CoefficientTable& table, Exponent stride,
                                                  Exponent offset, OneVarForm form, Exponent n_max,
                                                  CharacterizationMode mode = CharacterizationMode::iff);

/// For n = 0..n_max with value_scale*n + value_shift not of the form
/// a x^2 + y^2, require c(stride*n + offset) to be even.
CharacterizationReport check_two_square_obstruction(const CoefficientTable& table, Exponent stride,
                                                    Exponent offset, Exponent value_scale,
                                                    Exponent value_shift, TwoSquareForm form,
                                                    Exponent n_max);

// ---------------------------------------------------------------------------

struct Candidate {
  Exponent stride = 0;
  Exponent offset = 0;
  Exponent hits = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Empirical search: every (stride <= stride_max, offset < stride) whose
/// sampled coefficients are all even, with at least min_hits samples.
/// Candidates implied by a smaller-stride candidate are dropped.
std::vector<Candidate> scan_progressions(const CoefficientTable& table, Exponent stride_max, Exponent min_hits);

}  // namespace qtheta
