#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qtheta/congruence.hpp"

namespace qtheta {

struct CharacterizationSpec {
  std::string id;
  std::string provenance;
  int r = 0;
  int s = 0;
  Exponent stride = 1;
  Exponent offset = 0;
  OneVarForm form;
  CharacterizationMode mode = CharacterizationMode::iff;
  Exponent n_max = 0;
};

struct ObstructionSpec {
  std::string id;
  std::string provenance;
  int r = 0;
  int s = 0;
  Exponent stride = 1;
  Exponent offset = 0;
  Exponent value_scale = 1;
  Exponent value_shift = 0;
  TwoSquareForm form;
  Exponent n_max = 0;
};

/// Contents of a family specification file. Records, one per line:
///
///   family <id> r=.. s=.. base=prime|two [residues=a,b mod=M] stride=<product>
///          offset=<offset> [exclude=yes] [k=a..b] [m=a..b] [primes=P] [modulus=2^w] tag="..."
///   relation <id> lhs=r,s lhs_stride=.. lhs_offset=.. rhs=r,s rhs_stride=.. rhs_offset=.. k=a..b tag=".."
///   characterization <id> r=.. s=.. stride=.. offset=.. form=Ak^2+Bk mode=iff|implies nmax=.. tag=".."
///   obstruction <id> r=.. s=.. stride=.. offset=.. value=An+B form=ax^2+y^2 nmax=.. tag=".."
///
/// <product> is INT or [INT*]base^(affine)[*base^(affine)] with base 2 or p
/// and affine in k and m; <offset> is <product> or (<product>+INT)/INT.
struct FamilyFile {
  std::vector<FamilySpec> families;
  std::vector<RelationSpec> relations;
  std::vector<CharacterizationSpec> characterizations;
  std::vector<ObstructionSpec> obstructions;

  std::size_t size() const {
    return families.size() + relations.size() + characterizations.size() + obstructions.size();
  }
};

/// Throws ParseError whose position is the 1-based line number.
FamilyFile parse_famspec(std::string_view text);
FamilyFile load_famspec(const std::filesystem::path& path);

PowerProduct parse_power_product(std::string_view text);
OffsetFormula parse_offset(std::string_view text);

}  // namespace qtheta
