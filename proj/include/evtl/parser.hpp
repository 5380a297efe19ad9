#pragma once

#include "evtl/data_model.hpp"
#include "evtl/formula.hpp"

#include <filesystem>
#include <string_view>

namespace evtl {

/// What a formula's names resolve against.
struct ParseContext {
  SpaceRef space;
  const PenaltyRegistry* penalties = nullptr;
  /// Relative `empirical("...")` paths are resolved against this directory.
  std::filesystem::path base_dir = ".";
};

/// Parses formula source. Grammar, loosest binding first:
///
///   implies := or ("->" implies)?
///   or      := and ("||" or)?
///   and     := until ("&&" and)?
///   until   := unary ("U" "[" int "," int "]" until)?
///   unary   := "!" unary | ("F" | "G") "[" int "," int "]" unary | primary
///   primary := "true" | atom | "(" implies ")"
///   atom    := ("target" | "hazard") "(" dist "," penalty "," number ")"
///   dist    := "normal" "(" var ";" mean "," variance {"," var ";" mean "," variance} ")"
///            | "point" "(" var "=" number {"," var "=" number} ")"
///            | "empirical" "(" string ")"
///
/// `&&`, `->`, `F` and `G` are expanded into the core connectives. The second
/// normal parameter is a variance. `#` starts a comment running to end of line.
/// Throws ParseError carrying the 1-based line and column.
FormulaPtr parse_formula(std::string_view text, const ParseContext& context);

} // namespace evtl
