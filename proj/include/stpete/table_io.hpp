#pragma once

#include <filesystem>
#include <istream>

#include "stpete/gamble.hpp"

namespace stpete {

/// Reads a two-column CSV with the header `probability,payout`. Blank lines are
/// skipped. Throws ParseError on malformed input and InvalidArgument when the
/// resulting table violates the GambleSpec invariants.
GambleSpec parse_table_csv(std::istream& in,
                           double tolerance = GambleSpec::kDefaultTableTolerance);

GambleSpec load_table_csv(const std::filesystem::path& path,
                          double tolerance = GambleSpec::kDefaultTableTolerance);

}  // namespace stpete
