#include "stpete/table_io.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>

#include "stpete/error.hpp"

namespace stpete {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line_no) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": cannot parse '" +
                                           std::string(field) + "' as a number");
  }
  return value;
}

}  // namespace

GambleSpec parse_table_csv(std::istream& in, double tolerance) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::vector<TableEntry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected exactly two columns");
    }
    const auto left = trim(text.substr(0, comma));
    const auto right = trim(text.substr(comma + 1));
    if (!saw_header) {
      if (left != "probability" || right != "payout") {
        throw Error(ErrorCode::ParseError, "missing header row 'probability,payout'");
      }
      saw_header = true;
      continue;
    }
    entries.push_back({parse_number(left, line_no), parse_number(right, line_no)});
  }
  if (!saw_header) throw Error(ErrorCode::ParseError, "empty table file");
  return GambleSpec::table(std::move(entries), tolerance);
}

GambleSpec load_table_csv(const std::filesystem::path& path, double tolerance) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return parse_table_csv(in, tolerance);
}

}  // namespace stpete
