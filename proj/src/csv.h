#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace stopscape::detail {

// RFC 4180 field: quoted only when it holds a comma, quote or line break.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string{s};
  }
  std::string out = "\"";
  for (auto const c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

// Reads one field starting at `pos`, leaving `pos` on the following comma or
// at the end. Absent on an unterminated quote.
inline std::optional<std::string> read_csv_field(std::string_view line,
                                                 std::size_t& pos) {
  if (pos >= line.size() || line[pos] != '"') {
    auto const end = std::min(line.find(',', pos), line.size());
    std::string out{line.substr(pos, end - pos)};
    pos = end;
    return out;
  }
  std::string out;
  for (++pos; pos < line.size(); ++pos) {
    if (line[pos] == '"') {
      if (pos + 1 < line.size() && line[pos + 1] == '"') {
        out += '"';
        ++pos;
      } else {
        ++pos;
        return out;
      }
    } else {
      out += line[pos];
    }
  }
  return std::nullopt;
}

}  // namespace stopscape::detail
