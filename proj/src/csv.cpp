#include "spherecover/csv.hpp"

#include <charconv>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>

#include "spherecover/errors.hpp"

namespace spherecover::csv {

namespace {

void append_field(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
}

// Splits one record starting at `pos`; advances `pos` past the line terminator.
std::vector<std::string> split_record(std::string_view text, std::size_t& pos, std::size_t line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (quoted) {
      if (ch == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          fields.back().push_back('"');
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      return fields;
    } else {
      fields.back().push_back(ch);
    }
  }
  if (quoted) throw validation_error("csv: unterminated quoted field on line " + std::to_string(line));
  return fields;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

double parse_number(std::string_view text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size())
    throw validation_error("csv: not a number: \"" + std::string(text) + "\"");
  return value;
}

std::size_t Document::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw validation_error("csv: no column named \"" + std::string(name) + "\"");
}

double Document::number(std::size_t row, std::string_view name) const { return parse_number(rows.at(row).at(column(name))); }

std::string Document::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return {};
}

std::string Document::str() const {
  std::string out;
  if (!metadata.empty()) {
    out += "#";
    for (const auto& [k, v] : metadata) out += " " + k + "=" + v;
    out += "\n";
  }
  auto record = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out.push_back(',');
      append_field(out, fields[i]);
    }
    out.push_back('\n');
  };
  record(header);
  for (const auto& r : rows) record(r);
  return out;
}

Document parse(std::string_view text) {
  Document doc;
  std::size_t pos = 0, line = 0;
  bool have_header = false;
  while (pos < text.size()) {
    ++line;
    if (text[pos] == '#') {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::istringstream words(std::string(text.substr(pos + 1, end - pos - 1)));
      std::string word;
      while (words >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) continue;
        doc.metadata.emplace_back(word.substr(0, eq), word.substr(eq + 1));
      }
      pos = end + 1;
      continue;
    }
    auto fields = split_record(text, pos, line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (!have_header) {
      doc.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != doc.header.size())
      throw validation_error("csv: line " + std::to_string(line) + " has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(doc.header.size()));
    doc.rows.push_back(std::move(fields));
  }
  if (!have_header) throw validation_error("csv: missing header row");
  return doc;
}

Document read(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text);
}

}  // namespace spherecover::csv
