#pragma once

#include <initializer_list>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace foodmap {

// Minimal RFC 4180 reader: comma-separated, optional double-quoted fields with
// "" escapes and embedded commas or newlines. Accepts LF and CRLF endings.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Next logical record, or nullopt at end of input.
  std::optional<std::vector<std::string>> next_row() {
    int c = in_.get();
    if (c == EOF) return std::nullopt;
    ++row_number_;

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    while (true) {
      if (c == EOF) break;
      if (quoted) {
        if (c == '"') {
          int next = in_.get();
          if (next == '"') {
            field += '"';
          } else {
            quoted = false;
            c = next;
            continue;
          }
        } else {
          field += static_cast<char>(c);
        }
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        break;
      } else if (c == '\r') {
        int next = in_.peek();
        if (next == '\n') {
          in_.get();
          break;
        }
        field += '\r';
      } else {
        field += static_cast<char>(c);
      }
      c = in_.get();
    }
    fields.push_back(std::move(field));
    return fields;
  }

  // 1-based record number of the row most recently returned (header = 1).
  std::size_t row_number() const { return row_number_; }

 private:
  std::istream& in_;
  std::size_t row_number_ = 0;
};

inline std::string csv_quote(std::string_view field) {
  bool needs_quoting = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quoting) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_quote(fields[i]);
  }
  out << '\n';
}

inline void write_csv_row(std::ostream& out, std::initializer_list<std::string> fields) {
  write_csv_row(out, std::span<const std::string>(fields.begin(), fields.size()));
}

}  // namespace foodmap
