#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace citecascade::csv {

// One parsed CSV row plus the 1-based physical line it started on.
struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
// newlines. A UTF-8 byte-order mark at the start is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  bool next(Row& row) {
    row.fields.clear();
    row.line = line_ + 1;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in_.get()) != EOF) {
      any = true;
      if (first_) {
        first_ = false;
        if (c == 0xEF && in_.peek() == 0xBB) {
          in_.get();
          if (in_.peek() == 0xBF) in_.get();
          continue;
        }
      }
      char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
        continue;
      }
      if (ch == '"') {
        in_quotes = true;
      } else if (ch == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
      } else if (ch == '\r') {
        // swallowed; \n terminates
      } else if (ch == '\n') {
        ++line_;
        row.fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(ch);
      }
    }
    if (!any) return false;
    ++line_;
    row.fields.push_back(std::move(field));
    return true;
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  bool first_ = true;
};

inline std::string escape(std::string_view value) {
  bool needs_quotes = value.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

}  // namespace citecascade::csv
