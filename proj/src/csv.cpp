#include "rankforge/csv.hpp"

namespace rankforge::csv {

Reader::Status Reader::Next(std::vector<std::string>& fields) {
  fields.clear();
  record_line_ = line_;
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) return Status::kEnd;

  std::string field;
  bool malformed = false;
  bool quoted = false;      // inside quotes
  bool was_quoted = false;  // current field started with a quote
  bool after_quote = false; // closing quote seen
  while (true) {
    if (c == std::char_traits<char>::eof()) {
      if (quoted) malformed = true;
      fields.push_back(std::move(field));
      break;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = after_quote = false;
    } else if (ch == '\r' && in_.peek() == '\n') {
      // CRLF; handled on the '\n'.
    } else if (ch == '\n') {
      ++line_;
      fields.push_back(std::move(field));
      break;
    } else if (ch == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else {
      if (after_quote || ch == '"') malformed = true;
      field.push_back(ch);
    }
    c = in_.get();
  }
  return malformed ? Status::kMalformed : Status::kRecord;
}

void WriteField(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char ch : field) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

void WriteRecord(std::ostream& out, const std::vector<std::string_view>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    WriteField(out, fields[i]);
  }
  out << '\n';
}

}  // namespace rankforge::csv
