#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rankforge::csv {

// RFC 4180 record reader. Quoted fields may contain commas, doubled quotes
// and line breaks.
class Reader {
 public:
  enum class Status { kRecord, kMalformed, kEnd };

  explicit Reader(std::istream& in) : in_(in) {}

  // On kMalformed the rest of the offending record is consumed.
  Status Next(std::vector<std::string>& fields);
  // Physical line where the last returned record started (1-based).
  int line() const { return record_line_; }

 private:
  std::istream& in_;
  int line_ = 1;
  int record_line_ = 0;
};

void WriteField(std::ostream& out, std::string_view field);
void WriteRecord(std::ostream& out, const std::vector<std::string_view>& fields);

}  // namespace rankforge::csv
