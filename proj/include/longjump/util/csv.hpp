#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace longjump {

// Locale-free float formatting: 17 significant digits round-trips doubles
// exactly, so identical values always print identical bytes.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// Minimal CSV writer: comma separator, '.' decimal point, '\n' line ends.
// Values are written verbatim (callers never emit commas/quotes in fields).
class CsvWriter {
 public:
  void comment(const std::string& text) { out_ << "# " << text << "\n"; }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

}  // namespace longjump
