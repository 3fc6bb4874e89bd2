#pragma once

// CSV emission with reproducible formatting: every file carries a header
// row and a comment line with the config digest; numbers print with 17
// significant digits in lowercase scientific notation so outputs round-trip
// and are byte-identical for a fixed config + seed.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace zoll {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::uint64_t config_digest,
            const std::vector<std::string>& columns)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    char head[64];
    std::snprintf(head, sizeof head, "# config %016llx\n",
                  static_cast<unsigned long long>(config_digest));
    out_ << head;
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << format_number(values[i]) << (i + 1 < values.size() ? "," : "\n");
  }

  void row_tagged(const std::string& tag, const std::vector<double>& values) {
    out_ << tag;
    for (double v : values) out_ << "," << format_number(v);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

}  // namespace zoll
