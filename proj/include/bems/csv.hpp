#pragma once

#include <string>
#include <vector>

namespace bems {

// Minimal CSV support for the comma-separated schemas used by the toolkit.
// No quoting: none of the file formats carry free text.

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<int> line_numbers;  // 1-based source line of each row

  int column(const std::string& name) const;  // -1 when absent
};

// Reads a CSV with a header row and all-numeric data rows. Throws
// std::runtime_error with "<path>:<line>: ..." on malformed content.
CsvTable read_csv(const std::string& path);

// Shortest round-trip formatting so written logs re-parse to the same bits.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void write_row(const std::vector<double>& values);
  void close();
  ~CsvWriter();

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace bems
