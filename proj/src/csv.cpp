#include "bems/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bems {

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable t;
  t.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      fail(path, lineno,
           "expected " + std::to_string(t.header.size()) + " columns, got " +
               std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
      const std::string& c = cells[i];
      char* end = nullptr;
      row[i] = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') {
        fail(path, lineno, "column '" + t.header[i] + "' is not numeric: '" + c + "'");
      }
    }
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(lineno);
  }
  if (t.header.empty()) throw std::runtime_error(path + ": empty file");
  return t;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct CsvWriter::Impl {
  std::ofstream out;
  size_t width = 0;
  std::string path;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  impl_->width = header.size();
  impl_->path = path;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << header[i];
  }
  impl_->out << '\n';
}

void CsvWriter::write_row(const std::vector<double>& values) {
  if (values.size() != impl_->width) {
    throw std::runtime_error(impl_->path + ": row width mismatch");
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << format_double(values[i]);
  }
  impl_->out << '\n';
}

void CsvWriter::close() {
  if (impl_->out.is_open()) impl_->out.close();
}

CsvWriter::~CsvWriter() {
  close();
  delete impl_;
}

}  // namespace bems
