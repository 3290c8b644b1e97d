#include "swarmbo/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace swarmbo {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string &path,
                     const std::vector<std::string> &header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc),
      columns_(header.size()) {
  if (!out_)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const auto &h : header)
    *this << h;
  end_row();
}

void CsvWriter::separator() {
  if (cell_++ > 0)
    out_ << ',';
}

CsvWriter &CsvWriter::operator<<(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter &CsvWriter::operator<<(long v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter &CsvWriter::operator<<(std::size_t v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter &CsvWriter::operator<<(const std::string &v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  if (cell_ != columns_)
    throw std::logic_error(path_ + ": row has " + std::to_string(cell_) +
                           " cells, header has " + std::to_string(columns_));
  out_ << '\n';
  cell_ = 0;
  if (!out_)
    throw std::runtime_error("write failed on '" + path_ + "'");
}

void CsvWriter::close() {
  out_.close();
  if (!out_)
    throw std::runtime_error("close failed on '" + path_ + "'");
}

CsvTable read_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      cells.push_back(cell);
    if (first)
      t.header = std::move(cells);
    else
      t.rows.push_back(std::move(cells));
    first = false;
  }
  return t;
}

}  // namespace swarmbo
