// Minimal CSV writer. Doubles are written with 17 significant digits so they
// round-trip exactly.
#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace swarmbo {

std::string format_double(double v);

class CsvWriter {
public:
  /// Opens `path` for writing; throws std::runtime_error naming the path.
  CsvWriter(const std::string &path, const std::vector<std::string> &header);

  CsvWriter &operator<<(double v);
  CsvWriter &operator<<(long v);
  CsvWriter &operator<<(int v) { return *this << static_cast<long>(v); }
  CsvWriter &operator<<(std::size_t v);
  CsvWriter &operator<<(const std::string &v);
  void end_row();
  void close();

private:
  void separator();

  std::string path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t cell_ = 0;
};

/// Reads a CSV with a header row into (header, rows of cells). No quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string &path);

}  // namespace swarmbo
