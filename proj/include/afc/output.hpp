#pragma once

#include <string>
#include <vector>

namespace afc {

/// Fixed "%.10g" rendering so reruns produce identical bytes.
std::string format_number(double v);

/// CSV with a header row; cells needing it are quoted per RFC 4180.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(int v);
    Row& operator<<(long v);
    Row& operator<<(std::size_t v);
    Row& operator<<(const std::string& v);
    Row& operator<<(const char* v) { return *this << std::string(v); }

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };

  void add(const Row& row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes through a temporary file in the same directory and renames it
/// into place. Parent directories are created.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace afc
