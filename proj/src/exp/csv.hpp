#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hmmvae::exp {

// locale-independent number formatting for CSV cells: doubles at 9
// significant digits, integers verbatim
std::string fmt(double v);
std::string fmt(std::size_t v);
std::string fmt(int v);

// writes header + rows; every cell is already a formatted string
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// minimal reader for the files written above (no quoting, comma-separated)
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
};

Csv read_csv(const std::string& path);

}  // namespace hmmvae::exp
