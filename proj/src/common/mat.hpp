#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hmmvae {

// dense row-major matrix of doubles
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> d;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), d(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return d[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return d[r * cols + c]; }

  std::vector<double> col(std::size_t c) const {
    if (c >= cols) throw std::out_of_range("Mat::col: index out of range");
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = d[r * cols + c];
    return out;
  }

  static Mat from_rows(const std::vector<std::vector<double>>& rows_in) {
    Mat m;
    m.rows = rows_in.size();
    m.cols = rows_in.empty() ? 0 : rows_in[0].size();
    m.d.reserve(m.rows * m.cols);
    for (const auto& r : rows_in) {
      if (r.size() != m.cols) throw std::invalid_argument("Mat::from_rows: ragged rows");
      m.d.insert(m.d.end(), r.begin(), r.end());
    }
    return m;
  }
};

// row-major integer matrix (state labels)
struct IMat {
  std::size_t rows = 0, cols = 0;
  std::vector<int> d;

  IMat() = default;
  IMat(std::size_t r, std::size_t c, int fill = 0) : rows(r), cols(c), d(r * c, fill) {}

  int& operator()(std::size_t r, std::size_t c) { return d[r * cols + c]; }
  int operator()(std::size_t r, std::size_t c) const { return d[r * cols + c]; }

  std::vector<int> col(std::size_t c) const {
    if (c >= cols) throw std::out_of_range("IMat::col: index out of range");
    std::vector<int> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = d[r * cols + c];
    return out;
  }
};

}  // namespace hmmvae
