#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace puf {

// Row-major bit matrix, one byte per bit in memory (packed only on export).
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols)
      : rows_(rows), cols_(cols),
        bits_(static_cast<size_t>(rows) * cols, 0) {
    if (rows <= 0 || cols <= 0)
      throw std::invalid_argument("BitMatrix: dimensions must be positive");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return bits_.size(); }

  uint8_t operator[](size_t i) const { return bits_[i]; }
  uint8_t& operator[](size_t i) { return bits_[i]; }
  uint8_t at(int r, int c) const {
    return bits_[static_cast<size_t>(r) * cols_ + c];
  }
  void set(int r, int c, uint8_t v) {
    bits_[static_cast<size_t>(r) * cols_ + c] = v;
  }

  const std::vector<uint8_t>& data() const { return bits_; }
  std::vector<uint8_t>& data() { return bits_; }

  bool same_shape(const BitMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }
  bool operator==(const BitMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && bits_ == o.bits_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<uint8_t> bits_;
};

}  // namespace puf
