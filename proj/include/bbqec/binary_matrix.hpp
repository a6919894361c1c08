#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbqec {

/// Dense matrix over GF(2) with rows packed into 64-bit words.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>((cols + 63) / 64), 0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  }

  static BinaryMatrix identity(int n) {
    BinaryMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool get(int r, int c) const { return (row_ptr(r)[c >> 6] >> (c & 63)) & 1u; }
  void set(int r, int c, bool v) {
    auto& w = row_ptr(r)[c >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (c & 63);
    w = v ? (w | bit) : (w & ~bit);
  }
  void flip(int r, int c) { row_ptr(r)[c >> 6] ^= std::uint64_t{1} << (c & 63); }

  int row_weight(int r) const {
    int w = 0;
    for (int k = 0; k < words_; ++k) w += std::popcount(row_ptr(r)[k]);
    return w;
  }
  int col_weight(int c) const {
    int w = 0;
    for (int r = 0; r < rows_; ++r) w += get(r, c) ? 1 : 0;
    return w;
  }
  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::uint64_t w) { return w == 0; });
  }

  /// Column indices of the nonzero entries of row r, ascending.
  std::vector<int> row_support(int r) const {
    std::vector<int> out;
    for (int k = 0; k < words_; ++k) {
      std::uint64_t w = row_ptr(r)[k];
      while (w) {
        out.push_back(k * 64 + std::countr_zero(w));
        w &= w - 1;
      }
    }
    return out;
  }

  BinaryMatrix transpose() const {
    BinaryMatrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c : row_support(r)) t.set(c, r, true);
    return t;
  }

  friend BinaryMatrix operator+(const BinaryMatrix& a, const BinaryMatrix& b) {
    check_same_shape(a, b);
    BinaryMatrix s = a;
    for (std::size_t i = 0; i < s.data_.size(); ++i) s.data_[i] ^= b.data_[i];
    return s;
  }

  /// Product over GF(2): row r of the result is the XOR of rows of b selected by row r of a.
  friend BinaryMatrix operator*(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    BinaryMatrix p(a.rows_, b.cols_);
    for (int r = 0; r < a.rows_; ++r) {
      std::uint64_t* out = p.row_ptr(r);
      for (int k : a.row_support(r)) {
        const std::uint64_t* src = b.row_ptr(k);
        for (int w = 0; w < b.words_; ++w) out[w] ^= src[w];
      }
    }
    return p;
  }

  friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  /// Kronecker product a (x) b.
  static BinaryMatrix kron(const BinaryMatrix& a, const BinaryMatrix& b) {
    BinaryMatrix k(a.rows_ * b.rows_, a.cols_ * b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j : a.row_support(i))
        for (int r = 0; r < b.rows_; ++r)
          for (int c : b.row_support(r)) k.set(i * b.rows_ + r, j * b.cols_ + c, true);
    return k;
  }

  /// [a | b]
  static BinaryMatrix hconcat(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.rows_ != b.rows_) throw std::invalid_argument("hconcat row mismatch");
    BinaryMatrix h(a.rows_, a.cols_ + b.cols_);
    for (int r = 0; r < a.rows_; ++r) {
      for (int c : a.row_support(r)) h.set(r, c, true);
      for (int c : b.row_support(r)) h.set(r, a.cols_ + c, true);
    }
    return h;
  }

  /// Rank over GF(2). Gaussian elimination, pivot chosen as the lowest column index.
  int rank() const {
    BinaryMatrix w = *this;
    int rank = 0;
    for (int c = 0; c < cols_ && rank < rows_; ++c) {
      int pivot = -1;
      for (int r = rank; r < rows_; ++r)
        if (w.get(r, c)) {
          pivot = r;
          break;
        }
      if (pivot < 0) continue;
      w.swap_rows(pivot, rank);
      const std::uint64_t* prow = w.row_ptr(rank);
      for (int r = 0; r < rows_; ++r) {
        if (r != rank && w.get(r, c)) {
          std::uint64_t* dst = w.row_ptr(r);
          for (int k = c >> 6; k < words_; ++k) dst[k] ^= prow[k];
        }
      }
      ++rank;
    }
    return rank;
  }

  std::string to_string() const {
    std::string s;
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) s += get(r, c) ? '1' : '0';
      s += '\n';
    }
    return s;
  }

 private:
  static void check_same_shape(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix shape mismatch");
  }
  std::uint64_t* row_ptr(int r) { return data_.data() + static_cast<std::size_t>(r) * words_; }
  const std::uint64_t* row_ptr(int r) const { return data_.data() + static_cast<std::size_t>(r) * words_; }
  void swap_rows(int a, int b) {
    if (a == b) return;
    std::swap_ranges(row_ptr(a), row_ptr(a) + words_, row_ptr(b));
  }

  int rows_{0};
  int cols_{0};
  int words_{0};
  std::vector<std::uint64_t> data_;
};

}  // namespace bbqec
