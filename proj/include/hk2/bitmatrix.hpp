#pragma once

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

namespace hk2 {

// Incremental GF(2) row reduction over bit-packed rows (64 columns per
// word).  Feed rows one at a time; each is reduced against the pivots seen
// so far.  Pivot position = highest set bit.  Pivot rows are stored
// truncated at their pivot word, so eliminations only touch words at or
// below the current leading bit.
class Gf2Eliminator {
 public:
  explicit Gf2Eliminator(std::size_t cols)
      : cols_(cols), words_(words_for(cols)), pivot_rows_(cols), rank_(0) {}

  static std::size_t words_for(std::size_t cols) { return (cols + 63) / 64; }

  std::size_t cols() const { return cols_; }
  std::size_t words() const { return words_; }
  std::size_t rank() const { return rank_; }

  // Returns true when the row was independent of everything inserted before.
  bool insert(std::vector<std::uint64_t> row) {
    std::size_t scan = row.size();
    for (;;) {
      int bit = -1;
      while (scan-- > 0) {
        if (row[scan]) {
          bit = static_cast<int>(scan * 64 + 63 -
                                 static_cast<std::size_t>(std::countl_zero(row[scan])));
          break;
        }
      }
      if (bit < 0) return false;
      const std::size_t word = static_cast<std::size_t>(bit) / 64;
      auto& pivot = pivot_rows_[static_cast<std::size_t>(bit)];
      if (pivot.empty()) {
        row.resize(word + 1);
        pivot = std::move(row);
        ++rank_;
        return true;
      }
      for (std::size_t k = 0; k <= word; ++k) row[k] ^= pivot[k];
      scan = word + 1;
    }
  }

 private:
  std::size_t cols_;
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> pivot_rows_;
  std::size_t rank_;
};

// Rank of a list of bit-packed rows over GF(2).
inline std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> rows, std::size_t cols) {
  Gf2Eliminator elim(cols);
  for (auto& r : rows) elim.insert(std::move(r));
  return elim.rank();
}

}  // namespace hk2
