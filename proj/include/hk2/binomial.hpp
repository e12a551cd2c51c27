#pragma once

#include <cstddef>
#include <vector>

#include "hk2/rational.hpp"

namespace hk2 {

// Central binomial coefficients A_n = binom(2n, n), built by the exact
// multiplicative recurrence A_{n+1} = A_n (4n+2)/(n+1).
class BinomialTable {
 public:
  explicit BinomialTable(std::size_t max_n) : a_(max_n + 1) {
    a_[0] = 1;
    for (std::size_t m = 0; m < max_n; ++m)
      a_[m + 1] = a_[m] * Int(static_cast<unsigned long>(4 * m + 2)) /
                  Int(static_cast<unsigned long>(m + 1));
  }

  const Int& at(std::size_t n) const { return a_.at(n); }
  std::size_t max_n() const { return a_.size() - 1; }

 private:
  std::vector<Int> a_;
};

}  // namespace hk2
