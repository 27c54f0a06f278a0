#pragma once

#include "kslab/matrix_core.hpp"

#include <vector>

namespace kslab {

// An element of M_k(B(H_d)) stored as a kd x kd matrix. Block (i, j) occupies
// rows [i*d, (i+1)*d) and columns [j*d, (j+1)*d).
class BlockOperator {
 public:
  BlockOperator(int k, int d, ComplexMatrix data);
  static BlockOperator zero(int k, int d);
  // Tuple (x_1, ..., x_k) stacked as the first block row; every other block
  // row is zero. Then (X^*X)_{ij} = x_i^* x_j.
  static BlockOperator from_row(const std::vector<ComplexMatrix>& tuple);

  int k() const { return k_; }
  int d() const { return d_; }
  const ComplexMatrix& data() const { return data_; }

  ComplexMatrix block(int i, int j) const { return data_.block(i * d_, j * d_, d_, d_); }

 private:
  int k_;
  int d_;
  ComplexMatrix data_;
};

// Entry (i, j) is Tr of block (i, j): Tr_2(M (x) Y) = M Tr(Y).
ComplexMatrix partial_trace_second(const BlockOperator& x);
ComplexMatrix partial_trace_second(const ComplexMatrix& x, int k, int d);

}  // namespace kslab
