#include "kslab/block_operator.hpp"

#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

BlockOperator::BlockOperator(int k, int d, ComplexMatrix data)
    : k_(k), d_(d), data_(std::move(data)) {
  if (k < 1 || d < 1) throw DimensionError("BlockOperator: k and d must be positive");
  if (data_.rows() != k * d || data_.cols() != k * d) {
    std::ostringstream os;
    os << "BlockOperator: expected " << k * d << "x" << k * d << " data, got "
       << data_.rows() << "x" << data_.cols();
    throw DimensionError(os.str());
  }
}

BlockOperator BlockOperator::zero(int k, int d) {
  return BlockOperator(k, d, ComplexMatrix::Zero(k * d, k * d));
}

BlockOperator BlockOperator::from_row(const std::vector<ComplexMatrix>& tuple) {
  if (tuple.empty()) throw DimensionError("BlockOperator::from_row: empty tuple");
  const int k = static_cast<int>(tuple.size());
  const int d = static_cast<int>(tuple.front().rows());
  ComplexMatrix data = ComplexMatrix::Zero(k * d, k * d);
  for (int j = 0; j < k; ++j) {
    if (tuple[j].rows() != d || tuple[j].cols() != d)
      throw DimensionError("BlockOperator::from_row: tuple entries must be d x d");
    data.block(0, j * d, d, d) = tuple[j];
  }
  return BlockOperator(k, d, std::move(data));
}

ComplexMatrix partial_trace_second(const ComplexMatrix& x, int k, int d) {
  if (k < 1 || d < 1 || x.rows() != k * d || x.cols() != k * d) {
    std::ostringstream os;
    os << "partial_trace_second: " << x.rows() << "x" << x.cols()
       << " matrix does not match k*d = " << k << "*" << d;
    throw DimensionError(os.str());
  }
  ComplexMatrix out(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) out(i, j) = x.block(i * d, j * d, d, d).trace();
  return out;
}

ComplexMatrix partial_trace_second(const BlockOperator& x) {
  return partial_trace_second(x.data(), x.k(), x.d());
}

}  // namespace kslab
