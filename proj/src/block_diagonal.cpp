#include "secfbl/block_diagonal.hpp"

#include <stdexcept>
#include <string>

namespace secfbl {

BlockDiagonal::BlockDiagonal(std::vector<CMatrix> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) return;
  block_size_ = static_cast<int>(blocks_.front().rows());
  for (const auto& b : blocks_) {
    if (b.rows() != block_size_ || b.cols() != block_size_) {
      throw std::invalid_argument("BlockDiagonal: blocks must be square and of equal size");
    }
  }
}

BlockDiagonal::BlockDiagonal(int blocks, int block_size)
    : blocks_(blocks, CMatrix::Zero(block_size, block_size)), block_size_(block_size) {}

CVector BlockDiagonal::apply(const CVector& x) const {
  if (x.size() != dimension()) throw std::invalid_argument("BlockDiagonal::apply: dimension mismatch");
  CVector y(x.size());
  for (int i = 0; i < block_count(); ++i) {
    y.segment(i * block_size_, block_size_).noalias() = blocks_[i] * x.segment(i * block_size_, block_size_);
  }
  return y;
}

CMatrix BlockDiagonal::to_dense() const {
  CMatrix dense = CMatrix::Zero(dimension(), dimension());
  for (int i = 0; i < block_count(); ++i) {
    dense.block(i * block_size_, i * block_size_, block_size_, block_size_) = blocks_[i];
  }
  return dense;
}

BlockDiagonal BlockDiagonal::scaled(double s) const {
  BlockDiagonal out = *this;
  for (auto& b : out.blocks_) b *= s;
  return out;
}

BlockCholesky::BlockCholesky(const BlockDiagonal& matrix) : block_size_(matrix.block_size()) {
  factors_.reserve(matrix.block_count());
  for (int i = 0; i < matrix.block_count(); ++i) {
    factors_.emplace_back(matrix.block(i));
    if (factors_.back().info() != Eigen::Success) {
      throw std::domain_error("BlockCholesky: block " + std::to_string(i) + " is not positive definite");
    }
  }
}

CVector BlockCholesky::solve(const CVector& rhs) const {
  const int n = block_size_;
  if (rhs.size() != static_cast<Eigen::Index>(factors_.size()) * n) {
    throw std::invalid_argument("BlockCholesky::solve: dimension mismatch");
  }
  CVector x(rhs.size());
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto offset = static_cast<Eigen::Index>(i) * n;
    x.segment(offset, n) = factors_[i].solve(rhs.segment(offset, n));
  }
  return x;
}

}  // namespace secfbl
