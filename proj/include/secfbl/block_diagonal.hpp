#pragma once

#include <Eigen/Cholesky>
#include <vector>

#include "secfbl/linalg.hpp"

namespace secfbl {

/// Square block-diagonal matrix with equally sized blocks.
class BlockDiagonal {
 public:
  BlockDiagonal() = default;
  explicit BlockDiagonal(std::vector<CMatrix> blocks);
  BlockDiagonal(int blocks, int block_size);

  int block_count() const { return static_cast<int>(blocks_.size()); }
  int block_size() const { return block_size_; }
  int dimension() const { return block_count() * block_size_; }

  CMatrix& block(int i) { return blocks_[i]; }
  const CMatrix& block(int i) const { return blocks_[i]; }

  CVector apply(const CVector& x) const;
  CMatrix to_dense() const;
  BlockDiagonal scaled(double s) const;

 private:
  std::vector<CMatrix> blocks_;
  int block_size_ = 0;
};

/// Per-block Cholesky factorization; O(K N^3 / 3) instead of O((KN)^3 / 3).
class BlockCholesky {
 public:
  /// Throws std::domain_error if any block is not numerically positive definite.
  explicit BlockCholesky(const BlockDiagonal& matrix);

  CVector solve(const CVector& rhs) const;

 private:
  std::vector<Eigen::LLT<CMatrix>> factors_;
  int block_size_ = 0;
};

}  // namespace secfbl
