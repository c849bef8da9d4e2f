#pragma once

#include <Eigen/Dense>

#include <vector>

namespace axbnet {

// Dense real matrix, row-major so that flat state vectors can be mapped onto
// matrix blocks without copying.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sizes of consecutive blocks along one matrix dimension.
/// Every size is at least 1; the sizes sum to the partitioned dimension.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<Index> sizes);

  int count() const { return static_cast<int>(sizes_.size()); }
  bool empty() const { return sizes_.empty(); }
  Index total() const { return total_; }
  Index size(int i) const;
  Index offset(int i) const;
  const std::vector<Index>& sizes() const { return sizes_; }

  bool operator==(const Partition& other) const { return sizes_ == other.sizes_; }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
  Index total_ = 0;
};

/// Frobenius inner product tr(a^T b). Shapes must match.
double frob_inner(const Mat& a, const Mat& b);

/// Frobenius norm sqrt(tr(a^T a)).
double frob_norm(const Mat& a);

/// Kronecker product: block (i,j) of the result is a(i,j) * b.
Mat kron(const Mat& a, const Mat& b);

/// Column vector stacking the columns of a, left to right.
Mat vec(const Mat& a);

/// Places a as row-block i of an otherwise-zero matrix with
/// part.total() rows and a.cols() columns. Requires a.rows() == part.size(i).
Mat embed_row(const Mat& a, const Partition& part, int i);

/// Places a as column-block i of an otherwise-zero matrix with
/// a.rows() rows and part.total() columns. Requires a.cols() == part.size(i).
Mat embed_col(const Mat& a, const Partition& part, int i);

/// Extracts row-block i of a. Requires a.rows() == part.total().
Mat block_row(const Mat& a, const Partition& part, int i);

/// Extracts column-block i of a. Requires a.cols() == part.total().
Mat block_col(const Mat& a, const Partition& part, int i);

}  // namespace axbnet
