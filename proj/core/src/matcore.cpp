#include "axbnet/matcore.hpp"

#include <stdexcept>
#include <string>

namespace axbnet {

namespace {

[[noreturn]] void shape_error(const char* op, const Mat& a, const Mat& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                              " vs " + std::to_string(b.rows()) + "x" +
                              std::to_string(b.cols()));
}

}  // namespace

Partition::Partition(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  offsets_.reserve(sizes_.size());
  for (Index s : sizes_) {
    if (s < 1) throw std::invalid_argument("Partition: every block size must be >= 1");
    offsets_.push_back(total_);
    total_ += s;
  }
}

Index Partition::size(int i) const {
  if (i < 0 || i >= count()) throw std::invalid_argument("Partition: block index out of range");
  return sizes_[static_cast<size_t>(i)];
}

Index Partition::offset(int i) const {
  if (i < 0 || i >= count()) throw std::invalid_argument("Partition: block index out of range");
  return offsets_[static_cast<size_t>(i)];
}

double frob_inner(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("frob_inner", a, b);
  return a.cwiseProduct(b).sum();
}

double frob_norm(const Mat& a) { return a.norm(); }

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat vec(const Mat& a) {
  Mat out(a.rows() * a.cols(), 1);
  for (Index j = 0; j < a.cols(); ++j) out.block(j * a.rows(), 0, a.rows(), 1) = a.col(j);
  return out;
}

Mat embed_row(const Mat& a, const Partition& part, int i) {
  if (a.rows() != part.size(i))
    throw std::invalid_argument("embed_row: block height " + std::to_string(a.rows()) +
                                " does not match partition size " + std::to_string(part.size(i)));
  Mat out = Mat::Zero(part.total(), a.cols());
  out.block(part.offset(i), 0, a.rows(), a.cols()) = a;
  return out;
}

Mat embed_col(const Mat& a, const Partition& part, int i) {
  if (a.cols() != part.size(i))
    throw std::invalid_argument("embed_col: block width " + std::to_string(a.cols()) +
                                " does not match partition size " + std::to_string(part.size(i)));
  Mat out = Mat::Zero(a.rows(), part.total());
  out.block(0, part.offset(i), a.rows(), a.cols()) = a;
  return out;
}

Mat block_row(const Mat& a, const Partition& part, int i) {
  if (a.rows() != part.total())
    throw std::invalid_argument("block_row: partition totals " + std::to_string(part.total()) +
                                " rows but matrix has " + std::to_string(a.rows()));
  return a.block(part.offset(i), 0, part.size(i), a.cols());
}

Mat block_col(const Mat& a, const Partition& part, int i) {
  if (a.cols() != part.total())
    throw std::invalid_argument("block_col: partition totals " + std::to_string(part.total()) +
                                " cols but matrix has " + std::to_string(a.cols()));
  return a.block(0, part.offset(i), a.rows(), part.size(i));
}

}  // namespace axbnet
