#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "nfr/errors.hpp"

namespace nfr {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Shape = std::vector<Eigen::Index>;

inline Eigen::Index shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Eigen::Index{1}, std::multiplies<>());
}

/// Single-channel image of arbitrary dimension.
///
/// Samples are stored flat in row-major order (last extent varies fastest).
/// Every sample carries unit measure, so the domain measure is the sample count.
template <typename Scalar>
class Image {
public:
  using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Image() = default;

  Image(VectorX<Scalar> data, Shape shape) : data_(std::move(data)), shape_(std::move(shape)) {
    if (shape_.empty()) throw InvalidArgument("image shape must have at least one extent");
    for (auto e : shape_) {
      if (e <= 0) throw InvalidArgument("image extents must be positive");
    }
    if (shape_size(shape_) != data_.size()) {
      throw InvalidArgument("image data length " + std::to_string(data_.size()) +
                            " does not match shape product " + std::to_string(shape_size(shape_)));
    }
    if (!data_.allFinite()) throw InvalidArgument("image intensities must be finite");
  }

  static Image constant(const Shape& shape, Scalar value) {
    return Image(VectorX<Scalar>::Constant(shape_size(shape), value), shape);
  }

  static Image from_matrix(const RowMajorMatrix& m) {
    VectorX<Scalar> data = Eigen::Map<const VectorX<Scalar>>(m.data(), m.size());
    return Image(std::move(data), Shape{m.rows(), m.cols()});
  }

  const VectorX<Scalar>& data() const { return data_; }
  const Shape& shape() const { return shape_; }
  Eigen::Index size() const { return data_.size(); }
  std::size_t dimension() const { return shape_.size(); }
  Scalar measure() const { return static_cast<Scalar>(data_.size()); }

  Scalar operator[](Eigen::Index i) const { return data_[i]; }

  Eigen::Index rows() const { return shape_.at(0); }
  Eigen::Index cols() const { return shape_.at(1); }

  /// Row-major 2D view; only valid for d == 2.
  Eigen::Map<const RowMajorMatrix> as_matrix() const {
    if (dimension() != 2) throw UnsupportedDimension("matrix view requires a 2D image");
    return Eigen::Map<const RowMajorMatrix>(data_.data(), rows(), cols());
  }

  /// Same shape, new samples.
  Image with_data(VectorX<Scalar> data) const { return Image(std::move(data), shape_); }

  template <typename Other>
  Image<Other> cast() const {
    return Image<Other>(data_.template cast<Other>(), shape_);
  }

private:
  VectorX<Scalar> data_;
  Shape shape_;
};

template <typename Scalar>
void require_same_shape(const Image<Scalar>& a, const Image<Scalar>& b, const char* what) {
  if (a.shape() != b.shape()) throw InvalidArgument(std::string(what) + ": image shapes differ");
}

}  // namespace nfr
