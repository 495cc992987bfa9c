#pragma once

#include <Eigen/Dense>

namespace radnmt {

// Row-major so that an embedding row is contiguous and a matrix serializes in
// its in-memory order.
template <class Real>
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Real>
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

}  // namespace radnmt
