#pragma once

#include <Eigen/Dense>
#include <complex>

namespace perdec {

using Complex = std::complex<double>;

/// Dense column-major types, templated on scalar in the Eigen fashion.
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// The ambient representation used throughout: complex double precision.
using Matrix = DenseMatrix<Complex>;
using Vector = DenseVector<Complex>;
using RealVector = DenseVector<double>;

using Index = Eigen::Index;

inline double machine_eps() { return std::numeric_limits<double>::epsilon(); }

}  // namespace perdec
