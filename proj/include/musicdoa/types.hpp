#pragma once

#include <Eigen/Dense>
#include <complex>

namespace musicdoa {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// M x N block of array snapshots, column t = x(t).
using SnapshotMatrix = ComplexMatrix;

/// M x M Hermitian covariance.
using CovarianceMatrix = ComplexMatrix;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / kPi); }

} // namespace musicdoa
