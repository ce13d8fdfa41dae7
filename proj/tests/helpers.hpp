#pragma once

// Shared test utilities: seeded random draws of geometries, angles and
// orthonormal noise subspaces, plus finite-difference oracles that stay
// independent of the analytic implementation paths they check.

#include <random>

#include "musicdoa/musicdoa.hpp"

namespace testutil {

using namespace musicdoa;

inline ArrayGeometry random_geometry(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> sensors(3, 12);
    std::uniform_int_distribution<int> scheme(0, 2);
    std::uniform_real_distribution<double> growth(1.05, 2.0);
    std::uniform_real_distribution<double> length(2.5, 6.0);
    const int M = sensors(rng);
    switch (scheme(rng)) {
    case 0: return uniform_linear(M, M - 1);
    case 1: return nonuniform_progressive(M, length(rng), SpacingScheme::arithmetic, growth(rng));
    default: return nonuniform_progressive(M, length(rng), SpacingScheme::geometric, growth(rng));
    }
}

inline double random_direction(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> theta(deg2rad(15.0), deg2rad(165.0));
    return theta(rng);
}

inline ComplexMatrix random_complex_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix A(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            A(i, j) = Complex(gauss(rng), gauss(rng));
    return A;
}

/// Column-orthonormal M x (M-D) block, uniformly random via QR.
inline ComplexMatrix random_orthonormal(int rows, int cols, std::mt19937_64& rng) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_complex_matrix(rows, cols, rng));
    return qr.householderQ() * ComplexMatrix::Identity(rows, cols);
}

inline ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
    const ComplexMatrix A = random_complex_matrix(n, n, rng);
    return (A + A.adjoint()) / 2.0;
}

/// k-th central finite difference of the steering vector.
inline ComplexVector steering_fd(const ArrayGeometry& geom, double theta, double wavelength,
                                 int order, double h) {
    if (order == 1)
        return (steering_vector(geom, theta + h, wavelength) -
                steering_vector(geom, theta - h, wavelength)) /
               (2.0 * h);
    return (steering_vector(geom, theta + h, wavelength) -
            2.0 * steering_vector(geom, theta, wavelength) +
            steering_vector(geom, theta - h, wavelength)) /
           (h * h);
}

/// Central finite differences of the null spectrum.
inline double null_spectrum_fd1(const ArrayGeometry& geom, double theta, const ComplexMatrix& Vn,
                                double h) {
    return (null_spectrum(geom, theta + h, Vn) - null_spectrum(geom, theta - h, Vn)) / (2.0 * h);
}

inline double null_spectrum_fd2(const ArrayGeometry& geom, double theta, const ComplexMatrix& Vn,
                                double h) {
    return (null_spectrum(geom, theta + h, Vn) - 2.0 * null_spectrum(geom, theta, Vn) +
            null_spectrum(geom, theta - h, Vn)) /
           (h * h);
}

} // namespace testutil
