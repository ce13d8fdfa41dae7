#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "musicdoa/geometry.hpp"
#include "musicdoa/types.hpp"

namespace musicdoa {

/// Floor for the MUSIC spectrum denominator; keeps exact nulls from
/// dividing by zero while preserving the argmax.
inline constexpr double kSpectrumFloor = 1e-30;

/// Eigenpairs of a Hermitian covariance, eigenvalues descending and
/// eigenvector columns paired to them.
struct SubspaceDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    int dimension() const { return static_cast<int>(eigenvalues.size()); }
};

/// Descending eigendecomposition R = Phi Lambda Phi^H.
inline SubspaceDecomposition eigendecompose_hermitian(const CovarianceMatrix& R) {
    if (!R.allFinite())
        throw std::invalid_argument("eigendecompose_hermitian: covariance has non-finite entries");
    if (R.rows() != R.cols())
        throw std::invalid_argument("eigendecompose_hermitian: covariance must be square");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(R);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose_hermitian: eigensolver did not converge");

    // Eigen sorts ascending; flip to descending.
    SubspaceDecomposition dec;
    dec.eigenvalues = solver.eigenvalues().reverse();
    dec.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return dec;
}

/// Noise eigenvector block V_n: the M-D eigenvector columns paired with
/// the smallest eigenvalues.
inline ComplexMatrix noise_subspace(const SubspaceDecomposition& dec, int source_count) {
    const int M = dec.dimension();
    if (source_count < 1 || source_count >= M)
        throw std::invalid_argument("noise_subspace: source count must satisfy 1 <= D < M, got D = " +
                                    std::to_string(source_count) + ", M = " + std::to_string(M));
    return dec.eigenvectors.rightCols(M - source_count);
}

/// Uniform angular grid over (start, stop), inclusive of both ends.
struct AngleGrid {
    double start = 0.0; // radians
    double stop = 0.0;
    double step = 0.0;

    int point_count() const {
        return static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    }
    double angle(int k) const { return start + k * step; }
};

/// Search grid spanning (0, 180) degrees exclusive at the given resolution.
inline AngleGrid sector_grid(double resolution_deg) {
    if (!(resolution_deg > 0.0))
        throw std::invalid_argument("sector_grid: resolution must be positive");
    const double step = deg2rad(resolution_deg);
    return {step, kPi - step, step};
}

namespace detail {

inline void check_grid(const AngleGrid& grid) {
    if (!(grid.step > 0.0))
        throw std::invalid_argument("grid step must be positive");
    if (!(grid.start > 0.0 && grid.stop < kPi && grid.start <= grid.stop))
        throw std::invalid_argument("grid must lie within (0, pi)");
}

} // namespace detail

/// MUSIC spatial spectrum evaluated on a grid.
struct SpectrumGrid {
    double start = 0.0; // radians
    double stop = 0.0;
    double step = 0.0;
    std::vector<double> values;

    int point_count() const { return static_cast<int>(values.size()); }
    double angle(int k) const { return start + k * step; }
};

/// Null spectrum f(theta) = a^H(theta) Vn Vn^H a(theta); zero exactly at
/// the true DOAs when Vn is exact.
inline double null_spectrum(const ArrayGeometry& geom, double theta, const ComplexMatrix& Vn,
                            double wavelength = 1.0) {
    const ComplexVector a = steering_vector(geom, theta, wavelength);
    const ComplexVector w = Vn.adjoint() * a;
    const Complex q = a.dot(Vn * w); // a^H Vn (Vn^H a)
    return std::max(q.real(), 0.0);
}

/// Columns of steering vectors over a grid; reusable across trials that
/// share the geometry.
inline ComplexMatrix steering_grid(const ArrayGeometry& geom, const AngleGrid& grid,
                                   double wavelength = 1.0) {
    detail::check_grid(grid);
    ComplexMatrix A(geom.sensor_count(), grid.point_count());
    for (int k = 0; k < grid.point_count(); ++k)
        A.col(k) = steering_vector(geom, grid.angle(k), wavelength);
    return A;
}

/// MUSIC spectrum psi(theta) = 1 / (a^H Vn Vn^H a) over precomputed
/// steering columns.
inline SpectrumGrid music_spectrum(const ComplexMatrix& steering_columns, const ComplexMatrix& Vn,
                                   const AngleGrid& grid) {
    detail::check_grid(grid);
    if (steering_columns.cols() != grid.point_count())
        throw std::invalid_argument("music_spectrum: steering column count does not match grid");

    SpectrumGrid spectrum{grid.start, grid.stop, grid.step, {}};
    spectrum.values.resize(grid.point_count());
    const ComplexMatrix W = Vn.adjoint() * steering_columns; // (M-D) x K
    for (int k = 0; k < grid.point_count(); ++k)
        spectrum.values[k] = 1.0 / std::max(W.col(k).squaredNorm(), kSpectrumFloor);
    return spectrum;
}

inline SpectrumGrid music_spectrum(const ArrayGeometry& geom, const ComplexMatrix& Vn,
                                   const AngleGrid& grid, double wavelength = 1.0) {
    return music_spectrum(steering_grid(geom, grid, wavelength), Vn, grid);
}

/// Grid angles of the D largest strict local maxima, ascending. Interior
/// points only: a spectrum rising monotonically into the sector edge has
/// no peak there. Ties rank the smaller angle first.
inline std::vector<double> estimate_doa(const SpectrumGrid& spectrum, int source_count) {
    if (source_count < 1)
        throw std::invalid_argument("estimate_doa: source count must be >= 1");

    const auto& v = spectrum.values;
    std::vector<int> peaks;
    for (int k = 1; k + 1 < spectrum.point_count(); ++k)
        if (v[k] > v[k - 1] && v[k] > v[k + 1])
            peaks.push_back(k);

    if (static_cast<int>(peaks.size()) < source_count)
        throw std::runtime_error("estimate_doa: found " + std::to_string(peaks.size()) +
                                 " spectrum peaks but " + std::to_string(source_count) +
                                 " sources were requested (short by " +
                                 std::to_string(source_count - static_cast<int>(peaks.size())) +
                                 "); the grid cannot resolve the sources");

    std::sort(peaks.begin(), peaks.end(), [&](int a, int b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a < b; // tie: smaller angle first
    });
    peaks.resize(source_count);
    std::sort(peaks.begin(), peaks.end());

    std::vector<double> doas(peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i)
        doas[i] = spectrum.angle(peaks[i]);
    return doas;
}

} // namespace musicdoa
