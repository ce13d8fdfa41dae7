#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "musicdoa/geometry.hpp"
#include "musicdoa/rng.hpp"
#include "musicdoa/types.hpp"

namespace musicdoa {

/// Narrowband source scenario. SNR is per-source signal power over
/// per-sensor noise power, both at one sensor; +infinity disables noise.
struct SourceScenario {
    std::vector<double> doas;  // radians, pairwise distinct, in (0, pi)
    double snr_db = 0.0;
    int snapshots = 1;
    double wavelength = 1.0;
    std::uint64_t seed = 0;

    int source_count() const { return static_cast<int>(doas.size()); }

    /// Noise power sigma^2 = 10^(-snr_db/10); zero when noise is disabled.
    double noise_power() const {
        if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
        return std::pow(10.0, -snr_db / 10.0);
    }
};

namespace detail {

inline void check_scenario(const ArrayGeometry& geom, const SourceScenario& scen) {
    const int D = scen.source_count();
    const int M = geom.sensor_count();
    if (D < 1)
        throw std::invalid_argument("scenario needs at least one source");
    if (D >= M)
        throw std::invalid_argument("scenario has " + std::to_string(D) +
                                    " sources but the model requires D < M = " +
                                    std::to_string(M));
    if (scen.snapshots < 1)
        throw std::invalid_argument("scenario needs at least one snapshot");
    if (std::isnan(scen.snr_db))
        throw std::invalid_argument("scenario SNR is NaN");
    check_wavelength(scen.wavelength);
    for (std::size_t i = 0; i < scen.doas.size(); ++i) {
        check_direction(scen.doas[i]);
        for (std::size_t j = i + 1; j < scen.doas.size(); ++j)
            if (scen.doas[i] == scen.doas[j])
                throw std::invalid_argument("scenario DOAs must be pairwise distinct");
    }
}

/// M x D matrix of steering vectors, one column per source.
inline ComplexMatrix steering_matrix(const ArrayGeometry& geom, const SourceScenario& scen) {
    ComplexMatrix A(geom.sensor_count(), scen.source_count());
    for (int d = 0; d < scen.source_count(); ++d)
        A.col(d) = steering_vector(geom, scen.doas[d], scen.wavelength);
    return A;
}

} // namespace detail

/// Synthetic snapshots x(t) = A s(t) + n(t). Sources are unit-power
/// circular complex Gaussian, noise is circular complex Gaussian with
/// power sigma^2 per sensor. Deterministic given the scenario seed: all
/// source symbols are drawn before any noise, column by column.
inline SnapshotMatrix generate_snapshots(const ArrayGeometry& geom, const SourceScenario& scen) {
    detail::check_scenario(geom, scen);
    const int M = geom.sensor_count();
    const int D = scen.source_count();
    const int N = scen.snapshots;

    GaussianStream rng(scen.seed);

    ComplexMatrix S(D, N);
    for (int n = 0; n < N; ++n)
        for (int d = 0; d < D; ++d)
            S(d, n) = rng.next_complex(1.0);

    SnapshotMatrix X = detail::steering_matrix(geom, scen) * S;

    const double sigma2 = scen.noise_power();
    if (sigma2 > 0.0) {
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m)
                X(m, n) += rng.next_complex(sigma2);
    }
    return X;
}

/// Sample covariance R = (1/N) sum_n x(t_n) x(t_n)^H, hermitized.
inline CovarianceMatrix sample_covariance(const SnapshotMatrix& x) {
    if (x.cols() < 1)
        throw std::invalid_argument("sample_covariance: need at least one snapshot");
    CovarianceMatrix R = (x * x.adjoint()) / static_cast<double>(x.cols());
    return (R + R.adjoint()) / 2.0;
}

/// Exact covariance R = A A^H + sigma^2 I for unit-power uncorrelated
/// sources (P = I).
inline CovarianceMatrix analytic_covariance(const ArrayGeometry& geom, const SourceScenario& scen) {
    detail::check_scenario(geom, scen);
    const ComplexMatrix A = detail::steering_matrix(geom, scen);
    CovarianceMatrix R = A * A.adjoint();
    R += scen.noise_power() * ComplexMatrix::Identity(geom.sensor_count(), geom.sensor_count());
    return (R + R.adjoint()) / 2.0;
}

} // namespace musicdoa
