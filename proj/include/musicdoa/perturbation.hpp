#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "musicdoa/geometry.hpp"
#include "musicdoa/rmse.hpp"
#include "musicdoa/rng.hpp"
#include "musicdoa/signal.hpp"
#include "musicdoa/subspace.hpp"
#include "musicdoa/types.hpp"

namespace musicdoa {

/// First-order DOA perturbation at an angle, from a (generally estimated)
/// noise subspace. slope and curvature are the first and second angular
/// derivatives of the null spectrum; the predicted shift of the spectrum
/// minimum is delta_theta = -2 slope / curvature, absent when the
/// curvature is degenerate.
struct PerturbationReport {
    double theta = 0.0;
    double slope = 0.0;
    double curvature = 0.0;
    std::optional<double> delta_theta;
    bool degenerate = false;
};

/// d/dtheta of the null spectrum: 2 Re{ a^H Vn Vn^H a' }.
inline double null_spectrum_slope(const ArrayGeometry& geom, double theta,
                                  const ComplexMatrix& Vn, double wavelength = 1.0) {
    const ComplexVector w = Vn.adjoint() * steering_vector(geom, theta, wavelength);
    const ComplexVector w1 = Vn.adjoint() * steering_derivative(geom, theta, wavelength, 1);
    return 2.0 * w.dot(w1).real();
}

/// d^2/dtheta^2 of the null spectrum: 2 (T2 + Re T3) with
/// T2 = a'^H Vn Vn^H a' and T3 = a^H Vn Vn^H a''.
inline double null_spectrum_curvature(const ArrayGeometry& geom, double theta,
                                      const ComplexMatrix& Vn, double wavelength = 1.0) {
    const ComplexVector w = Vn.adjoint() * steering_vector(geom, theta, wavelength);
    const ComplexVector w1 = Vn.adjoint() * steering_derivative(geom, theta, wavelength, 1);
    const ComplexVector w2 = Vn.adjoint() * steering_derivative(geom, theta, wavelength, 2);
    const double t2 = w1.squaredNorm();
    const double t3_re = w.dot(w2).real();
    return 2.0 * (t2 + t3_re);
}

/// Closed-form first-order shift of the null-spectrum minimum.
inline PerturbationReport doa_perturbation(const ArrayGeometry& geom, double theta,
                                           const ComplexMatrix& Vn, double wavelength = 1.0) {
    PerturbationReport report;
    report.theta = theta;
    report.slope = null_spectrum_slope(geom, theta, Vn, wavelength);
    report.curvature = null_spectrum_curvature(geom, theta, Vn, wavelength);
    report.degenerate = std::abs(report.curvature) <= 1e-12 * (1.0 + std::abs(report.slope));
    if (!report.degenerate)
        report.delta_theta = -2.0 * report.slope / report.curvature;
    return report;
}

/// RMSE of the first-order shift over seeded Monte-Carlo trials, both
/// normalizations, in radians.
struct TheoreticalRmse {
    double rmse_paper = 0.0;
    double rmse_standard = 0.0;
    int trials = 0;
    int excluded = 0; // degenerate-curvature trials, dropped from the aggregates
};

/// Per trial: generate snapshots, estimate the noise subspace from the
/// sample covariance, and evaluate the predicted shift at the true DOAs.
/// Trial t draws from the stream (master_seed, t).
inline TheoreticalRmse theoretical_rmse(const ArrayGeometry& geom, const SourceScenario& scen,
                                        int trials, std::uint64_t master_seed) {
    if (trials < 1)
        throw std::invalid_argument("theoretical_rmse: need at least one trial");

    std::vector<double> shifts;
    shifts.reserve(static_cast<std::size_t>(trials) * scen.doas.size());
    int excluded = 0;

    for (int t = 0; t < trials; ++t) {
        SourceScenario trial = scen;
        trial.seed = derive_seed(master_seed, {static_cast<std::uint64_t>(t)});
        const CovarianceMatrix R = sample_covariance(generate_snapshots(geom, trial));
        const ComplexMatrix Vn = noise_subspace(eigendecompose_hermitian(R), trial.source_count());

        bool trial_ok = true;
        std::vector<double> trial_shifts;
        for (double doa : trial.doas) {
            const PerturbationReport rep = doa_perturbation(geom, doa, Vn, trial.wavelength);
            if (rep.degenerate) {
                trial_ok = false;
                break;
            }
            trial_shifts.push_back(*rep.delta_theta);
        }
        if (!trial_ok) {
            ++excluded;
            continue;
        }
        shifts.insert(shifts.end(), trial_shifts.begin(), trial_shifts.end());
    }

    TheoreticalRmse result;
    result.trials = trials;
    result.excluded = excluded;
    if (!shifts.empty()) {
        result.rmse_paper = rmse(shifts, RmseMode::paper);
        result.rmse_standard = rmse(shifts, RmseMode::standard);
    }
    return result;
}

} // namespace musicdoa
