#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace musicdoa;
using Catch::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ComplexMatrix exact_noise_subspace(const ArrayGeometry& geom, double theta) {
    SourceScenario scen;
    scen.doas = {theta};
    scen.snr_db = kInf;
    scen.snapshots = 1;
    return noise_subspace(eigendecompose_hermitian(analytic_covariance(geom, scen)), 1);
}

} // namespace

TEST_CASE("slope vanishes at an exact subspace") {
    const ArrayGeometry geom = uniform_linear(9, 8);
    const double theta = deg2rad(60.0);
    const ComplexMatrix Vn = exact_noise_subspace(geom, theta);
    REQUIRE(std::abs(null_spectrum_slope(geom, theta, Vn)) < 1e-9);
}

TEST_CASE("slope matches the first central difference of the null spectrum") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 30; ++i) {
        const ArrayGeometry geom = testutil::random_geometry(rng);
        const double theta = testutil::random_direction(rng);
        const int M = geom.sensor_count();
        const ComplexMatrix Vn = testutil::random_orthonormal(M, M - 1, rng);

        const double analytic = null_spectrum_slope(geom, theta, Vn);
        const double fd = testutil::null_spectrum_fd1(geom, theta, Vn, 1e-5);
        REQUIRE(analytic == Approx(fd).epsilon(1e-4).margin(1e-10));
    }
}

TEST_CASE("curvature matches the second central difference of the null spectrum") {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 30; ++i) {
        const ArrayGeometry geom = testutil::random_geometry(rng);
        const double theta = testutil::random_direction(rng);
        const int M = geom.sensor_count();
        const ComplexMatrix Vn = testutil::random_orthonormal(M, M - 1, rng);

        const double analytic = null_spectrum_curvature(geom, theta, Vn);
        const double fd = testutil::null_spectrum_fd2(geom, theta, Vn, 1e-4);
        REQUIRE(analytic == Approx(fd).epsilon(1e-3).margin(1e-8));
    }
}

TEST_CASE("two-sensor case agrees with the hand-worked closed form") {
    // M = 2, p = {0, 0.5}: a(theta) = (1, e^{j phi}) with phi = pi cos(theta).
    // For a single unit noise vector v, f = 1 + 2 Re{c e^{-j phi}} with
    // c = conj(v1) v2, hence
    //   f' = 2 phi' Im{c e^{-j phi}},
    //   f'' = 2 phi'' Im{c e^{-j phi}} - 2 phi'^2 Re{c e^{-j phi}}.
    const ArrayGeometry geom = uniform_linear(2, 1);
    ComplexMatrix Vn(2, 1);
    Vn(0, 0) = Complex(0.6, 0.0);
    Vn(1, 0) = Complex(0.0, 0.8);

    const double theta = 1.0;
    const double phi = kPi * std::cos(theta);
    const double phi_d1 = -kPi * std::sin(theta);
    const double phi_d2 = -kPi * std::cos(theta);
    const Complex c = std::conj(Vn(0, 0)) * Vn(1, 0);
    const Complex rot = c * std::polar(1.0, -phi);

    const double expected_slope = 2.0 * phi_d1 * rot.imag();
    const double expected_curvature = 2.0 * phi_d2 * rot.imag() - 2.0 * phi_d1 * phi_d1 * rot.real();

    REQUIRE(null_spectrum_slope(geom, theta, Vn) == Approx(expected_slope).epsilon(1e-12));
    REQUIRE(null_spectrum_curvature(geom, theta, Vn) == Approx(expected_curvature).epsilon(1e-12));
}

TEST_CASE("curvature at an exact subspace reduces to the derivative term") {
    const ArrayGeometry geom = uniform_linear(7, 6);
    const double theta = deg2rad(50.0);
    const ComplexMatrix Vn = exact_noise_subspace(geom, theta);
    const double curvature = null_spectrum_curvature(geom, theta, Vn);
    REQUIRE(curvature > 0.0);
    const double t2 = (Vn.adjoint() * steering_derivative(geom, theta, 1.0, 1)).squaredNorm();
    REQUIRE(curvature == Approx(2.0 * t2).epsilon(1e-9));
}

TEST_CASE("slope, curvature and shift depend only on the projector") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 10; ++i) {
        const ArrayGeometry geom = testutil::random_geometry(rng);
        const double theta = testutil::random_direction(rng);
        const int M = geom.sensor_count();
        const int cols = M - 1;
        const ComplexMatrix Vn = testutil::random_orthonormal(M, cols, rng);
        const ComplexMatrix U = testutil::random_orthonormal(cols, cols, rng);
        const ComplexMatrix mixed = Vn * U;

        REQUIRE(null_spectrum_slope(geom, theta, mixed) ==
                Approx(null_spectrum_slope(geom, theta, Vn)).epsilon(1e-12).margin(1e-12));
        REQUIRE(null_spectrum_curvature(geom, theta, mixed) ==
                Approx(null_spectrum_curvature(geom, theta, Vn)).epsilon(1e-12).margin(1e-12));

        const PerturbationReport a = doa_perturbation(geom, theta, Vn);
        const PerturbationReport b = doa_perturbation(geom, theta, mixed);
        REQUIRE(a.degenerate == b.degenerate);
        if (!a.degenerate)
            REQUIRE(*b.delta_theta == Approx(*a.delta_theta).epsilon(1e-10).margin(1e-15));
    }
}

TEST_CASE("three-term and folded curvature forms coincide") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 20; ++i) {
        const ArrayGeometry geom = testutil::random_geometry(rng);
        const double theta = testutil::random_direction(rng);
        const int M = geom.sensor_count();
        const ComplexMatrix Vn = testutil::random_orthonormal(M, M - 2 > 0 ? M - 2 : 1, rng);

        const ComplexVector a = steering_vector(geom, theta);
        const ComplexVector a1 = steering_derivative(geom, theta, 1.0, 1);
        const ComplexVector a2 = steering_derivative(geom, theta, 1.0, 2);
        const ComplexVector w = Vn.adjoint() * a;
        const ComplexVector w1 = Vn.adjoint() * a1;
        const ComplexVector w2 = Vn.adjoint() * a2;

        const Complex t1 = w2.dot(w);       // a2^H Vn Vn^H a
        const Complex t3 = w.dot(w2);       // a^H Vn Vn^H a2
        const double t2 = w1.squaredNorm();

        const Complex three_term = t1 + 2.0 * t2 + t3;
        REQUIRE(std::abs(three_term.imag()) <= 1e-12 * std::abs(three_term));

        const double folded = null_spectrum_curvature(geom, theta, Vn);
        REQUIRE(three_term.real() == Approx(folded).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("shift vanishes at an exact subspace and flags degeneracy") {
    const ArrayGeometry geom = uniform_linear(6, 5);
    const double theta = deg2rad(60.0);

    const PerturbationReport exact = doa_perturbation(geom, theta, exact_noise_subspace(geom, theta));
    REQUIRE_FALSE(exact.degenerate);
    REQUIRE(std::abs(*exact.delta_theta) < 1e-9);

    // A subspace orthogonal to both a and a' kills slope and curvature.
    ComplexMatrix span(6, 2);
    span.col(0) = steering_vector(geom, theta);
    span.col(1) = steering_derivative(geom, theta, 1.0, 1);
    Eigen::HouseholderQR<ComplexMatrix> qr(span);
    const ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(6, 6);
    const ComplexMatrix degenerate_vn = Q.rightCols(2);

    const PerturbationReport degen = doa_perturbation(geom, theta, degenerate_vn);
    REQUIRE(degen.degenerate);
    REQUIRE_FALSE(degen.delta_theta.has_value());
}

TEST_CASE("composition and expanded-quotient routes agree") {
    std::mt19937_64 rng(47);
    for (int i = 0; i < 20; ++i) {
        const ArrayGeometry geom = testutil::random_geometry(rng);
        const double theta = testutil::random_direction(rng);
        const int M = geom.sensor_count();
        const ComplexMatrix Vn = testutil::random_orthonormal(M, M - 1, rng);

        const PerturbationReport rep = doa_perturbation(geom, theta, Vn);
        REQUIRE_FALSE(rep.degenerate);

        // Expanded route, assembled from raw steering vectors.
        const ComplexVector a = steering_vector(geom, theta);
        const ComplexVector a1 = steering_derivative(geom, theta, 1.0, 1);
        const ComplexVector a2 = steering_derivative(geom, theta, 1.0, 2);
        const ComplexMatrix P = Vn * Vn.adjoint();
        const double numerator = -2.0 * (a.dot(P * a1)).real();
        const double denominator = (a1.dot(P * a1)).real() + (a.dot(P * a2)).real();
        REQUIRE(*rep.delta_theta == Approx(numerator / denominator).epsilon(1e-12).margin(1e-15));
    }
}

TEST_CASE("shift tracks the grid-search displacement of a noisy trial") {
    // The closed-form shift is -2 f'/f''; the displacement of the spectrum
    // minimum itself is the Newton step -f'/f''. The prediction therefore
    // carries an inherent factor of 2 over the measured displacement, and
    // the per-trial ratio concentrates tightly around it.
    const ArrayGeometry geom = uniform_linear(11, 10);
    const double theta_true = deg2rad(60.0);
    const AngleGrid grid = sector_grid(0.01);
    const ComplexMatrix columns = steering_grid(geom, grid);

    const int trials = 100;
    int agree = 0, usable = 0;
    std::vector<double> ratios;
    for (int t = 0; t < trials; ++t) {
        SourceScenario scen;
        scen.doas = {theta_true};
        scen.snr_db = 0.0;
        scen.snapshots = 200;
        scen.seed = derive_seed(1, {static_cast<std::uint64_t>(t)});

        const CovarianceMatrix R = sample_covariance(generate_snapshots(geom, scen));
        const ComplexMatrix Vn = noise_subspace(eigendecompose_hermitian(R), 1);
        const double theta_hat = estimate_doa(music_spectrum(columns, Vn, grid), 1).front();
        const double actual = theta_hat - theta_true;
        const PerturbationReport rep = doa_perturbation(geom, theta_true, Vn);

        if (std::abs(actual) < 1e-12 || rep.degenerate) continue; // grid-quantized to zero
        ++usable;
        const double ratio = *rep.delta_theta / actual;
        ratios.push_back(ratio);
        if (ratio > 1.0 && ratio < 4.0) ++agree;
    }
    REQUIRE(usable >= 90);
    REQUIRE(agree >= (usable * 9) / 10);

    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    REQUIRE(median == Approx(2.0).margin(0.4));
}

TEST_CASE("shift scales linearly with a small subspace contamination") {
    const ArrayGeometry geom = uniform_linear(8, 7);
    const double theta = deg2rad(60.0);

    const SubspaceDecomposition dec = [&] {
        SourceScenario scen;
        scen.doas = {theta};
        scen.snr_db = kInf;
        scen.snapshots = 1;
        return eigendecompose_hermitian(analytic_covariance(geom, scen));
    }();
    const ComplexVector signal_dir = dec.eigenvectors.col(0);
    const ComplexMatrix Vn0 = dec.eigenvectors.rightCols(7);

    std::vector<double> per_eps;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        ComplexMatrix Vn = Vn0;
        Vn.col(0) = (Vn0.col(0) + eps * signal_dir) / std::sqrt(1.0 + eps * eps);
        const PerturbationReport rep = doa_perturbation(geom, theta, Vn);
        REQUIRE_FALSE(rep.degenerate);
        per_eps.push_back(*rep.delta_theta / eps);
    }
    REQUIRE(per_eps[1] == Approx(per_eps[0]).epsilon(0.1));
    REQUIRE(per_eps[2] == Approx(per_eps[1]).epsilon(0.1));
}

TEST_CASE("theoretical RMSE is zero without noise and reproducible with it") {
    const ArrayGeometry geom = uniform_linear(11, 10);
    SourceScenario scen;
    scen.doas = {deg2rad(60.0)};
    scen.snr_db = kInf;
    scen.snapshots = 200;

    const TheoreticalRmse clean = theoretical_rmse(geom, scen, 10, 7);
    REQUIRE(clean.excluded == 0);
    REQUIRE(clean.rmse_paper < 1e-9);

    scen.snr_db = 0.0;
    const TheoreticalRmse a = theoretical_rmse(geom, scen, 20, 7);
    const TheoreticalRmse b = theoretical_rmse(geom, scen, 20, 7);
    REQUIRE(a.rmse_paper == b.rmse_paper);
    REQUIRE(a.rmse_paper > 0.0);
    REQUIRE(a.rmse_paper == Approx(a.rmse_standard * std::sqrt(20.0)).epsilon(1e-12));

    REQUIRE_THROWS_AS(theoretical_rmse(geom, scen, 0, 7), std::invalid_argument);
}
