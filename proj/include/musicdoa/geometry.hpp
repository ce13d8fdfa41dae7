#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "musicdoa/types.hpp"

namespace musicdoa {

enum class SpacingScheme { uniform, arithmetic, geometric };

inline std::string to_string(SpacingScheme s) {
    switch (s) {
    case SpacingScheme::uniform: return "uniform";
    case SpacingScheme::arithmetic: return "arithmetic";
    case SpacingScheme::geometric: return "geometric";
    }
    return "unknown";
}

inline SpacingScheme parse_scheme(const std::string& s) {
    if (s == "uniform") return SpacingScheme::uniform;
    if (s == "arithmetic") return SpacingScheme::arithmetic;
    if (s == "geometric") return SpacingScheme::geometric;
    throw std::invalid_argument("unknown spacing scheme: '" + s + "'");
}

/// Sensor coordinate in wavelength units.
struct SensorPosition {
    double p = 0.0;
    double q = 0.0;
};

/// Planar sensor layout. Positions are in wavelength units, the first
/// sensor sits at the origin and linear arrays keep q = 0 with strictly
/// increasing p. array_length is exactly p_M - p_1.
struct ArrayGeometry {
    std::vector<SensorPosition> positions;
    double array_length = 0.0;
    SpacingScheme scheme = SpacingScheme::uniform;
    double growth = 1.0;

    int sensor_count() const { return static_cast<int>(positions.size()); }

    /// Spacing between sensor k and k+1 (0-based, k < M-1).
    double spacing(int k) const { return positions[k + 1].p - positions[k].p; }
};

namespace detail {

/// Builds a linear geometry from consecutive spacings, rescaled so the
/// total span matches `target_length`.
inline ArrayGeometry from_spacings(std::vector<double> spacings, double target_length,
                                   SpacingScheme scheme, double growth) {
    const double total = std::accumulate(spacings.begin(), spacings.end(), 0.0);
    const double scale = target_length / total;
    for (double& d : spacings) d *= scale;

    ArrayGeometry geom;
    geom.positions.resize(spacings.size() + 1);
    geom.positions[0] = {0.0, 0.0};
    for (std::size_t k = 0; k < spacings.size(); ++k)
        geom.positions[k + 1] = {geom.positions[k].p + spacings[k], 0.0};
    geom.array_length = geom.positions.back().p - geom.positions.front().p;
    geom.scheme = scheme;
    geom.growth = growth;
    return geom;
}

} // namespace detail

/// Uniform linear array at half-wavelength spacing. The span is tied to
/// the sensor count: `half_wavelength_spacings` must equal sensors-1.
inline ArrayGeometry uniform_linear(int sensors, int half_wavelength_spacings) {
    if (sensors < 2)
        throw std::invalid_argument("uniform_linear: need at least 2 sensors, got " +
                                    std::to_string(sensors));
    if (half_wavelength_spacings != sensors - 1)
        throw std::invalid_argument(
            "uniform_linear: a uniform array of " + std::to_string(sensors) +
            " sensors spans exactly " + std::to_string(sensors - 1) +
            " half-wavelengths, got " + std::to_string(half_wavelength_spacings));

    ArrayGeometry geom;
    geom.positions.resize(sensors);
    for (int m = 0; m < sensors; ++m)
        geom.positions[m] = {0.5 * m, 0.0};
    geom.array_length = geom.positions.back().p;
    geom.scheme = SpacingScheme::uniform;
    geom.growth = 1.0;
    return geom;
}

/// Linear array whose consecutive spacings grow along the array, rescaled
/// so the span equals `array_length` (wavelength units).
///
/// For the arithmetic scheme `growth` is the ratio of the last spacing to
/// the first; for the geometric scheme it is the common ratio. growth = 1
/// degenerates to uniform spacing and is tagged as such.
inline ArrayGeometry nonuniform_progressive(int sensors, double array_length,
                                            SpacingScheme scheme, double growth) {
    if (sensors < 2)
        throw std::invalid_argument("nonuniform_progressive: need at least 2 sensors, got " +
                                    std::to_string(sensors));
    if (!(array_length > 0.0))
        throw std::invalid_argument("nonuniform_progressive: array_length must be positive");
    if (!(growth >= 1.0))
        throw std::invalid_argument(
            "nonuniform_progressive: growth must be >= 1 (spacing must not decrease), got " +
            std::to_string(growth));
    if (scheme == SpacingScheme::uniform)
        throw std::invalid_argument("nonuniform_progressive: use uniform_linear for uniform arrays");

    const int n = sensors - 1; // spacing count
    std::vector<double> spacings(n);

    if (growth == 1.0) {
        // Degenerate progression: equal spacing, tagged uniform.
        std::fill(spacings.begin(), spacings.end(), array_length / n);
        return detail::from_spacings(std::move(spacings), array_length,
                                     SpacingScheme::uniform, 1.0);
    }

    if (scheme == SpacingScheme::geometric) {
        for (int k = 0; k < n; ++k)
            spacings[k] = std::pow(growth, k);
    } else {
        // Arithmetic: spacings run linearly from d to growth*d.
        if (n == 1)
            throw std::invalid_argument(
                "nonuniform_progressive: arithmetic growth ratio is unrealizable with a "
                "single spacing (2 sensors); use growth = 1");
        for (int k = 0; k < n; ++k)
            spacings[k] = 1.0 + (growth - 1.0) * k / (n - 1);
    }
    return detail::from_spacings(std::move(spacings), array_length, scheme, growth);
}

namespace detail {

inline void check_direction(double theta) {
    if (!(theta > 0.0 && theta < kPi))
        throw std::invalid_argument("direction must lie in (0, pi) radians, got " +
                                    std::to_string(theta));
}

inline void check_wavelength(double wavelength) {
    if (!(wavelength > 0.0))
        throw std::invalid_argument("wavelength must be positive");
}

} // namespace detail

/// Steering vector a(theta): per-sensor phase response to a unit plane
/// wave from direction theta. Element m is
///   exp(j (2 pi / wavelength) (p_m cos(theta) + q_m sin(theta))),
/// so a sensor at the origin contributes exactly 1.
inline ComplexVector steering_vector(const ArrayGeometry& geom, double theta,
                                     double wavelength = 1.0) {
    detail::check_direction(theta);
    detail::check_wavelength(wavelength);
    const double k = 2.0 * kPi / wavelength;
    const double c = std::cos(theta), s = std::sin(theta);
    ComplexVector a(geom.sensor_count());
    for (int m = 0; m < geom.sensor_count(); ++m) {
        const auto& pos = geom.positions[m];
        a[m] = std::polar(1.0, k * (pos.p * c + pos.q * s));
    }
    return a;
}

/// First or second derivative of the steering vector with respect to
/// theta. With phase(theta) = k (p cos(theta) + q sin(theta)) per sensor:
///   order 1:  j phase'  * a
///   order 2: (j phase'' - phase'^2) * a
inline ComplexVector steering_derivative(const ArrayGeometry& geom, double theta,
                                         double wavelength, int order) {
    detail::check_direction(theta);
    detail::check_wavelength(wavelength);
    if (order != 1 && order != 2)
        throw std::invalid_argument("steering_derivative: order must be 1 or 2, got " +
                                    std::to_string(order));
    const double k = 2.0 * kPi / wavelength;
    const double c = std::cos(theta), s = std::sin(theta);
    ComplexVector d(geom.sensor_count());
    for (int m = 0; m < geom.sensor_count(); ++m) {
        const auto& pos = geom.positions[m];
        const Complex a_m = std::polar(1.0, k * (pos.p * c + pos.q * s));
        const double d1 = k * (-pos.p * s + pos.q * c);  // phase'
        if (order == 1) {
            d[m] = Complex(0.0, d1) * a_m;
        } else {
            const double d2 = k * (-pos.p * c - pos.q * s); // phase''
            d[m] = (Complex(0.0, d2) - d1 * d1) * a_m;
        }
    }
    return d;
}

} // namespace musicdoa
