#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "musicdoa/geometry.hpp"
#include "musicdoa/perturbation.hpp"
#include "musicdoa/rmse.hpp"
#include "musicdoa/rng.hpp"
#include "musicdoa/signal.hpp"
#include "musicdoa/subspace.hpp"
#include "musicdoa/types.hpp"

namespace musicdoa {

/// Serializable description of one array layout. Lengths are in
/// half-wavelength units so uniform and non-uniform arrays can be pinned
/// to the same span.
struct GeometrySpec {
    SpacingScheme scheme = SpacingScheme::uniform;
    int sensors = 0;
    double array_length_half_wavelengths = 0.0;
    double growth = 1.0;

    ArrayGeometry build() const {
        if (scheme == SpacingScheme::uniform) {
            const int hw = static_cast<int>(array_length_half_wavelengths);
            if (static_cast<double>(hw) != array_length_half_wavelengths)
                throw std::invalid_argument(
                    "geometry '" + label() + "': uniform arrays need an integral half-wavelength count");
            return uniform_linear(sensors, hw);
        }
        return nonuniform_progressive(sensors, 0.5 * array_length_half_wavelengths, scheme, growth);
    }

    std::string label() const {
        std::ostringstream out;
        out << to_string(scheme);
        if (scheme != SpacingScheme::uniform) out << "-g" << growth;
        out << "-M" << sensors;
        return out.str();
    }
};

/// Full Monte-Carlo sweep description: geometry x SNR grid, one true
/// direction, seeded trials.
struct ExperimentConfig {
    std::vector<GeometrySpec> geometries;
    double theta_true_deg = 60.0;
    std::vector<double> snr_db_list{-5.0, 0.0, 5.0, 10.0};
    int snapshots = 200;
    int trials = 100;
    double resolution_deg = 0.01;
    std::uint64_t master_seed = 42;
    RmseMode rmse_mode = RmseMode::both;
};

/// The three-geometry comparison at a span of 10 half-wavelengths:
/// uniform M=11 against progressively spaced M=8 and M=5, growth 1.3.
inline ExperimentConfig default_comparison_config() {
    ExperimentConfig config;
    config.geometries = {
        {SpacingScheme::uniform, 11, 10.0, 1.0},
        {SpacingScheme::geometric, 8, 10.0, 1.3},
        {SpacingScheme::geometric, 5, 10.0, 1.3},
    };
    return config;
}

// --- JSON config file -----------------------------------------------------

namespace detail {

inline double snr_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("config: bad SNR value '" + s + "'");
    }
    return j.get<double>();
}

inline nlohmann::json snr_to_json(double snr_db) {
    if (std::isinf(snr_db)) return snr_db > 0 ? "inf" : "-inf";
    return snr_db;
}

} // namespace detail

inline nlohmann::json config_to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["geometries"] = nlohmann::json::array();
    for (const auto& g : config.geometries)
        j["geometries"].push_back({{"scheme", to_string(g.scheme)},
                                   {"M", g.sensors},
                                   {"array_length_half_wavelengths", g.array_length_half_wavelengths},
                                   {"growth", g.growth}});
    j["theta_true_deg"] = config.theta_true_deg;
    j["snr_db_list"] = nlohmann::json::array();
    for (double snr : config.snr_db_list) j["snr_db_list"].push_back(detail::snr_to_json(snr));
    j["snapshots"] = config.snapshots;
    j["trials"] = config.trials;
    j["resolution_deg"] = config.resolution_deg;
    j["master_seed"] = config.master_seed;
    j["rmse_mode"] = to_string(config.rmse_mode);
    return j;
}

/// Missing keys keep their defaults, so partial configs stay valid.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig config;
    if (j.contains("geometries")) {
        config.geometries.clear();
        for (const auto& g : j.at("geometries")) {
            GeometrySpec spec;
            spec.scheme = parse_scheme(g.at("scheme").get<std::string>());
            spec.sensors = g.at("M").get<int>();
            spec.array_length_half_wavelengths = g.at("array_length_half_wavelengths").get<double>();
            if (g.contains("growth")) spec.growth = g.at("growth").get<double>();
            config.geometries.push_back(spec);
        }
    }
    if (j.contains("theta_true_deg")) config.theta_true_deg = j.at("theta_true_deg").get<double>();
    if (j.contains("snr_db_list")) {
        config.snr_db_list.clear();
        for (const auto& s : j.at("snr_db_list")) config.snr_db_list.push_back(detail::snr_from_json(s));
    }
    if (j.contains("snapshots")) config.snapshots = j.at("snapshots").get<int>();
    if (j.contains("trials")) config.trials = j.at("trials").get<int>();
    if (j.contains("resolution_deg")) config.resolution_deg = j.at("resolution_deg").get<double>();
    if (j.contains("master_seed")) config.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("rmse_mode")) config.rmse_mode = parse_rmse_mode(j.at("rmse_mode").get<std::string>());
    return config;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

// --- Experiment execution ---------------------------------------------------

/// One Monte-Carlo trial. Angles in radians; excluded trials carry NaN in
/// the slot that failed and are dropped from the aggregates.
struct TrialRecord {
    double theta_hat = 0.0;    // grid-search MUSIC estimate
    double delta_theta = 0.0;  // first-order predicted shift at the true angle
    bool excluded = false;
};

/// RMSE aggregates for one (geometry, SNR) cell, radians.
struct CellAggregate {
    double rmse_sim_paper = 0.0;
    double rmse_sim_standard = 0.0;
    double rmse_theory_paper = 0.0;
    double rmse_theory_standard = 0.0;
    int included = 0;
    int excluded = 0;
};

struct CellResult {
    GeometrySpec geometry;
    double snr_db = 0.0;
    std::vector<TrialRecord> trials;
    CellAggregate aggregate;
};

struct TrialResults {
    ExperimentConfig config;
    std::vector<CellResult> cells;
};

/// Recomputes a cell's aggregates from its per-trial records.
inline CellAggregate aggregate_cell(const std::vector<TrialRecord>& trials, double theta_true_rad) {
    CellAggregate agg;
    std::vector<double> sim_errors, theory_errors;
    for (const auto& trial : trials) {
        if (trial.excluded) {
            ++agg.excluded;
            continue;
        }
        sim_errors.push_back(trial.theta_hat - theta_true_rad);
        theory_errors.push_back(trial.delta_theta);
    }
    agg.included = static_cast<int>(sim_errors.size());
    if (agg.included > 0) {
        agg.rmse_sim_paper = rmse(sim_errors, RmseMode::paper);
        agg.rmse_sim_standard = rmse(sim_errors, RmseMode::standard);
        agg.rmse_theory_paper = rmse(theory_errors, RmseMode::paper);
        agg.rmse_theory_standard = rmse(theory_errors, RmseMode::standard);
    } else {
        agg.rmse_sim_paper = agg.rmse_sim_standard = std::nan("");
        agg.rmse_theory_paper = agg.rmse_theory_standard = std::nan("");
    }
    return agg;
}

namespace detail {

inline void validate_config(const ExperimentConfig& config) {
    if (config.geometries.empty())
        throw std::invalid_argument("experiment: geometry list is empty");
    if (config.snr_db_list.empty())
        throw std::invalid_argument("experiment: SNR list is empty");
    if (config.trials < 1)
        throw std::invalid_argument("experiment: need at least one trial");
    if (config.snapshots < 1)
        throw std::invalid_argument("experiment: need at least one snapshot");
    if (!(config.resolution_deg > 0.0))
        throw std::invalid_argument("experiment: resolution must be positive");

    const AngleGrid grid = sector_grid(config.resolution_deg);
    const double theta = deg2rad(config.theta_true_deg);
    if (!(theta >= grid.start && theta <= grid.stop))
        throw std::invalid_argument("experiment: theta_true_deg must lie strictly inside the search sector");

    // Comparing RMSE across layouts is only meaningful at one span.
    for (std::size_t i = 1; i < config.geometries.size(); ++i) {
        if (config.geometries[i].array_length_half_wavelengths !=
            config.geometries[0].array_length_half_wavelengths)
            throw std::invalid_argument(
                "experiment: array lengths differ between geometry '" +
                config.geometries[0].label() + "' (" +
                std::to_string(config.geometries[0].array_length_half_wavelengths) +
                " half-wavelengths) and geometry '" + config.geometries[i].label() + "' (" +
                std::to_string(config.geometries[i].array_length_half_wavelengths) +
                " half-wavelengths)");
    }
}

/// Static-chunk parallel loop; the work item for index i never depends on
/// the executing thread, so results match the serial order.
inline void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    const int workers = std::min(threads, count);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

/// Runs the full sweep. All randomness flows from
/// (master_seed, geometry index, snr index, trial index), so results and
/// output files do not depend on the worker count. threads = 0 picks the
/// hardware concurrency; on_cell, when set, is called after each cell in
/// sweep order.
inline TrialResults run_experiment(const ExperimentConfig& config, int threads = 0,
                                   const std::function<void(const CellResult&)>& on_cell = {}) {
    detail::validate_config(config);
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    const double theta_true = deg2rad(config.theta_true_deg);
    const AngleGrid grid = sector_grid(config.resolution_deg);

    TrialResults results;
    results.config = config;

    for (std::size_t g = 0; g < config.geometries.size(); ++g) {
        const ArrayGeometry geom = config.geometries[g].build();
        const ComplexMatrix steering_columns = steering_grid(geom, grid);

        for (std::size_t s = 0; s < config.snr_db_list.size(); ++s) {
            CellResult cell;
            cell.geometry = config.geometries[g];
            cell.snr_db = config.snr_db_list[s];
            cell.trials.resize(config.trials);

            detail::parallel_for(config.trials, threads, [&](int t) {
                SourceScenario scen;
                scen.doas = {theta_true};
                scen.snr_db = cell.snr_db;
                scen.snapshots = config.snapshots;
                scen.seed = derive_seed(config.master_seed,
                                        {static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(s),
                                         static_cast<std::uint64_t>(t)});

                TrialRecord record;
                const CovarianceMatrix R = sample_covariance(generate_snapshots(geom, scen));
                const ComplexMatrix Vn = noise_subspace(eigendecompose_hermitian(R), 1);

                try {
                    const SpectrumGrid spectrum = music_spectrum(steering_columns, Vn, grid);
                    record.theta_hat = estimate_doa(spectrum, 1).front();
                } catch (const std::runtime_error&) { // peak deficit
                    record.theta_hat = std::nan("");
                    record.excluded = true;
                }

                const PerturbationReport rep = doa_perturbation(geom, theta_true, Vn);
                if (rep.degenerate) {
                    record.delta_theta = std::nan("");
                    record.excluded = true;
                } else {
                    record.delta_theta = *rep.delta_theta;
                }
                cell.trials[t] = record;
            });

            cell.aggregate = aggregate_cell(cell.trials, theta_true);
            results.cells.push_back(std::move(cell));
            if (on_cell) on_cell(results.cells.back());
        }
    }
    return results;
}

// --- Output files -----------------------------------------------------------

namespace detail {

inline std::string format_double(double value, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, value);
    return buf;
}

} // namespace detail

/// CSV rows of the sweep aggregates, one per (geometry, snr, mode).
/// Angles in degrees, 6 significant digits.
inline std::string csv_string(const TrialResults& results) {
    std::ostringstream out;
    out << "geometry,scheme,M,array_length_hw,snr_db,rmse_sim_deg,rmse_theory_deg,mode,trials,excluded\n";

    std::vector<RmseMode> modes;
    if (results.config.rmse_mode == RmseMode::both)
        modes = {RmseMode::paper, RmseMode::standard};
    else
        modes = {results.config.rmse_mode};

    for (const auto& cell : results.cells) {
        for (RmseMode mode : modes) {
            const bool paper = (mode == RmseMode::paper);
            const double sim = paper ? cell.aggregate.rmse_sim_paper : cell.aggregate.rmse_sim_standard;
            const double theory =
                paper ? cell.aggregate.rmse_theory_paper : cell.aggregate.rmse_theory_standard;
            out << cell.geometry.label() << ',' << to_string(cell.geometry.scheme) << ','
                << cell.geometry.sensors << ','
                << detail::format_double(cell.geometry.array_length_half_wavelengths, "%g") << ','
                << detail::format_double(cell.snr_db, "%g") << ','
                << detail::format_double(rad2deg(sim), "%.6g") << ','
                << detail::format_double(rad2deg(theory), "%.6g") << ',' << to_string(mode) << ','
                << results.config.trials << ',' << cell.aggregate.excluded << '\n';
        }
    }
    return out.str();
}

inline void emit_csv(const TrialResults& results, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << csv_string(results);
    if (!out)
        throw std::runtime_error("failed while writing '" + path + "'");
}

/// Snapshot dump: CSV with one row per sensor and interleaved re,im
/// fields per snapshot column. %.17g fields, so a parse restores the
/// block exactly.
inline void emit_snapshots(const SnapshotMatrix& x, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    for (Eigen::Index m = 0; m < x.rows(); ++m) {
        for (Eigen::Index n = 0; n < x.cols(); ++n) {
            if (n > 0) out << ',';
            out << detail::format_double(x(m, n).real(), "%.17g") << ','
                << detail::format_double(x(m, n).imag(), "%.17g");
        }
        out << '\n';
    }
    if (!out)
        throw std::runtime_error("failed while writing '" + path + "'");
}

/// Plot-ready MUSIC spectrum of one generated scenario: rows of
/// "angle_deg value" over the search sector.
inline void emit_spectrum(const ArrayGeometry& geom, const SourceScenario& scen,
                          double resolution_deg, const std::string& path) {
    const AngleGrid grid = sector_grid(resolution_deg);
    const CovarianceMatrix R = sample_covariance(generate_snapshots(geom, scen));
    const ComplexMatrix Vn = noise_subspace(eigendecompose_hermitian(R), scen.source_count());
    const SpectrumGrid spectrum = music_spectrum(geom, Vn, grid, scen.wavelength);

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    for (int k = 0; k < spectrum.point_count(); ++k)
        out << detail::format_double(rad2deg(spectrum.angle(k)), "%.4f") << ' '
            << detail::format_double(spectrum.values[k], "%.9e") << '\n';
    if (!out)
        throw std::runtime_error("failed while writing '" + path + "'");
}

} // namespace musicdoa
