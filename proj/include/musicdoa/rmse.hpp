#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace musicdoa {

/// RMSE normalization. `paper` keeps the raw sqrt(sum e_i^2) with no 1/L
/// factor; `standard` is the usual sqrt(mean e_i^2). They differ by
/// exactly sqrt(L).
enum class RmseMode { paper, standard, both };

inline std::string to_string(RmseMode m) {
    switch (m) {
    case RmseMode::paper: return "paper";
    case RmseMode::standard: return "standard";
    case RmseMode::both: return "both";
    }
    return "unknown";
}

inline RmseMode parse_rmse_mode(const std::string& s) {
    if (s == "paper") return RmseMode::paper;
    if (s == "standard") return RmseMode::standard;
    if (s == "both") return RmseMode::both;
    throw std::invalid_argument("unknown RMSE mode: '" + s + "'");
}

inline double rmse(const std::vector<double>& errors, RmseMode mode) {
    if (errors.empty())
        throw std::invalid_argument("rmse: error list is empty");
    if (mode == RmseMode::both)
        throw std::invalid_argument("rmse: pick one mode per evaluation");
    double sum_sq = 0.0;
    for (double e : errors) sum_sq += e * e;
    if (mode == RmseMode::standard) sum_sq /= static_cast<double>(errors.size());
    return std::sqrt(sum_sq);
}

} // namespace musicdoa
