#pragma once

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "gaussian_state.hpp"

namespace detmode {

/// On-disk form of a state:
///   {
///     "dim": n,
///     "mean": [[re, im], ...],            n entries
///     "squeezers": [{"mode": k, "r": r, "angle": a}, ...]   optional
///     "cov": [[...], ...]                 optional 2n x 2n, overrides
///   }
/// Saving always writes dim, mean and cov, which is lossless; loading
/// accepts the generating form (mean + squeezers) as well.
inline nlohmann::json state_to_json(const GaussianState& s) {
    nlohmann::json j;
    j["dim"] = s.dim();
    nlohmann::json mean = nlohmann::json::array();
    for (int i = 0; i < s.dim(); ++i)
        mean.push_back({s.mean[i].real(), s.mean[i].imag()});
    j["mean"] = std::move(mean);
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index r = 0; r < s.cov.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < s.cov.cols(); ++c)
            row.push_back(s.cov(r, c));
        cov.push_back(std::move(row));
    }
    j["cov"] = std::move(cov);
    return j;
}

inline GaussianState state_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw config_error("state: expected an object");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw config_error("state.dim: missing or not an integer");
    const int dim = j["dim"].get<int>();
    if (dim < 1)
        throw config_error("state.dim: must be >= 1");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "dim" && key != "mean" && key != "squeezers" && key != "cov")
            throw config_error("state." + key + ": unknown key");
    }

    std::vector<std::pair<int, cplx>> coherent;
    if (j.contains("mean")) {
        const auto& mean = j["mean"];
        if (!mean.is_array() || static_cast<int>(mean.size()) != dim)
            throw config_error("state.mean: expected an array of dim [re, im] pairs");
        for (int i = 0; i < dim; ++i) {
            const auto& e = mean[static_cast<size_t>(i)];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw config_error("state.mean[" + std::to_string(i) +
                                   "]: expected [re, im]");
            cplx a(e[0].get<double>(), e[1].get<double>());
            if (a != cplx(0.0))
                coherent.emplace_back(i, a);
        }
    }

    std::vector<SqueezerSpec> squeezers;
    if (j.contains("squeezers")) {
        const auto& sq = j["squeezers"];
        if (!sq.is_array())
            throw config_error("state.squeezers: expected an array");
        for (size_t k = 0; k < sq.size(); ++k) {
            const auto& e = sq[k];
            const std::string where = "state.squeezers[" + std::to_string(k) + "]";
            if (!e.is_object())
                throw config_error(where + ": expected an object");
            for (const auto& [key, value] : e.items()) {
                (void)value;
                if (key != "mode" && key != "r" && key != "angle")
                    throw config_error(where + "." + key + ": unknown key");
            }
            if (!e.contains("mode") || !e["mode"].is_number_integer())
                throw config_error(where + ".mode: missing or not an integer");
            if (!e.contains("r") || !e["r"].is_number())
                throw config_error(where + ".r: missing or not a number");
            SqueezerSpec spec;
            spec.mode_index = e["mode"].get<int>();
            spec.r = e["r"].get<double>();
            spec.angle = e.contains("angle") ? e["angle"].get<double>() : 0.0;
            if (e.contains("angle") && !e["angle"].is_number())
                throw config_error(where + ".angle: not a number");
            squeezers.push_back(spec);
        }
    }

    GaussianState s;
    try {
        s = make_state(dim, coherent, squeezers);
    } catch (const shape_error& e) {
        throw config_error(std::string("state: ") + e.what());
    }

    if (j.contains("cov")) {
        const auto& cov = j["cov"];
        if (!cov.is_array() || static_cast<int>(cov.size()) != 2 * dim)
            throw config_error("state.cov: expected a 2*dim x 2*dim array");
        Eigen::MatrixXd v(2 * dim, 2 * dim);
        for (int r = 0; r < 2 * dim; ++r) {
            const auto& row = cov[static_cast<size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != 2 * dim)
                throw config_error("state.cov[" + std::to_string(r) +
                                   "]: expected 2*dim numbers");
            for (int c = 0; c < 2 * dim; ++c) {
                if (!row[static_cast<size_t>(c)].is_number())
                    throw config_error("state.cov[" + std::to_string(r) + "][" +
                                       std::to_string(c) + "]: not a number");
                v(r, c) = row[static_cast<size_t>(c)].get<double>();
            }
        }
        try {
            s = GaussianState(s.mean, std::move(v));
        } catch (const shape_error& e) {
            throw config_error(std::string("state.cov: ") + e.what());
        }
        if (!is_physical(s))
            throw config_error("state.cov: covariance violates the uncertainty "
                               "relation by " + std::to_string(physicality_deficit(s)));
    }
    return s;
}

inline void save_state(const GaussianState& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw error("save_state: cannot open " + path.string());
    out << state_to_json(s).dump(2) << '\n';
    if (!out)
        throw error("save_state: write failed for " + path.string());
}

inline GaussianState load_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw error("load_state: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("load_state: " + path.string() + ": " + e.what());
    }
    return state_from_json(j);
}

} // namespace detmode
