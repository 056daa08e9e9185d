#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "detection.hpp"
#include "hermite_gauss.hpp"
#include "io.hpp"
#include "mode_basis.hpp"
#include "montecarlo.hpp"
#include "multi_measurement.hpp"
#include "pixel_layout.hpp"
#include "state_io.hpp"
#include "two_zone.hpp"

namespace detmode {

/// One detector layout as configured.
struct LayoutSpec {
    std::string kind; // half_x | half_y | quadrants | annulus | mask
    double r1 = 0.0;
    double r2 = 0.0;
    std::filesystem::path mask_file;
    Eigen::VectorXd gains;
};

/// Fully validated scenario: every field checked before any physics
/// runs, unknown keys rejected so misconfiguration fails loudly.
struct ScenarioConfig {
    Grid grid;

    std::string basis_type; // hermite_gauss | file
    int basis_max_order = 0;
    double basis_waist = 0.0;
    std::filesystem::path basis_path;

    std::vector<std::pair<int, cplx>> coherent;
    std::vector<SqueezerSpec> squeezers;
    std::optional<std::filesystem::path> cov_file;

    std::optional<LayoutSpec> layout;
    std::vector<LayoutSpec> layouts;

    std::vector<std::string> commands;
    double tol_difference = kDifferenceTol;
    double tol_dual_path = 1e-8;
    double tol_rank = 1e-8;
    std::optional<SimConfig> monte_carlo;

    std::optional<double> multi_r;

    /// The parsed document, echoed into every report so a report plus
    /// this echo reproduces itself bit for bit.
    nlohmann::json echo;
    /// Directory of the config file; relative paths resolve against it.
    std::filesystem::path base_dir;
};

namespace cfgdetail {

inline void check_keys(const nlohmann::json& j, const std::string& path,
                       const std::set<std::string>& required,
                       const std::set<std::string>& optional) {
    if (!j.is_object())
        throw config_error(path + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!required.count(key) && !optional.count(key))
            throw config_error(path + "." + key + ": unknown key");
    }
    for (const auto& key : required)
        if (!j.contains(key))
            throw config_error(path + "." + key + ": missing");
}

inline double get_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number())
        throw config_error(path + ": expected a number");
    return j.get<double>();
}

inline int get_int(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_integer())
        throw config_error(path + ": expected an integer");
    return j.get<int>();
}

inline std::string get_string(const nlohmann::json& j, const std::string& path) {
    if (!j.is_string())
        throw config_error(path + ": expected a string");
    return j.get<std::string>();
}

inline Eigen::VectorXd get_gains(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw config_error(path + ": expected a non-empty array of numbers");
    Eigen::VectorXd g(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        g[static_cast<Eigen::Index>(i)] =
            get_number(j[i], path + "[" + std::to_string(i) + "]");
    return g;
}

inline LayoutSpec parse_layout(const nlohmann::json& j, const std::string& path) {
    check_keys(j, path, {"gains"}, {"primitive", "r1", "r2", "mask_file"});
    LayoutSpec spec;
    spec.gains = get_gains(j["gains"], path + ".gains");
    const bool has_primitive = j.contains("primitive");
    const bool has_mask = j.contains("mask_file");
    if (has_primitive == has_mask)
        throw config_error(path + ": exactly one of 'primitive' or 'mask_file' required");
    if (has_mask) {
        spec.kind = "mask";
        spec.mask_file = get_string(j["mask_file"], path + ".mask_file");
        if (j.contains("r1") || j.contains("r2"))
            throw config_error(path + ".r1: only valid for the annulus primitive");
        return spec;
    }
    spec.kind = get_string(j["primitive"], path + ".primitive");
    if (spec.kind == "annulus") {
        if (!j.contains("r1"))
            throw config_error(path + ".r1: missing (annulus needs radii)");
        if (!j.contains("r2"))
            throw config_error(path + ".r2: missing (annulus needs radii)");
        spec.r1 = get_number(j["r1"], path + ".r1");
        spec.r2 = get_number(j["r2"], path + ".r2");
    } else if (spec.kind == "half_x" || spec.kind == "half_y" || spec.kind == "quadrants") {
        if (j.contains("r1") || j.contains("r2"))
            throw config_error(path + ".r1: only valid for the annulus primitive");
    } else {
        throw config_error(path + ".primitive: unknown primitive '" + spec.kind + "'");
    }
    return spec;
}

} // namespace cfgdetail

inline ScenarioConfig parse_scenario(const nlohmann::json& doc,
                                     const std::filesystem::path& base_dir) {
    using cfgdetail::check_keys;
    using cfgdetail::get_int;
    using cfgdetail::get_number;
    using cfgdetail::get_string;

    ScenarioConfig cfg;
    cfg.echo = doc;
    cfg.base_dir = base_dir;
    check_keys(doc, "config", {"grid", "basis", "state"},
               {"layout", "layouts", "analysis", "multi"});

    {
        const auto& g = doc["grid"];
        check_keys(g, "grid", {"nx", "ny", "width_x", "width_y"}, {});
        try {
            cfg.grid = Grid(get_int(g["nx"], "grid.nx"), get_int(g["ny"], "grid.ny"),
                            get_number(g["width_x"], "grid.width_x"),
                            get_number(g["width_y"], "grid.width_y"));
        } catch (const shape_error& e) {
            throw config_error(std::string("grid: ") + e.what());
        }
    }

    {
        const auto& b = doc["basis"];
        check_keys(b, "basis", {"type"}, {"max_order", "waist", "path"});
        cfg.basis_type = get_string(b["type"], "basis.type");
        if (cfg.basis_type == "hermite_gauss") {
            if (!b.contains("max_order"))
                throw config_error("basis.max_order: missing");
            if (!b.contains("waist"))
                throw config_error("basis.waist: missing");
            if (b.contains("path"))
                throw config_error("basis.path: only valid for type 'file'");
            cfg.basis_max_order = get_int(b["max_order"], "basis.max_order");
            cfg.basis_waist = get_number(b["waist"], "basis.waist");
            if (cfg.basis_max_order < 0)
                throw config_error("basis.max_order: must be >= 0");
            if (!(cfg.basis_waist > 0.0))
                throw config_error("basis.waist: must be > 0");
        } else if (cfg.basis_type == "file") {
            if (!b.contains("path"))
                throw config_error("basis.path: missing");
            if (b.contains("max_order") || b.contains("waist"))
                throw config_error("basis.max_order: only valid for type 'hermite_gauss'");
            cfg.basis_path = get_string(b["path"], "basis.path");
        } else {
            throw config_error("basis.type: expected 'hermite_gauss' or 'file'");
        }
    }

    {
        const auto& s = doc["state"];
        check_keys(s, "state", {}, {"coherent", "squeezers", "cov_file"});
        if (s.contains("coherent")) {
            const auto& arr = s["coherent"];
            if (!arr.is_array())
                throw config_error("state.coherent: expected an array");
            for (size_t i = 0; i < arr.size(); ++i) {
                const std::string where = "state.coherent[" + std::to_string(i) + "]";
                check_keys(arr[i], where, {"mode", "re"}, {"im"});
                const int mode = get_int(arr[i]["mode"], where + ".mode");
                const double re = get_number(arr[i]["re"], where + ".re");
                const double im = arr[i].contains("im")
                                      ? get_number(arr[i]["im"], where + ".im")
                                      : 0.0;
                cfg.coherent.emplace_back(mode, cplx(re, im));
            }
        }
        if (s.contains("squeezers")) {
            const auto& arr = s["squeezers"];
            if (!arr.is_array())
                throw config_error("state.squeezers: expected an array");
            for (size_t i = 0; i < arr.size(); ++i) {
                const std::string where = "state.squeezers[" + std::to_string(i) + "]";
                check_keys(arr[i], where, {"mode", "r"}, {"angle"});
                SqueezerSpec sq;
                sq.mode_index = get_int(arr[i]["mode"], where + ".mode");
                sq.r = get_number(arr[i]["r"], where + ".r");
                sq.angle = arr[i].contains("angle")
                               ? get_number(arr[i]["angle"], where + ".angle")
                               : 0.0;
                cfg.squeezers.push_back(sq);
            }
        }
        if (s.contains("cov_file"))
            cfg.cov_file = get_string(s["cov_file"], "state.cov_file");
    }

    if (doc.contains("layout"))
        cfg.layout = cfgdetail::parse_layout(doc["layout"], "layout");
    if (doc.contains("layouts")) {
        const auto& arr = doc["layouts"];
        if (!arr.is_array() || arr.empty())
            throw config_error("layouts: expected a non-empty array");
        for (size_t i = 0; i < arr.size(); ++i)
            cfg.layouts.push_back(
                cfgdetail::parse_layout(arr[i], "layouts[" + std::to_string(i) + "]"));
    }

    if (doc.contains("analysis")) {
        const auto& a = doc["analysis"];
        check_keys(a, "analysis", {}, {"commands", "tolerances", "monte_carlo"});
        if (a.contains("commands")) {
            const auto& arr = a["commands"];
            if (!arr.is_array())
                throw config_error("analysis.commands: expected an array");
            static const std::set<std::string> known = {"analyze", "degree", "multi",
                                                        "export-modes"};
            for (size_t i = 0; i < arr.size(); ++i) {
                std::string name = get_string(
                    arr[i], "analysis.commands[" + std::to_string(i) + "]");
                if (!known.count(name))
                    throw config_error("analysis.commands[" + std::to_string(i) +
                                       "]: unknown command '" + name + "'");
                cfg.commands.push_back(std::move(name));
            }
        }
        if (a.contains("tolerances")) {
            const auto& t = a["tolerances"];
            check_keys(t, "analysis.tolerances", {}, {"difference", "dual_path", "rank"});
            if (t.contains("difference")) {
                cfg.tol_difference = get_number(t["difference"],
                                                "analysis.tolerances.difference");
                if (!(cfg.tol_difference > 0.0))
                    throw config_error("analysis.tolerances.difference: must be > 0");
            }
            if (t.contains("dual_path")) {
                cfg.tol_dual_path = get_number(t["dual_path"],
                                               "analysis.tolerances.dual_path");
                if (!(cfg.tol_dual_path > 0.0))
                    throw config_error("analysis.tolerances.dual_path: must be > 0");
            }
            if (t.contains("rank")) {
                cfg.tol_rank = get_number(t["rank"], "analysis.tolerances.rank");
                if (!(cfg.tol_rank > 0.0))
                    throw config_error("analysis.tolerances.rank: must be > 0");
            }
        }
        if (a.contains("monte_carlo")) {
            const auto& mc = a["monte_carlo"];
            check_keys(mc, "analysis.monte_carlo", {"n_samples"}, {"seed", "shards"});
            SimConfig sim;
            const double n = get_number(mc["n_samples"], "analysis.monte_carlo.n_samples");
            if (n < 1 || n != std::floor(n))
                throw config_error("analysis.monte_carlo.n_samples: must be a positive "
                                   "integer");
            sim.n_samples = static_cast<long long>(n);
            if (mc.contains("seed")) {
                if (!mc["seed"].is_number_integer() && !mc["seed"].is_number_unsigned())
                    throw config_error("analysis.monte_carlo.seed: expected an integer");
                sim.seed = mc["seed"].get<std::uint64_t>();
            }
            if (mc.contains("shards")) {
                sim.shards = get_int(mc["shards"], "analysis.monte_carlo.shards");
                if (sim.shards < 1)
                    throw config_error("analysis.monte_carlo.shards: must be >= 1");
            }
            cfg.monte_carlo = sim;
        }
    }

    if (doc.contains("multi")) {
        const auto& m = doc["multi"];
        check_keys(m, "multi", {"r"}, {});
        cfg.multi_r = get_number(m["r"], "multi.r");
        if (!std::isfinite(*cfg.multi_r))
            throw config_error("multi.r: must be finite");
    }

    return cfg;
}

inline ScenarioConfig load_scenario(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in)
        throw config_error("config: cannot open " + config_path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config: " + config_path.string() + " is not valid JSON: " +
                           e.what());
    }
    std::filesystem::path base = config_path.parent_path();
    if (base.empty())
        base = ".";
    return parse_scenario(doc, base);
}

namespace cfgdetail {

inline std::filesystem::path resolve(const ScenarioConfig& cfg,
                                     const std::filesystem::path& p) {
    return p.is_absolute() ? p : cfg.base_dir / p;
}

} // namespace cfgdetail

/// Basis as configured, raw. Sampled analytic bases keep their sampling
/// quality here; run_* pipelines polish with orthonormalized() before
/// quadrature-exact work.
inline ModeBasis build_basis(const ScenarioConfig& cfg) {
    if (cfg.basis_type == "hermite_gauss") {
        try {
            return hermite_gauss_basis(cfg.basis_max_order, cfg.basis_waist, cfg.grid);
        } catch (const shape_error& e) {
            throw config_error(std::string("basis: ") + e.what());
        }
    }
    // type "file": a JSON manifest {"modes": ["a.csv", ...]} with paths
    // relative to the manifest.
    const auto manifest_path = cfgdetail::resolve(cfg, cfg.basis_path);
    std::ifstream in(manifest_path);
    if (!in)
        throw config_error("basis.path: cannot open " + manifest_path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("basis.path: " + manifest_path.string() +
                           " is not valid JSON: " + e.what());
    }
    cfgdetail::check_keys(doc, "basis manifest", {"modes"}, {"ortho_tol"});
    if (!doc["modes"].is_array() || doc["modes"].empty())
        throw config_error("basis manifest.modes: expected a non-empty array of paths");
    double tol = 1e-6;
    if (doc.contains("ortho_tol")) {
        tol = cfgdetail::get_number(doc["ortho_tol"], "basis manifest.ortho_tol");
        if (!(tol > 0.0))
            throw config_error("basis manifest.ortho_tol: must be > 0");
    }
    std::vector<SampledMode> modes;
    for (size_t i = 0; i < doc["modes"].size(); ++i) {
        const std::string rel = cfgdetail::get_string(
            doc["modes"][i], "basis manifest.modes[" + std::to_string(i) + "]");
        std::filesystem::path mode_path = rel;
        if (!mode_path.is_absolute())
            mode_path = manifest_path.parent_path() / mode_path;
        try {
            modes.push_back(read_mode_csv(mode_path, cfg.grid).normalized());
        } catch (const error& e) {
            throw config_error("basis manifest.modes[" + std::to_string(i) + "]: " +
                               e.what());
        }
    }
    try {
        return ModeBasis(std::move(modes), tol);
    } catch (const validation_error& e) {
        throw config_error(std::string("basis manifest: ") + e.what());
    }
}

inline GaussianState build_state(const ScenarioConfig& cfg, int dim) {
    GaussianState s;
    try {
        s = make_state(dim, cfg.coherent, cfg.squeezers);
    } catch (const shape_error& e) {
        throw config_error(std::string("state: ") + e.what());
    }
    if (cfg.cov_file) {
        const auto path = cfgdetail::resolve(cfg, *cfg.cov_file);
        std::ifstream in(path);
        if (!in)
            throw config_error("state.cov_file: cannot open " + path.string());
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw config_error("state.cov_file: " + path.string() +
                               " is not valid JSON: " + e.what());
        }
        if (!doc.is_array() || static_cast<int>(doc.size()) != 2 * dim)
            throw config_error("state.cov_file: expected a " + std::to_string(2 * dim) +
                               "x" + std::to_string(2 * dim) + " array");
        Eigen::MatrixXd v(2 * dim, 2 * dim);
        for (int r = 0; r < 2 * dim; ++r) {
            const auto& row = doc[static_cast<size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != 2 * dim)
                throw config_error("state.cov_file: row " + std::to_string(r) +
                                   " has wrong length");
            for (int c = 0; c < 2 * dim; ++c)
                v(r, c) = cfgdetail::get_number(row[static_cast<size_t>(c)],
                                                "state.cov_file[" + std::to_string(r) +
                                                    "][" + std::to_string(c) + "]");
        }
        try {
            s = GaussianState(s.mean, std::move(v));
        } catch (const shape_error& e) {
            throw config_error(std::string("state.cov_file: ") + e.what());
        }
        if (!is_physical(s))
            throw config_error("state.cov_file: covariance violates the uncertainty "
                               "relation by " + std::to_string(physicality_deficit(s)));
    }
    return s;
}

inline PixelLayout build_layout(const ScenarioConfig& cfg, const LayoutSpec& spec,
                                const std::string& path) {
    try {
        if (spec.kind == "half_x") {
            if (spec.gains.size() != 2)
                throw config_error(path + ".gains: half_x needs exactly 2 gains");
            return half_x(cfg.grid, Eigen::Vector2d(spec.gains[0], spec.gains[1]));
        }
        if (spec.kind == "half_y") {
            if (spec.gains.size() != 2)
                throw config_error(path + ".gains: half_y needs exactly 2 gains");
            return half_y(cfg.grid, Eigen::Vector2d(spec.gains[0], spec.gains[1]));
        }
        if (spec.kind == "quadrants") {
            if (spec.gains.size() != 4)
                throw config_error(path + ".gains: quadrants needs exactly 4 gains");
            return quadrants(cfg.grid, Eigen::Vector4d(spec.gains[0], spec.gains[1],
                                                       spec.gains[2], spec.gains[3]));
        }
        if (spec.kind == "annulus") {
            if (spec.gains.size() != 3)
                throw config_error(path + ".gains: annulus needs exactly 3 gains "
                                          "(inner, ring, outer)");
            return annulus(cfg.grid, spec.r1, spec.r2,
                           Eigen::Vector3d(spec.gains[0], spec.gains[1], spec.gains[2]));
        }
        // mask
        LabelImage img = read_label_pgm(cfgdetail::resolve(cfg, spec.mask_file));
        const int max_label = img.labels.empty()
                                  ? 0
                                  : *std::max_element(img.labels.begin(), img.labels.end());
        if (spec.gains.size() != max_label + 1)
            throw config_error(path + ".gains: mask has labels up to " +
                               std::to_string(max_label) + ", need " +
                               std::to_string(max_label + 1) + " gains");
        return from_labels(cfg.grid, img, spec.gains);
    } catch (const shape_error& e) {
        throw config_error(path + ": " + e.what());
    } catch (const error& e) {
        if (dynamic_cast<const config_error*>(&e))
            throw;
        throw config_error(path + ": " + e.what());
    }
}

inline nlohmann::json report_to_json(const MeasurementReport& rep,
                                     const nlohmann::json& export_path = nullptr) {
    nlohmann::json j;
    j["mean"] = rep.mean;
    j["variance"] = rep.variance;
    j["shot_noise"] = rep.shot_noise;
    j["sql_ratio"] = rep.sql_ratio;
    j["f"] = rep.detection_mode.f;
    j["is_difference"] = rep.detection_mode.is_difference;
    j["detection_mode_export_path"] = export_path;
    j["small_photon_warning"] = rep.small_photon_warning;
    return j;
}

inline nlohmann::json sim_result_to_json(const SimResult& res, const SimConfig& cfg) {
    nlohmann::json j;
    j["n_samples"] = res.n_samples;
    j["seed"] = cfg.seed;
    j["shards"] = cfg.shards;
    j["sample_mean"] = res.sample_mean;
    // NaN (single-sample runs) has no JSON number; emit null.
    if (std::isfinite(res.sample_variance)) {
        j["sample_variance"] = res.sample_variance;
        j["stderr_variance"] = res.stderr_variance;
    } else {
        j["sample_variance"] = nullptr;
        j["stderr_variance"] = nullptr;
    }
    return j;
}

struct CommandResult {
    nlohmann::json report;
    int exit_code = 0;
};

inline CommandResult run_analyze(const ScenarioConfig& cfg) {
    if (!cfg.layout)
        throw config_error("layout: missing (analyze needs one layout)");
    ModeBasis basis = orthonormalized(build_basis(cfg));
    GaussianState state = build_state(cfg, basis.size());
    PixelLayout layout = build_layout(cfg, *cfg.layout, "layout");

    MeasurementCrossCheck cc = analyze_measurement(state, basis, layout);

    nlohmann::json out;
    out["command"] = "analyze";
    out["config"] = cfg.echo;
    out["report"] = report_to_json(cc.direct);
    out["cross_check"] = {
        {"variance_direct", cc.direct.variance},
        {"variance_via_detection_mode", cc.via_detection_mode.variance},
        {"relative_discrepancy", cc.relative_discrepancy},
        {"tolerance", cfg.tol_dual_path},
        {"agree", cc.agrees(cfg.tol_dual_path)},
    };
    if (cfg.monte_carlo) {
        SimResult sim = simulate_linearized(state, basis, layout, *cfg.monte_carlo);
        out["monte_carlo"] = sim_result_to_json(sim, *cfg.monte_carlo);
    }
    CommandResult result{std::move(out), 0};
    if (!cc.agrees(cfg.tol_dual_path))
        result.exit_code = 3;
    return result;
}

inline CommandResult run_degree(const ScenarioConfig& cfg) {
    ModeBasis basis = orthonormalized(build_basis(cfg));
    GaussianState state = build_state(cfg, basis.size());
    const int deg = degree(state, cfg.tol_rank);
    nlohmann::json out;
    out["command"] = "degree";
    out["config"] = cfg.echo;
    out["degree"] = deg;
    out["single_mode"] = deg <= 1;
    return {std::move(out), 0};
}

inline CommandResult run_multi(const ScenarioConfig& cfg) {
    if (cfg.layouts.empty())
        throw config_error("layouts: missing (multi needs a layouts list)");
    if (!cfg.multi_r)
        throw config_error("multi.r: missing");
    if (!cfg.squeezers.empty())
        throw config_error("state.squeezers: not allowed for multi (the plan chooses "
                           "the squeezers)");
    ModeBasis pool = orthonormalized(build_basis(cfg));
    GaussianState seed_state = build_state(cfg, pool.size());
    auto [v0, n0] = mean_field_mode(seed_state, pool);

    std::vector<PixelLayout> layouts;
    for (size_t i = 0; i < cfg.layouts.size(); ++i)
        layouts.push_back(
            build_layout(cfg, cfg.layouts[i], "layouts[" + std::to_string(i) + "]"));

    MultiMeasurementPlan plan =
        multi_measurement_plan(v0, layouts, *cfg.multi_r, pool, n0, cfg.tol_difference);

    nlohmann::json out;
    out["command"] = "multi";
    out["config"] = cfg.echo;
    out["plan_degree"] = plan.degree;
    out["subspace_rank"] = plan.subspace_rank;
    out["dependent_layouts"] = plan.dependent_layouts;
    out["squeezing_r"] = *cfg.multi_r;
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& rep : plan.reports)
        reports.push_back(report_to_json(rep));
    out["reports"] = std::move(reports);
    return {std::move(out), 0};
}

inline CommandResult run_export_modes(const ScenarioConfig& cfg, const std::string& format,
                                      const std::filesystem::path& out_dir) {
    if (!cfg.layout)
        throw config_error("layout: missing (export-modes needs one layout)");
    if (format != "csv" && format != "pgm")
        throw config_error("--format: expected 'csv' or 'pgm'");
    ModeBasis basis = orthonormalized(build_basis(cfg));
    GaussianState state = build_state(cfg, basis.size());
    PixelLayout layout = build_layout(cfg, *cfg.layout, "layout");
    auto [v0, n0] = mean_field_mode(state, basis);
    (void)n0;

    std::filesystem::create_directories(out_dir);
    auto write_one = [&](const SampledMode& mode, const std::string& name) {
        const auto path = out_dir / (name + "." + format);
        if (format == "csv")
            write_mode_csv(mode, path);
        else
            write_mode_pgm(mode, path);
        return path.string();
    };

    nlohmann::json files = nlohmann::json::object();
    nlohmann::json w1_path;
    const bool two_zone = layout.pixel_count() == 2 &&
                          std::abs(std::abs(layout.gains[0]) - 1.0) <= 1e-12 &&
                          std::abs(std::abs(layout.gains[1]) - 1.0) <= 1e-12 &&
                          layout.gains[0] * layout.gains[1] < 0.0;
    if (two_zone) {
        TwoZoneDecomposition d = two_zone_decomposition(v0, layout);
        files["v0"] = write_one(d.v0, "v0");
        files["w0"] = write_one(d.w0, "w0");
        files["w1"] = write_one(d.w1, "w1");
        files["v1"] = write_one(d.v1, "v1");
        w1_path = files["w1"];
    } else {
        DetectionMode dm = detection_mode(v0, layout, cfg.tol_difference);
        files["v0"] = write_one(v0, "v0");
        files["w1"] = write_one(dm.w1, "w1");
        w1_path = files["w1"];
    }

    MeasurementReport rep = variance_direct(state, basis, layout);
    nlohmann::json out;
    out["command"] = "export_modes";
    out["config"] = cfg.echo;
    out["format"] = format;
    out["files"] = std::move(files);
    out["report"] = report_to_json(rep, w1_path);
    return {std::move(out), 0};
}

} // namespace detmode
