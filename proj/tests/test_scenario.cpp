#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "test_support.hpp"

using namespace detmode;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_doc() {
    nlohmann::json doc;
    doc["grid"] = {{"nx", 64}, {"ny", 64}, {"width_x", 8.0}, {"width_y", 8.0}};
    doc["basis"] = {{"type", "hermite_gauss"}, {"max_order", 1}, {"waist", 1.0}};
    doc["state"] = {
        {"coherent", nlohmann::json::array({{{"mode", 0}, {"re", 100.0}}})},
        {"squeezers", nlohmann::json::array({{{"mode", 2}, {"r", 0.6}}})},
    };
    doc["layout"] = {{"primitive", "half_x"},
                     {"gains", nlohmann::json::array({-1.0, 1.0})}};
    return doc;
}

ScenarioConfig parse(const nlohmann::json& doc) { return parse_scenario(doc, "."); }

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

struct CliRun {
    int exit_code = -1;
    std::string output;
    std::string errors;
};

CliRun run_cli(const std::string& args, const fs::path& dir) {
    const char* cli = std::getenv("DETMODE_CLI");
    REQUIRE(cli != nullptr);
    const fs::path out_file = dir / "cli_stdout.txt";
    const fs::path err_file = dir / "cli_stderr.txt";
    const std::string cmd = std::string(cli) + " " + args + " >" + out_file.string() +
                            " 2>" + err_file.string();
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(out_file);
    r.errors = slurp(err_file);
    return r;
}

} // namespace

TEST_CASE("scenario validation names the offending key") {
    SECTION("valid baseline parses") {
        ScenarioConfig cfg = parse(base_doc());
        CHECK(cfg.grid.nx == 64);
        CHECK(cfg.basis_type == "hermite_gauss");
        CHECK(cfg.coherent.size() == 1);
        CHECK(cfg.squeezers.size() == 1);
        REQUIRE(cfg.layout.has_value());
        CHECK(cfg.layout->kind == "half_x");
    }

    SECTION("unknown top-level key") {
        nlohmann::json doc = base_doc();
        doc["bogus"] = 1;
        CHECK_THROWS_WITH(parse(doc), ContainsSubstring("config.bogus: unknown key"));
    }

    SECTION("missing required section") {
        nlohmann::json doc = base_doc();
        doc.erase("grid");
        CHECK_THROWS_WITH(parse(doc), ContainsSubstring("config.grid: missing"));
    }

    SECTION("grid field of the wrong type") {
        nlohmann::json doc = base_doc();
        doc["grid"]["nx"] = "sixty-four";
        CHECK_THROWS_WITH(parse(doc), ContainsSubstring("grid.nx"));
    }

    SECTION("nonpositive grid rejected") {
        nlohmann::json doc = base_doc();
        doc["grid"]["nx"] = 0;
        CHECK_THROWS_AS(parse(doc), config_error);
    }

    SECTION("basis type misspelled") {
        nlohmann::json doc = base_doc();
        doc["basis"]["type"] = "hermitegauss";
        CHECK_THROWS_WITH(parse(doc), ContainsSubstring("basis.type"));
    }

    SECTION("file basis cannot take hermite parameters") {
        nlohmann::json doc = base_doc();
        doc["basis"] = {{"type", "file"}, {"path", "b.json"}, {"waist", 1.0}};
        CHECK_THROWS_WITH(parse(doc), ContainsSubstring("basis.max_order"));
    }

    SECTION("unknown key inside a coherent entry") {
        nlohmann::json doc = base_doc();
        doc["state"]["coherent"][0]["imag"] = 2.0;
        CHECK_THROWS_WITH(parse(doc),
                          ContainsSubstring("state.coherent[0].imag: unknown key"));
    }

    SECTION("squeezer missing r") {
        nlohmann::json doc = base_doc();
        doc["state"]["squeezers"][0].erase("r");
        CHECK_THROWS_WITH(parse(doc),
                          ContainsSubstring("state.squeezers[0].r: missing"));
    }

    SECTION("layout gains must be numbers") {
        nlohmann::json doc = base_doc();
        doc["layout"]["gains"][1] = "one";
        CHECK_THROWS_WITH(parse(doc), ContainsSubstring("layout.gains[1]"));
    }

    SECTION("unknown primitive") {
        nlohmann::json doc = base_doc();
        doc["layout"]["primitive"] = "thirds";
        CHECK_THROWS_WITH(parse(doc),
                          ContainsSubstring("layout.primitive: unknown primitive"));
    }

    SECTION("annulus needs both radii") {
        nlohmann::json doc = base_doc();
        doc["layout"] = {{"primitive", "annulus"},
                         {"r1", 0.5},
                         {"gains", nlohmann::json::array({1.0, -1.0, 0.0})}};
        CHECK_THROWS_WITH(parse(doc), ContainsSubstring("layout.r2: missing"));
    }

    SECTION("radii are annulus-only") {
        nlohmann::json doc = base_doc();
        doc["layout"]["r1"] = 0.5;
        CHECK_THROWS_WITH(parse(doc),
                          ContainsSubstring("layout.r1: only valid for the annulus"));
    }

    SECTION("primitive and mask are mutually exclusive") {
        nlohmann::json doc = base_doc();
        doc["layout"]["mask_file"] = "m.pgm";
        CHECK_THROWS_WITH(parse(doc),
                          ContainsSubstring("exactly one of 'primitive' or 'mask_file'"));
    }

    SECTION("unknown analysis command") {
        nlohmann::json doc = base_doc();
        doc["analysis"] = {{"commands", nlohmann::json::array({"analyse"})}};
        CHECK_THROWS_WITH(
            parse(doc), ContainsSubstring("analysis.commands[0]: unknown command"));
    }

    SECTION("monte carlo needs a sample count") {
        nlohmann::json doc = base_doc();
        doc["analysis"] = {{"monte_carlo", {{"seed", 1}}}};
        CHECK_THROWS_WITH(parse(doc),
                          ContainsSubstring("analysis.monte_carlo.n_samples: missing"));
    }

    SECTION("tolerances must be positive") {
        nlohmann::json doc = base_doc();
        doc["analysis"] = {{"tolerances", {{"dual_path", -1.0}}}};
        CHECK_THROWS_WITH(parse(doc),
                          ContainsSubstring("analysis.tolerances.dual_path"));
    }

    SECTION("multi block requires r") {
        nlohmann::json doc = base_doc();
        doc["multi"] = nlohmann::json::object();
        CHECK_THROWS_WITH(parse(doc), ContainsSubstring("multi.r: missing"));
    }

    SECTION("empty layouts array rejected") {
        nlohmann::json doc = base_doc();
        doc["layouts"] = nlohmann::json::array();
        CHECK_THROWS_WITH(parse(doc), ContainsSubstring("layouts"));
    }

    SECTION("config file that is not JSON") {
        const auto dir = testsupport::scratch_dir("badjson");
        write_text(dir / "cfg.json", "{ not json");
        CHECK_THROWS_AS(load_scenario(dir / "cfg.json"), config_error);
        CHECK_THROWS_AS(load_scenario(dir / "missing.json"), config_error);
        fs::remove_all(dir);
    }
}

TEST_CASE("building from configuration") {
    SECTION("hermite basis has the expected mode count") {
        ScenarioConfig cfg = parse(base_doc());
        ModeBasis basis = build_basis(cfg);
        CHECK(basis.size() == 3);
    }

    SECTION("file basis manifest round trips modes through CSV") {
        const auto dir = testsupport::scratch_dir("manifest");
        const Grid g(32, 32, 8.0, 8.0);
        ModeBasis hg = testsupport::polished_hg(1, 1.0, g);
        nlohmann::json manifest;
        manifest["modes"] = nlohmann::json::array();
        for (int i = 0; i < hg.size(); ++i) {
            const std::string name = "mode" + std::to_string(i) + ".csv";
            write_mode_csv(hg[i], dir / name);
            manifest["modes"].push_back(name);
        }
        manifest["ortho_tol"] = 1e-8;
        write_text(dir / "basis.json", manifest.dump(2));

        nlohmann::json doc = base_doc();
        doc["grid"] = {{"nx", 32}, {"ny", 32}, {"width_x", 8.0}, {"width_y", 8.0}};
        doc["basis"] = {{"type", "file"}, {"path", "basis.json"}};
        ScenarioConfig cfg = parse_scenario(doc, dir);
        ModeBasis loaded = build_basis(cfg);
        REQUIRE(loaded.size() == hg.size());
        for (int i = 0; i < hg.size(); ++i)
            CHECK(std::abs(overlap(loaded[i], hg[i]) - cplx(1.0)) < 1e-12);
        fs::remove_all(dir);
    }

    SECTION("covariance file overrides the generated covariance") {
        const auto dir = testsupport::scratch_dir("covfile");
        GaussianState target = make_state(3, {}, {{1, 0.8, 0.4}});
        nlohmann::json cov = nlohmann::json::array();
        for (int r = 0; r < 6; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < 6; ++c)
                row.push_back(target.cov(r, c));
            cov.push_back(row);
        }
        write_text(dir / "cov.json", cov.dump());

        nlohmann::json doc = base_doc();
        doc["state"] = {{"coherent",
                         nlohmann::json::array({{{"mode", 0}, {"re", 10.0}}})},
                        {"cov_file", "cov.json"}};
        ScenarioConfig cfg = parse_scenario(doc, dir);
        GaussianState s = build_state(cfg, 3);
        CHECK((s.cov - target.cov).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(s.mean[0] == cplx(10.0, 0.0));
        fs::remove_all(dir);
    }

    SECTION("unphysical covariance file rejected") {
        const auto dir = testsupport::scratch_dir("badcov");
        nlohmann::json cov = nlohmann::json::array();
        for (int r = 0; r < 6; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < 6; ++c)
                row.push_back(r == c ? 0.5 : 0.0);
            cov.push_back(row);
        }
        write_text(dir / "cov.json", cov.dump());
        nlohmann::json doc = base_doc();
        doc["state"]["cov_file"] = "cov.json";
        doc["state"].erase("squeezers");
        ScenarioConfig cfg = parse_scenario(doc, dir);
        CHECK_THROWS_WITH(build_state(cfg, 3),
                          ContainsSubstring("state.cov_file"));
        fs::remove_all(dir);
    }

    SECTION("mask layout from a label image") {
        const auto dir = testsupport::scratch_dir("mask");
        LabelImage img;
        img.nx = 4;
        img.ny = 4;
        img.labels.assign(16, 0);
        for (int i = 8; i < 16; ++i)
            img.labels[static_cast<size_t>(i)] = 1;
        img.labels[0] = 2;
        write_label_pgm(img, dir / "mask.pgm");

        nlohmann::json doc = base_doc();
        doc["grid"] = {{"nx", 4}, {"ny", 4}, {"width_x", 2.0}, {"width_y", 2.0}};
        doc["layout"] = {{"mask_file", "mask.pgm"},
                         {"gains", nlohmann::json::array({1.0, -1.0, 0.5})}};
        ScenarioConfig cfg = parse_scenario(doc, dir);
        PixelLayout layout = build_layout(cfg, *cfg.layout, "layout");
        CHECK(layout.pixel_count() == 3);
        CHECK(layout.pixel_of_cell == std::vector<int>(img.labels.begin(),
                                                       img.labels.end()));

        // gain count must cover the highest label
        doc["layout"]["gains"] = nlohmann::json::array({1.0, -1.0});
        ScenarioConfig short_cfg = parse_scenario(doc, dir);
        CHECK_THROWS_WITH(build_layout(short_cfg, *short_cfg.layout, "layout"),
                          ContainsSubstring("layout.gains"));
        fs::remove_all(dir);
    }
}

TEST_CASE("run_analyze") {
    SECTION("report fields and the dual-path agreement") {
        nlohmann::json doc = base_doc();
        ScenarioConfig cfg = parse(doc);
        CommandResult res = run_analyze(cfg);
        CHECK(res.exit_code == 0);
        const auto& out = res.report;
        CHECK(out["command"] == "analyze");
        CHECK(out["config"] == doc);
        for (const char* key : {"mean", "variance", "shot_noise", "sql_ratio", "f",
                                "is_difference", "detection_mode_export_path",
                                "small_photon_warning"})
            CHECK(out["report"].contains(key));
        CHECK(out["report"]["is_difference"] == true);
        CHECK(out["report"]["detection_mode_export_path"].is_null());
        CHECK(out["report"]["shot_noise"].get<double>() == Approx(1e4).epsilon(1e-10));
        CHECK(out["cross_check"]["agree"] == true);
        CHECK(out["cross_check"]["relative_discrepancy"].get<double>() < 1e-9);

        // the report must match the library computation exactly
        ModeBasis basis = orthonormalized(build_basis(cfg));
        GaussianState state = build_state(cfg, basis.size());
        PixelLayout layout = build_layout(cfg, *cfg.layout, "layout");
        MeasurementReport direct = variance_direct(state, basis, layout);
        CHECK(out["report"]["variance"].get<double>() == direct.variance);
        CHECK(out["report"]["mean"].get<double>() == direct.mean);
    }

    SECTION("identical configs give byte-identical reports") {
        ScenarioConfig cfg = parse(base_doc());
        CommandResult a = run_analyze(cfg);
        CommandResult b = run_analyze(cfg);
        CHECK(a.report.dump() == b.report.dump());
    }

    SECTION("monte carlo section appears and agrees with the analysis") {
        nlohmann::json doc = base_doc();
        doc["analysis"] = {{"monte_carlo",
                            {{"n_samples", 40000}, {"seed", 9}, {"shards", 2}}}};
        ScenarioConfig cfg = parse(doc);
        CommandResult res = run_analyze(cfg);
        REQUIRE(res.report.contains("monte_carlo"));
        const auto& mc = res.report["monte_carlo"];
        CHECK(mc["n_samples"] == 40000);
        CHECK(mc["seed"] == 9);
        CHECK(mc["shards"] == 2);
        const double sim_var = mc["sample_variance"].get<double>();
        const double sim_err = mc["stderr_variance"].get<double>();
        const double analytic = res.report["report"]["variance"].get<double>();
        CHECK(std::abs(sim_var - analytic) < 5.0 * sim_err);
    }

    SECTION("single-sample monte carlo serializes the undefined variance as null") {
        nlohmann::json doc = base_doc();
        doc["analysis"] = {{"monte_carlo", {{"n_samples", 1}}}};
        CommandResult res = run_analyze(parse(doc));
        CHECK(res.report["monte_carlo"]["sample_variance"].is_null());
        CHECK(res.report["monte_carlo"]["stderr_variance"].is_null());
    }

    SECTION("unattainable dual-path tolerance flips the exit code") {
        nlohmann::json doc = base_doc();
        doc["analysis"] = {{"tolerances", {{"dual_path", 1e-18}}}};
        CommandResult res = run_analyze(parse(doc));
        CHECK(res.exit_code == 3);
        CHECK(res.report["cross_check"]["agree"] == false);
    }

    SECTION("missing layout is a config error") {
        nlohmann::json doc = base_doc();
        doc.erase("layout");
        CHECK_THROWS_WITH(run_analyze(parse(doc)),
                          ContainsSubstring("layout: missing"));
    }
}

TEST_CASE("run_degree") {
    nlohmann::json doc = base_doc();
    doc.erase("layout");
    CommandResult res = run_degree(parse(doc));
    CHECK(res.exit_code == 0);
    CHECK(res.report["command"] == "degree");
    CHECK(res.report["degree"] == 2);
    CHECK(res.report["single_mode"] == false);

    doc["state"].erase("squeezers");
    CommandResult coherent_only = run_degree(parse(doc));
    CHECK(coherent_only.report["degree"] == 1);
    CHECK(coherent_only.report["single_mode"] == true);
}

TEST_CASE("run_multi") {
    nlohmann::json doc = base_doc();
    doc.erase("layout");
    doc["basis"]["max_order"] = 2;
    doc["state"].erase("squeezers");
    doc["layouts"] = nlohmann::json::array(
        {{{"primitive", "half_x"}, {"gains", nlohmann::json::array({-1.0, 1.0})}},
         {{"primitive", "half_y"}, {"gains", nlohmann::json::array({-1.0, 1.0})}}});
    doc["multi"] = {{"r", 1.0}};

    SECTION("two independent differences, both below the squeezed bound") {
        CommandResult res = run_multi(parse(doc));
        CHECK(res.exit_code == 0);
        CHECK(res.report["command"] == "multi");
        CHECK(res.report["plan_degree"] == 3);
        CHECK(res.report["subspace_rank"] == 2);
        CHECK(res.report["dependent_layouts"] == false);
        CHECK(res.report["squeezing_r"] == 1.0);
        REQUIRE(res.report["reports"].size() == 2);
        const double bound = 0.13533528323661270 + 1e-6;
        for (const auto& rep : res.report["reports"]) {
            CHECK(rep["sql_ratio"].get<double>() <= bound);
            CHECK(rep["is_difference"] == true);
        }
    }

    SECTION("configured squeezers are rejected, the plan owns them") {
        doc["state"]["squeezers"] =
            nlohmann::json::array({{{"mode", 1}, {"r", 0.5}}});
        CHECK_THROWS_WITH(run_multi(parse(doc)),
                          ContainsSubstring("state.squeezers"));
    }

    SECTION("missing pieces are config errors") {
        nlohmann::json no_r = doc;
        no_r.erase("multi");
        CHECK_THROWS_WITH(run_multi(parse(no_r)), ContainsSubstring("multi.r"));
        nlohmann::json no_layouts = doc;
        no_layouts.erase("layouts");
        CHECK_THROWS_WITH(run_multi(parse(no_layouts)),
                          ContainsSubstring("layouts: missing"));
    }
}

TEST_CASE("run_export_modes") {
    SECTION("balanced two-zone layout exports all four constituents") {
        const auto dir = testsupport::scratch_dir("export");
        ScenarioConfig cfg = parse(base_doc());
        CommandResult res = run_export_modes(cfg, "csv", dir);
        CHECK(res.exit_code == 0);
        const auto& files = res.report["files"];
        for (const char* name : {"v0", "w0", "w1", "v1"}) {
            REQUIRE(files.contains(name));
            CHECK(fs::exists(files[name].get<std::string>()));
        }
        CHECK(res.report["report"]["detection_mode_export_path"] == files["w1"]);

        // reimported detection mode equals the sign-flipped beam
        ModeBasis basis = orthonormalized(build_basis(cfg));
        GaussianState state = build_state(cfg, basis.size());
        auto [v0, n0] = mean_field_mode(state, basis);
        (void)n0;
        SampledMode w1 = read_mode_csv(files["w1"].get<std::string>(), cfg.grid);
        DetectionMode dm = detection_mode(v0, build_layout(cfg, *cfg.layout, "layout"));
        CHECK((w1.amp - dm.w1.amp).cwiseAbs().maxCoeff() < 1e-12);
        fs::remove_all(dir);
    }

    SECTION("general layouts export beam and detection mode only") {
        const auto dir = testsupport::scratch_dir("export2");
        nlohmann::json doc = base_doc();
        doc["layout"]["gains"] = nlohmann::json::array({0.5, 1.0});
        CommandResult res = run_export_modes(parse(doc), "csv", dir);
        CHECK(res.report["files"].contains("v0"));
        CHECK(res.report["files"].contains("w1"));
        CHECK_FALSE(res.report["files"].contains("w0"));
        fs::remove_all(dir);
    }

    SECTION("pgm format writes binary previews") {
        const auto dir = testsupport::scratch_dir("exportpgm");
        CommandResult res = run_export_modes(parse(base_doc()), "pgm", dir);
        const std::string path = res.report["files"]["w1"].get<std::string>();
        const std::string head = slurp(path).substr(0, 2);
        CHECK(head == "P5");
        fs::remove_all(dir);
    }
}

TEST_CASE("command line interface") {
    const auto dir = testsupport::scratch_dir("cli");
    const fs::path cfg_path = dir / "scenario.json";

    SECTION("analyze: exit 0, well-formed report, reproducible bytes") {
        nlohmann::json doc = base_doc();
        doc["analysis"] = {{"monte_carlo",
                            {{"n_samples", 5000}, {"seed", 3}, {"shards", 2}}}};
        write_text(cfg_path, doc.dump(2));

        CliRun first = run_cli("analyze " + cfg_path.string() + " --out " +
                                   (dir / "rep1.json").string(),
                               dir);
        CHECK(first.exit_code == 0);
        CliRun second = run_cli("analyze " + cfg_path.string() + " --out " +
                                    (dir / "rep2.json").string(),
                                dir);
        CHECK(second.exit_code == 0);
        const std::string rep1 = slurp(dir / "rep1.json");
        REQUIRE_FALSE(rep1.empty());
        CHECK(rep1 == slurp(dir / "rep2.json"));

        // the file agrees with the in-process pipeline byte for byte
        CommandResult lib = run_analyze(load_scenario(cfg_path));
        CHECK(rep1 == lib.report.dump(2) + "\n");

        nlohmann::json parsed = nlohmann::json::parse(rep1);
        CHECK(parsed["command"] == "analyze");
        CHECK(parsed["cross_check"]["agree"] == true);
        CHECK(parsed["monte_carlo"]["seed"] == 3);
    }

    SECTION("stdout carries the report when --out is absent") {
        write_text(cfg_path, base_doc().dump(2));
        CliRun run = run_cli("degree " + cfg_path.string(), dir);
        CHECK(run.exit_code == 0);
        nlohmann::json parsed = nlohmann::json::parse(run.output);
        CHECK(parsed["degree"] == 2);
    }

    SECTION("--seed overrides the configured stream and the echo") {
        nlohmann::json doc = base_doc();
        doc["analysis"] = {{"monte_carlo", {{"n_samples", 2000}, {"seed", 1}}}};
        write_text(cfg_path, doc.dump(2));
        CliRun run = run_cli("analyze " + cfg_path.string() + " --seed 77", dir);
        CHECK(run.exit_code == 0);
        nlohmann::json parsed = nlohmann::json::parse(run.output);
        CHECK(parsed["monte_carlo"]["seed"] == 77);
        CHECK(parsed["config"]["analysis"]["monte_carlo"]["seed"] == 77);
    }

    SECTION("config errors exit 1 and name the key") {
        nlohmann::json doc = base_doc();
        doc["bogus"] = true;
        write_text(cfg_path, doc.dump(2));
        CliRun run = run_cli("analyze " + cfg_path.string(), dir);
        CHECK(run.exit_code == 1);
        CHECK_THAT(run.errors, ContainsSubstring("config.bogus"));

        CliRun missing = run_cli("analyze " + (dir / "absent.json").string(), dir);
        CHECK(missing.exit_code == 1);
    }

    SECTION("degenerate measurements exit 2") {
        nlohmann::json doc = base_doc();
        doc["layout"]["gains"] = nlohmann::json::array({0.0, 0.0});
        write_text(cfg_path, doc.dump(2));
        CliRun run = run_cli("analyze " + cfg_path.string(), dir);
        CHECK(run.exit_code == 2);
        CHECK_THAT(run.errors, ContainsSubstring("degenerate"));
    }

    SECTION("failed cross-check exits 3 but still writes the report") {
        nlohmann::json doc = base_doc();
        doc["analysis"] = {{"tolerances", {{"dual_path", 1e-18}}}};
        write_text(cfg_path, doc.dump(2));
        CliRun run = run_cli("analyze " + cfg_path.string() + " --out " +
                                 (dir / "rep.json").string(),
                             dir);
        CHECK(run.exit_code == 3);
        nlohmann::json parsed = nlohmann::json::parse(slurp(dir / "rep.json"));
        CHECK(parsed["cross_check"]["agree"] == false);
    }

    SECTION("export-modes writes into --out and reports to stdout") {
        write_text(cfg_path, base_doc().dump(2));
        const fs::path out_dir = dir / "modes";
        CliRun run = run_cli("export-modes " + cfg_path.string() + " --format csv --out " +
                                 out_dir.string(),
                             dir);
        CHECK(run.exit_code == 0);
        nlohmann::json parsed = nlohmann::json::parse(run.output);
        CHECK(fs::exists(out_dir / "w1.csv"));
        CHECK(parsed["files"]["w1"].get<std::string>() == (out_dir / "w1.csv").string());
    }

    SECTION("missing subcommand is a usage error") {
        CliRun run = run_cli("", dir);
        CHECK(run.exit_code != 0);
    }

    fs::remove_all(dir);
}
