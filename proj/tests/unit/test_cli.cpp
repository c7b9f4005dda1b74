#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"

using namespace chaosmm;
using namespace chaosmm::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("chaosmm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    RunReport run(const json& doc, const std::string& sub = "", std::size_t workers = 1) {
        RunOptions opt;
        opt.out_dir = dir_ / sub;
        opt.workers = workers;
        return run_command(parse_config(doc), opt);
    }

    fs::path dir_;
};

std::string config_error(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const json kSimulate = json::parse(R"({
  "model": {"kind": "static", "epsilon": 0.1},
  "integrator": {"dt": 0.01, "n_steps": 1000},
  "experiment": {"simulate": {"energy_target": 10.6, "master_seed": 3}}
})");

}  // namespace

TEST(FormatNumber, SeventeenDigits) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(-2.5), "-2.5");
    EXPECT_EQ(format_number(1e-20), "9.9999999999999995e-21");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(-INFINITY), "-inf");
    for (double v : {0.1, 1.0 / 3.0, 2.718281828459045, -1e300, 5e-324}) EXPECT_EQ(std::strtod(format_number(v).c_str(), nullptr), v);
}

TEST(CsvWriter, LayoutAndLineEndings) {
    CsvWriter csv{"a", "b", "c"};
    csv.cell(1.5).cell(std::size_t{7}).cell("x");
    csv.end_row();
    EXPECT_EQ(csv.str(), "a,b,c\n1.5,7,x\n");
    EXPECT_EQ(csv.str().find('\r'), std::string::npos);
}

TEST(Svg, ScatterStructure) {
    const std::vector<ScatterPoint> pts = {{0, 0}, {1, 2}, {-1, 3}};
    const std::string svg = render_scatter_svg(pts, "t", "x", "p_x");
    EXPECT_NE(svg.find("viewBox=\"0 0 1000 1000\""), std::string::npos);
    std::size_t circles = 0;
    for (std::size_t pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
    EXPECT_EQ(circles, 3u);
    EXPECT_NE(svg.find("r=\"1\""), std::string::npos);
    EXPECT_EQ(svg, render_scatter_svg(pts, "t", "x", "p_x"));
    EXPECT_NO_THROW(render_scatter_svg({}, "empty", "x", "y"));
}

TEST(Config, DefaultsAndRoundTrip) {
    const RunConfig c = parse_config(kSimulate);
    EXPECT_EQ(c.model.kind, ModelKind::StaticRisk);
    EXPECT_EQ(c.model.k_x, 0.11);
    EXPECT_EQ(c.model.x_0, 3.0);
    EXPECT_EQ(c.integrator.scheme, Scheme::Yoshida4);
    EXPECT_EQ(c.master_seed, 3u);
    const RunConfig again = parse_config(to_json(c));
    EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, ErrorsNameTheField) {
    json d = kSimulate;
    d["integrator"]["n_steps"] = 0;
    EXPECT_NE(config_error(d).find("integrator.n_steps"), std::string::npos);

    d = kSimulate;
    d["model"]["m_x"] = -1;
    EXPECT_NE(config_error(d).find("model.m_x"), std::string::npos);

    d = kSimulate;
    d["model"]["colour"] = "red";
    EXPECT_NE(config_error(d).find("model.colour"), std::string::npos);

    d = kSimulate;
    d["integrator"]["scheme"] = "euler";
    EXPECT_NE(config_error(d).find("integrator.scheme"), std::string::npos);

    d = kSimulate;
    d["experiment"]["poincare"] = json::object();
    EXPECT_NE(config_error(d).find("experiment"), std::string::npos);

    d = kSimulate;
    d.erase("model");
    EXPECT_NE(config_error(d).find("model"), std::string::npos);

    d = kSimulate;
    d["model"]["kind"] = "dynamic";
    d["experiment"] = {{"poincare", json::object()}};
    EXPECT_NE(config_error(d).find("model.kind"), std::string::npos);

    d = kSimulate;
    d["experiment"] = {{"kam-check", {{"i_x", -1.0}}}};
    EXPECT_NE(config_error(d).find("experiment.kam-check.i_x"), std::string::npos);

    d = kSimulate;
    d["experiment"] = {{"potential-grid", {{"n", 1}}}};
    EXPECT_NE(config_error(d).find("experiment.potential-grid.n"), std::string::npos);

    d = kSimulate;
    d["experiment"]["simulate"]["sampling_box"] = {
        {"q1", {5, 9}}, {"q2", {-1, 1}}, {"p1", {-1, 1}}, {"p2", {-1, 1}}};
    EXPECT_NE(config_error(d).find("sampling_box"), std::string::npos);
}

TEST(Config, KickPotentialDefaultsToSmallLeapfrogSteps) {
    const json d = json::parse(R"({
      "model": {"kind": "limited", "epsilon": 0.1, "inventory_potential": {"type": "kick", "k_v": 0.1, "v_max": 1}},
      "experiment": {"simulate": {"initial_state": {"q1": 3, "q2": 0.5, "p1": 0, "p2": 0}}}
    })");
    const RunConfig c = parse_config(d);
    EXPECT_EQ(c.integrator.scheme, Scheme::Leapfrog);
    EXPECT_EQ(c.integrator.dt, 0.001);
}

TEST(Config, SeedOverride) {
    RunConfig c = parse_config(kSimulate);
    apply_seed_override(c, nullptr);
    EXPECT_EQ(c.master_seed, 3u);
    apply_seed_override(c, "18446744073709551615");
    EXPECT_EQ(c.master_seed, 18446744073709551615ULL);
    EXPECT_THROW(apply_seed_override(c, "12abc"), ConfigError);
    EXPECT_THROW(apply_seed_override(c, "-1"), ConfigError);
}

TEST(Config, ExperimentNames) {
    for (const char* n : {"simulate", "poincare", "lyapunov", "kam-check", "sample-hist", "potential-grid"}) {
        ASSERT_TRUE(parse_experiment(n).has_value());
        EXPECT_EQ(to_string(*parse_experiment(n)), n);
    }
    EXPECT_FALSE(parse_experiment("fly").has_value());
}

TEST_F(CliTest, SimulateWritesTrajectoryAndMetadata) {
    const RunReport r = run(kSimulate);
    ASSERT_EQ(r.exit_code, kExitOk) << r.message;
    const auto rows = read_csv(dir_ / "trajectory.csv");
    ASSERT_EQ(rows.size(), 1002u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"step", "t", "x", "v", "p_x", "p_v", "energy"}));
    EXPECT_EQ(rows[1][0], "0");
    EXPECT_EQ(rows[1001][0], "1000");
    EXPECT_NEAR(std::stod(rows[1][6]), 10.6, 0.01);

    const json meta = json::parse(slurp(dir_ / "metadata.json"));
    EXPECT_EQ(meta["command"], "simulate");
    EXPECT_EQ(meta["master_seed"], 3);
    EXPECT_TRUE(meta.contains("version"));
    EXPECT_EQ(meta["results"]["termination"]["kind"], "completed");
    EXPECT_EQ(meta["config"], to_json(parse_config(kSimulate)));
}

TEST_F(CliTest, SimulateDynamicReconstructsInventory) {
    const json d = json::parse(R"({
      "model": {"kind": "dynamic", "epsilon": 0.2},
      "integrator": {"n_steps": 100},
      "experiment": {"simulate": {"initial_state": {"q1": 4, "q2": 2, "p1": 0.1, "p2": 0.3}}}
    })");
    ASSERT_EQ(run(d).exit_code, kExitOk);
    const auto rows = read_csv(dir_ / "trajectory.csv");
    EXPECT_EQ(std::stod(rows[1][3]), 0.5);
    EXPECT_EQ(std::stod(rows[1][4]), 0.1 + 0.5 * 0.3);
    EXPECT_EQ(std::stod(rows[1][5]), 4 * 0.3);
}

TEST_F(CliTest, SimulateRecordsSingularityExit) {
    const json d = json::parse(R"({
      "model": {"kind": "dynamic", "epsilon": 0.1},
      "integrator": {"n_steps": 10000},
      "experiment": {"simulate": {"initial_state": {"q1": 3, "q2": 1, "p1": -8, "p2": 0}}}
    })");
    ASSERT_EQ(run(d).exit_code, kExitOk);
    const json meta = json::parse(slurp(dir_ / "metadata.json"));
    EXPECT_NE(meta["results"]["termination"]["kind"], "completed");
}

TEST_F(CliTest, PoincareSweepFiles) {
    const json d = json::parse(R"({
      "model": {},
      "integrator": {"n_steps": 5000},
      "experiment": {"poincare": {"epsilons": [0.0001, 0.1], "energy_targets": [1, 5], "n_paths": 3}},
      "output": {"formats": ["csv", "svg"]}
    })");
    const RunReport r = run(d, "", 2);
    ASSERT_EQ(r.exit_code, kExitOk) << r.message;
    for (const char* stem : {"poincare_eps0.0001_E1", "poincare_eps0.0001_E5", "poincare_eps0.1_E1", "poincare_eps0.1_E5"}) {
        const auto rows = read_csv(dir_ / (std::string(stem) + ".csv"));
        EXPECT_EQ(rows[0], (std::vector<std::string>{"path_id", "t_cross", "x", "p_x"}));
        EXPECT_GT(rows.size(), 1u);
        EXPECT_TRUE(fs::exists(dir_ / (std::string(stem) + ".svg")));
    }
}

TEST_F(CliTest, PoincareEmptySectionHasHeaderOnly) {
    const json d = json::parse(R"({
      "model": {"epsilon": 0.1},
      "integrator": {"n_steps": 1},
      "experiment": {"poincare": {"n_paths": 2}}
    })");
    ASSERT_EQ(run(d).exit_code, kExitOk);
    EXPECT_EQ(slurp(dir_ / "poincare.csv"), "path_id,t_cross,x,p_x\n");
}

TEST_F(CliTest, LyapunovIntegrableAndSummary) {
    json d = json::parse(R"({
      "model": {},
      "integrator": {"n_steps": 1000000},
      "experiment": {"lyapunov": {"epsilons": [0], "n_paths": 1, "energy_target": 5}}
    })");
    ASSERT_EQ(run(d).exit_code, kExitOk);
    auto rows = read_csv(dir_ / "lyapunov.csv");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"epsilon", "path_id", "lambda_1", "lambda_2", "lambda_3", "lambda_4",
                                                 "h_ks"}));
    EXPECT_EQ(rows[1][6], "0");

    d["integrator"]["n_steps"] = 20000;
    d["experiment"]["lyapunov"]["epsilons"] = {0.01, 0.1};
    d["experiment"]["lyapunov"]["n_paths"] = 3;
    ASSERT_EQ(run(d, "grid").exit_code, kExitOk);
    rows = read_csv(dir_ / "grid" / "lyapunov.csv");
    EXPECT_EQ(rows.size(), 7u);
    const auto summary = read_csv(dir_ / "grid" / "lyapunov_summary.csv");
    ASSERT_EQ(summary.size(), 3u);
    for (std::size_t i = 1; i < summary.size(); ++i) {
        const double mn = std::stod(summary[i][2]);
        const double mx = std::stod(summary[i][3]);
        const double mean = std::stod(summary[i][4]);
        EXPECT_GE(mx, mean);
        EXPECT_GE(mean, mn);
        EXPECT_EQ(std::stod(summary[i][5]), mx - mn);
    }
}

TEST_F(CliTest, AllPathsFailingIsRuntimeError) {
    const json d = json::parse(R"({
      "model": {},
      "integrator": {"n_steps": 100},
      "experiment": {"lyapunov": {"energy_target": -5, "n_paths": 2, "renorm_every": 10}}
    })");
    const RunReport r = run(d);
    EXPECT_EQ(r.exit_code, kExitRuntime);
    EXPECT_TRUE(fs::exists(dir_ / "metadata.json"));
}

TEST_F(CliTest, KamCheckUnperturbedRow) {
    const json d = json::parse(R"({
      "model": {},
      "integrator": {"n_steps": 400000, "record_every": 10},
      "experiment": {"kam-check": {"epsilons": [0, 0.001]}}
    })");
    ASSERT_EQ(run(d).exit_code, kExitOk);
    const auto rows = read_csv(dir_ / "kam.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].size(), 9u);
    EXPECT_EQ(rows[0][7], "omega_x_measured");
    const double w = std::stod(rows[1][3]);
    EXPECT_NEAR(std::stod(rows[1][5]), w, 1e-3);
    EXPECT_NEAR(std::stod(rows[1][7]), w, 1e-3);
    EXPECT_EQ(rows[1][8], rows[2][8]);
    EXPECT_NEAR(std::stod(rows[1][8]), 0.015434, 1e-6);
}

TEST_F(CliTest, SampleHistCounts) {
    const json d = json::parse(R"({
      "model": {"epsilon": 0.1},
      "integrator": {"n_steps": 100000},
      "experiment": {"sample-hist": {"energy_target": 10.6, "every_n": 100, "n_bins": 20}}
    })");
    ASSERT_EQ(run(d).exit_code, kExitOk);
    const auto sampled = read_csv(dir_ / "sampled.csv");
    EXPECT_EQ(sampled[0], (std::vector<std::string>{"sample_index", "t", "x"}));
    EXPECT_EQ(sampled.size(), 1002u);
    EXPECT_EQ(std::stod(sampled[2][1]), 1.0);
    const auto hist = read_csv(dir_ / "hist.csv");
    EXPECT_EQ(hist[0], (std::vector<std::string>{"bin_left", "bin_right", "count"}));
    ASSERT_EQ(hist.size(), 21u);
    std::size_t total = 0;
    for (std::size_t i = 1; i < hist.size(); ++i) total += std::stoul(hist[i][2]);
    EXPECT_EQ(total, 1001u);
}

TEST_F(CliTest, PotentialGridLayout) {
    const json d = json::parse(R"({
      "model": {"x_0": 1, "epsilon": 0.2},
      "experiment": {"potential-grid": {"x_range": [-2, 4], "v_range": [-3, 3], "n": 5}}
    })");
    ASSERT_EQ(run(d).exit_code, kExitOk);
    const auto rows = read_csv(dir_ / "potential.csv");
    ASSERT_EQ(rows.size(), 26u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "v", "V"}));
    // x-major: v cycles fastest
    EXPECT_EQ(rows[1][0], "-2");
    EXPECT_EQ(rows[2][0], "-2");
    EXPECT_EQ(rows[1][1], "-3");
    EXPECT_EQ(rows[2][1], "-1.5");
    double best = 1e300;
    std::size_t best_row = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (std::stod(rows[i][2]) < best) {
            best = std::stod(rows[i][2]);
            best_row = i;
        }
    }
    EXPECT_EQ(rows[best_row][0], "1");
    EXPECT_EQ(rows[best_row][1], "0");
}

TEST_F(CliTest, ByteIdenticalAcrossRunsAndWorkers) {
    const json d = json::parse(R"({
      "model": {"epsilon": 0.1},
      "integrator": {"n_steps": 20000},
      "experiment": {"poincare": {"n_paths": 6, "master_seed": 11}}
    })");
    ASSERT_EQ(run(d, "a", 1).exit_code, kExitOk);
    ASSERT_EQ(run(d, "b", 1).exit_code, kExitOk);
    ASSERT_EQ(run(d, "c", 4).exit_code, kExitOk);
    const std::string a = slurp(dir_ / "a" / "poincare.csv");
    EXPECT_GT(a.size(), 100u);
    EXPECT_EQ(a, slurp(dir_ / "b" / "poincare.csv"));
    EXPECT_EQ(a, slurp(dir_ / "c" / "poincare.csv"));
    EXPECT_EQ(slurp(dir_ / "a" / "metadata.json"), slurp(dir_ / "c" / "metadata.json"));
}

TEST(FileTag, ShortDecimal) {
    EXPECT_EQ(file_tag(0.0001), "0.0001");
    EXPECT_EQ(file_tag(20.0), "20");
    EXPECT_EQ(file_tag(0.0025), "0.0025");
    EXPECT_EQ(file_tag(0.0), "0");
}
