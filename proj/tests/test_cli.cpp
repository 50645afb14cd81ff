#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ndsthermo/acceptance.hpp"
#include "ndsthermo/experiment.hpp"

using namespace ndsthermo;

namespace {

std::filesystem::path scratch_dir(const std::string& leaf) {
    auto d = std::filesystem::temp_directory_path() / "ndsthermo-tests" / leaf;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ordered_json doubling_spec_json() {
    return to_json(zoo::circle_affine(2));
}

}  // namespace

TEST_CASE("spec round-trips through JSON") {
    for (const auto& spec : {zoo::circle_affine(2), zoo::torus_diagonal({2, 3}), zoo::golden_mean_shift(),
                             zoo::kolyada_snoha_table(6), zoo::pomeau_manneville_table({0.5, 0.7})}) {
        ordered_json j = to_json(spec);
        NdsSpec back = spec_from_json(j);
        CHECK(to_json(back) == j);
    }
}

TEST_CASE("unknown fields are rejected with the field name") {
    ordered_json j = doubling_spec_json();
    j["mystery"] = 1;
    CHECK_THROWS_WITH_AS(spec_from_json(j), doctest::Contains("mystery"), ParameterError);

    ordered_json cfg{{"spec", doubling_spec_json()},
                     {"command", "entropy"},
                     {"params", ordered_json{{"epsilon", 0.125}, {"n_min", 2}, {"n_max", 6}, {"oops", 1}}}};
    ExperimentConfig parsed = config_from_json(cfg);
    CHECK_THROWS_WITH_AS(execute_experiment(parsed, 1), doctest::Contains("oops"), ParameterError);
}

TEST_CASE("entropy experiment writes all three artifacts and exits zero") {
    auto dir = scratch_dir("entropy");
    ordered_json cfg{{"spec", doubling_spec_json()},
                     {"command", "entropy"},
                     {"params", ordered_json{{"k", 1}, {"epsilon", 0.125}, {"n_min", 2}, {"n_max", 8}}},
                     {"seed", 5}};
    std::string err;
    CHECK(run_experiment(config_from_json(cfg), dir, 1, &err) == 0);
    CHECK(err.empty());
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "series.csv"));
    CHECK(std::filesystem::exists(dir / "plot.dat"));

    ordered_json report = ordered_json::parse(slurp(dir / "report.json"));
    CHECK(report["command"] == "entropy");
    CHECK(report["passed"] == true);
    double est = report["result"]["estimate"].get<double>();
    CHECK(std::fabs(est - std::log(2.0)) <= 0.05);

    // series.csv: header + one row per n per mode (separated + spanning cross-check)
    std::istringstream csv(slurp(dir / "series.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "k,n,epsilon,mode,count");
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 14);
}

TEST_CASE("identical configs give byte-identical outputs across runs and workers") {
    ordered_json cfg{{"spec", doubling_spec_json()},
                     {"command", "entropy"},
                     {"params", ordered_json{{"epsilon", 0.125}, {"n_min", 2}, {"n_max", 8}}},
                     {"seed", 5}};
    auto d1 = scratch_dir("det1");
    auto d2 = scratch_dir("det2");
    auto d3 = scratch_dir("det3");
    REQUIRE(run_experiment(config_from_json(cfg), d1, 1) == 0);
    REQUIRE(run_experiment(config_from_json(cfg), d2, 1) == 0);
    REQUIRE(run_experiment(config_from_json(cfg), d3, 3) == 0);
    for (const char* f : {"report.json", "series.csv", "plot.dat"}) {
        CHECK(slurp(d1 / f) == slurp(d2 / f));
        CHECK(slurp(d1 / f) == slurp(d3 / f));
    }
}

TEST_CASE("shadow precondition violations exit with status two and cite the precondition") {
    auto dir = scratch_dir("shadow-bad");
    ordered_json cfg{{"spec", doubling_spec_json()},
                     {"command", "shadow"},
                     {"params", ordered_json{{"epsilon", 0.1}, {"delta", 0.06}, {"length", 50}, {"x1", {0.5}}}},
                     {"seed", 5}};
    std::string err;
    CHECK(run_experiment(config_from_json(cfg), dir, 1, &err) == 2);
    CHECK(err.find("sigma^{-1}*eps + delta < eps") != std::string::npos);
}

TEST_CASE("shadow runs report the bound and uniqueness gap") {
    auto dir = scratch_dir("shadow");
    ordered_json cfg{{"spec", doubling_spec_json()},
                     {"command", "shadow"},
                     {"params", ordered_json{{"epsilon", 0.1}, {"delta", 0.04}, {"length", 200}, {"x1", {0.2}}}},
                     {"seed", 17}};
    REQUIRE(run_experiment(config_from_json(cfg), dir, 1) == 0);
    ordered_json report = ordered_json::parse(slurp(dir / "report.json"));
    CHECK(report["result"]["max_error"].get<double>() <= 0.05);
    CHECK(report["result"]["uniqueness_gap"].get<double>() <= 1e-10);
    // trace rows: i, x_i, pseudo_gap, shadow_error
    std::istringstream csv(slurp(dir / "series.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "i,x_i,pseudo_gap,shadow_error");
}

TEST_CASE("failed checks exit with status one") {
    auto dir = scratch_dir("exactness-short");
    ordered_json cfg{{"spec", doubling_spec_json()},
                     {"command", "exactness"},
                     {"params", ordered_json{{"delta", 0.125}, {"horizon", 1}}},
                     {"seed", 0}};
    std::string err;
    CHECK(run_experiment(config_from_json(cfg), dir, 1, &err) == 1);  // N(1/8) = 2 > horizon
    ordered_json report = ordered_json::parse(slurp(dir / "report.json"));
    CHECK(report["passed"] == false);
}

TEST_CASE("exactness runs find the constant through the CLI surface") {
    auto dir = scratch_dir("exactness");
    ordered_json cfg{{"spec", doubling_spec_json()},
                     {"command", "exactness"},
                     {"params", ordered_json{{"delta", 0.125}, {"horizon", 8}}},
                     {"seed", 0}};
    REQUIRE(run_experiment(config_from_json(cfg), dir, 1) == 0);
    ordered_json report = ordered_json::parse(slurp(dir / "report.json"));
    CHECK(report["result"]["constant"].get<long long>() == 2);
}

TEST_CASE("plot data is deterministic, headed, and rejects empty series") {
    auto dir = scratch_dir("plot");
    std::vector<std::pair<double, double>> series{{1.0, 0.5}, {2.0, 1.0 / 3.0}};
    emit_plot_data(series, dir / "a.dat", "test series");
    emit_plot_data(series, dir / "b.dat", "test series");
    CHECK(slurp(dir / "a.dat") == slurp(dir / "b.dat"));
    std::istringstream in(slurp(dir / "a.dat"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "# test series");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
    CHECK_THROWS_AS(emit_plot_data({}, dir / "c.dat", "empty"), ParameterError);
}

TEST_CASE("specify command round-trips segments and reports margins") {
    auto dir = scratch_dir("specify");
    ordered_json cfg{
        {"spec", doubling_spec_json()},
        {"command", "specify"},
        {"params",
         ordered_json{{"segments", ordered_json{{"segments",
                                                 {ordered_json{{"x", {0.2}}, {"j", 1}, {"k", 1}},
                                                  ordered_json{{"x", {0.7}}, {"j", 4}, {"k", 4}}}},
                                                {"gap", 3}}},
                      {"epsilon", 0.3},
                      {"bound", 2}}},
        {"seed", 0}};
    REQUIRE(run_experiment(config_from_json(cfg), dir, 1) == 0);
    ordered_json report = ordered_json::parse(slurp(dir / "report.json"));
    CHECK(report["result"]["pass"] == true);
    CHECK(report["result"]["worst_margin"].get<double>() >= 0.0);
}

TEST_CASE("pressure and scale-stability commands run end to end") {
    auto dir = scratch_dir("pressure");
    ordered_json cfg{{"spec", to_json(zoo::golden_mean_shift())},
                     {"command", "pressure"},
                     {"params", ordered_json{{"potential", ordered_json{{"type", "symbol_letter"},
                                                                        {"values", {0.3, -0.2}}}},
                                             {"epsilon", 0.125},
                                             {"n_min", 4},
                                             {"n_max", 12}}},
                     {"seed", 0}};
    REQUIRE(run_experiment(config_from_json(cfg), dir, 2) == 0);

    auto dir2 = scratch_dir("stability");
    ordered_json cfg2{{"spec", doubling_spec_json()},
                      {"command", "scale-stability"},
                      {"params", ordered_json{{"potential", ordered_json{{"type", "constant"}, {"c", 0.0}}},
                                              {"epsilons", {0.1, 0.05}},
                                              {"n_min", 3},
                                              {"n_max", 10}}},
                      {"seed", 0}};
    REQUIRE(run_experiment(config_from_json(cfg2), dir2, 2) == 0);
    ordered_json report = ordered_json::parse(slurp(dir2 / "report.json"));
    CHECK(report["result"]["max_pairwise_gap"].get<double>() <= 0.05);
}

TEST_CASE("separation reports export the documented CSV columns") {
    auto dir = scratch_dir("sep-csv");
    auto spec = zoo::circle_affine(2);
    std::vector<SeparationReport> reps{greedy_maximal_separated(spec, 1, 2, 0.125, CandidateGrid::automatic()),
                                       greedy_spanning(spec, 1, 2, 0.125, CandidateGrid::automatic())};
    write_separation_reports_csv(reps, dir / "sep.csv");
    std::istringstream in(slurp(dir / "sep.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "k,n,epsilon,mode,cardinality,grid_h");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("unknown commands are schema errors") {
    ordered_json cfg{{"spec", doubling_spec_json()}, {"command", "frobnicate"}, {"params", ordered_json::object()}};
    auto dir = scratch_dir("unknown");
    std::string err;
    CHECK(run_experiment(config_from_json(cfg), dir, 1, &err) == 2);
    CHECK(err.find("frobnicate") != std::string::npos);
}
