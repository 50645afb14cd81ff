// experiment.hpp — configuration-driven experiment runner: parse a config,
// dispatch to the estimators/checks, and emit report.json / series.csv /
// plot.dat deterministically.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ndsthermo/json_io.hpp"
#include "ndsthermo/sampling.hpp"
#include "ndsthermo/zoo.hpp"

namespace ndsthermo {

// ------------------------------ configuration -----------------------------------

struct ExperimentConfig {
    NdsSpec spec;
    std::string command;
    ordered_json params;
    std::uint64_t seed = 0;
};

inline ExperimentConfig config_from_json(const ordered_json& j) {
    const std::string ctx = "config";
    jsondetail::require_allowed_keys(j, {"spec", "command", "params", "seed"}, ctx);
    ExperimentConfig cfg;
    cfg.spec = spec_from_json(jsondetail::require_field(j, "spec", ctx));
    cfg.command = jsondetail::get_string(j, "command", ctx);
    cfg.params = j.contains("params") ? j["params"] : ordered_json::object();
    cfg.seed = jsondetail::get_number_or<std::uint64_t>(j, "seed", ctx, 0);
    return cfg;
}

// --------------------------------- emitters -------------------------------------

inline std::string format_17g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Two-column whitespace-separated plot data, 17 significant digits, one
// metadata comment line.
inline void emit_plot_data(const std::vector<std::pair<double, double>>& series,
                           const std::filesystem::path& path, const std::string& meta) {
    if (series.empty()) throw ParameterError("emit_plot_data: empty series");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_plot_data: cannot open " + path.string());
    out << "# " << meta << "\n";
    for (const auto& [a, b] : series) out << format_17g(a) << " " << format_17g(b) << "\n";
    if (!out) throw std::runtime_error("emit_plot_data: write failed for " + path.string());
}

inline void write_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

inline std::string format_point(const Space& s, const Point& p) {
    std::string out;
    if (s.symbolic_space()) {
        for (int letter : p.word) out += std::to_string(letter);
    } else {
        for (std::size_t i = 0; i < p.coords.size(); ++i) out += (i ? ";" : "") + format_17g(p.coords[i]);
    }
    return out;
}

// Separation-report export with the documented columns.
inline void write_separation_reports_csv(const std::vector<SeparationReport>& reports,
                                         const std::filesystem::path& path) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports)
        rows.push_back({std::to_string(r.k), std::to_string(r.n), format_17g(r.epsilon),
                        to_string(r.mode), std::to_string(r.cardinality()), format_17g(r.grid_h)});
    write_csv({"k", "n", "epsilon", "mode", "cardinality", "grid_h"}, rows, path);
}

// ------------------------------- run results ------------------------------------

struct ExperimentOutput {
    ordered_json report;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    std::vector<std::pair<double, double>> plot;
    std::string plot_meta;
    bool passed = true;
};

namespace expdetail {

inline NRange range_from_params(const ordered_json& p, const std::string& ctx) {
    return NRange(jsondetail::get_number<long long>(p, "n_min", ctx),
                  jsondetail::get_number<long long>(p, "n_max", ctx));
}

inline CandidateGrid grid_from_params(const Space& space, const ordered_json& p) {
    if (p.contains("grid")) return grid_from_json(space, p["grid"]);
    return CandidateGrid::automatic();
}

inline void append_series_rows(ExperimentOutput& out, const CountSeries& cs, const std::string& scope) {
    for (const auto& [n, v] : cs.values) {
        std::vector<std::string> row;
        if (!scope.empty()) row.push_back(scope);
        row.push_back(std::to_string(cs.k));
        row.push_back(std::to_string(n));
        row.push_back(format_17g(cs.epsilon));
        row.push_back(to_string(cs.mode));
        row.push_back(format_17g(v));
        out.csv_rows.push_back(std::move(row));
    }
}

inline PartitionMode partition_mode_from(const ordered_json& p, const std::string& ctx) {
    std::string mode = p.contains("mode") ? p["mode"].get<std::string>() : "separated";
    if (mode == "separated") return PartitionMode::Separated;
    if (mode == "spanning") return PartitionMode::Spanning;
    if (mode == "cover_inf") return PartitionMode::CoverInf;
    if (mode == "cover_sup") return PartitionMode::CoverSup;
    if (mode == "ubv_cover") return PartitionMode::UbvCover;
    throw ParameterError(ctx + ": unknown partition mode \"" + mode + "\"");
}

// ------------------------------ command handlers --------------------------------

inline ExperimentOutput run_entropy(const ExperimentConfig& cfg, int workers) {
    const std::string ctx = "entropy params";
    jsondetail::require_allowed_keys(cfg.params, {"k", "epsilon", "n_min", "n_max", "grid"}, ctx);
    long long k = jsondetail::get_number_or<long long>(cfg.params, "k", ctx, 1);
    double eps = jsondetail::get_number<double>(cfg.params, "epsilon", ctx);
    NRange range = range_from_params(cfg.params, ctx);
    CandidateGrid grid = grid_from_params(cfg.spec.space, cfg.params);

    EntropyReport rep = entropy_estimate(cfg.spec, k, eps, range, grid, workers);
    ExperimentOutput out;
    out.report = to_json(rep);
    out.csv_header = {"k", "n", "epsilon", "mode", "count"};
    append_series_rows(out, rep.series, "");
    if (rep.spanning_series) append_series_rows(out, *rep.spanning_series, "");
    for (const auto& [n, v] : rep.series.values) out.plot.emplace_back(static_cast<double>(n), std::log(v));
    out.plot_meta = "n  log_separated_count  (k=" + std::to_string(k) + ", eps=" + format_17g(eps) + ")";
    return out;
}

inline ExperimentOutput run_asymptotic(const ExperimentConfig& cfg, int workers) {
    const std::string ctx = "asymptotic params";
    jsondetail::require_allowed_keys(cfg.params,
                                     {"epsilon", "k_list", "n_min", "n_max", "grid", "chaos_threshold"}, ctx);
    double eps = jsondetail::get_number<double>(cfg.params, "epsilon", ctx);
    std::vector<long long> k_list;
    for (const auto& k : jsondetail::require_field(cfg.params, "k_list", ctx)) k_list.push_back(k.get<long long>());
    NRange range = range_from_params(cfg.params, ctx);
    CandidateGrid grid = grid_from_params(cfg.spec.space, cfg.params);
    double threshold = jsondetail::get_number_or<double>(cfg.params, "chaos_threshold", ctx, 0.05);

    AsymptoticReport rep = asymptotic_entropy_estimate(cfg.spec, eps, k_list, range, grid, workers, threshold);
    ExperimentOutput out;
    ordered_json profile = ordered_json::array();
    for (const auto& [k, v] : rep.profile) profile.push_back(ordered_json{{"k", k}, {"estimate", v}});
    out.report = ordered_json{{"profile", profile},
                              {"value", rep.value},
                              {"chaotic", rep.chaotic},
                              {"threshold", rep.threshold}};
    if (!rep.chaotic)
        out.report["note"] =
            "asymptotic entropy at the threshold scale is zero; a system with the specification "
            "property would have positive entropy at every start time, so specification is excluded";
    out.csv_header = {"k", "n", "epsilon", "mode", "count"};
    for (const auto& er : rep.reports) append_series_rows(out, er.series, "");
    for (const auto& [k, v] : rep.profile) out.plot.emplace_back(static_cast<double>(k), v);
    out.plot_meta = "k  entropy_estimate  (eps=" + format_17g(eps) + ")";
    return out;
}

inline ExperimentOutput run_entropy_point(const ExperimentConfig& cfg, int workers) {
    const std::string ctx = "entropy-point params";
    jsondetail::require_allowed_keys(cfg.params,
                                     {"x0", "radius", "epsilon", "n_min", "n_max", "grid", "tolerance"}, ctx);
    Point x0 = point_from_json(cfg.spec.space, jsondetail::require_field(cfg.params, "x0", ctx), ctx);
    double radius = jsondetail::get_number<double>(cfg.params, "radius", ctx);
    double eps = jsondetail::get_number<double>(cfg.params, "epsilon", ctx);
    NRange range = range_from_params(cfg.params, ctx);
    CandidateGrid grid = grid_from_params(cfg.spec.space, cfg.params);

    EntropyPointProbe probe = entropy_point_probe(cfg.spec, x0, radius, eps, range, grid, workers);
    double gap = std::fabs(probe.local.estimate - probe.global.estimate);
    ExperimentOutput out;
    out.report = ordered_json{{"x0", to_json(cfg.spec.space, x0)},
                              {"radius", radius},
                              {"local", to_json(probe.local, false)},
                              {"global", to_json(probe.global, false)},
                              {"gap", gap}};
    if (cfg.params.contains("tolerance")) {
        double tol = cfg.params["tolerance"].get<double>();
        out.report["tolerance"] = tol;
        out.passed = gap <= tol;
    }
    out.report["passed"] = out.passed;
    out.csv_header = {"scope", "k", "n", "epsilon", "mode", "count"};
    append_series_rows(out, probe.local.series, "local");
    append_series_rows(out, probe.global.series, "global");
    for (const auto& [n, v] : probe.global.series.values) out.plot.emplace_back(static_cast<double>(n), std::log(v));
    out.plot_meta = "n  log_separated_count_global  (radius=" + format_17g(radius) + ")";
    return out;
}

inline ExperimentOutput run_shadow(const ExperimentConfig& cfg, int) {
    const std::string ctx = "shadow params";
    jsondetail::require_allowed_keys(cfg.params,
                                     {"epsilon", "delta", "length", "x1", "points", "sigma", "rho"}, ctx);
    double eps = jsondetail::get_number<double>(cfg.params, "epsilon", ctx);
    double delta = jsondetail::get_number<double>(cfg.params, "delta", ctx);

    PseudoOrbit pseudo;
    if (cfg.params.contains("points")) {
        pseudo = pseudo_orbit_from_json(cfg.spec.space,
                                        ordered_json{{"points", cfg.params["points"]}, {"delta", delta}});
    } else {
        std::size_t length = jsondetail::get_number<std::size_t>(cfg.params, "length", ctx);
        Rng rng = Rng::stream(cfg.seed, 0x0001);
        Point x1 = cfg.params.contains("x1") ? point_from_json(cfg.spec.space, cfg.params["x1"], ctx)
                                             : random_point(cfg.spec.space, rng);
        pseudo = make_noisy_pseudo_orbit(cfg.spec, x1, length, delta, cfg.seed);
    }
    std::optional<double> sigma, rho;
    if (cfg.params.contains("sigma")) sigma = cfg.params["sigma"].get<double>();
    if (cfg.params.contains("rho")) rho = cfg.params["rho"].get<double>();

    ShadowResult main = shadow(cfg.spec, pseudo, eps, sigma, rho, 0.0);
    ShadowResult other = shadow(cfg.spec, pseudo, eps, sigma, rho, 0.9);
    double uniqueness_gap = distance(cfg.spec.space, main.point, other.point);
    double bound = eps / (sigma ? *sigma : cfg.spec.require_sigma());

    ExperimentOutput out;
    out.report = ordered_json{{"point", to_json(cfg.spec.space, main.point)},
                              {"max_error", main.max_error},
                              {"error_bound", bound},
                              {"uniqueness_gap", uniqueness_gap},
                              {"steps", pseudo.points.size()},
                              {"delta", delta},
                              {"epsilon", eps}};
    out.passed = main.max_error <= bound + 1e-12;
    out.report["passed"] = out.passed;
    out.csv_header = {"i", "x_i", "pseudo_gap", "shadow_error"};
    for (std::size_t i = 0; i < pseudo.points.size(); ++i) {
        double gap = 0.0;
        if (i > 0) {
            Point img = apply_map(cfg.spec.space, cfg.spec.map_at(static_cast<long long>(i)), pseudo.points[i - 1]);
            gap = distance(cfg.spec.space, img, pseudo.points[i]);
        }
        out.csv_rows.push_back({std::to_string(i + 1), format_point(cfg.spec.space, pseudo.points[i]),
                                format_17g(gap), format_17g(main.step_errors[i])});
        out.plot.emplace_back(static_cast<double>(i + 1), main.step_errors[i]);
    }
    out.plot_meta = "i  shadow_error  (eps=" + format_17g(eps) + ", delta=" + format_17g(delta) + ")";
    return out;
}

inline ExperimentOutput run_specify(const ExperimentConfig& cfg, int) {
    const std::string ctx = "specify params";
    jsondetail::require_allowed_keys(cfg.params, {"segments", "epsilon", "bound"}, ctx);
    SpecSegments segs = segments_from_json(cfg.spec.space, jsondetail::require_field(cfg.params, "segments", ctx));
    double eps = jsondetail::get_number<double>(cfg.params, "epsilon", ctx);
    long long bound = jsondetail::get_number_or<long long>(cfg.params, "bound", ctx, segs.gap);

    Point x = specification_point(cfg.spec, segs, eps, bound);
    SpecCheckResult check = specification_check(cfg.spec, x, segs, eps);

    ExperimentOutput out;
    out.report = ordered_json{{"point", to_json(cfg.spec.space, x)},
                              {"epsilon", eps},
                              {"bound", bound},
                              {"pass", check.pass},
                              {"worst_margin", check.worst_margin},
                              {"constraints", check.constraints}};
    out.passed = check.pass;
    out.csv_header = {"segment", "offset", "margin"};
    for (std::size_t c = 0; c < check.margins.size(); ++c) {
        const auto& [m, i, margin] = check.margins[c];
        out.csv_rows.push_back({std::to_string(m + 1), std::to_string(i), format_17g(margin)});
        out.plot.emplace_back(static_cast<double>(c + 1), margin);
    }
    out.plot_meta = "constraint  margin";
    return out;
}

inline ExperimentOutput run_exactness(const ExperimentConfig& cfg, int) {
    const std::string ctx = "exactness params";
    jsondetail::require_allowed_keys(cfg.params, {"delta", "horizon", "k_max", "centers"}, ctx);
    double delta = jsondetail::get_number<double>(cfg.params, "delta", ctx);
    long long horizon = jsondetail::get_number<long long>(cfg.params, "horizon", ctx);
    ExactnessOptions opt;
    opt.k_max = jsondetail::get_number_or<long long>(cfg.params, "k_max", ctx, 1);
    opt.centers = jsondetail::get_number_or<int>(cfg.params, "centers", ctx, 32);

    ExactnessResult res = exactness_constant(cfg.spec, delta, horizon, opt);
    ExperimentOutput out;
    out.report = ordered_json{{"delta", delta}, {"horizon", horizon}, {"method", res.note}};
    if (res.found())
        out.report["constant"] = *res.constant;
    else
        out.report["constant"] = nullptr;
    out.passed = res.found();
    out.report["passed"] = out.passed;
    out.csv_header = {"n", "covered"};
    for (const auto& [n, cov] : res.coverage) {
        out.csv_rows.push_back({std::to_string(n), cov ? "1" : "0"});
        out.plot.emplace_back(static_cast<double>(n), cov ? 1.0 : 0.0);
    }
    out.plot_meta = "n  covered  (delta=" + format_17g(delta) + ")";
    return out;
}

inline ExperimentOutput run_pressure(const ExperimentConfig& cfg, int workers) {
    const std::string ctx = "pressure params";
    jsondetail::require_allowed_keys(cfg.params, {"potential", "epsilon", "n_min", "n_max", "mode", "grid"},
                                     ctx);
    Potential psi = potential_from_json(cfg.spec.space, jsondetail::require_field(cfg.params, "potential", ctx));
    double eps = jsondetail::get_number<double>(cfg.params, "epsilon", ctx);
    NRange range = range_from_params(cfg.params, ctx);
    PartitionMode mode = partition_mode_from(cfg.params, ctx);
    CandidateGrid grid = grid_from_params(cfg.spec.space, cfg.params);

    PressureReport rep = pressure_estimate(cfg.spec, psi, eps, range, mode, grid, workers);
    ExperimentOutput out;
    out.report = to_json(rep);
    out.report["potential"] = to_json(cfg.spec.space, psi);
    out.csv_header = {"mode", "epsilon", "n", "t", "value"};
    for (const auto& [n, v] : rep.values) {
        out.csv_rows.push_back({to_string(mode), format_17g(eps), std::to_string(n), "1", format_17g(v)});
        out.plot.emplace_back(static_cast<double>(n), v);
    }
    out.plot_meta = "n  log_partition  (eps=" + format_17g(eps) + ")";
    return out;
}

inline ExperimentOutput run_pressure_curve(const ExperimentConfig& cfg, int workers) {
    const std::string ctx = "pressure-curve params";
    jsondetail::require_allowed_keys(
        cfg.params, {"potential", "t_grid", "epsilon", "n_min", "n_max", "mode", "grid", "tolerance"}, ctx);
    Potential psi = potential_from_json(cfg.spec.space, jsondetail::require_field(cfg.params, "potential", ctx));
    std::vector<double> t_grid;
    for (const auto& t : jsondetail::require_field(cfg.params, "t_grid", ctx)) t_grid.push_back(t.get<double>());
    double eps = jsondetail::get_number<double>(cfg.params, "epsilon", ctx);
    NRange range = range_from_params(cfg.params, ctx);
    PartitionMode mode = partition_mode_from(cfg.params, ctx);
    CandidateGrid grid = grid_from_params(cfg.spec.space, cfg.params);
    double tol = jsondetail::get_number_or<double>(cfg.params, "tolerance", ctx, 0.02);

    PressureCurve curve = pressure_curve(cfg.spec, psi, t_grid, eps, range, mode, grid, workers, tol);
    ExperimentOutput out;
    ordered_json pts = ordered_json::array();
    for (const auto& [t, v] : curve.points) pts.push_back(ordered_json{{"t", t}, {"estimate", v}});
    ordered_json checks = ordered_json::array();
    for (const auto& c : curve.checks) checks.push_back(to_json(c));
    out.report = ordered_json{{"potential", to_json(cfg.spec.space, psi)},
                              {"potential_norm", curve.potential_norm},
                              {"points", pts},
                              {"checks", checks},
                              {"passed", curve.passed()}};
    out.passed = curve.passed();
    out.csv_header = {"mode", "epsilon", "n", "t", "value"};
    for (const auto& [t, v] : curve.points) {
        out.csv_rows.push_back({to_string(mode), format_17g(eps), "-1", format_17g(t), format_17g(v)});
        out.plot.emplace_back(t, v);
    }
    out.plot_meta = "t  pressure_estimate  (eps=" + format_17g(eps) + ")";
    return out;
}

inline ExperimentOutput run_properties(const ExperimentConfig& cfg, int) {
    const std::string ctx = "properties params";
    jsondetail::require_allowed_keys(cfg.params, {"psi", "phi", "epsilon", "n", "t_grid", "grid"}, ctx);
    Potential psi = potential_from_json(cfg.spec.space, jsondetail::require_field(cfg.params, "psi", ctx));
    Potential phi = potential_from_json(cfg.spec.space, jsondetail::require_field(cfg.params, "phi", ctx));
    double eps = jsondetail::get_number<double>(cfg.params, "epsilon", ctx);
    long long n = jsondetail::get_number<long long>(cfg.params, "n", ctx);
    std::vector<double> t_grid{-2.0, -1.0, 0.0, 1.0, 2.0};
    if (cfg.params.contains("t_grid")) {
        t_grid.clear();
        for (const auto& t : cfg.params["t_grid"]) t_grid.push_back(t.get<double>());
    }
    CandidateGrid grid = grid_from_params(cfg.spec.space, cfg.params);

    PropertySuiteReport rep = pressure_property_suite(cfg.spec, psi, phi, eps, n, t_grid, grid);
    ExperimentOutput out;
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) checks.push_back(to_json(c));
    out.report = ordered_json{{"epsilon", eps}, {"n", n}, {"checks", checks}, {"passed", rep.passed()}};
    out.passed = rep.passed();
    out.csv_header = {"check", "passed", "margin"};
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
        out.csv_rows.push_back({rep.checks[i].name, rep.checks[i].passed ? "1" : "0",
                                format_17g(rep.checks[i].margin)});
        out.plot.emplace_back(static_cast<double>(i + 1), rep.checks[i].margin);
    }
    out.plot_meta = "check_index  margin";
    return out;
}

inline ExperimentOutput run_scale_stability(const ExperimentConfig& cfg, int workers) {
    const std::string ctx = "scale-stability params";
    jsondetail::require_allowed_keys(cfg.params,
                                     {"potential", "epsilons", "n_min", "n_max", "grid", "tolerance"}, ctx);
    Potential psi = potential_from_json(cfg.spec.space, jsondetail::require_field(cfg.params, "potential", ctx));
    std::vector<double> eps_list;
    for (const auto& e : jsondetail::require_field(cfg.params, "epsilons", ctx)) eps_list.push_back(e.get<double>());
    NRange range = range_from_params(cfg.params, ctx);
    CandidateGrid grid = grid_from_params(cfg.spec.space, cfg.params);
    double tol = jsondetail::get_number_or<double>(cfg.params, "tolerance", ctx, 0.05);

    ScaleStabilityReport rep = scale_stability_check(cfg.spec, psi, eps_list, range, grid, workers, tol);
    ExperimentOutput out;
    ordered_json est = ordered_json::array();
    for (const auto& [e, v] : rep.estimates) est.push_back(ordered_json{{"epsilon", e}, {"estimate", v}});
    out.report = ordered_json{{"potential", to_json(cfg.spec.space, psi)},
                              {"estimates", est},
                              {"max_pairwise_gap", rep.max_pairwise_gap},
                              {"tolerance", rep.tolerance},
                              {"passed", rep.passed()}};
    out.passed = rep.passed();
    out.csv_header = {"mode", "epsilon", "n", "t", "value"};
    for (const auto& [e, v] : rep.estimates) {
        out.csv_rows.push_back({"separated", format_17g(e), "-1", "1", format_17g(v)});
        out.plot.emplace_back(e, v);
    }
    out.plot_meta = "epsilon  pressure_estimate";
    return out;
}

}  // namespace expdetail

// Executes the command; throws on parameter errors, returns with
// passed=false on check failures.
inline ExperimentOutput execute_experiment(const ExperimentConfig& cfg, int workers) {
    if (cfg.command == "entropy") return expdetail::run_entropy(cfg, workers);
    if (cfg.command == "asymptotic") return expdetail::run_asymptotic(cfg, workers);
    if (cfg.command == "entropy-point") return expdetail::run_entropy_point(cfg, workers);
    if (cfg.command == "shadow") return expdetail::run_shadow(cfg, workers);
    if (cfg.command == "specify") return expdetail::run_specify(cfg, workers);
    if (cfg.command == "exactness") return expdetail::run_exactness(cfg, workers);
    if (cfg.command == "pressure") return expdetail::run_pressure(cfg, workers);
    if (cfg.command == "pressure-curve") return expdetail::run_pressure_curve(cfg, workers);
    if (cfg.command == "properties") return expdetail::run_properties(cfg, workers);
    if (cfg.command == "scale-stability") return expdetail::run_scale_stability(cfg, workers);
    throw ParameterError("config: unknown command \"" + cfg.command + "\"");
}

// Full run: execute and write report.json, series.csv, plot.dat into out_dir.
// Exit status: 0 success, 1 any check failure, 2 parameter/schema errors.
inline int run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, int workers,
                          std::string* error_message = nullptr) {
    try {
        std::filesystem::create_directories(out_dir);
        ExperimentOutput out = execute_experiment(cfg, workers);
        ordered_json report;
        report["command"] = cfg.command;
        report["seed"] = cfg.seed;
        report["workers_invariant"] = true;
        report["spec"] = to_json(cfg.spec);
        report["passed"] = out.passed;
        report["result"] = out.report;
        std::ofstream rj(out_dir / "report.json");
        rj << report.dump(2) << "\n";
        write_csv(out.csv_header, out.csv_rows, out_dir / "series.csv");
        emit_plot_data(out.plot, out_dir / "plot.dat", out.plot_meta);
        return out.passed ? 0 : 1;
    } catch (const BranchDomainError& e) {
        if (error_message) *error_message = e.what();
        return 1;
    } catch (const ConstructionError& e) {
        if (error_message) *error_message = e.what();
        return 1;
    } catch (const NumericError& e) {
        if (error_message) *error_message = e.what();
        return 1;
    } catch (const std::exception& e) {
        if (error_message) *error_message = e.what();
        return 2;
    }
}

}  // namespace ndsthermo
