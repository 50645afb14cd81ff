// acceptance.hpp — the end-to-end verification suite: one runnable criterion
// per guaranteed behaviour, each with its oracle and tolerance pinned here.
#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ndsthermo/experiment.hpp"

namespace ndsthermo {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

namespace acceptdetail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

template <class Fn>
CriterionResult timed(int id, std::string name, Fn&& fn) {
    CriterionResult res;
    res.id = id;
    res.name = std::move(name);
    auto t0 = std::chrono::steady_clock::now();
    try {
        auto [ok, detail] = fn();
        res.passed = ok;
        res.detail = detail;
    } catch (const std::exception& e) {
        res.passed = false;
        res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

using Outcome = std::pair<bool, std::string>;

// 1. doubling map entropy at eps = 2^-5 reproduces log 2 within 0.05
inline Outcome doubling_entropy(int workers) {
    auto spec = zoo::circle_affine(2);
    auto rep = entropy_estimate(spec, 1, std::ldexp(1.0, -5), NRange(4, 14), CandidateGrid::automatic(), workers);
    double err = std::fabs(rep.estimate - std::log(2.0));
    return {err <= 0.05, "estimate " + fmt(rep.estimate) + ", |err| " + fmt(err) + " <= 0.05"};
}

// 2. golden-mean word-count growth matches log((1+sqrt5)/2) to 1e-3
inline Outcome golden_mean_word_growth(int) {
    auto a = TransitionMatrix::golden_mean();
    CountSeries series;
    series.mode = SeparationMode::Separated;
    for (int length = 1; length <= 64; ++length)
        series.values.emplace_back(length, static_cast<double>(sft_word_count(a, length)));
    GrowthRate g = growth_rate(series, NRange(32, 64));
    const double phi = std::log((1.0 + std::sqrt(5.0)) / 2.0);
    double err = std::fabs(g.slope - phi);
    PerronResult perron = sft_spectral_radius(a);
    double perron_err = std::fabs(std::log(perron.value) - phi);
    bool ok = err <= 1e-3 && perron_err <= 1e-9;
    return {ok, "growth " + fmt(g.slope) + " vs log phi " + fmt(phi) + ", |err| " + fmt(err) +
                    " <= 1e-3; perron route err " + fmt(perron_err)};
}

// 3. pressure at zero potential equals entropy exactly; constants shift the
//    partition by n*c exactly
inline Outcome pressure_identities(int workers) {
    auto spec = zoo::circle_affine(2);
    const double eps = 0.125;
    const NRange range(2, 9);
    auto grid = CandidateGrid::automatic();

    auto entropy = entropy_estimate(spec, 1, eps, range, grid, workers, false);
    auto p0 = pressure_estimate(spec, ConstantPotential{0.0}, eps, range, PartitionMode::Separated, grid, workers);
    if (p0.estimate != entropy.estimate)
        return {false, "pressure(0) " + fmt(p0.estimate) + " != entropy " + fmt(entropy.estimate)};

    const double c = 0.5;
    for (long long n = range.lo; n <= range.hi; ++n) {
        double pc = pressure_partition(spec, ConstantPotential{c}, eps, n, PartitionMode::Separated, grid);
        double pz = pressure_partition(spec, ConstantPotential{0.0}, eps, n, PartitionMode::Separated, grid);
        if (pc != pz + static_cast<double>(n) * c)
            return {false, "partition shift mismatch at n=" + std::to_string(n)};
    }
    auto pc_est = pressure_estimate(spec, ConstantPotential{c}, eps, range, PartitionMode::Separated, grid, workers);
    double shift_err = std::fabs((pc_est.estimate - p0.estimate) - c);
    bool ok = shift_err <= 1e-12;
    return {ok, "pressure(0) == entropy exactly; estimate shift err " + fmt(shift_err) + " <= 1e-12"};
}

// 4. subshift pressure vs the weighted transfer matrix, 0.02
inline Outcome sft_pressure_vs_transfer(int workers) {
    auto spec = zoo::golden_mean_shift();
    const std::vector<double> v{0.3, -0.2};
    auto est = pressure_estimate(spec, SymbolLetterPotential{v}, 0.125, NRange(4, 16),
                                 PartitionMode::Separated, CandidateGrid::automatic(), workers);
    auto oracle = sft_transfer_pressure(spec.space.transitions, v);
    double err = std::fabs(est.estimate - oracle.log_pressure);
    return {err <= 0.02, "estimate " + fmt(est.estimate) + " vs oracle " + fmt(oracle.log_pressure) +
                             ", |err| " + fmt(err) + " <= 0.02"};
}

// 5. shadowing: 1000-step pseudo-orbit reconstructed within sigma^{-1} eps,
//    with a unique shadow point
inline Outcome shadowing_bound(int) {
    auto spec = zoo::circle_affine(2);
    auto pseudo = make_noisy_pseudo_orbit(spec, Point::scalar(0.2), 1000, 0.04, 20240);
    auto a = shadow(spec, pseudo, 0.1);
    auto b = shadow(spec, pseudo, 0.1, std::nullopt, std::nullopt, 0.9);
    double gap = distance(spec.space, a.point, b.point);
    bool ok = a.max_error <= 0.05 && gap <= 1e-10;
    return {ok, "max step error " + fmt(a.max_error) + " <= 0.05, reconstruction gap " + fmt(gap) +
                    " <= 1e-10"};
}

// 6. dynamical-ball image identity sampled both ways, zero failures
inline Outcome ball_image_identity(int) {
    std::size_t checked = 0, failures = 0;
    auto run = [&](const NdsSpec& spec, const Point& x) {
        for (long long n = 0; n <= 3; ++n) {
            auto rep = ball_image_check(spec, x, 1, n, 0.1, 1250, 77 + static_cast<std::uint64_t>(n));
            checked += rep.forward_samples + rep.backward_samples;
            failures += rep.failures.size();
        }
    };
    run(zoo::circle_affine(2), Point::scalar(0.1));
    run(zoo::torus_diagonal({2, 3}), Point::vec({0.3, 0.6}));
    bool ok = failures == 0 && checked >= 10000;
    return {ok, std::to_string(checked) + " sampled memberships, " + std::to_string(failures) + " failures"};
}

// 7. exactness constants: N(1/8)=2 for degree 2, N(1/6)=1 for degree 3,
//    finite N for the intermittent schedule at delta = 0.1
inline Outcome exactness_constants(int) {
    auto e2 = exactness_constant(zoo::circle_affine(2), 0.125, 8);
    auto e3 = exactness_constant(zoo::circle_affine(3), 1.0 / 6.0, 8);
    std::vector<double> alphas;
    for (int i = 0; i < 96; ++i) alphas.push_back(0.46 + 0.48 * static_cast<double>((i * 37) % 100) / 100.0);
    auto pm = exactness_constant(zoo::pomeau_manneville_table(alphas), 0.1, 64, ExactnessOptions{1, 32, 1e-9});
    bool ok = e2.found() && *e2.constant == 2 && e3.found() && *e3.constant == 1 && pm.found();
    std::string detail = "N(1/8)=" + (e2.found() ? std::to_string(*e2.constant) : "none") +
                         " (want 2), N(1/6)=" + (e3.found() ? std::to_string(*e3.constant) : "none") +
                         " (want 1), intermittent N(0.1)=" + (pm.found() ? std::to_string(*pm.constant) : "none");
    return {ok, detail};
}

// 8. constructive specification and the 2^{d+1} separated family
inline Outcome specification_construction(int workers) {
    auto spec = zoo::circle_affine(2);

    SpecSegments segs;
    segs.gap = 3;
    segs.items = {{Point::scalar(0.2), 1, 1}, {Point::scalar(0.7), 4, 4}};
    Point x = specification_point(spec, segs, 0.3, 2);
    auto check = specification_check(spec, x, segs, 0.3);
    if (!check.pass) return {false, "two-segment construction margin " + fmt(check.worst_margin) + " < 0"};

    auto fam = doubling_separated_family(spec, Point::scalar(0.1), Point::scalar(0.4), 0.1, 6);
    if (fam.report.points.size() != 128)
        return {false, "family size " + std::to_string(fam.report.points.size()) + " != 128"};
    if (!verify_separated(spec, fam.report)) return {false, "family failed the pairwise separated re-check"};

    auto entropy = entropy_estimate(spec, 1, std::ldexp(1.0, -5), NRange(4, 10), CandidateGrid::automatic(),
                                    workers, false);
    bool bound_ok = fam.entropy_lower_bound <= entropy.estimate + 0.05;
    bool ok = bound_ok;
    return {ok, "margin " + fmt(check.worst_margin) + " >= 0; 128 points re-checked; bound log2/" +
                    std::to_string(fam.spec_constant) + " = " + fmt(fam.entropy_lower_bound) +
                    " <= estimate " + fmt(entropy.estimate) + " + 0.05"};
}

// 9. every probed point looks like an entropy point at radius 0.05
inline Outcome entropy_points(int workers) {
    auto spec = zoo::circle_affine(2);
    std::string detail;
    bool ok = true;
    for (double x0 : {0.0, 0.3, 0.7}) {
        auto probe = entropy_point_probe(spec, Point::scalar(x0), 0.05, std::ldexp(1.0, -5), NRange(4, 12),
                                         CandidateGrid::automatic(), workers);
        double gap = std::fabs(probe.local.estimate - probe.global.estimate);
        ok = ok && gap <= 0.05;
        if (!detail.empty()) detail += ", ";
        detail += "x0=" + fmt(x0) + " gap " + fmt(gap);
    }
    return {ok, detail + " (all <= 0.05)"};
}

// 10. the interval freeze-out system has zero entropy at every start time and
//     is reported non-chaotic with the no-specification note
inline Outcome zero_entropy_system(int workers) {
    ExperimentConfig cfg;
    cfg.spec = zoo::kolyada_snoha_table(64);
    cfg.command = "asymptotic";
    cfg.params = ordered_json{{"epsilon", 1.0 / 32.0}, {"k_list", {1, 3, 5}}, {"n_min", 2}, {"n_max", 24}};
    cfg.seed = 0;
    ExperimentOutput out = execute_experiment(cfg, workers);

    bool ok = true;
    std::string detail = "estimates";
    for (const auto& entry : out.report["profile"]) {
        double est = entry["estimate"].get<double>();
        ok = ok && est <= 0.02;
        detail += " " + fmt(est);
    }
    bool chaotic = out.report["chaotic"].get<bool>();
    bool note_present = out.report.contains("note") &&
                        out.report["note"].get<std::string>().find("specification") != std::string::npos;
    ok = ok && !chaotic && note_present;
    return {ok, detail + "; chaotic=" + (chaotic ? "true" : "false") + ", no-specification note " +
                    (note_present ? "present" : "missing")};
}

// 11. estimates agree across scales below the expansivity radius
inline Outcome scale_stability(int workers) {
    auto spec = zoo::circle_affine(2);
    const std::vector<double> eps_list{0.1, 0.05, 0.025};
    auto flat = scale_stability_check(spec, ConstantPotential{0.0}, eps_list, NRange(4, 14),
                                      CandidateGrid::automatic(), workers);
    auto smooth = scale_stability_check(spec, SmoothCirclePotential{0.5}, eps_list, NRange(4, 14),
                                        CandidateGrid::automatic(), workers);
    bool ok = flat.passed() && smooth.passed();
    return {ok, "pairwise gaps: zero potential " + fmt(flat.max_pairwise_gap) + ", smooth " +
                    fmt(smooth.max_pairwise_gap) + " (both <= 0.05)"};
}

// 12. pressure-function regularity on the golden-mean shift
inline Outcome pressure_regularity(int workers) {
    auto spec = zoo::golden_mean_shift();
    const std::vector<double> v{0.3, -0.2};
    const std::vector<double> t_grid{-2.0, -1.0, 0.0, 1.0, 2.0};
    const double eps = 0.125;

    auto curve = pressure_curve(spec, SymbolLetterPotential{v}, t_grid, eps, NRange(4, 16),
                                PartitionMode::Separated, CandidateGrid::automatic(), workers, 0.02);
    double worst_curve_err = 0.0;
    for (const auto& [t, est] : curve.points) {
        std::vector<double> tv{t * v[0], t * v[1]};
        double oracle = sft_transfer_pressure(spec.space.transitions, tv).log_pressure;
        worst_curve_err = std::max(worst_curve_err, std::fabs(est - oracle));
    }
    if (worst_curve_err > 0.02)
        return {false, "curve deviates from the transfer oracle by " + fmt(worst_curve_err)};
    if (!curve.passed()) return {false, "curve regularity checks failed"};

    // partition-level Lipschitz bound on 100 random letter-potential pairs
    const long long n = 8;
    auto grid = CandidateGrid::automatic();
    Rng rng = Rng::stream(1212, 0);
    double worst_slack = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a{rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0)};
        std::vector<double> b{rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0)};
        double pa = pressure_partition(spec, SymbolLetterPotential{a}, eps, n, PartitionMode::Separated, grid);
        double pb = pressure_partition(spec, SymbolLetterPotential{b}, eps, n, PartitionMode::Separated, grid);
        double norm = std::max(std::fabs(a[0] - b[0]), std::fabs(a[1] - b[1]));
        double slack = static_cast<double>(n) * norm + 1e-9 - std::fabs(pa - pb);
        worst_slack = std::min(worst_slack, slack);
        if (slack < 0.0)
            return {false, "partition Lipschitz violated by " + fmt(-slack) + " on trial " +
                               std::to_string(trial)};
    }
    return {true, "curve err " + fmt(worst_curve_err) + " <= 0.02, regularity checks pass, Lipschitz slack >= " +
                      fmt(worst_slack)};
}

// 13. Lipschitz potential variation stays below K eps / (1 - sigma^{-1})
inline Outcome holder_variation(int) {
    auto spec = zoo::circle_affine(2);
    DistanceToPointPotential psi{Point::scalar(0.0)};
    const double eps = 0.1;
    const double bound = 0.2;  // K=1, alpha=1, sigma=2
    auto rep = variation_profile(spec, psi, eps, NRange(1, 20), 50, 4242);
    bool ok = rep.sup_variation <= bound && rep.holder_bound && std::fabs(*rep.holder_bound - bound) <= 1e-12 &&
              rep.ubv;
    return {ok, "sup variation " + fmt(rep.sup_variation) + " <= " + fmt(bound) + " over n = 1..20"};
}

// 14. byte-identical outputs across worker counts for the entropy, shadow,
//     and specification runs
inline Outcome determinism(const std::filesystem::path& scratch) {
    auto spec_json = to_json(zoo::circle_affine(2));
    std::vector<std::pair<std::string, ordered_json>> runs;
    runs.emplace_back("entropy", ordered_json{{"spec", spec_json},
                                              {"command", "entropy"},
                                              {"params", ordered_json{{"k", 1},
                                                                      {"epsilon", std::ldexp(1.0, -5)},
                                                                      {"n_min", 4},
                                                                      {"n_max", 14}}},
                                              {"seed", 11}});
    runs.emplace_back("shadow", ordered_json{{"spec", spec_json},
                                             {"command", "shadow"},
                                             {"params", ordered_json{{"epsilon", 0.1},
                                                                     {"delta", 0.04},
                                                                     {"length", 1000},
                                                                     {"x1", {0.2}}}},
                                             {"seed", 20240}});
    runs.emplace_back("specify",
                      ordered_json{{"spec", spec_json},
                                   {"command", "specify"},
                                   {"params",
                                    ordered_json{{"segments",
                                                  ordered_json{{"segments",
                                                                {ordered_json{{"x", {0.2}}, {"j", 1}, {"k", 1}},
                                                                 ordered_json{{"x", {0.7}}, {"j", 4}, {"k", 4}}}},
                                                               {"gap", 3}}},
                                                 {"epsilon", 0.3},
                                                 {"bound", 2}}},
                                   {"seed", 8}});

    for (const auto& [name, cfg_json] : runs) {
        ExperimentConfig cfg = config_from_json(cfg_json);
        std::filesystem::path d1 = scratch / (name + "_w1");
        std::filesystem::path d8 = scratch / (name + "_w8");
        int r1 = run_experiment(cfg, d1, 1);
        int r8 = run_experiment(cfg, d8, 8);
        if (r1 != 0 || r8 != 0) return {false, name + ": run failed (exit " + std::to_string(r1) + ")"};
        for (const char* file : {"report.json", "series.csv", "plot.dat"}) {
            if (read_file(d1 / file) != read_file(d8 / file))
                return {false, name + "/" + file + " differs between 1 and 8 workers"};
        }
    }
    return {true, "entropy, shadow, and specify outputs byte-identical for workers in {1, 8}"};
}

}  // namespace acceptdetail

inline std::vector<CriterionResult> run_acceptance(int workers, const std::filesystem::path& scratch) {
    namespace ad = acceptdetail;
    std::vector<CriterionResult> results;
    results.push_back(ad::timed(1, "doubling-map entropy = log 2 (exact dyadic count oracle)",
                                [&] { return ad::doubling_entropy(workers); }));
    results.push_back(ad::timed(2, "golden-mean word-count growth = log golden ratio (matrix powers)",
                                [&] { return ad::golden_mean_word_growth(workers); }));
    results.push_back(ad::timed(3, "pressure identities: zero potential and constant shifts",
                                [&] { return ad::pressure_identities(workers); }));
    results.push_back(ad::timed(4, "subshift pressure matches the weighted transfer matrix",
                                [&] { return ad::sft_pressure_vs_transfer(workers); }));
    results.push_back(ad::timed(5, "shadowing bound and uniqueness on a 1000-step pseudo-orbit",
                                [&] { return ad::shadowing_bound(workers); }));
    results.push_back(ad::timed(6, "dynamical-ball image identity, both directions sampled",
                                [&] { return ad::ball_image_identity(workers); }));
    results.push_back(ad::timed(7, "exactness constants for degrees 2, 3 and the intermittent schedule",
                                [&] { return ad::exactness_constants(workers); }));
    results.push_back(ad::timed(8, "constructive specification and the doubling separated family",
                                [&] { return ad::specification_construction(workers); }));
    results.push_back(ad::timed(9, "entropy points: local = global entropy at three probes",
                                [&] { return ad::entropy_points(workers); }));
    results.push_back(ad::timed(10, "zero-entropy interval system: non-chaotic, specification excluded",
                                [&] { return ad::zero_entropy_system(workers); }));
    results.push_back(ad::timed(11, "fixed-scale pressure stability across epsilon",
                                [&] { return ad::scale_stability(workers); }));
    results.push_back(ad::timed(12, "pressure-function regularity on the golden-mean shift",
                                [&] { return ad::pressure_regularity(workers); }));
    results.push_back(ad::timed(13, "Lipschitz potential variation within the Hoelder budget",
                                [&] { return ad::holder_variation(workers); }));
    results.push_back(ad::timed(14, "deterministic outputs across worker counts",
                                [&] { return ad::determinism(scratch); }));
    return results;
}

}  // namespace ndsthermo
