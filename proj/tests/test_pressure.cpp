#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ndsthermo/pressure.hpp"
#include "ndsthermo/zoo.hpp"

using namespace ndsthermo;

namespace {
const double kLogPhi = std::log((1.0 + std::sqrt(5.0)) / 2.0);
}

TEST_CASE("birkhoff sums") {
    auto spec = zoo::circle_affine(2);
    CHECK(birkhoff_sum(spec, ConstantPotential{0.3}, 1, 5, Point::scalar(0.1)) ==
          doctest::Approx(1.5).epsilon(1e-14));
    DistanceToPointPotential dist0{Point::scalar(0.0)};
    CHECK(birkhoff_sum(spec, dist0, 1, 1, Point::scalar(0.3)) == doctest::Approx(0.3));
    // orbit 0.3 -> 0.6; circle distance of 0.6 to 0 is 0.4
    CHECK(birkhoff_sum(spec, dist0, 1, 2, Point::scalar(0.3)) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK_THROWS_AS(birkhoff_sum(spec, dist0, 1, 0, Point::scalar(0.3)), ParameterError);
}

TEST_CASE("birkhoff additivity on random splits") {
    Rng rng(12);
    auto spec = zoo::circle_affine(2);
    SmoothCirclePotential psi{0.7};
    for (int trial = 0; trial < 1000; ++trial) {
        long long i = 1 + static_cast<long long>(rng.next_below(4));
        long long n = 1 + static_cast<long long>(rng.next_below(8));
        long long m = 1 + static_cast<long long>(rng.next_below(8));
        Point x = random_point(spec.space, rng);
        double whole = birkhoff_sum(spec, psi, i, n + m, x);
        double split = birkhoff_sum(spec, psi, i, n, x) +
                       birkhoff_sum(spec, psi, i + n, m, apply_segment(spec, i, n, x));
        CHECK(std::fabs(whole - split) <= 1e-10);
    }
}

TEST_CASE("zero potential reproduces the separated count exactly") {
    auto spec = zoo::circle_affine(2);
    auto grid = CandidateGrid::automatic();
    for (long long n : {2LL, 4LL, 6LL}) {
        auto rep = greedy_maximal_separated(spec, 1, n, 0.125, grid);
        double p = pressure_partition(spec, ConstantPotential{0.0}, 0.125, n, PartitionMode::Separated, grid);
        CHECK(p == std::log(static_cast<double>(rep.cardinality())));
    }
}

TEST_CASE("constant potentials shift partitions by n*c exactly") {
    auto spec = zoo::circle_affine(2);
    auto grid = CandidateGrid::automatic();
    for (long long n : {2LL, 5LL, 8LL}) {
        double p0 = pressure_partition(spec, ConstantPotential{0.0}, 0.125, n, PartitionMode::Separated, grid);
        double pc = pressure_partition(spec, ConstantPotential{0.5}, 0.125, n, PartitionMode::Separated, grid);
        CHECK(pc == p0 + static_cast<double>(n) * 0.5);
    }
}

TEST_CASE("spanning partitions stay below separated partitions") {
    auto doubling = zoo::circle_affine(2);
    auto golden = zoo::golden_mean_shift();
    for (long long n : {2LL, 4LL, 6LL}) {
        double p = pressure_partition(doubling, SmoothCirclePotential{0.5}, 0.1, n,
                                      PartitionMode::Separated, CandidateGrid::automatic());
        double q = pressure_partition(doubling, SmoothCirclePotential{0.5}, 0.1, n,
                                      PartitionMode::Spanning, CandidateGrid::automatic());
        CHECK(q <= p);
        double ps = pressure_partition(golden, SymbolLetterPotential{{0.3, -0.2}}, 0.125, n,
                                       PartitionMode::Separated, CandidateGrid::automatic());
        double qs = pressure_partition(golden, SymbolLetterPotential{{0.3, -0.2}}, 0.125, n,
                                       PartitionMode::Spanning, CandidateGrid::automatic());
        CHECK(qs <= ps);
    }
}

TEST_CASE("log-sum-exp accumulation survives large weights") {
    auto spec = zoo::circle_affine(2);
    double p = pressure_partition(spec, ConstantPotential{300.0}, 0.125, 6, PartitionMode::Separated,
                                  CandidateGrid::automatic());
    CHECK(std::isfinite(p));
    double p0 = pressure_partition(spec, ConstantPotential{0.0}, 0.125, 6, PartitionMode::Separated,
                                   CandidateGrid::automatic());
    CHECK(p == doctest::Approx(p0 + 1800.0).epsilon(1e-12));
}

TEST_CASE("pressure estimates for the doubling map") {
    auto spec = zoo::circle_affine(2);
    auto p0 = pressure_estimate(spec, ConstantPotential{0.0}, 0.125, NRange(2, 9),
                                PartitionMode::Separated, CandidateGrid::automatic(), 2);
    CHECK(std::fabs(p0.estimate - std::log(2.0)) <= 0.05);
    auto pc = pressure_estimate(spec, ConstantPotential{0.5}, 0.125, NRange(2, 9),
                                PartitionMode::Separated, CandidateGrid::automatic(), 2);
    CHECK(std::fabs((pc.estimate - p0.estimate) - 0.5) <= 1e-12);
}

TEST_CASE("letter potentials match the weighted transfer matrix") {
    auto spec = zoo::golden_mean_shift();
    const std::vector<double> v{0.3, -0.2};
    auto est = pressure_estimate(spec, SymbolLetterPotential{v}, 0.125, NRange(4, 14),
                                 PartitionMode::Separated, CandidateGrid::automatic(), 2);
    auto oracle = sft_transfer_pressure(spec.space.transitions, v);
    CHECK(std::fabs(est.estimate - oracle.log_pressure) <= 0.02);
}

TEST_CASE("variation of constants vanishes and Lipschitz variation meets the budget") {
    auto spec = zoo::circle_affine(2);
    for (long long n : {1LL, 5LL, 12LL}) {
        auto pairs = make_dynamical_ball_pairs(spec, 0.1, n, 40, 555);
        auto flat = variation_estimate(spec, ConstantPotential{2.0}, 0.1, n, pairs);
        CHECK(flat.variation == 0.0);
        auto lip = variation_estimate(spec, DistanceToPointPotential{Point::scalar(0.0)}, 0.1, n, pairs);
        REQUIRE(lip.holder_bound.has_value());
        CHECK(*lip.holder_bound == doctest::Approx(0.2));  // K eps / (1 - 1/2)
        CHECK(lip.variation <= 0.2);
        CHECK(lip.within_bound);
    }
    // the bound formula at sigma=2, K=1, alpha=1/2, eps=0.04
    HolderPowerPotential hp{1.0, 0.5, Point::scalar(0.0)};
    auto pairs = make_dynamical_ball_pairs(spec, 0.04, 6, 40, 556);
    auto rep = variation_estimate(spec, hp, 0.04, 6, pairs);
    REQUIRE(rep.holder_bound.has_value());
    CHECK(*rep.holder_bound == doctest::Approx(0.2 / (1.0 - std::pow(2.0, -0.5))).epsilon(1e-12));
    CHECK(rep.within_bound);
}

TEST_CASE("variation profiles plateau for Hoelder potentials") {
    auto spec = zoo::circle_affine(2);
    auto rep = variation_profile(spec, DistanceToPointPotential{Point::scalar(0.25)}, 0.1, NRange(1, 16), 30,
                                 808);
    CHECK(rep.ubv);
    CHECK(rep.sup_variation <= *rep.holder_bound + 1e-9);
}

TEST_CASE("property suite passes on the zoo") {
    auto doubling = zoo::circle_affine(2);
    auto rep = pressure_property_suite(doubling, SmoothCirclePotential{0.8},
                                       DistanceToPointPotential{Point::scalar(0.3)}, 0.1, 6,
                                       {-2.0, -1.0, 0.0, 1.0, 2.0}, CandidateGrid::automatic());
    for (const auto& c : rep.checks) {
        INFO(c.name);
        CHECK(c.passed);
    }
    auto golden = zoo::golden_mean_shift();
    auto grep = pressure_property_suite(golden, SymbolLetterPotential{{0.5, -0.1}},
                                        SymbolLetterPotential{{-0.3, 0.2}}, 0.125, 7,
                                        {-2.0, -1.0, 0.0, 1.0, 2.0}, CandidateGrid::automatic());
    for (const auto& c : grep.checks) {
        INFO(c.name);
        CHECK(c.passed);
    }
}

TEST_CASE("pressure curve of a constant potential is a line of slope one") {
    auto spec = zoo::circle_affine(2);
    auto curve = pressure_curve(spec, ConstantPotential{1.0}, {-2.0, -1.0, 0.0, 1.0, 2.0}, 0.125,
                                NRange(2, 8), PartitionMode::Separated, CandidateGrid::automatic(), 2);
    REQUIRE(curve.points.size() == 5);
    double at0 = curve.points[2].second;
    for (const auto& [t, v] : curve.points) CHECK(std::fabs((v - at0) - t) <= 1e-9);
    CHECK(curve.passed());
}

TEST_CASE("pressure curve matches the transfer oracle pointwise") {
    auto spec = zoo::golden_mean_shift();
    const std::vector<double> v{0.3, -0.2};
    auto curve = pressure_curve(spec, SymbolLetterPotential{v}, {-2.0, -1.0, 0.0, 1.0, 2.0}, 0.125,
                                NRange(4, 14), PartitionMode::Separated, CandidateGrid::automatic(), 2);
    for (const auto& [t, est] : curve.points) {
        double oracle = sft_transfer_pressure(spec.space.transitions, {t * v[0], t * v[1]}).log_pressure;
        CHECK(std::fabs(est - oracle) <= 0.02);
    }
    CHECK(curve.passed());
}

TEST_CASE("smooth potentials give convex curves with bounded slopes") {
    auto spec = zoo::circle_affine(2);
    auto curve = pressure_curve(spec, SmoothCirclePotential{0.5}, {-2.0, -1.0, 0.0, 1.0, 2.0}, 0.1,
                                NRange(3, 11), PartitionMode::Separated, CandidateGrid::automatic(), 2);
    CHECK(curve.potential_norm == doctest::Approx(0.5));
    CHECK(curve.passed());
}

TEST_CASE("scale stability demands an expanding spec") {
    CHECK_THROWS_AS(scale_stability_check(zoo::identity_on_circle(), ConstantPotential{0.0}, {0.1, 0.05},
                                          NRange(2, 8), CandidateGrid::uniform(0.01)),
                    ParameterError);
    CHECK_THROWS_AS(scale_stability_check(zoo::circle_affine(2), ConstantPotential{0.0}, {0.3},
                                          NRange(2, 8), CandidateGrid::automatic()),
                    ParameterError);  // eps >= rho
    auto golden = scale_stability_check(zoo::golden_mean_shift(), ConstantPotential{0.0},
                                        {0.125, 0.03125}, NRange(2, 12), CandidateGrid::automatic(), 2, 0.02);
    CHECK(golden.passed());
    for (const auto& [eps, est] : golden.estimates) CHECK(std::fabs(est - kLogPhi) <= 0.02);
}

TEST_CASE("transfer-matrix pressure oracle") {
    auto full = TransitionMatrix::full(2);
    auto tp = sft_transfer_pressure(full, {0.4, -0.7});
    CHECK(tp.log_pressure == doctest::Approx(std::log(std::exp(0.4) + std::exp(-0.7))).epsilon(1e-11));
    CHECK_FALSE(tp.reducible_warning);

    auto golden = TransitionMatrix::golden_mean();
    CHECK(sft_transfer_pressure(golden, {0.0, 0.0}).log_pressure == doctest::Approx(kLogPhi).epsilon(1e-11));
    double c = 0.37;
    CHECK(sft_transfer_pressure(golden, {c, c}).log_pressure ==
          doctest::Approx(kLogPhi + c).epsilon(1e-11));

    // enumeration route: consecutive word-sum ratios converge to the oracle
    // at the spectral-gap rate |l2/l1|^n; for the golden-mean matrix
    // [[e^a, e^a], [e^b, 0]] the product of eigenvalues is -e^{a+b}
    for (auto v : {std::vector<double>{0.3, -0.2}, std::vector<double>{-0.9, 0.4}}) {
        double ratio = sft_word_sum_log(golden, v, 16) - sft_word_sum_log(golden, v, 15);
        double l1 = std::exp(sft_transfer_pressure(golden, v).log_pressure);
        double gap = std::exp(v[0] + v[1]) / (l1 * l1);
        double bound = std::max(1e-6, 4.0 * std::pow(gap, 15.0));
        CHECK(std::fabs(ratio - std::log(l1)) <= bound);
    }
    // at the canonical test weights the gap is wide enough for 1e-6 at n = 16
    {
        std::vector<double> v{0.3, -0.2};
        double ratio = sft_word_sum_log(golden, v, 16) - sft_word_sum_log(golden, v, 15);
        CHECK(std::fabs(ratio - sft_transfer_pressure(golden, v).log_pressure) <= 1e-6);
    }

    TransitionMatrix reducible(2, {1, 0, 0, 1});
    auto warn = sft_transfer_pressure(reducible, {0.2, 0.9});
    CHECK(warn.reducible_warning);
    CHECK(warn.log_pressure == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("cover-mode pressure stays close to the separated estimate") {
    auto spec = zoo::circle_affine(2);
    DistanceToPointPotential psi{Point::scalar(0.0)};
    auto sep = pressure_estimate(spec, psi, 0.1, NRange(3, 9), PartitionMode::Separated,
                                 CandidateGrid::automatic(), 2);
    auto ubv = pressure_estimate(spec, psi, 0.1, NRange(3, 9), PartitionMode::UbvCover,
                                 CandidateGrid::automatic(), 2);
    CHECK(std::fabs(sep.estimate - ubv.estimate) <= 0.05);
    // the sampled infimum never exceeds the sampled supremum per element
    for (long long n : {3LL, 6LL}) {
        double lo = pressure_partition(spec, psi, 0.1, n, PartitionMode::CoverInf, CandidateGrid::automatic());
        double hi = pressure_partition(spec, psi, 0.1, n, PartitionMode::CoverSup, CandidateGrid::automatic());
        CHECK(lo <= hi);
    }
}
