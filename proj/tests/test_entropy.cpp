#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "ndsthermo/entropy.hpp"
#include "ndsthermo/zoo.hpp"

using namespace ndsthermo;

namespace {

const double kLogPhi = std::log((1.0 + std::sqrt(5.0)) / 2.0);

// Exhaustive maximum separated subset of a small candidate list.
std::size_t brute_force_max_separated(const NdsSpec& spec, const std::vector<Point>& pts, long long n,
                                      double eps) {
    REQUIRE(pts.size() <= 20);
    std::size_t best = 0;
    for (std::uint32_t mask = 1; mask < (1u << pts.size()); ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (mask & (1u << i)) idx.push_back(i);
        bool ok = true;
        for (std::size_t a = 0; a < idx.size() && ok; ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b)
                if (bowen_distance(spec, 1, n, pts[idx[a]], pts[idx[b]]) <= eps) {
                    ok = false;
                    break;
                }
        if (ok) best = std::max(best, idx.size());
    }
    return best;
}

}  // namespace

TEST_CASE("word counts of the golden-mean subshift") {
    auto a = TransitionMatrix::golden_mean();
    CHECK(sft_word_count(a, 1) == 2);
    CHECK(sft_word_count(a, 2) == 3);  // {00, 01, 10}
    CHECK(sft_word_count(a, 3) == 5);  // total mass of A^2 = [[2,1],[1,1]]
    // Fibonacci structure: count(L+1) = count(L) + count(L-1)
    for (int length = 3; length <= 64; ++length)
        CHECK(sft_word_count(a, length) == sft_word_count(a, length - 1) + sft_word_count(a, length - 2));
    // submultiplicative bound by the alphabet
    for (int length = 1; length <= 64; ++length)
        CHECK(sft_word_count(a, length + 1) <= 2 * sft_word_count(a, length));
}

TEST_CASE("word counting is overflow-checked") {
    auto full = TransitionMatrix::full(2);
    CHECK(sft_word_count(full, 63) == (1ULL << 63));
    CHECK_THROWS_AS(sft_word_count(full, 66), NumericError);
}

TEST_CASE("word-count growth matches the Perron value") {
    auto a = TransitionMatrix::golden_mean();
    PerronResult perron = sft_spectral_radius(a);
    CHECK(perron.converged);
    CHECK(perron.irreducible);
    CHECK(std::log(perron.value) == doctest::Approx(kLogPhi).epsilon(1e-11));

    CountSeries series;
    for (int length = 1; length <= 64; ++length)
        series.values.emplace_back(length, static_cast<double>(sft_word_count(a, length)));
    GrowthRate g = growth_rate(series, NRange(32, 64));
    CHECK(std::fabs(g.slope - std::log(perron.value)) <= 1e-3);
}

TEST_CASE("growth rate on closed-form series") {
    CountSeries doubling;
    for (long long n = 1; n <= 12; ++n) doubling.values.emplace_back(n, std::ldexp(1.0, static_cast<int>(n)));
    GrowthRate g = growth_rate(doubling, NRange(4, 12));
    CHECK(g.slope == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(g.limsup_proxy == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CountSeries constant;
    for (long long n = 1; n <= 12; ++n) constant.values.emplace_back(n, 7.0);
    CHECK(growth_rate(constant, NRange(4, 12)).slope == 0.0);

    CountSeries fib;
    std::vector<double> f{1.0, 1.0};
    for (int i = 2; i < 40; ++i) f.push_back(f[i - 1] + f[i - 2]);
    for (long long n = 10; n <= 30; ++n) fib.values.emplace_back(n, f[static_cast<std::size_t>(n + 1)]);
    CHECK(std::fabs(growth_rate(fib, NRange(10, 30)).slope - kLogPhi) <= 1e-3);
}

TEST_CASE("growth rate rejects unusable windows") {
    CountSeries s;
    s.values = {{1, 2.0}, {2, 4.0}, {3, 0.0}, {4, 16.0}};
    CHECK_THROWS_AS(growth_rate(s, NRange(1, 4)), ParameterError);
    CountSeries tiny;
    tiny.values = {{1, 2.0}, {2, 4.0}};
    CHECK_THROWS_AS(growth_rate(tiny, NRange(1, 2)), ParameterError);
}

TEST_CASE("count series on the doubling map stays within a factor two of c 2^n") {
    auto spec = zoo::circle_affine(2);
    auto series = count_series(spec, 1, 0.125, NRange(1, 8), SeparationMode::Separated,
                               CandidateGrid::automatic());
    double c = series.values.back().second / std::ldexp(1.0, 8);
    for (const auto& [n, v] : series.values) {
        double model = c * std::ldexp(1.0, static_cast<int>(n));
        CHECK(v >= model / 2.0);
        CHECK(v <= model * 2.0);
    }
}

TEST_CASE("identity schedules produce constant count series") {
    auto spec = zoo::identity_on_circle();
    auto series = count_series(spec, 1, 0.1, NRange(1, 8), SeparationMode::Separated,
                               CandidateGrid::uniform(0.01));
    for (const auto& [n, v] : series.values) CHECK(v == series.values.front().second);
}

TEST_CASE("golden-mean counts equal admissible prefix counts") {
    auto spec = zoo::golden_mean_shift();
    const double eps = std::ldexp(1.0, -4);
    auto series = count_series(spec, 1, eps, NRange(1, 10), SeparationMode::Separated,
                               CandidateGrid::automatic());
    for (const auto& [n, v] : series.values) {
        // separated iff the words differ within the first n+3 letters
        CHECK(v == static_cast<double>(sft_word_count(spec.space.transitions, static_cast<int>(n) + 3)));
    }
}

TEST_CASE("entropy estimates for the zoo") {
    auto doubling = entropy_estimate(zoo::circle_affine(2), 1, std::ldexp(1.0, -5), NRange(4, 10),
                                     CandidateGrid::automatic(), 2);
    CHECK(std::fabs(doubling.estimate - std::log(2.0)) <= 0.05);
    CHECK(doubling.spanning_estimate.has_value());
    CHECK(std::fabs(*doubling.spanning_estimate - doubling.estimate) <= 0.05);

    auto golden = entropy_estimate(zoo::golden_mean_shift(), 1, std::ldexp(1.0, -4), NRange(2, 10),
                                   CandidateGrid::automatic(), 2, false);
    CHECK(std::fabs(golden.estimate - kLogPhi) <= 0.02);

    auto frozen = entropy_estimate(zoo::kolyada_snoha_table(40), 1, 1.0 / 32.0, NRange(2, 24),
                                   CandidateGrid::automatic(), 2, false);
    CHECK(frozen.estimate <= 0.02);
}

TEST_CASE("spanning and separated estimates bracket each other") {
    auto spec = zoo::circle_affine(2);
    for (double eps : {0.125, 0.0625}) {
        auto sep = entropy_estimate(spec, 1, eps, NRange(4, 10), CandidateGrid::automatic(), 2);
        CHECK(*sep.spanning_estimate <= sep.estimate + 0.05);
        auto sep2 = entropy_estimate(spec, 1, 2.0 * eps, NRange(4, 10), CandidateGrid::automatic(), 2);
        CHECK(sep2.estimate <= *sep.spanning_estimate + 0.05);
    }
}

TEST_CASE("shifted systems never lose entropy on expanding schedules") {
    NdsSpec spec;
    spec.space = Space::circle();
    spec.schedule = Schedule::eventually_periodic({CircleAffine{2}}, {CircleAffine{2}, CircleAffine{3}});
    spec.validate();
    // the window holds two full alternation periods so that the slope fit is
    // phase-free; estimates at every start time then agree at the average
    double prev = -1.0;
    for (long long k : {1LL, 2LL, 4LL}) {
        auto rep = entropy_estimate(spec, k, 0.0625, NRange(2, 10), CandidateGrid::automatic(), 2, false);
        if (prev >= 0.0) CHECK(prev <= rep.estimate + 0.05);
        prev = rep.estimate;
    }
}

TEST_CASE("asymptotic entropy verdicts") {
    auto chaotic = asymptotic_entropy_estimate(zoo::circle_affine(2), std::ldexp(1.0, -5), {1, 2, 3},
                                               NRange(4, 10), CandidateGrid::automatic(), 2);
    for (const auto& [k, v] : chaotic.profile) CHECK(std::fabs(v - std::log(2.0)) <= 0.05);
    CHECK(chaotic.chaotic);

    auto frozen = asymptotic_entropy_estimate(zoo::kolyada_snoha_table(48), 1.0 / 32.0, {1, 3, 5},
                                              NRange(2, 20), CandidateGrid::automatic(), 2);
    for (const auto& [k, v] : frozen.profile) CHECK(v <= 0.02);
    CHECK_FALSE(frozen.chaotic);

    auto flat = asymptotic_entropy_estimate(zoo::identity_on_circle(), 0.1, {1, 2, 3}, NRange(1, 8),
                                            CandidateGrid::uniform(0.01), 2);
    for (const auto& [k, v] : flat.profile) CHECK(v == 0.0);
    CHECK_FALSE(flat.chaotic);
}

TEST_CASE("entropy point probe with a radius past the diameter is exact") {
    auto spec = zoo::circle_affine(2);
    auto probe = entropy_point_probe(spec, Point::scalar(0.25), 0.5, 0.125, NRange(3, 9),
                                     CandidateGrid::automatic(), 2);
    CHECK(probe.local.estimate == probe.global.estimate);  // identical grids
}

TEST_CASE("doubling-map probes look like entropy points") {
    auto spec = zoo::circle_affine(2);
    auto probe = entropy_point_probe(spec, Point::scalar(0.5), 0.05, std::ldexp(1.0, -5), NRange(4, 11),
                                     CandidateGrid::automatic(), 2);
    CHECK(std::fabs(probe.local.estimate - probe.global.estimate) <= 0.05);
}

TEST_CASE("frozen interval orbits carry no local entropy") {
    auto spec = zoo::kolyada_snoha_table(40);
    auto probe = entropy_point_probe(spec, Point::scalar(0.1), 0.01, 1.0 / 32.0, NRange(2, 16),
                                     CandidateGrid::uniform(1.0 / 512.0), 2);
    CHECK(probe.local.estimate <= 0.02);

    // brute-force oracle: the restricted candidates act once through f_1 and
    // then freeze, so the exhaustive maximum separated count stops growing
    auto pts = materialize_grid(spec, CandidateGrid::uniform(1.0 / 512.0).restricted(Point::scalar(0.1), 0.01),
                                1, 1, 1.0 / 32.0);
    std::size_t at1 = brute_force_max_separated(spec, pts, 1, 1.0 / 32.0);
    std::size_t at5 = brute_force_max_separated(spec, pts, 5, 1.0 / 32.0);
    std::size_t at10 = brute_force_max_separated(spec, pts, 10, 1.0 / 32.0);
    CHECK(at1 == at5);
    CHECK(at5 == at10);
}

TEST_CASE("empty restricted grids are a domain error") {
    auto spec = zoo::circle_affine(2);
    CHECK_THROWS_AS(entropy_point_probe(spec, Point::scalar(0.11), 1e-5, 0.125, NRange(2, 6),
                                        CandidateGrid::uniform(0.25), 1),
                    ParameterError);
}
