#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ndsthermo/expanding.hpp"
#include "ndsthermo/zoo.hpp"

using namespace ndsthermo;

TEST_CASE("expansion estimates") {
    Rng rng(11);
    auto doubling = zoo::circle_affine(2);
    auto pairs = sample_ball_pairs(doubling.space, 0.25, 300, rng);
    auto est = estimate_expansion(doubling, 1, 0.25, pairs);
    CHECK(est.sigma_hat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(est.expanding);
    CHECK(est.meets(2.0));

    auto torus = zoo::torus_diagonal({2, 3});
    auto tpairs = sample_ball_pairs(torus.space, 1.0 / 6.0, 300, rng);
    CHECK(estimate_expansion(torus, 1, 1.0 / 6.0, tpairs).sigma_hat == doctest::Approx(2.0).epsilon(1e-9));

    // intermittent map: slope tends to 1 at the fixed point, so pairs near 0
    // flag the schedule as not uniformly expanding
    auto pm = zoo::pomeau_manneville_table({0.6});
    Point origin = Point::scalar(0.0);
    auto near0 = sample_ball_pairs(pm.space, 1e-4, 200, rng, &origin, 1e-4);
    auto pm_est = estimate_expansion(pm, 1, 0.25, near0);
    CHECK(pm_est.sigma_hat < 1.05);
    CHECK_FALSE(pm_est.meets(1.2));
}

TEST_CASE("expansion estimate edge cases") {
    auto spec = zoo::circle_affine(2);
    std::vector<std::pair<Point, Point>> coincident{{Point::scalar(0.3), Point::scalar(0.3)}};
    CHECK_THROWS_AS(estimate_expansion(spec, 1, 0.25, coincident), ParameterError);
    std::vector<std::pair<Point, Point>> mixed{{Point::scalar(0.3), Point::scalar(0.3)},
                                               {Point::scalar(0.1), Point::scalar(0.15)}};
    auto est = estimate_expansion(spec, 1, 0.25, mixed);
    CHECK(est.skipped == 1);
    CHECK(est.used_pairs == 1);
}

TEST_CASE("pull back recovers the base point and tracks branches") {
    auto spec = zoo::circle_affine(2);
    Point x = Point::scalar(0.3);
    Point fx = apply_segment(spec, 1, 4, x);
    auto bc = pull_back(spec, 1, x, 4, fx);
    CHECK(distance(spec.space, bc.result(), x) <= 1e-12);

    // target 0.4 pulled through three doublings from base orbit of 0; the
    // declared rho = 0.45 leaves branch slack, nearest selection resolves it
    auto wide = zoo::circle_affine(2);
    wide.rho = 0.45;
    auto chain = pull_back(wide, 1, Point::scalar(0.0), 3, Point::scalar(0.4));
    CHECK(chain.result().x() == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("pull back on the golden-mean shift prepends the base letters") {
    auto spec = zoo::golden_mean_shift();
    Point base = extend_word_to_depth(spec.space, {0, 0}, spec.space.word_depth);  // all zeros
    Point target = extend_word_to_depth(spec.space, {0, 0, 1, 0, 1}, spec.space.word_depth);
    auto bc = pull_back(spec, 1, base, 2, target);
    CHECK(bc.result().word[0] == 0);
    CHECK(bc.result().word[1] == 0);
    for (std::size_t i = 0; i + 2 < static_cast<std::size_t>(spec.space.word_depth); ++i)
        CHECK(bc.result().word[i + 2] == target.word[i]);
}

TEST_CASE("pull back enforces the branch domain") {
    auto spec = zoo::circle_affine(2);
    CHECK_THROWS_AS(pull_back(spec, 1, Point::scalar(0.0), 2, Point::scalar(0.5)), ParameterError);
}

TEST_CASE("branch chains satisfy the contraction certificate") {
    Rng rng(23);
    for (const auto& spec : {zoo::circle_affine(2), zoo::circle_affine(3)}) {
        double sigma = spec.require_sigma();
        double rho = spec.require_rho();
        for (int trial = 0; trial < 40; ++trial) {
            Point x = random_point(spec.space, rng);
            long long n = 1 + static_cast<long long>(rng.next_below(12));
            Point end = apply_segment(spec, 1, n, x);
            Point y = sample_in_ball(spec.space, end, rho * 0.98, rng);
            auto bc = pull_back(spec, 1, x, n, y);  // throws if any certificate line fails
            CHECK(bc.residual <= 1e-10);
            double gap = distance(spec.space, y, end);
            for (long long j = 0; j <= n; ++j)
                CHECK(bc.offsets[static_cast<std::size_t>(j)] <=
                      std::pow(sigma, static_cast<double>(j - n)) * gap + 1e-10);
        }
    }
}

TEST_CASE("ball image identity on small samples") {
    auto spec = zoo::circle_affine(2);
    auto rep = ball_image_check(spec, Point::scalar(0.1), 1, 2, 0.1, 500, 3);
    CHECK(rep.failures.empty());
    CHECK(rep.forward_samples == 500);
    CHECK(rep.backward_samples == 500);

    auto rep0 = ball_image_check(spec, Point::scalar(0.1), 1, 0, 0.1, 300, 4);
    CHECK(rep0.failures.empty());

    auto torus = zoo::torus_diagonal({2, 3});
    auto trep = ball_image_check(torus, Point::vec({0.25, 0.7}), 1, 3, 0.1, 300, 5);
    CHECK(trep.failures.empty());
}

TEST_CASE("exactness constants via exact interval images") {
    // degree k: a closed delta-ball of length 2*delta stretches to 2*delta*k^n
    auto formula = [](int degree, double delta) {
        long long n = 0;
        double len = 2.0 * delta;
        while (len < 1.0) {
            len *= degree;
            ++n;
        }
        return n;
    };
    for (int degree : {2, 3, 4}) {
        for (double delta : {0.125, 1.0 / 6.0, 0.05}) {
            auto res = exactness_constant(zoo::circle_affine(degree), delta, 16);
            REQUIRE(res.found());
            CHECK(*res.constant == formula(degree, delta));
        }
    }
    // frozen schedules never cover
    CHECK_FALSE(exactness_constant(zoo::identity_on_circle(), 0.125, 10).found());
}

TEST_CASE("exactness on subshifts via matrix positivity") {
    auto res = exactness_constant(zoo::golden_mean_shift(), 0.125, 16);
    REQUIRE(res.found());
    // delta-ball fixes 3 letters; golden-mean A^m is positive from m = 2
    CHECK(*res.constant == 4);
}

TEST_CASE("exactness on diagonal torus schedules") {
    auto res = exactness_constant(zoo::torus_diagonal({2, 3}), 0.125, 16);
    REQUIRE(res.found());
    CHECK(*res.constant == 2);  // slowest coordinate doubles: 0.25 * 2^n >= 1 at n = 2
}

TEST_CASE("shadowing a true orbit returns its start") {
    auto spec = zoo::circle_affine(2);
    PseudoOrbit exact;
    exact.delta = 1e-9;
    exact.points = segment_orbit(spec, 1, 200, Point::scalar(0.37));
    exact.points.pop_back();  // pseudo-orbit points x_1..x_200
    auto res = shadow(spec, exact, 0.1);
    CHECK(distance(spec.space, res.point, Point::scalar(0.37)) <= 1e-10);
    CHECK(res.max_error <= 1e-7);
}

TEST_CASE("shadowing bound and uniqueness on noisy orbits") {
    auto spec = zoo::circle_affine(2);
    auto pseudo = make_noisy_pseudo_orbit(spec, Point::scalar(0.61), 1000, 0.04, 99);
    CHECK(verify_pseudo_orbit(spec, pseudo));
    auto a = shadow(spec, pseudo, 0.1);
    CHECK(a.max_error <= 0.05);  // sigma^{-1} * eps
    for (double err : a.step_errors) CHECK(err <= 0.05);
    auto b = shadow(spec, pseudo, 0.1, std::nullopt, std::nullopt, -0.7);
    CHECK(distance(spec.space, a.point, b.point) <= 1e-10);
}

TEST_CASE("shadowing preconditions are enforced") {
    auto spec = zoo::circle_affine(2);
    auto pseudo = make_noisy_pseudo_orbit(spec, Point::scalar(0.5), 50, 0.06, 7);
    // sigma^{-1} eps + delta = 0.05 + 0.06 >= eps
    CHECK_THROWS_WITH_AS(shadow(spec, pseudo, 0.1),
                         doctest::Contains("sigma^{-1}*eps + delta < eps"), ParameterError);
    auto fine = make_noisy_pseudo_orbit(spec, Point::scalar(0.5), 50, 0.01, 7);
    CHECK_THROWS_AS(shadow(spec, fine, 0.3), ParameterError);  // eps >= rho
    fine.delta = 1e-5;                                         // claim a tighter delta than the noise
    CHECK_THROWS_AS(shadow(spec, fine, 0.05), ParameterError);
}

TEST_CASE("expansivity separates pairs at the predicted time") {
    auto spec = zoo::circle_affine(2);
    std::vector<std::pair<Point, Point>> pairs{{Point::scalar(0.0), Point::scalar(0.01)}};
    auto rep = expansivity_check(spec, 0.25, pairs, 16);
    REQUIRE(rep.outcomes.size() == 1);
    REQUIRE(rep.outcomes[0].separation_time.has_value());
    CHECK(*rep.outcomes[0].separation_time == 5);  // 2^5 * 0.01 = 0.32 > 1/4
    CHECK(expansivity_horizon_hint(2.0, 0.01, 0.25) == 5);

    std::vector<std::pair<Point, Point>> same{{Point::scalar(0.3), Point::scalar(0.3)}};
    CHECK(expansivity_check(spec, 0.25, same, 8).skipped == 1);

    auto frozen = expansivity_check(zoo::identity_on_circle(), 0.25, pairs, 16);
    CHECK(frozen.failure_count() == 1);
}

TEST_CASE("expanding specs pass the randomized expansivity check") {
    Rng rng(17);
    auto spec = zoo::circle_affine(2);
    const double rho = 0.25;
    std::vector<std::pair<Point, Point>> pairs;
    long long horizon = 0;
    for (int i = 0; i < 1000; ++i) {
        Point x = random_point(spec.space, rng);
        Point y = random_point(spec.space, rng);
        horizon = std::max(horizon, expansivity_horizon_hint(2.0, distance(spec.space, x, y), rho) + 8);
        pairs.emplace_back(std::move(x), std::move(y));
    }
    auto rep = expansivity_check(spec, rho, pairs, horizon);
    CHECK(rep.failure_count() == 0);
}

TEST_CASE("star expansivity constants") {
    CHECK(star_expansivity_k0(2.0, 0.25, 0.01) == 5);
    CHECK(star_expansivity_k0(2.0, 0.25, 0.3) == 1);  // gamma >= rho
    CHECK(star_expansivity_k0(1.5, 0.5, 0.05) == 6);
    auto rep = star_expansivity_check(zoo::circle_affine(2), 0.25, 0.05, 100, 31);
    CHECK(rep.k0 == star_expansivity_k0(2.0, 0.25, 0.05));
    CHECK(rep.checked == 100);
    CHECK(rep.passed());
}

TEST_CASE("specification with a single segment is the segment itself") {
    auto spec = zoo::circle_affine(2);
    SpecSegments segs;
    segs.items = {{Point::scalar(0.42), 1, 3}};
    Point x = specification_point(spec, segs, 0.2, 2);
    CHECK(x == Point::scalar(0.42));
    CHECK(specification_check(spec, x, segs, 0.2).pass);
}

TEST_CASE("two-segment specification on the doubling map") {
    auto spec = zoo::circle_affine(2);
    SpecSegments segs;
    segs.gap = 3;
    segs.items = {{Point::scalar(0.2), 1, 1}, {Point::scalar(0.7), 4, 4}};

    // oracle: some depth-3 preimage chain endpoint of 0.7 lies within the
    // tolerance of 0.2 (exhaustive dyadic enumeration)
    bool witness = false;
    for (int j = 0; j < 8; ++j) {
        double z = (0.7 + j) / 8.0;
        if (circle_dist(z, 0.2) <= 0.3) witness = true;
    }
    REQUIRE(witness);

    Point x = specification_point(spec, segs, 0.3, 2);
    auto check = specification_check(spec, x, segs, 0.3);
    CHECK(check.pass);
    CHECK(check.worst_margin >= 0.0);
    CHECK(x.x() == doctest::Approx(0.2125).epsilon(1e-12));
}

TEST_CASE("specification on the golden-mean shift bridges admissibly") {
    auto spec = zoo::golden_mean_shift();
    SpecSegments segs;
    segs.gap = 4;  // exactness constant at delta = 1/8
    Point w1 = extend_word_to_depth(spec.space, {0, 1, 0}, spec.space.word_depth);
    Point w2 = extend_word_to_depth(spec.space, {1, 0, 0}, spec.space.word_depth);
    segs.items = {{w1, 1, 1}, {w2, 5, 5}};
    Point x = specification_point(spec, segs, 0.25, 4);
    auto check = specification_check(spec, x, segs, 0.25);
    CHECK(check.pass);
    // construction tolerance delta = 1/8 pins the first three letters
    CHECK(x.word[0] == w1.word[0]);
    CHECK(x.word[1] == w1.word[1]);
    CHECK(x.word[2] == w1.word[2]);
    // the orbit segment at time 5 reproduces w2's head
    CHECK(x.word[4] == w2.word[0]);
    CHECK(x.word[5] == w2.word[1]);
    check_membership(spec.space, x, "bridged word");  // admissible throughout
}

TEST_CASE("surjective form: base points read at time one") {
    auto spec = zoo::circle_affine(2);
    SpecSegments segs;
    segs.gap = 3;
    segs.base_time_one = true;
    // both bases are time-1 points; the reference orbit of the second
    // segment is its own forward image f_1^{3}(y)
    Point y = Point::scalar(0.3);
    segs.items = {{Point::scalar(0.2), 1, 1}, {y, 4, 4}};
    Point x = specification_point(spec, segs, 0.3, 2);
    auto check = specification_check(spec, x, segs, 0.3);
    CHECK(check.pass);
    double ref = apply_segment(spec, 1, 3, y).x();
    CHECK(circle_dist(apply_segment(spec, 1, 3, x).x(), ref) <= 0.3);
}

TEST_CASE("specification check fails for far-away points") {
    auto spec = zoo::circle_affine(2);
    SpecSegments segs;
    segs.gap = 3;
    segs.items = {{Point::scalar(0.2), 1, 1}, {Point::scalar(0.7), 4, 4}};
    auto check = specification_check(spec, Point::scalar(0.7), segs, 0.3);
    CHECK_FALSE(check.pass);
    CHECK(check.worst_margin < 0.0);
}

TEST_CASE("segment lists validate ordering and gaps") {
    auto spec = zoo::circle_affine(2);
    SpecSegments bad;
    bad.items = {{Point::scalar(0.1), 2, 3}};  // must start at j = 1
    CHECK_THROWS_AS(bad.validate(spec.space), ParameterError);
    SpecSegments overlap;
    overlap.gap = 1;
    overlap.items = {{Point::scalar(0.1), 1, 4}, {Point::scalar(0.2), 4, 5}};
    CHECK_THROWS_AS(overlap.validate(spec.space), ParameterError);
    SpecSegments tight;
    tight.gap = 5;
    tight.items = {{Point::scalar(0.1), 1, 1}, {Point::scalar(0.2), 3, 3}};
    CHECK_THROWS_AS(tight.validate(spec.space), ParameterError);
}

TEST_CASE("doubling families realize the counting construction") {
    auto spec = zoo::circle_affine(2);
    auto fam1 = doubling_separated_family(spec, Point::scalar(0.1), Point::scalar(0.4), 0.1, 1);
    CHECK(fam1.report.points.size() == 4);
    CHECK(verify_separated(spec, fam1.report));
    auto fam2 = doubling_separated_family(spec, Point::scalar(0.1), Point::scalar(0.4), 0.1, 2);
    CHECK(fam2.report.points.size() == 8);
    CHECK(verify_separated(spec, fam2.report));
    CHECK(fam2.entropy_lower_bound == doctest::Approx(std::log(2.0) / fam2.spec_constant));
    CHECK_THROWS_AS(doubling_separated_family(spec, Point::scalar(0.1), Point::scalar(0.25), 0.1, 1),
                    ParameterError);  // reference points only 0.15 < 2 eps apart
}
