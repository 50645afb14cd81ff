// expanding.hpp — inverse-branch machinery for uniformly expanding systems:
// contraction certificates, ball-image checks, exactness constants, shadowing,
// expansivity, and constructive specification points.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ndsthermo/errors.hpp"
#include "ndsthermo/metrics.hpp"
#include "ndsthermo/nds.hpp"
#include "ndsthermo/numerics.hpp"
#include "ndsthermo/sampling.hpp"

namespace ndsthermo {

// ---------------------------- expansion estimate -------------------------------

struct ExpansionEstimate {
    double sigma_hat = 0.0;      // inf over pairs of d(f x, f y) / d(x, y)
    std::size_t used_pairs = 0;
    std::size_t skipped = 0;     // coincident pairs
    bool expanding = false;      // sigma_hat > 1

    bool meets(double sigma) const { return sigma_hat >= sigma - 1e-9; }
};

// Empirical one-step expansion factor of the map scheduled at `index`.
inline ExpansionEstimate estimate_expansion(const NdsSpec& spec, long long index, double rho,
                                            const std::vector<std::pair<Point, Point>>& pairs) {
    if (rho <= 0.0) throw ParameterError("estimate_expansion: rho must be positive");
    const MapDescriptor& d = spec.map_at(index);
    ExpansionEstimate est;
    est.sigma_hat = std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : pairs) {
        double dist = distance(spec.space, x, y);
        if (dist == 0.0) {
            ++est.skipped;
            continue;
        }
        if (dist > 2.0 * rho)
            throw ParameterError("estimate_expansion: pair does not fit in a common rho-ball");
        double image_dist = distance(spec.space, apply_map(spec.space, d, x), apply_map(spec.space, d, y));
        est.sigma_hat = std::min(est.sigma_hat, image_dist / dist);
        ++est.used_pairs;
    }
    if (est.used_pairs == 0) throw ParameterError("estimate_expansion: all sampled pairs coincide");
    est.expanding = est.sigma_hat > 1.0;
    return est;
}

// ------------------------------- pull back -------------------------------------

// Record of an inverse-branch composition: the unique preimage chain of a
// target near f_k^n(x) that stays within rho of the base orbit.
struct BranchChain {
    long long k = 1;
    long long n = 0;
    std::vector<Point> base_orbit;   // x, f_k(x), ..., f_k^n(x)
    Point target;                    // y
    std::vector<Point> chain;        // z_0, ..., z_n with z_n = y
    std::vector<double> offsets;     // d(z_i, base_orbit[i])
    double residual = 0.0;           // d(f_k^n(z_0), y) on forward recompute
    double sigma_used = 0.0;
    double rho_used = 0.0;

    const Point& result() const { return chain.front(); }
};

namespace detail {

// Forward recomputation amplifies representation noise by sigma per step;
// the certificate tolerance grows with it past n ~ 20.
inline double chain_residual_tol(double sigma, long long n) {
    return 1e-10 * std::max(1.0, std::pow(sigma, static_cast<double>(n)) * 1e-6);
}

inline Point nearest_preimage_within(const NdsSpec& spec, long long time, const Point& value,
                                     const Point& anchor, double rho, long long step_for_error) {
    std::optional<Point> best;
    double best_dist = rho;
    for (const Point& cand : enumerate_preimages(spec, time, value)) {
        double d = distance(spec.space, cand, anchor);
        if (d < best_dist) {
            best_dist = d;
            best = cand;
        }
    }
    if (!best)
        throw BranchDomainError("no preimage within rho of the base orbit at step " +
                                    std::to_string(step_for_error),
                                step_for_error);
    return *best;
}

}  // namespace detail

// The inverse branch of f_k^n at x applied to y; requires d(y, f_k^n(x)) < rho.
inline BranchChain pull_back(const NdsSpec& spec, long long k, const Point& x, long long n, const Point& y) {
    if (k < 1 || n < 0) throw ParameterError("pull_back: need k >= 1 and n >= 0");
    const double sigma = spec.require_sigma();
    const double rho = spec.require_rho();

    BranchChain bc;
    bc.k = k;
    bc.n = n;
    bc.sigma_used = sigma;
    bc.rho_used = rho;
    bc.base_orbit = segment_orbit(spec, k, n, x);
    bc.target = y;

    double target_gap = distance(spec.space, y, bc.base_orbit.back());
    if (target_gap >= rho)
        throw ParameterError("pull_back: target is not within rho of f_k^n(x)");

    bc.chain.assign(static_cast<std::size_t>(n) + 1, Point{});
    bc.chain[static_cast<std::size_t>(n)] = y;
    for (long long i = n - 1; i >= 0; --i) {
        bc.chain[static_cast<std::size_t>(i)] =
            detail::nearest_preimage_within(spec, k + i, bc.chain[static_cast<std::size_t>(i) + 1],
                                            bc.base_orbit[static_cast<std::size_t>(i)], rho, i);
    }

    bc.offsets.resize(static_cast<std::size_t>(n) + 1);
    for (long long i = 0; i <= n; ++i)
        bc.offsets[static_cast<std::size_t>(i)] =
            distance(spec.space, bc.chain[static_cast<std::size_t>(i)], bc.base_orbit[static_cast<std::size_t>(i)]);

    // Re-verify instead of trusting the construction: forward residual and
    // the contraction certificate d(f^j z0, f^j x) <= sigma^{j-n} d(y, f^n x).
    std::vector<Point> forward = segment_orbit(spec, k, n, bc.chain.front());
    bc.residual = distance(spec.space, forward.back(), y);
    if (bc.residual > detail::chain_residual_tol(sigma, n))
        throw NumericError("pull_back: forward residual " + std::to_string(bc.residual) +
                           " exceeds tolerance");
    const double slack = detail::chain_residual_tol(sigma, n);
    for (long long j = 0; j <= n; ++j) {
        double lhs = distance(spec.space, forward[static_cast<std::size_t>(j)],
                              bc.base_orbit[static_cast<std::size_t>(j)]);
        double rhs = std::pow(sigma, static_cast<double>(j - n)) * target_gap + slack;
        if (lhs > rhs)
            throw NumericError("pull_back: contraction certificate violated at step " + std::to_string(j));
    }
    return bc;
}

// ----------------------------- ball image check --------------------------------

struct BallImageReport {
    std::size_t forward_samples = 0;
    std::size_t backward_samples = 0;
    std::vector<std::string> failures;

    bool passed() const { return failures.empty(); }
};

// Sampled two-sided check of f_k^n(B(x,k,n,eps)) = B(f_k^n(x), eps).
inline BallImageReport ball_image_check(const NdsSpec& spec, const Point& x, long long k, long long n,
                                        double eps, std::size_t samples, std::uint64_t seed) {
    const double rho = spec.require_rho();
    if (!(eps > 0.0 && eps <= rho)) throw ParameterError("ball_image_check: need 0 < eps <= rho");
    check_membership(spec.space, x, "ball_image_check");

    BallImageReport rep;
    Rng rng = Rng::stream(seed, 0xBA11);
    const Point image = apply_segment(spec, k, n, x);

    // Forward: members of the dynamical ball land inside B(f_k^n(x), eps).
    std::size_t tries = 0;
    const std::size_t max_tries = samples * 400 + 1000;
    while (rep.forward_samples < samples && tries < max_tries) {
        ++tries;
        Point u = sample_in_ball(spec.space, x, eps, rng);
        if (!dynamical_ball_membership(spec, x, k, n, eps, u)) continue;
        ++rep.forward_samples;
        Point fu = apply_segment(spec, k, n, u);
        if (distance(spec.space, fu, image) >= eps)
            rep.failures.push_back("forward sample escaped the image ball");
    }

    // Backward: points of B(f_k^n(x), eps) pull back into the dynamical ball.
    for (std::size_t s = 0; s < samples; ++s) {
        Point y = sample_in_ball(spec.space, image, eps * (1.0 - 1e-9), rng);
        ++rep.backward_samples;
        try {
            BranchChain bc = pull_back(spec, k, x, n, y);
            if (!dynamical_ball_membership(spec, x, k, n, eps, bc.result()))
                rep.failures.push_back("backward pull-back left the dynamical ball");
        } catch (const BranchDomainError& e) {
            rep.failures.push_back(std::string("backward pull-back failed: ") + e.what());
        }
    }
    return rep;
}

// ---------------------------- exactness constant -------------------------------

struct ExactnessOptions {
    long long k_max = 1;              // start times to test
    int centers = 32;                 // sampled ball centres (center-dependent maps)
    double coverage_resolution = 1e-9;
};

struct ExactnessResult {
    std::optional<long long> constant;  // smallest N with full coverage up to the horizon
    long long horizon = 0;
    std::string note;
    std::vector<std::pair<long long, bool>> coverage;  // (n, covered for all sampled x, k)

    bool found() const { return constant.has_value(); }
};

namespace detail {

// Arc union on the circle, stored as merged pieces of [0,1].
struct ArcSet {
    std::vector<std::pair<double, double>> arcs;  // (start, length)
    bool full = false;

    void add(double start, double len, double res) {
        if (full) return;
        if (len >= 1.0 - res) {
            full = true;
            arcs.clear();
            return;
        }
        arcs.emplace_back(wrap_unit(start), std::max(len, 0.0));
    }

    void normalize(double res) {
        if (full || arcs.empty()) return;
        // unroll wrap-crossing arcs into pieces of [0,1], then sweep-merge
        std::vector<std::pair<double, double>> pieces;  // (lo, hi)
        for (const auto& [s, l] : arcs) {
            double e = s + std::min(l, 1.0);
            if (e <= 1.0) {
                pieces.emplace_back(s, e);
            } else {
                pieces.emplace_back(s, 1.0);
                pieces.emplace_back(0.0, e - 1.0);
            }
        }
        std::sort(pieces.begin(), pieces.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& [lo, hi] : pieces) {
            if (!merged.empty() && lo <= merged.back().second + res)
                merged.back().second = std::max(merged.back().second, hi);
            else
                merged.emplace_back(lo, hi);
        }
        double total = 0.0;
        for (const auto& [lo, hi] : merged) total += hi - lo;
        arcs.clear();
        if (total >= 1.0 - res) {
            full = true;
            return;
        }
        for (const auto& [lo, hi] : merged) arcs.emplace_back(lo, hi - lo);
    }
};

// Image arcs of one arc under a circle descriptor, exact piecewise-monotone
// propagation.  Only continuous circle maps are supported here.
inline std::vector<std::pair<double, double>> map_arc_circle(const MapDescriptor& d, double start, double len) {
    len = std::min(len, 1.0);
    if (const auto* m = std::get_if<CircleAffine>(&d)) {
        double deg = static_cast<double>(m->degree);
        return {{wrap_unit(deg * start), std::min(1.0, deg * len)}};
    }
    if (std::holds_alternative<IdentityMap>(d)) return {{wrap_unit(start), len}};
    if (const auto* m = std::get_if<PomeauManneville>(&d)) {
        std::vector<std::pair<double, double>> out;
        double a = wrap_unit(start);
        std::vector<std::pair<double, double>> flat;  // sub-intervals of [0,1]
        if (a + len <= 1.0) {
            flat.emplace_back(a, a + len);
        } else {
            flat.emplace_back(a, 1.0);
            flat.emplace_back(0.0, a + len - 1.0);
        }
        for (auto [lo, hi] : flat) {
            // both branches increase; pick the formula per monotone piece
            std::vector<std::pair<double, double>> split;
            if (lo < 0.5 && hi > 0.5) {
                split.emplace_back(lo, 0.5);
                split.emplace_back(0.5, hi);
            } else {
                split.emplace_back(lo, hi);
            }
            for (auto [plo, phi] : split) {
                bool left = phi <= 0.5;
                double vlo = left ? pomeau_manneville_left(m->alpha, plo) : 2.0 * plo - 1.0;
                double vhi = left ? pomeau_manneville_left(m->alpha, phi) : 2.0 * phi - 1.0;
                out.emplace_back(wrap_unit(vlo), std::max(0.0, vhi - vlo));
            }
        }
        return out;
    }
    throw ParameterError("exactness_constant: unsupported circle descriptor " + descriptor_name(d));
}

inline std::vector<char> bool_square(const std::vector<char>& m, int d) {
    std::vector<char> out(static_cast<std::size_t>(d) * d, 0);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            if (m[static_cast<std::size_t>(i) * d + k])
                for (int j = 0; j < d; ++j)
                    if (m[static_cast<std::size_t>(k) * d + j]) out[static_cast<std::size_t>(i) * d + j] = 1;
    return out;
}

inline std::vector<char> bool_mul(const std::vector<char>& a, const std::vector<char>& b, int d) {
    std::vector<char> out(static_cast<std::size_t>(d) * d, 0);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            if (a[static_cast<std::size_t>(i) * d + k])
                for (int j = 0; j < d; ++j)
                    if (b[static_cast<std::size_t>(k) * d + j]) out[static_cast<std::size_t>(i) * d + j] = 1;
    return out;
}

inline bool bool_all_positive(const std::vector<char>& m) {
    return std::all_of(m.begin(), m.end(), [](char c) { return c != 0; });
}

}  // namespace detail

// Smallest N <= horizon such that the image of every delta-ball covers the
// space for all N <= n <= horizon and all start times k <= k_max.  Circle
// schedules use exact arc propagation, subshifts exact boolean matrix powers,
// other spaces a sampled pushforward.
inline ExactnessResult exactness_constant(const NdsSpec& spec, double delta, long long horizon,
                                          const ExactnessOptions& options = {}) {
    if (delta <= 0.0) throw ParameterError("exactness_constant: delta must be positive");
    if (horizon < 1) throw ParameterError("exactness_constant: horizon must be >= 1");

    ExactnessResult result;
    result.horizon = horizon;
    std::vector<char> covered(static_cast<std::size_t>(horizon) + 1, 1);  // covered[n] for all x, k

    switch (spec.space.kind) {
        case SpaceKind::Circle: {
            const double res = options.coverage_resolution;
            for (long long k = 1; k <= options.k_max; ++k) {
                for (int c = 0; c < options.centers; ++c) {
                    double x0 = static_cast<double>(c) / static_cast<double>(options.centers);
                    detail::ArcSet arcs;
                    arcs.add(x0 - delta, 2.0 * delta, res);
                    arcs.normalize(res);
                    for (long long n = 1; n <= horizon; ++n) {
                        if (!arcs.full) {
                            detail::ArcSet next;
                            for (const auto& [s, l] : arcs.arcs)
                                for (const auto& [is, il] : detail::map_arc_circle(spec.map_at(k + n - 1), s, l))
                                    next.add(is, il, res);
                            next.normalize(res);
                            arcs = std::move(next);
                        }
                        if (!arcs.full) covered[static_cast<std::size_t>(n)] = 0;
                    }
                }
            }
            result.note = "exact arc propagation";
            break;
        }
        case SpaceKind::Symbolic: {
            int p = 0;
            while (p < spec.space.word_depth && std::ldexp(1.0, -(p + 1)) >= delta) ++p;
            const int d = spec.space.transitions.alphabet;
            std::vector<char> one(static_cast<std::size_t>(d) * d, 0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    one[static_cast<std::size_t>(i) * d + j] = spec.space.transitions.admissible(i, j) ? 1 : 0;
            for (long long k = 1; k <= options.k_max; ++k) {
                for (long long n = 1; n <= horizon; ++n) {
                    long long shift_total = detail::total_shift_power(spec, k, n);
                    bool ok = false;
                    if (shift_total >= p) {
                        long long power = shift_total - p + 1;
                        std::vector<char> acc(static_cast<std::size_t>(d) * d, 0);
                        for (int i = 0; i < d; ++i) acc[static_cast<std::size_t>(i) * d + i] = 1;
                        std::vector<char> base = one;
                        long long e = power;
                        while (e > 0) {
                            if (e & 1) acc = detail::bool_mul(acc, base, d);
                            base = detail::bool_square(base, d);
                            e >>= 1;
                        }
                        ok = detail::bool_all_positive(acc);
                    }
                    if (!ok) covered[static_cast<std::size_t>(n)] = 0;
                }
            }
            result.note = "cylinder reachability via boolean matrix powers";
            break;
        }
        case SpaceKind::Torus: {
            // Diagonal schedules factor per coordinate into exact circle-arc
            // propagation.  Non-diagonal mixing is out of reach here.
            bool diagonal = true;
            for (const auto* d : spec.schedule.distinct_maps()) {
                const auto* t = std::get_if<TorusLinear>(d);
                if (!t && !std::holds_alternative<IdentityMap>(*d)) diagonal = false;
                if (t)
                    for (int i = 0; diagonal && i < t->dim; ++i)
                        for (int j = 0; j < t->dim; ++j)
                            if (i != j && t->a[static_cast<std::size_t>(i) * t->dim + j] != 0) diagonal = false;
            }
            if (!diagonal)
                throw ParameterError("exactness_constant: non-diagonal torus schedules are unsupported");
            const double res = options.coverage_resolution;
            for (long long k = 1; k <= options.k_max; ++k) {
                for (int coord = 0; coord < spec.space.dim; ++coord) {
                    detail::ArcSet arcs;
                    arcs.add(-delta, 2.0 * delta, res);
                    arcs.normalize(res);
                    for (long long n = 1; n <= horizon; ++n) {
                        if (!arcs.full) {
                            const MapDescriptor& d = spec.map_at(k + n - 1);
                            long long deg = 1;
                            if (const auto* t = std::get_if<TorusLinear>(&d))
                                deg = std::llabs(t->a[static_cast<std::size_t>(coord) * t->dim + coord]);
                            detail::ArcSet next;
                            for (const auto& [s, l] : arcs.arcs)
                                next.add(wrap_unit(static_cast<double>(deg) * s),
                                         std::min(1.0, static_cast<double>(deg) * l), res);
                            next.normalize(res);
                            arcs = std::move(next);
                        }
                        if (!arcs.full) covered[static_cast<std::size_t>(n)] = 0;
                    }
                }
            }
            result.note = "per-coordinate arc propagation (diagonal schedule)";
            break;
        }
        case SpaceKind::Interval: {
            // Sampled pushforward on a deterministic ball lattice; bins must
            // all be hit.  Conservative: can only certify non-coverage late.
            const double res = std::max(options.coverage_resolution, 1.0 / 64.0);
            const long long bins = static_cast<long long>(std::ceil(1.0 / res));
            for (long long k = 1; k <= options.k_max; ++k) {
                for (int c = 0; c < options.centers; ++c) {
                    double x0 = (static_cast<double>(c) + 0.5) / static_cast<double>(options.centers);
                    std::vector<Point> cloud;
                    const int cloud_size = 4096;
                    for (int s = 0; s < cloud_size; ++s) {
                        double u = x0 + delta * (2.0 * static_cast<double>(s) / (cloud_size - 1) - 1.0);
                        cloud.push_back(Point::scalar(std::clamp(u, 0.0, 1.0)));
                    }
                    for (long long n = 1; n <= horizon; ++n) {
                        for (auto& p : cloud) p = apply_map(spec.space, spec.map_at(k + n - 1), p);
                        std::vector<char> hit(static_cast<std::size_t>(bins), 0);
                        for (const auto& p : cloud)
                            hit[static_cast<std::size_t>(std::min<long long>(
                                bins - 1, static_cast<long long>(p.coords[0] * static_cast<double>(bins))))] = 1;
                        if (!std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; }))
                            covered[static_cast<std::size_t>(n)] = 0;
                    }
                }
            }
            result.note = "sampled pushforward coverage (conservative)";
            break;
        }
    }

    for (long long n = 1; n <= horizon; ++n)
        result.coverage.emplace_back(n, covered[static_cast<std::size_t>(n)] != 0);
    for (long long n = 1; n <= horizon; ++n) {
        bool all = true;
        for (long long m = n; m <= horizon; ++m)
            if (!covered[static_cast<std::size_t>(m)]) {
                all = false;
                break;
            }
        if (all) {
            result.constant = n;
            break;
        }
    }
    return result;
}

// -------------------------------- shadowing ------------------------------------

struct PseudoOrbit {
    std::vector<Point> points;  // x_1, x_2, ...
    double delta = 0.0;
};

inline bool verify_pseudo_orbit(const NdsSpec& spec, const PseudoOrbit& po) {
    if (po.points.size() < 2) return true;
    for (std::size_t i = 0; i + 1 < po.points.size(); ++i) {
        Point img = apply_map(spec.space, spec.map_at(static_cast<long long>(i) + 1), po.points[i]);
        if (distance(spec.space, img, po.points[i + 1]) >= po.delta) return false;
    }
    return true;
}

// True orbit plus per-step noise strictly below delta.
inline PseudoOrbit make_noisy_pseudo_orbit(const NdsSpec& spec, const Point& x1, std::size_t length,
                                           double delta, std::uint64_t seed) {
    if (length < 1) throw ParameterError("make_noisy_pseudo_orbit: length must be >= 1");
    PseudoOrbit po;
    po.delta = delta;
    po.points.push_back(x1);
    Rng rng = Rng::stream(seed, 0x0DD5);
    for (std::size_t i = 1; i < length; ++i) {
        Point img = apply_map(spec.space, spec.map_at(static_cast<long long>(i)), po.points.back());
        po.points.push_back(sample_in_ball(spec.space, img, delta * 0.98, rng));
    }
    return po;
}

struct ShadowResult {
    Point point;                      // x with d(f_1^{i-1}(x), x_i) <= sigma^{-1} eps
    double max_error = 0.0;
    std::vector<double> step_errors;  // d(f_1^{i-1}(x), x_i)
    std::vector<Point> orbit;         // the reconstructed true orbit, stable form
};

// Realises the nested-compact shadowing limit as the single inverse-branch
// chain value h^1 o ... o h^m applied to f_m(x_m).  `target_offset` in [-1,1]
// moves the chain seed inside the closed eps-ball; distinct seeds land on the
// same shadow point up to the contracted scale.
inline ShadowResult shadow(const NdsSpec& spec, const PseudoOrbit& pseudo, double eps,
                           std::optional<double> sigma_opt = std::nullopt,
                           std::optional<double> rho_opt = std::nullopt, double target_offset = 0.0) {
    const double sigma = sigma_opt ? *sigma_opt : spec.require_sigma();
    const double rho = rho_opt ? *rho_opt : spec.require_rho();
    if (pseudo.points.empty()) throw ParameterError("shadow: empty pseudo-orbit");
    if (!(eps > 0.0 && eps < rho)) throw ParameterError("shadow: need 0 < eps < rho");
    if (!(eps / sigma + pseudo.delta < eps))
        throw ParameterError("shadow: shadowing precondition sigma^{-1}*eps + delta < eps violated");
    if (std::fabs(target_offset) > 1.0) throw ParameterError("shadow: target offset must lie in [-1,1]");
    if (!verify_pseudo_orbit(spec, pseudo)) throw ParameterError("shadow: point list is not a delta-pseudo-orbit");

    const long long m = static_cast<long long>(pseudo.points.size());
    Point w = apply_map(spec.space, spec.map_at(m), pseudo.points.back());
    if (target_offset != 0.0) {
        if (!spec.space.coordinate_space())
            throw ParameterError("shadow: seed offsets are only defined on coordinate spaces");
        std::vector<double> c = w.coords;
        c[0] = wrap_unit(c[0] + target_offset * eps);
        if (spec.space.kind == SpaceKind::Interval) c[0] = std::clamp(c[0], 0.0, 1.0);
        w = Point::vec(std::move(c));
    }

    ShadowResult res;
    res.orbit.assign(pseudo.points.size(), Point{});
    res.step_errors.assign(pseudo.points.size(), 0.0);
    for (long long i = m; i >= 1; --i) {
        w = detail::nearest_preimage_within(spec, i, w, pseudo.points[static_cast<std::size_t>(i - 1)], rho, i);
        double err = distance(spec.space, w, pseudo.points[static_cast<std::size_t>(i - 1)]);
        res.orbit[static_cast<std::size_t>(i - 1)] = w;
        res.step_errors[static_cast<std::size_t>(i - 1)] = err;
        res.max_error = std::max(res.max_error, err);
    }
    res.point = res.orbit.front();
    if (res.max_error > eps / sigma + 1e-12)
        throw NumericError("shadow: realized error " + std::to_string(res.max_error) +
                           " exceeds the sigma^{-1}*eps bound");
    return res;
}

// ---------------------------- expansivity checks -------------------------------

struct ExpansivityReport {
    struct PairOutcome {
        Point x, y;
        std::optional<long long> separation_time;  // smallest n with d(f_1^n x, f_1^n y) > rho
    };
    std::vector<PairOutcome> outcomes;
    std::size_t skipped = 0;  // coincident pairs
    double rho = 0.0;
    long long horizon = 0;

    std::size_t failure_count() const {
        std::size_t c = 0;
        for (const auto& o : outcomes)
            if (!o.separation_time) ++c;
        return c;
    }
    bool passed() const { return failure_count() == 0; }
};

inline long long expansivity_horizon_hint(double sigma, double initial_distance, double rho) {
    if (initial_distance <= 0.0) return 1;
    long long n = 1;
    double d = initial_distance;
    while (sigma * d <= rho && n < 4096) {
        d *= sigma;
        ++n;
    }
    return n;
}

inline ExpansivityReport expansivity_check(const NdsSpec& spec, double rho,
                                           const std::vector<std::pair<Point, Point>>& pairs,
                                           long long horizon) {
    if (rho <= 0.0 || horizon < 1) throw ParameterError("expansivity_check: bad parameters");
    ExpansivityReport rep;
    rep.rho = rho;
    rep.horizon = horizon;
    for (const auto& [x, y] : pairs) {
        if (distance(spec.space, x, y) == 0.0) {
            ++rep.skipped;
            continue;
        }
        ExpansivityReport::PairOutcome out{x, y, std::nullopt};
        Point px = x, py = y;
        for (long long n = 1; n <= horizon; ++n) {
            const MapDescriptor& d = spec.map_at(n);
            px = apply_map(spec.space, d, px);
            py = apply_map(spec.space, d, py);
            if (distance(spec.space, px, py) > rho) {
                out.separation_time = n;
                break;
            }
        }
        rep.outcomes.push_back(std::move(out));
    }
    return rep;
}

// Smallest k0 >= 1 with sigma^{-k0} rho < gamma.
inline long long star_expansivity_k0(double sigma, double rho, double gamma) {
    if (!(sigma > 1.0) || rho <= 0.0 || gamma <= 0.0)
        throw ParameterError("star_expansivity_k0: need sigma > 1, rho > 0, gamma > 0");
    long long k0 = 1;
    while (rho * std::pow(sigma, -static_cast<double>(k0)) >= gamma) {
        ++k0;
        if (k0 > 1000000) throw NumericError("star_expansivity_k0: no k0 below 10^6");
    }
    return k0;
}

struct StarExpansivityReport {
    long long k0 = 0;
    std::size_t checked = 0;
    std::vector<std::string> failures;  // pairs with d >= gamma but d_{i,n} <= rho for n >= k0
    bool passed() const { return failures.empty(); }
};

// Companion sampled check: gamma-separated pairs become Bowen-rho-separated
// after k0 steps, at every sampled start time.
inline StarExpansivityReport star_expansivity_check(const NdsSpec& spec, double rho, double gamma,
                                                    std::size_t pair_count, std::uint64_t seed) {
    StarExpansivityReport rep;
    rep.k0 = star_expansivity_k0(spec.require_sigma(), rho, gamma);
    Rng rng = Rng::stream(seed, 0x57A2);
    std::size_t tries = 0;
    while (rep.checked < pair_count && tries < pair_count * 200 + 100) {
        ++tries;
        Point x = random_point(spec.space, rng);
        Point y = random_point(spec.space, rng);
        if (distance(spec.space, x, y) < gamma) continue;
        ++rep.checked;
        for (long long i : {1LL, 2LL, 5LL}) {
            for (long long n : {rep.k0, rep.k0 + 3}) {
                if (bowen_distance(spec, i, n, x, y) <= rho)
                    rep.failures.push_back("pair stayed rho-close at i=" + std::to_string(i) +
                                           ", n=" + std::to_string(n));
            }
        }
    }
    return rep;
}

// ------------------------------ specification ----------------------------------

struct SpecSegment {
    Point base;
    long long j = 1;
    long long k = 1;
};

// Orbit segments (x_m, j_m, k_m) with gaps of at least `gap`.  When
// `base_time_one` is set the base points are read as time-1 points and the
// reference orbit of segment m is f_1^{j_m-1+i}(x_m); otherwise the base
// enters at time j_m and the reference orbit is f_{j_m}^i(x_m).
struct SpecSegments {
    std::vector<SpecSegment> items;
    long long gap = 1;
    bool base_time_one = false;

    void validate(const Space& space) const {
        if (items.empty()) throw ParameterError("specification: need at least one segment");
        if (items.front().j != 1) throw ParameterError("specification: first segment must start at j=1");
        for (std::size_t m = 0; m < items.size(); ++m) {
            check_membership(space, items[m].base, "specification segment");
            if (items[m].j > items[m].k) throw ParameterError("specification: segment needs j <= k");
            if (m > 0) {
                if (items[m - 1].k >= items[m].j)
                    throw ParameterError("specification: segments must be strictly ordered");
                if (items[m].j - items[m - 1].k < gap)
                    throw ParameterError("specification: gap below the declared bound at segment " +
                                         std::to_string(m + 1));
            }
        }
    }
};

namespace detail {

inline Point segment_reference_start(const NdsSpec& spec, const SpecSegments& segs, std::size_t m) {
    const SpecSegment& s = segs.items[m];
    return segs.base_time_one ? apply_segment(spec, 1, s.j - 1, s.base) : s.base;
}

inline double descriptor_lipschitz(const MapDescriptor& d) {
    if (const auto* m = std::get_if<CircleAffine>(&d)) return static_cast<double>(m->degree);
    if (const auto* m = std::get_if<TorusLinear>(&d)) {
        double worst = 0.0;
        for (int i = 0; i < m->dim; ++i) {
            double row = 0.0;
            for (int j = 0; j < m->dim; ++j)
                row += static_cast<double>(std::llabs(m->a[static_cast<std::size_t>(i) * m->dim + j]));
            worst = std::max(worst, row);
        }
        return worst;
    }
    if (const auto* m = std::get_if<ShiftPower>(&d)) return std::ldexp(1.0, m->power);
    if (const auto* m = std::get_if<PomeauManneville>(&d))
        return 1.0 + std::pow(2.0, m->alpha) * (1.0 + m->alpha);
    if (const auto* m = std::get_if<CircleExponentFamily>(&d))
        return static_cast<double>(2 * m->n + 1) / static_cast<double>(m->n);
    if (const auto* m = std::get_if<KolyadaSnoha>(&d)) return std::pow(3.0, m->level);
    return 1.0;
}

// All chain endpoints u with f_k^g(u) = value, ascending branch order.  An
// endpoint within `radius` of the anchor has its time-(k+t) ancestor within
// radius * Lip(f_k^t) of the anchor orbit, which prunes the expansion.
inline std::vector<Point> preimage_chain_endpoints(const NdsSpec& spec, long long k, long long g,
                                                   const Point& value, const Point& anchor, double radius) {
    std::vector<Point> anchor_orbit = segment_orbit(spec, k, g, anchor);
    std::vector<double> lip_prefix(static_cast<std::size_t>(g) + 1, 1.0);
    for (long long t = 1; t <= g; ++t)
        lip_prefix[static_cast<std::size_t>(t)] =
            lip_prefix[static_cast<std::size_t>(t) - 1] * descriptor_lipschitz(spec.map_at(k + t - 1));
    std::vector<Point> level{value};
    for (long long t = g - 1; t >= 0; --t) {
        std::vector<Point> next;
        for (const Point& v : level)
            for (Point& pre : enumerate_preimages(spec, k + t, v)) {
                double bound = std::min(radius * lip_prefix[static_cast<std::size_t>(t)] + 1e-12,
                                        1.0);  // saturated once the ball wraps
                if (bound >= spec.space.diameter() ||
                    distance(spec.space, pre, anchor_orbit[static_cast<std::size_t>(t)]) <= bound)
                    next.push_back(std::move(pre));
            }
        level = std::move(next);
    }
    return level;
}

}  // namespace detail

struct SpecCheckResult {
    bool pass = false;
    double worst_margin = 0.0;  // min over constraints of eps - d(...)
    std::size_t constraints = 0;
    std::vector<std::tuple<std::size_t, long long, double>> margins;  // (segment, offset i, margin)
};

// Evaluates the specification inequality for a candidate point x against the
// segment list at tolerance eps.
inline SpecCheckResult specification_check(const NdsSpec& spec, const Point& x, const SpecSegments& segs,
                                           double eps) {
    segs.validate(spec.space);
    if (eps <= 0.0) throw ParameterError("specification_check: eps must be positive");
    check_membership(spec.space, x, "specification_check");

    const long long t_max = segs.items.back().k - 1;
    std::vector<Point> orbit = segment_orbit(spec, 1, t_max, x);

    SpecCheckResult res;
    res.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < segs.items.size(); ++m) {
        const SpecSegment& s = segs.items[m];
        Point ref = detail::segment_reference_start(spec, segs, m);
        for (long long i = 0; i <= s.k - s.j; ++i) {
            double d = distance(spec.space, orbit[static_cast<std::size_t>(s.j + i - 1)], ref);
            res.worst_margin = std::min(res.worst_margin, eps - d);
            res.margins.emplace_back(m, i, eps - d);
            ++res.constraints;
            if (i < s.k - s.j) ref = apply_map(spec.space, spec.map_at(s.j + i), ref);
        }
    }
    res.pass = res.worst_margin >= 0.0;
    return res;
}

// Backward-induction specification construction: start in the last segment's
// dynamical ball and use topological exactness across each gap to pull the
// point into the previous segment's ball.  The returned point is re-verified
// against specification_check before it is trusted.
inline Point specification_point(const NdsSpec& spec, const SpecSegments& segs, double eps, long long gap_bound,
                                 const ExactnessOptions& exopt = {}) {
    segs.validate(spec.space);
    if (eps <= 0.0) throw ParameterError("specification_point: eps must be positive");
    const std::size_t s = segs.items.size();
    if (s == 1) {
        // vacuous beyond the segment itself
        Point x = detail::segment_reference_start(spec, segs, 0);
        if (!specification_check(spec, x, segs, eps).pass)
            throw ConstructionError("specification_point: single-segment check failed", -1);
        return x;
    }

    const double rho = spec.require_rho();
    spec.require_sigma();
    const double delta = std::min(eps, rho) / 2.0;
    if (segs.gap < gap_bound)
        throw ParameterError("specification_point: declared segment gap is below the bound");

    ExactnessResult ex = exactness_constant(spec, delta, gap_bound, exopt);
    if (!ex.found())
        throw ParameterError("specification_point: spec is not exact at scale delta within the gap bound");

    Point current = detail::segment_reference_start(spec, segs, s - 1);
    for (std::size_t m = s - 1; m-- > 0;) {
        const SpecSegment& seg = segs.items[m];
        const long long len = seg.k - seg.j;
        const long long gap = segs.items[m + 1].j - seg.k;
        Point ref_start = detail::segment_reference_start(spec, segs, m);
        Point ref_end = apply_segment(spec, seg.j, len, ref_start);

        std::vector<Point> endpoints =
            detail::preimage_chain_endpoints(spec, seg.k, gap, current, ref_end, delta);
        const Point* best = nullptr;
        double best_dist = delta;
        for (const Point& u : endpoints) {
            double d = distance(spec.space, u, ref_end);
            if (d < best_dist) {
                best_dist = d;
                best = &u;
            }
        }
        if (!best)
            throw ConstructionError("specification_point: no preimage chain lands within delta at gap " +
                                        std::to_string(m + 1),
                                    static_cast<long long>(m + 1));
        current = (len == 0) ? *best : pull_back(spec, seg.j, ref_start, len, *best).result();
    }

    SpecCheckResult check = specification_check(spec, current, segs, eps);
    if (!check.pass)
        throw ConstructionError("specification_point: constructed point failed re-verification (margin " +
                                    std::to_string(check.worst_margin) + ")",
                                -1);
    return current;
}

// ---------------------- separated families from specification -------------------

struct DoublingFamilyResult {
    SeparationReport report;        // 2^{d+1} points, (d*N, eps)-separated
    long long spec_constant = 0;    // N used between consecutive reference times
    double entropy_lower_bound = 0; // log 2 / N
};

// The 2^{d+1}-point separated family built by shadowing every (d+1)-tuple
// over two 2eps-separated reference points, with reference times spaced N
// apart.  The output is re-verified pairwise before being returned.
inline DoublingFamilyResult doubling_separated_family(const NdsSpec& spec, const Point& x1, const Point& y1,
                                                      double eps, int depth,
                                                      const ExactnessOptions& exopt = {}) {
    if (depth < 1) throw ParameterError("doubling_separated_family: depth must be >= 1");
    if (distance(spec.space, x1, y1) <= 2.0 * eps)
        throw ParameterError("doubling_separated_family: reference points must be more than 2*eps apart");
    const double rho = spec.require_rho();
    const double delta = std::min(eps / 2.0, rho) / 2.0;

    ExactnessResult ex = exactness_constant(spec, delta, 64, exopt);
    if (!ex.found()) throw ParameterError("doubling_separated_family: no exactness constant below horizon 64");
    const long long n_const = *ex.constant;

    DoublingFamilyResult out;
    out.spec_constant = n_const;
    out.entropy_lower_bound = std::log(2.0) / static_cast<double>(n_const);

    const int tuples = 1 << (depth + 1);
    std::vector<Point> family;
    family.reserve(static_cast<std::size_t>(tuples));
    for (int code = 0; code < tuples; ++code) {
        SpecSegments segs;
        segs.gap = n_const;
        for (int m = 0; m <= depth; ++m) {
            long long t = static_cast<long long>(m) * n_const + 1;
            segs.items.push_back(SpecSegment{((code >> m) & 1) ? y1 : x1, t, t});
        }
        family.push_back(specification_point(spec, segs, eps / 2.0, n_const, exopt));
    }

    SeparationReport rep;
    rep.k = 1;
    rep.n = static_cast<long long>(depth) * n_const;
    rep.epsilon = eps;
    rep.mode = SeparationMode::Separated;
    rep.grid_note = "specification tuples over two reference points";
    rep.points = std::move(family);
    if (!verify_separated(spec, rep))
        throw NumericError("doubling_separated_family: pairwise separated re-check failed");
    out.report = std::move(rep);
    return out;
}

}  // namespace ndsthermo
