// pressure.hpp — Birkhoff sums, pressure partition functions over separated /
// spanning / cover families, variation analysis, pressure curves, and the
// weighted transfer-matrix oracle for subshifts.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ndsthermo/entropy.hpp"
#include "ndsthermo/errors.hpp"
#include "ndsthermo/expanding.hpp"
#include "ndsthermo/metrics.hpp"
#include "ndsthermo/nds.hpp"
#include "ndsthermo/numerics.hpp"
#include "ndsthermo/parallel.hpp"

namespace ndsthermo {

// -------------------------------- potentials -----------------------------------

struct ConstantPotential {
    double c = 0.0;
};

// a * cos(2 pi x) on the circle.
struct SmoothCirclePotential {
    double amplitude = 1.0;
};

// d(x, p); Lipschitz with constant 1.
struct DistanceToPointPotential {
    Point p;
};

// K * d(x, base)^alpha; (K, alpha)-Hoelder by subadditivity of t^alpha.
struct HolderPowerPotential {
    double k = 1.0;
    double alpha = 1.0;
    Point base;
};

// Locally constant: value of the first letter.
struct SymbolLetterPotential {
    std::vector<double> values;
};

using Potential = std::variant<ConstantPotential, SmoothCirclePotential, DistanceToPointPotential,
                               HolderPowerPotential, SymbolLetterPotential>;

inline double evaluate(const Space& space, const Potential& psi, const Point& x) {
    struct V {
        const Space& space;
        const Point& x;
        double operator()(const ConstantPotential& p) const { return p.c; }
        double operator()(const SmoothCirclePotential& p) const {
            if (space.kind != SpaceKind::Circle)
                throw SpaceMismatchError("smooth_circle potential needs a circle space");
            return p.amplitude * std::cos(2.0 * M_PI * x.coords[0]);
        }
        double operator()(const DistanceToPointPotential& p) const { return distance(space, x, p.p); }
        double operator()(const HolderPowerPotential& p) const {
            return p.k * std::pow(distance(space, x, p.base), p.alpha);
        }
        double operator()(const SymbolLetterPotential& p) const {
            if (space.kind != SpaceKind::Symbolic)
                throw SpaceMismatchError("symbol_letter potential needs a symbolic space");
            if (p.values.size() != static_cast<std::size_t>(space.transitions.alphabet))
                throw ParameterError("symbol_letter potential: one value per letter required");
            return p.values[static_cast<std::size_t>(x.word.front())];
        }
    };
    return std::visit(V{space, x}, psi);
}

inline double sup_norm(const Space& space, const Potential& psi) {
    struct V {
        const Space& space;
        double operator()(const ConstantPotential& p) const { return std::fabs(p.c); }
        double operator()(const SmoothCirclePotential& p) const { return std::fabs(p.amplitude); }
        double operator()(const DistanceToPointPotential&) const { return space.diameter(); }
        double operator()(const HolderPowerPotential& p) const {
            return std::fabs(p.k) * std::pow(space.diameter(), p.alpha);
        }
        double operator()(const SymbolLetterPotential& p) const {
            double m = 0.0;
            for (double v : p.values) m = std::max(m, std::fabs(v));
            return m;
        }
    };
    return std::visit(V{space}, psi);
}

struct HolderData {
    double k = 0.0;
    double alpha = 1.0;
};

inline HolderData holder_data(const Space& space, const Potential& psi) {
    struct V {
        const Space& space;
        HolderData operator()(const ConstantPotential&) const { return {0.0, 1.0}; }
        HolderData operator()(const SmoothCirclePotential& p) const {
            return {2.0 * M_PI * std::fabs(p.amplitude), 1.0};
        }
        HolderData operator()(const DistanceToPointPotential&) const { return {1.0, 1.0}; }
        HolderData operator()(const HolderPowerPotential& p) const { return {std::fabs(p.k), p.alpha}; }
        HolderData operator()(const SymbolLetterPotential& p) const {
            double lo = p.values.front(), hi = p.values.front();
            for (double v : p.values) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            return {2.0 * (hi - lo), 1.0};  // letters agree inside balls of radius < 1/2
        }
    };
    return std::visit(V{space}, psi);
}

// ------------------------------- Birkhoff sums ----------------------------------

// S_{i,n} psi (x) = sum_{j=0}^{n-1} psi(f_i^j(x)).
inline double birkhoff_sum(const NdsSpec& spec, const Potential& psi, long long i, long long n, const Point& x) {
    if (n < 1) throw ParameterError("birkhoff_sum: n must be >= 1");
    check_membership(spec.space, x, "birkhoff_sum");
    double sum = 0.0;
    Point p = x;
    for (long long j = 0; j < n; ++j) {
        sum += evaluate(spec.space, psi, p);
        if (j + 1 < n) p = apply_map(spec.space, spec.map_at(i + j), p);
    }
    return sum;
}

// ---------------------------- partition functions --------------------------------

enum class PartitionMode { Separated, Spanning, CoverInf, CoverSup, UbvCover };

inline const char* to_string(PartitionMode m) {
    switch (m) {
        case PartitionMode::Separated: return "separated";
        case PartitionMode::Spanning: return "spanning";
        case PartitionMode::CoverInf: return "cover_inf";
        case PartitionMode::CoverSup: return "cover_sup";
        case PartitionMode::UbvCover: return "ubv_cover";
    }
    return "?";
}

namespace detail {

// log sum over the point family of exp(S_{1,n} psi), log-space accumulation.
template <class F>
double partition_over_points(F&& birkhoff, const std::vector<Point>& family) {
    std::vector<double> terms;
    terms.reserve(family.size());
    for (const Point& x : family) terms.push_back(birkhoff(x));
    return log_sum_exp(terms);
}

// Cover modes: dynamical balls of radius eps/2 around a greedy spanning set
// form a (1,n,eps)-cover; inf/sup of S within an element are sampled at up
// to 32 member candidates plus the centre.
template <class F>
double partition_over_cover(const NdsSpec& spec, F&& birkhoff, long long n, double eps,
                            const CandidateGrid& grid, PartitionMode mode) {
    const double half = eps / 2.0;
    SeparationReport centers = greedy_spanning(spec, 1, n, half, grid);
    std::vector<Point> candidates = materialize_grid(spec, grid, 1, n, half);

    const double w = detail::rejection_window(spec, 1, n, half);
    detail::NeighborIndex center_index(spec.space, w, centers.points);
    for (std::size_t i = 0; i < centers.points.size(); ++i) center_index.insert(i);

    std::vector<std::vector<std::size_t>> members(centers.points.size());
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        center_index.for_neighbors(candidates[ci], [&](std::size_t center_idx) {
            if (bowen_within(spec, 1, n, centers.points[center_idx], candidates[ci], half))
                members[center_idx].push_back(ci);
        });
    }

    std::vector<double> terms;
    terms.reserve(centers.points.size());
    for (std::size_t e = 0; e < centers.points.size(); ++e) {
        double center_value = birkhoff(centers.points[e]);
        double lo = center_value, hi = center_value;
        const auto& m = members[e];
        const std::size_t stride = std::max<std::size_t>(1, m.size() / 32);
        for (std::size_t idx = 0; idx < m.size(); idx += stride) {
            double v = birkhoff(candidates[m[idx]]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        terms.push_back(mode == PartitionMode::CoverInf ? lo : hi);  // UbvCover uses the sample sup
    }
    return log_sum_exp(terms);
}

template <class F>
double pressure_partition_core(const NdsSpec& spec, F&& psi_fn, double eps, long long n, PartitionMode mode,
                               const CandidateGrid& grid) {
    if (eps <= 0.0) throw ParameterError("pressure_partition: eps must be positive");
    if (n < 1) throw ParameterError("pressure_partition: n must be >= 1");
    auto birkhoff = [&](const Point& x) {
        double sum = 0.0;
        Point p = x;
        for (long long j = 0; j < n; ++j) {
            sum += psi_fn(p);
            if (j + 1 < n) p = apply_map(spec.space, spec.map_at(1 + j), p);
        }
        return sum;
    };
    switch (mode) {
        case PartitionMode::Separated:
            return partition_over_points(birkhoff, greedy_maximal_separated(spec, 1, n, eps, grid).points);
        case PartitionMode::Spanning:
            return partition_over_points(birkhoff, greedy_spanning(spec, 1, n, eps, grid).points);
        case PartitionMode::CoverInf:
        case PartitionMode::CoverSup:
        case PartitionMode::UbvCover:
            return partition_over_cover(spec, birkhoff, n, eps, grid, mode);
    }
    throw ParameterError("pressure_partition: unknown mode");
}

}  // namespace detail

// log of the partition sum for the requested family at fixed (eps, n).
inline double pressure_partition(const NdsSpec& spec, const Potential& psi, double eps, long long n,
                                 PartitionMode mode, const CandidateGrid& grid) {
    return detail::pressure_partition_core(
        spec, [&](const Point& x) { return evaluate(spec.space, psi, x); }, eps, n, mode, grid);
}

// ----------------------------- pressure estimates --------------------------------

struct PressureReport {
    double epsilon = 0.0;
    PartitionMode mode = PartitionMode::Separated;
    std::vector<std::pair<long long, double>> values;  // (n, log partition)
    double estimate = 0.0;                             // slope surrogate
    double limsup_proxy = 0.0;
    double residual = 0.0;
    NRange window;
    std::string grid_note;
};

inline PressureReport pressure_estimate(const NdsSpec& spec, const Potential& psi, double eps,
                                        const NRange& range, PartitionMode mode, const CandidateGrid& grid,
                                        int workers = 1) {
    auto values = parallel_map<double>(static_cast<std::size_t>(range.count()), workers, [&](std::size_t j) {
        return pressure_partition(spec, psi, eps, range.lo + static_cast<long long>(j), mode, grid);
    });
    PressureReport rep;
    rep.epsilon = eps;
    rep.mode = mode;
    rep.window = range.upper_half();
    std::vector<double> xs, ys;
    rep.limsup_proxy = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < values.size(); ++j) {
        long long n = range.lo + static_cast<long long>(j);
        rep.values.emplace_back(n, values[j]);
        if (n >= rep.window.lo && n <= rep.window.hi) {
            xs.push_back(static_cast<double>(n));
            ys.push_back(values[j]);
            rep.limsup_proxy = std::max(rep.limsup_proxy, values[j] / static_cast<double>(n));
        }
    }
    if (xs.size() < 3) throw ParameterError("pressure_estimate: window must contain at least 3 points");
    SlopeFit fit = least_squares_slope(xs, ys);
    rep.estimate = fit.slope;
    rep.residual = fit.rms_residual;
    return rep;
}

// ------------------------------ variation / UBV ----------------------------------

// Pairs with d_{1,n} < eps, built by pulling back perturbed orbit endpoints
// through the inverse branch of the starting point.
inline std::vector<std::pair<Point, Point>> make_dynamical_ball_pairs(const NdsSpec& spec, double eps,
                                                                      long long n, std::size_t count,
                                                                      std::uint64_t seed) {
    std::vector<std::pair<Point, Point>> pairs;
    pairs.reserve(count);
    Rng rng = Rng::stream(seed, 0x7A15);
    for (std::size_t s = 0; s < count; ++s) {
        Point x = random_point(spec.space, rng);
        Point end = apply_segment(spec, 1, n, x);
        Point target = sample_in_ball(spec.space, end, eps * 0.98, rng);
        pairs.emplace_back(x, pull_back(spec, 1, x, n, target).result());
    }
    return pairs;
}

struct VariationReport {
    double variation = 0.0;  // max over sampled pairs of |S psi(x) - S psi(y)|
    std::size_t pairs = 0;
    std::optional<double> holder_bound;  // K eps^alpha / (1 - sigma^{-alpha})
    bool within_bound = true;
};

inline VariationReport variation_estimate(const NdsSpec& spec, const Potential& psi, double eps, long long n,
                                          const std::vector<std::pair<Point, Point>>& pairs) {
    if (n < 1) throw ParameterError("variation_estimate: n must be >= 1");
    VariationReport rep;
    for (const auto& [x, y] : pairs) {
        if (bowen_distance(spec, 1, n, x, y) >= eps)
            throw ParameterError("variation_estimate: sampled pair is not inside a dynamical eps-ball");
        double v = std::fabs(birkhoff_sum(spec, psi, 1, n, x) - birkhoff_sum(spec, psi, 1, n, y));
        rep.variation = std::max(rep.variation, v);
        ++rep.pairs;
    }
    auto sigma = spec.resolved_sigma();
    if (sigma) {
        HolderData hd = holder_data(spec.space, psi);
        double bound = hd.k * std::pow(eps, hd.alpha) / (1.0 - std::pow(*sigma, -hd.alpha));
        rep.holder_bound = bound;
        rep.within_bound = rep.variation <= bound + 1e-9;
    }
    return rep;
}

struct UbvReport {
    std::vector<std::pair<long long, double>> profile;  // (n, variation)
    double sup_variation = 0.0;
    std::optional<double> holder_bound;
    bool ubv = false;
};

// Variation profile over n with the plateau / Hoelder-bound verdict.
inline UbvReport variation_profile(const NdsSpec& spec, const Potential& psi, double eps, const NRange& range,
                                   std::size_t pairs_per_n, std::uint64_t seed) {
    UbvReport rep;
    for (long long n = range.lo; n <= range.hi; ++n) {
        if (n < 1) continue;
        auto pairs = make_dynamical_ball_pairs(spec, eps, n, pairs_per_n,
                                               seed ^ static_cast<std::uint64_t>(n));
        VariationReport v = variation_estimate(spec, psi, eps, n, pairs);
        rep.profile.emplace_back(n, v.variation);
        rep.sup_variation = std::max(rep.sup_variation, v.variation);
        rep.holder_bound = v.holder_bound;
    }
    if (rep.holder_bound) {
        rep.ubv = rep.sup_variation <= *rep.holder_bound + 1e-9;
    } else if (rep.profile.size() >= 4) {
        double early = 0.0, late = 0.0;
        std::size_t half = rep.profile.size() / 2;
        for (std::size_t i = 0; i < rep.profile.size(); ++i)
            (i < half ? early : late) = std::max(i < half ? early : late, rep.profile[i].second);
        rep.ubv = late <= 2.0 * early + 1e-9;
    }
    return rep;
}

// ---------------------------- property suite -------------------------------------

struct PropertyCheck {
    std::string name;
    bool passed = false;
    double margin = 0.0;
    std::string detail;
};

struct PropertySuiteReport {
    std::vector<PropertyCheck> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
    }
};

// Partition-level identities of the pressure function on one shared greedy
// separated family: the exact forms hold per run, count-normalised where a
// raw inequality mixes weights with cardinality.
inline PropertySuiteReport pressure_property_suite(const NdsSpec& spec, const Potential& psi,
                                                   const Potential& phi, double eps, long long n,
                                                   const std::vector<double>& t_grid,
                                                   const CandidateGrid& grid) {
    if (n < 1) throw ParameterError("pressure_property_suite: n must be >= 1");
    SeparationReport family = greedy_maximal_separated(spec, 1, n, eps, grid);
    const std::vector<Point>& pts = family.points;
    const double log_count = std::log(static_cast<double>(pts.size()));

    // Orbit-evaluated potential tables: one row per family point.
    auto orbit_values = [&](const Potential& pot) {
        std::vector<std::vector<double>> rows;
        rows.reserve(pts.size());
        for (const Point& x : pts) {
            std::vector<double> row;
            row.reserve(static_cast<std::size_t>(n));
            Point p = x;
            for (long long j = 0; j < n; ++j) {
                row.push_back(evaluate(spec.space, pot, p));
                if (j + 1 < n) p = apply_map(spec.space, spec.map_at(1 + j), p);
            }
            rows.push_back(std::move(row));
        }
        return rows;
    };
    auto partition_of = [&](const std::function<double(std::size_t, std::size_t)>& value) {
        std::vector<double> terms;
        terms.reserve(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) s += value(i, j);
            terms.push_back(s);
        }
        return log_sum_exp(terms);
    };

    const auto vpsi = orbit_values(psi);
    const auto vphi = orbit_values(phi);
    auto p_of_psi = partition_of([&](std::size_t i, std::size_t j) { return vpsi[i][j]; });
    auto p_of_phi = partition_of([&](std::size_t i, std::size_t j) { return vphi[i][j]; });

    PropertySuiteReport rep;
    auto push = [&](std::string name, bool passed, double margin, std::string detail = "") {
        rep.checks.push_back(PropertyCheck{std::move(name), passed, margin, std::move(detail)});
    };

    // (a) zero potential reproduces the separated count
    {
        double p0 = partition_of([](std::size_t, std::size_t) { return 0.0; });
        push("zero_potential_is_log_count", p0 == log_count, std::fabs(p0 - log_count));
    }
    // (b) monotone: min(psi, phi) <= psi pointwise
    {
        double pmin = partition_of([&](std::size_t i, std::size_t j) { return std::min(vpsi[i][j], vphi[i][j]); });
        push("monotone_in_potential", pmin <= p_of_psi + 1e-12, p_of_psi - pmin);
    }
    // (c) Lipschitz at the partition level over the shared family
    {
        double m = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j)
                m = std::max(m, std::fabs(vpsi[i][j] - vphi[i][j]));
        double lhs = std::fabs(p_of_psi - p_of_phi);
        double rhs = static_cast<double>(n) * m;
        push("partition_lipschitz", lhs <= rhs + 1e-9, rhs - lhs,
             "|p(psi)-p(phi)| vs n*max|psi-phi| on the family");
    }
    // (d) additive constants shift by n*c
    {
        const double c = 0.5;
        double pc = partition_of([&](std::size_t i, std::size_t j) { return vpsi[i][j] + c; });
        double expect = p_of_psi + static_cast<double>(n) * c;
        push("constant_shift", std::fabs(pc - expect) <= 1e-9, std::fabs(pc - expect));
    }
    // (e) midpoint convexity of t -> p(t psi) on the t grid
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        auto p_at = [&](double t) {
            return partition_of([&](std::size_t i, std::size_t j) { return t * vpsi[i][j]; });
        };
        for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
            double mid = p_at(0.5 * (t_grid[i] + t_grid[i + 1]));
            double bound = 0.5 * (p_at(t_grid[i]) + p_at(t_grid[i + 1]));
            worst = std::min(worst, bound - mid);
            if (mid > bound + 1e-9) ok = false;
        }
        push("midpoint_convexity", ok, worst);
    }
    // (f) subadditivity; the count-normalised form carries a log|E| correction
    {
        double psum = partition_of([&](std::size_t i, std::size_t j) { return vpsi[i][j] + vphi[i][j]; });
        double margin = p_of_psi + p_of_phi - psum;
        push("subadditivity", psum <= p_of_psi + p_of_phi + 1e-9, margin,
             "normalized correction log|E| = " + std::to_string(log_count));
    }
    // (g) |p(psi)| <= p(|psi|)
    {
        double pabs = partition_of([&](std::size_t i, std::size_t j) { return std::fabs(vpsi[i][j]); });
        double lhs = std::fabs(p_of_psi);
        push("absolute_bound", lhs <= pabs + 1e-9, pabs - lhs,
             "count correction 2log|E| = " + std::to_string(2.0 * log_count));
    }
    // (h) scaling at the count-normalised level (power-mean direction)
    {
        auto q_at = [&](double c) {
            return partition_of([&](std::size_t i, std::size_t j) { return c * vpsi[i][j]; }) - log_count;
        };
        double q1 = q_at(1.0);
        double up = q_at(2.0), down = q_at(0.5);
        bool ok = (up >= 2.0 * q1 - 1e-9) && (down <= 0.5 * q1 + 1e-9);
        push("normalized_scaling", ok, std::min(up - 2.0 * q1, 0.5 * q1 - down));
    }
    return rep;
}

// ------------------------------ pressure curves ----------------------------------

struct PressureCurve {
    std::vector<std::pair<double, double>> points;  // (t, estimate)
    double potential_norm = 0.0;
    std::vector<PropertyCheck> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
    }
};

// P(t psi) sampled on the t grid, with the regularity checks: slopes bounded
// by ||psi||, Lipschitz continuity in t, and midpoint convexity.
inline PressureCurve pressure_curve(const NdsSpec& spec, const Potential& psi, const std::vector<double>& t_grid,
                                    double eps, const NRange& range, PartitionMode mode,
                                    const CandidateGrid& grid, int workers = 1, double tol = 0.02) {
    if (t_grid.size() < 5) throw ParameterError("pressure_curve: t grid needs at least 5 points");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1]) throw ParameterError("pressure_curve: t grid must increase");

    auto estimates = parallel_map<double>(t_grid.size(), workers, [&](std::size_t ti) {
        auto values = parallel_map<double>(static_cast<std::size_t>(range.count()), 1, [&](std::size_t j) {
            long long n = range.lo + static_cast<long long>(j);
            return detail::pressure_partition_core(
                spec, [&](const Point& x) { return t_grid[ti] * evaluate(spec.space, psi, x); }, eps, n, mode,
                grid);
        });
        NRange window = range.upper_half();
        std::vector<double> xs, ys;
        for (std::size_t j = 0; j < values.size(); ++j) {
            long long n = range.lo + static_cast<long long>(j);
            if (n >= window.lo && n <= window.hi) {
                xs.push_back(static_cast<double>(n));
                ys.push_back(values[j]);
            }
        }
        return least_squares_slope(xs, ys).slope;
    });

    PressureCurve curve;
    curve.potential_norm = sup_norm(spec.space, psi);
    for (std::size_t i = 0; i < t_grid.size(); ++i) curve.points.emplace_back(t_grid[i], estimates[i]);

    bool slopes_ok = true, lipschitz_ok = true, convex_ok = true;
    double slope_margin = std::numeric_limits<double>::infinity();
    double lip_margin = std::numeric_limits<double>::infinity();
    double convex_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < estimates.size(); ++i) {
        double fd = std::fabs(estimates[i + 1] - estimates[i]) / (t_grid[i + 1] - t_grid[i]);
        slope_margin = std::min(slope_margin, curve.potential_norm + tol - fd);
        if (fd > curve.potential_norm + tol) slopes_ok = false;
    }
    for (std::size_t i = 0; i < estimates.size(); ++i)
        for (std::size_t j = i + 1; j < estimates.size(); ++j) {
            double bound = std::fabs(t_grid[j] - t_grid[i]) * curve.potential_norm + tol;
            lip_margin = std::min(lip_margin, bound - std::fabs(estimates[j] - estimates[i]));
            if (std::fabs(estimates[j] - estimates[i]) > bound) lipschitz_ok = false;
        }
    for (std::size_t i = 1; i + 1 < estimates.size(); ++i) {
        // evenly spaced grids: interior point vs chord midpoint
        if (std::fabs((t_grid[i + 1] - t_grid[i]) - (t_grid[i] - t_grid[i - 1])) > 1e-12) continue;
        double chord = 0.5 * (estimates[i - 1] + estimates[i + 1]);
        convex_margin = std::min(convex_margin, chord + tol - estimates[i]);
        if (estimates[i] > chord + tol) convex_ok = false;
    }
    curve.checks.push_back({"finite_difference_slopes_bounded", slopes_ok, slope_margin, ""});
    curve.checks.push_back({"lipschitz_in_t", lipschitz_ok, lip_margin, ""});
    curve.checks.push_back({"midpoint_convexity", convex_ok, convex_margin, ""});
    return curve;
}

// ----------------------------- scale stability -----------------------------------

struct ScaleStabilityReport {
    std::vector<std::pair<double, double>> estimates;  // (eps, estimate)
    double max_pairwise_gap = 0.0;
    double tolerance = 0.05;
    bool passed() const { return max_pairwise_gap <= tolerance; }
};

// Fixed-scale pressure: below the expansivity scale the estimates must agree
// across eps.  Non-expanding specs are rejected up front.
inline ScaleStabilityReport scale_stability_check(const NdsSpec& spec, const Potential& psi,
                                                  const std::vector<double>& eps_list, const NRange& range,
                                                  const CandidateGrid& grid, int workers = 1,
                                                  double tolerance = 0.05) {
    if (eps_list.empty()) throw ParameterError("scale_stability_check: empty eps list");
    if (!spec.uniformly_expanding())
        throw ParameterError("scale_stability_check: spec is not uniformly expanding");
    const double rho = spec.require_rho();
    for (double e : eps_list)
        if (!(e > 0.0 && e < rho))
            throw ParameterError("scale_stability_check: every eps must lie in (0, rho)");

    ScaleStabilityReport rep;
    rep.tolerance = tolerance;
    for (double e : eps_list) {
        PressureReport pr = pressure_estimate(spec, psi, e, range, PartitionMode::Separated, grid, workers);
        rep.estimates.emplace_back(e, pr.estimate);
    }
    for (std::size_t i = 0; i < rep.estimates.size(); ++i)
        for (std::size_t j = i + 1; j < rep.estimates.size(); ++j)
            rep.max_pairwise_gap =
                std::max(rep.max_pairwise_gap, std::fabs(rep.estimates[i].second - rep.estimates[j].second));
    return rep;
}

// --------------------------- transfer-matrix oracle -------------------------------

struct TransferPressure {
    double log_pressure = 0.0;
    PerronResult perron;
    bool reducible_warning = false;
};

// log spectral radius of the letter-weighted transition matrix A_{ij} e^{v(i)}.
inline TransferPressure sft_transfer_pressure(const TransitionMatrix& a, const std::vector<double>& letter_values,
                                              double tol = 1e-12) {
    a.validate();
    if (letter_values.size() != static_cast<std::size_t>(a.alphabet))
        throw ParameterError("sft_transfer_pressure: one value per letter required");
    const int d = a.alphabet;
    std::vector<double> m(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (a.admissible(i, j))
                m[static_cast<std::size_t>(i) * d + j] = std::exp(letter_values[static_cast<std::size_t>(i)]);
    TransferPressure tp;
    tp.perron = spectral_radius_power_iteration(m, d, tol);
    tp.reducible_warning = !tp.perron.irreducible;
    if (tp.perron.value <= 0.0) throw NumericError("sft_transfer_pressure: degenerate spectral radius");
    tp.log_pressure = std::log(tp.perron.value);
    return tp;
}

// log sum over admissible words of length n of exp(sum of letter values);
// exact dynamic program, the enumeration-route cross-check for the oracle.
inline double sft_word_sum_log(const TransitionMatrix& a, const std::vector<double>& letter_values, int n) {
    a.validate();
    if (n < 1) throw ParameterError("sft_word_sum_log: n must be >= 1");
    if (letter_values.size() != static_cast<std::size_t>(a.alphabet))
        throw ParameterError("sft_word_sum_log: one value per letter required");
    const int d = a.alphabet;
    std::vector<double> mass(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) mass[static_cast<std::size_t>(i)] = std::exp(letter_values[static_cast<std::size_t>(i)]);
    for (int step = 1; step < n; ++step) {
        std::vector<double> next(static_cast<std::size_t>(d), 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (a.admissible(i, j))
                    next[static_cast<std::size_t>(j)] +=
                        mass[static_cast<std::size_t>(i)] * std::exp(letter_values[static_cast<std::size_t>(j)]);
        mass = std::move(next);
    }
    double total = 0.0;
    for (double v : mass) total += v;
    return std::log(total);
}

}  // namespace ndsthermo
