// metrics.hpp — Bowen metrics, dynamical balls, candidate grids, and greedy
// separated / spanning set construction.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ndsthermo/errors.hpp"
#include "ndsthermo/nds.hpp"
#include "ndsthermo/numerics.hpp"
#include "ndsthermo/space.hpp"

namespace ndsthermo {

// ------------------------------ Bowen metric ----------------------------------

// d_{k,n}(x,y) = max over i = 0..n of d(f_k^i x, f_k^i y).
inline double bowen_distance(const NdsSpec& spec, long long k, long long n, const Point& x, const Point& y) {
    if (k < 1 || n < 0) throw ParameterError("bowen_distance: need k >= 1 and n >= 0");
    double best = distance(spec.space, x, y);
    Point px = x, py = y;
    for (long long i = 0; i < n; ++i) {
        const MapDescriptor& d = spec.map_at(k + i);
        px = apply_map(spec.space, d, px);
        py = apply_map(spec.space, d, py);
        best = std::max(best, distance(spec.space, px, py));
    }
    return best;
}

// d_{k,n}(x,y) <= eps, with an early exit once some iterate separates.
inline bool bowen_within(const NdsSpec& spec, long long k, long long n, const Point& x, const Point& y,
                         double eps) {
    if (distance(spec.space, x, y) > eps) return false;
    Point px = x, py = y;
    for (long long i = 0; i < n; ++i) {
        const MapDescriptor& d = spec.map_at(k + i);
        px = apply_map(spec.space, d, px);
        py = apply_map(spec.space, d, py);
        if (distance(spec.space, px, py) > eps) return false;
    }
    return true;
}

// y in B(center, k, n, eps), the dynamical (n+1)-ball with initial time k.
inline bool dynamical_ball_membership(const NdsSpec& spec, const Point& center, long long k, long long n,
                                      double eps, const Point& y) {
    if (eps <= 0.0) throw ParameterError("dynamical_ball_membership: eps must be positive");
    return bowen_distance(spec, k, n, center, y) < eps;
}

// ----------------------------- candidate grids ---------------------------------

enum class GridKind { Uniform, Auto, Explicit, Pullback };

struct GridRestriction {
    Point center;
    double radius = 0.0;  // closed ball in the plain metric
};

// Finite stand-in for "all subsets of X".  Uniform grids are lattices of
// spacing h (symbolic: all admissible words of the matching depth).  Auto
// grids refine with n so that dynamical balls of width eps*sigma^{-n} stay
// resolved.  Pullback grids materialise f_k^{-n} of a base lattice.
struct CandidateGrid {
    GridKind kind = GridKind::Auto;
    double h = 0.0;              // uniform spacing / pullback base spacing
    double auto_divisor = 2.5;   // auto: h_n = eps * sigma^{-n} / divisor
    std::vector<Point> points;   // explicit
    std::optional<GridRestriction> restrict_to;

    static CandidateGrid uniform(double spacing) {
        if (spacing <= 0.0) throw ParameterError("grid spacing must be positive");
        CandidateGrid g;
        g.kind = GridKind::Uniform;
        g.h = spacing;
        return g;
    }

    // Divisor 2.5 keeps every pair-gap comparison 20% away from the eps
    // threshold, so greedy decisions never sit on a floating-point tie.
    static CandidateGrid automatic(double divisor = 2.5) {
        if (divisor < 1.0) throw ParameterError("auto grid divisor must be >= 1");
        CandidateGrid g;
        g.kind = GridKind::Auto;
        g.auto_divisor = divisor;
        return g;
    }

    static CandidateGrid explicit_points(std::vector<Point> pts) {
        if (pts.empty()) throw ParameterError("explicit grid must be nonempty");
        CandidateGrid g;
        g.kind = GridKind::Explicit;
        g.points = std::move(pts);
        return g;
    }

    static CandidateGrid pullback(double base_spacing, int depth) {
        if (base_spacing <= 0.0 || depth < 0) throw ParameterError("pullback grid: bad parameters");
        CandidateGrid g;
        g.kind = GridKind::Pullback;
        g.h = base_spacing;
        g.auto_divisor = static_cast<double>(depth);
        return g;
    }

    CandidateGrid restricted(Point center, double radius) const {
        if (radius <= 0.0) throw ParameterError("grid restriction radius must be positive");
        CandidateGrid g = *this;
        g.restrict_to = GridRestriction{std::move(center), radius};
        return g;
    }
};

namespace detail {

inline int depth_for_scale(double scale, int cap) {
    int q = 0;
    while (q < cap && std::ldexp(1.0, -q) > scale) ++q;
    return std::max(1, q);
}

inline long long lattice_count(double h, double limit) {
    long long m = 0;
    while (static_cast<double>(m) * h < limit) ++m;
    return m;
}

inline std::vector<Point> lattice_points(const Space& space, double h) {
    std::vector<Point> out;
    switch (space.kind) {
        case SpaceKind::Circle: {
            long long m = lattice_count(h, 1.0 - 1e-12);
            for (long long i = 0; i < m; ++i) out.push_back(Point::scalar(static_cast<double>(i) * h));
            break;
        }
        case SpaceKind::Interval: {
            long long m = lattice_count(h, 1.0 + 1e-12);
            for (long long i = 0; i < m; ++i)
                out.push_back(Point::scalar(std::min(static_cast<double>(i) * h, 1.0)));
            break;
        }
        case SpaceKind::Torus: {
            long long per_dim = lattice_count(h, 1.0 - 1e-12);
            std::vector<long long> odo(space.dim, 0);
            while (true) {
                std::vector<double> coords(space.dim);
                for (int i = 0; i < space.dim; ++i) coords[i] = static_cast<double>(odo[i]) * h;
                out.push_back(Point::vec(std::move(coords)));
                int pos = space.dim - 1;
                while (pos >= 0 && ++odo[pos] == per_dim) odo[pos--] = 0;
                if (pos < 0) break;
            }
            break;
        }
        case SpaceKind::Symbolic: {
            int depth = depth_for_scale(h, space.word_depth);
            for (auto& w : enumerate_admissible_words(space.transitions, depth))
                out.push_back(extend_word_to_depth(space, std::move(w), space.word_depth));
            break;
        }
    }
    return out;
}

inline long long total_shift_power(const NdsSpec& spec, long long k, long long n) {
    long long total = 0;
    for (long long i = 0; i < n; ++i) {
        const auto* sp = std::get_if<ShiftPower>(&spec.map_at(k + i));
        total += sp ? sp->power : 1;
    }
    return total;
}

// Product of the certified one-step expansion factors along f_k^n; the
// Bowen-ball width at level n is eps over this product.  Nullopt when some
// scheduled map carries no certificate.
inline std::optional<double> certified_expansion_product(const NdsSpec& spec, long long k, long long n) {
    double product = 1.0;
    for (long long i = 0; i < n; ++i) {
        auto s = certified_sigma(spec.map_at(k + i));
        if (!s) return std::nullopt;
        product *= *s;
    }
    return product;
}

}  // namespace detail

// Materialise the candidate set for a (k, n, eps) run: lexicographically
// sorted, deduplicated, and filtered by the restriction if present.
inline std::vector<Point> materialize_grid(const NdsSpec& spec, const CandidateGrid& grid, long long k,
                                           long long n, double eps) {
    std::vector<Point> pts;
    switch (grid.kind) {
        case GridKind::Explicit:
            pts = grid.points;
            for (const auto& p : pts) check_membership(spec.space, p, "explicit grid");
            break;
        case GridKind::Uniform:
            pts = detail::lattice_points(spec.space, grid.h);
            break;
        case GridKind::Auto: {
            if (spec.space.symbolic_space()) {
                int depth = detail::depth_for_scale(eps, spec.space.word_depth) +
                            static_cast<int>(detail::total_shift_power(spec, k, n)) + 1;
                depth = std::min(depth, spec.space.word_depth);
                for (auto& w : enumerate_admissible_words(spec.space.transitions, depth))
                    pts.push_back(extend_word_to_depth(spec.space, std::move(w), spec.space.word_depth));
            } else {
                auto product = detail::certified_expansion_product(spec, k, n);
                auto sigma = spec.resolved_sigma();
                double h;
                if (product)
                    h = eps / (*product * grid.auto_divisor);
                else if (sigma)
                    h = eps * std::pow(*sigma, -static_cast<double>(n)) / grid.auto_divisor;
                else
                    h = eps / 16.0;
                pts = detail::lattice_points(spec.space, h);
            }
            break;
        }
        case GridKind::Pullback: {
            const int depth = static_cast<int>(grid.auto_divisor);
            std::vector<Point> base = detail::lattice_points(spec.space, grid.h);
            for (int step = 0; step < depth; ++step) {
                std::vector<Point> next;
                for (const auto& y : base)
                    for (auto& z : enumerate_preimages(spec, k + depth - 1 - step, y)) next.push_back(std::move(z));
                base = std::move(next);
            }
            pts = std::move(base);
            break;
        }
    }
    if (grid.restrict_to) {
        const auto& r = *grid.restrict_to;
        check_membership(spec.space, r.center, "grid restriction");
        std::vector<Point> kept;
        for (auto& p : pts)
            if (distance(spec.space, r.center, p) <= r.radius + 1e-15) kept.push_back(std::move(p));
        pts = std::move(kept);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.empty()) throw ParameterError("candidate grid is empty (restriction too tight?)");
    return pts;
}

// ----------------------------- neighbour lookup --------------------------------

namespace detail {

// Index over a fixed candidate list answering "which stored entries can lie
// within plain distance w of p".  May over-report, never under-reports; the
// callers re-test with the Bowen metric.
class NeighborIndex {
public:
    NeighborIndex(const Space& space, double window, const std::vector<Point>& pool)
        : space_(space), w_(window), pool_(pool) {
        if (space_.kind == SpaceKind::Torus) {
            cells_ = std::max<long long>(1, static_cast<long long>(std::floor(1.0 / std::max(w_, 1e-12))));
            cells_ = std::min<long long>(cells_, 1 << 20);
        } else if (space_.kind == SpaceKind::Symbolic) {
            prefix_len_ = std::max(0, depth_for_scale(w_, space_.word_depth) - 1);
        }
    }

    void insert(std::size_t idx) {
        const Point& p = pool_[idx];
        switch (space_.kind) {
            case SpaceKind::Circle:
            case SpaceKind::Interval:
                sorted_coords_.push_back(p.coords[0]);
                sorted_idx_.push_back(idx);
                break;
            case SpaceKind::Torus:
                buckets_[cell_key(p)].push_back(idx);
                break;
            case SpaceKind::Symbolic:
                buckets_str_[prefix_key(p)].push_back(idx);
                break;
        }
    }

    template <class F>
    void for_neighbors(const Point& p, F&& f) const {
        switch (space_.kind) {
            case SpaceKind::Interval: {
                scan_range(p.coords[0] - w_ - 1e-15, p.coords[0] + w_ + 1e-15, f);
                return;
            }
            case SpaceKind::Circle: {
                double lo = p.coords[0] - w_ - 1e-15, hi = p.coords[0] + w_ + 1e-15;
                if (hi - lo >= 1.0) {
                    scan_range(-1.0, 2.0, f);
                    return;
                }
                if (lo < 0.0) {
                    scan_range(0.0, hi, f);
                    scan_range(lo + 1.0, 1.0 + 1e-15, f);
                } else if (hi >= 1.0) {
                    scan_range(lo, 1.0 + 1e-15, f);
                    scan_range(-1e-15, hi - 1.0, f);
                } else {
                    scan_range(lo, hi, f);
                }
                return;
            }
            case SpaceKind::Torus: {
                std::vector<long long> base(space_.dim);
                for (int i = 0; i < space_.dim; ++i)
                    base[i] = static_cast<long long>(std::floor(p.coords[i] * static_cast<double>(cells_)));
                std::vector<int> offset(space_.dim, -1);
                while (true) {
                    std::vector<long long> cell(space_.dim);
                    for (int i = 0; i < space_.dim; ++i) {
                        long long c = (base[i] + offset[i]) % cells_;
                        cell[i] = c < 0 ? c + cells_ : c;
                    }
                    auto it = buckets_.find(pack(cell));
                    if (it != buckets_.end())
                        for (std::size_t idx : it->second) f(idx);
                    int pos = space_.dim - 1;
                    while (pos >= 0 && ++offset[pos] == 2) offset[pos--] = -1;
                    if (pos < 0) break;
                }
                return;
            }
            case SpaceKind::Symbolic: {
                auto it = buckets_str_.find(prefix_key(p));
                if (it != buckets_str_.end())
                    for (std::size_t idx : it->second) f(idx);
                return;
            }
        }
    }

private:
    template <class F>
    void scan_range(double lo, double hi, F&& f) const {
        auto first = std::lower_bound(sorted_coords_.begin(), sorted_coords_.end(), lo);
        for (auto it = first; it != sorted_coords_.end() && *it <= hi; ++it)
            f(sorted_idx_[static_cast<std::size_t>(it - sorted_coords_.begin())]);
    }

    std::uint64_t cell_key(const Point& p) const {
        std::vector<long long> cell(space_.dim);
        for (int i = 0; i < space_.dim; ++i)
            cell[i] = static_cast<long long>(std::floor(p.coords[i] * static_cast<double>(cells_)));
        return pack(cell);
    }

    std::uint64_t pack(const std::vector<long long>& cell) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (long long c : cell) {
            std::uint64_t v = static_cast<std::uint64_t>(c);
            h = (h ^ v) * 1099511628211ULL;
        }
        return h;
    }

    std::string prefix_key(const Point& p) const {
        std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(prefix_len_), p.word.size());
        std::string key;
        key.reserve(len);
        for (std::size_t i = 0; i < len; ++i) key.push_back(static_cast<char>('a' + p.word[i]));
        return key;
    }

    const Space& space_;
    double w_;
    const std::vector<Point>& pool_;
    std::vector<double> sorted_coords_;   // circle / interval (ascending inserts)
    std::vector<std::size_t> sorted_idx_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
    std::unordered_map<std::string, std::vector<std::size_t>> buckets_str_;
    long long cells_ = 1;
    int prefix_len_ = 0;
};

// Only pairs with plain distance <= eps can be Bowen-close; on certified
// expanding specs the inverse-branch contraction tightens this to eps over
// the composed expansion, which keeps the neighbour scan O(1) per candidate.
inline double rejection_window(const NdsSpec& spec, long long k, long long n, double eps) {
    double w = eps;
    auto rho = spec.resolved_rho();
    if (!rho || eps > *rho || n <= 0) return w;
    auto product = certified_expansion_product(spec, k, n);
    if (product) return std::min(w, eps / *product * (1.0 + 1e-9) + 1e-15);
    auto sigma = spec.resolved_sigma();
    if (sigma) return std::min(w, eps * std::pow(*sigma, -static_cast<double>(n)) * (1.0 + 1e-9) + 1e-15);
    return w;
}

}  // namespace detail

// ---------------------------- separation reports -------------------------------

enum class SeparationMode { Separated, Spanning };

inline const char* to_string(SeparationMode m) {
    return m == SeparationMode::Separated ? "separated" : "spanning";
}

struct SeparationReport {
    long long k = 1;
    long long n = 0;
    double epsilon = 0.0;
    SeparationMode mode = SeparationMode::Separated;
    std::vector<Point> points;
    std::string grid_note;
    double grid_h = 0.0;

    std::size_t cardinality() const { return points.size(); }
};

namespace detail {

inline std::string grid_note_for(const CandidateGrid& grid, std::size_t count) {
    std::string note;
    switch (grid.kind) {
        case GridKind::Uniform: note = "uniform(h=" + std::to_string(grid.h) + ")"; break;
        case GridKind::Auto: note = "auto(divisor=" + std::to_string(grid.auto_divisor) + ")"; break;
        case GridKind::Explicit: note = "explicit"; break;
        case GridKind::Pullback: note = "pullback(base_h=" + std::to_string(grid.h) + ")"; break;
    }
    if (grid.restrict_to) note += "|restricted(r=" + std::to_string(grid.restrict_to->radius) + ")";
    note += "|candidates=" + std::to_string(count);
    return note;
}

inline double effective_resolution(const NdsSpec& spec, const CandidateGrid& grid, long long n, double eps) {
    switch (grid.kind) {
        case GridKind::Uniform: return grid.h;
        case GridKind::Pullback: return grid.h;
        case GridKind::Explicit: return 0.0;
        case GridKind::Auto: {
            if (spec.space.symbolic_space()) return 0.0;
            auto sigma = spec.resolved_sigma();
            return sigma ? eps * std::pow(*sigma, -static_cast<double>(n)) / grid.auto_divisor : eps / 16.0;
        }
    }
    return 0.0;
}

}  // namespace detail

// Greedy maximal (n, eps)-separated subset of the grid, candidates taken in
// lexicographic order.  The cardinality is a lower bound for s_n on the grid.
inline SeparationReport greedy_maximal_separated(const NdsSpec& spec, long long k, long long n, double eps,
                                                 const CandidateGrid& grid) {
    if (eps <= 0.0) throw ParameterError("greedy_maximal_separated: eps must be positive");
    std::vector<Point> candidates = materialize_grid(spec, grid, k, n, eps);
    const double w = detail::rejection_window(spec, k, n, eps);

    std::vector<Point> kept;
    detail::NeighborIndex index(spec.space, w, kept);
    for (const Point& cand : candidates) {
        bool separated = true;
        index.for_neighbors(cand, [&](std::size_t idx) {
            if (separated && bowen_within(spec, k, n, kept[idx], cand, eps)) separated = false;
        });
        if (separated) {
            kept.push_back(cand);
            index.insert(kept.size() - 1);
        }
    }

    SeparationReport rep;
    rep.k = k;
    rep.n = n;
    rep.epsilon = eps;
    rep.mode = SeparationMode::Separated;
    rep.grid_note = detail::grid_note_for(grid, candidates.size());
    rep.grid_h = detail::effective_resolution(spec, grid, n, eps);
    rep.points = std::move(kept);
    return rep;
}

// Greedy cover of the grid by closed Bowen eps-balls: take the first
// uncovered candidate, slide the centre as far forward as still covers it,
// repeat.  The cardinality is an upper-bound proxy for r_n on the grid.
inline SeparationReport greedy_spanning(const NdsSpec& spec, long long k, long long n, double eps,
                                        const CandidateGrid& grid) {
    if (eps <= 0.0) throw ParameterError("greedy_spanning: eps must be positive");
    std::vector<Point> candidates = materialize_grid(spec, grid, k, n, eps);
    const double w = detail::rejection_window(spec, k, n, eps);

    detail::NeighborIndex index(spec.space, w, candidates);
    for (std::size_t i = 0; i < candidates.size(); ++i) index.insert(i);

    std::vector<char> covered(candidates.size(), 0);
    std::vector<Point> centers;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (covered[i]) continue;
        std::size_t best = i;
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            if (bowen_within(spec, k, n, candidates[i], candidates[j], eps))
                best = j;
            else
                break;
        }
        const Point& center = candidates[best];
        index.for_neighbors(center, [&](std::size_t idx) {
            if (!covered[idx] && bowen_within(spec, k, n, center, candidates[idx], eps)) covered[idx] = 1;
        });
        covered[i] = 1;  // center covers its seed by construction
        centers.push_back(center);
    }

    SeparationReport rep;
    rep.k = k;
    rep.n = n;
    rep.epsilon = eps;
    rep.mode = SeparationMode::Spanning;
    rep.grid_note = detail::grid_note_for(grid, candidates.size());
    rep.grid_h = detail::effective_resolution(spec, grid, n, eps);
    rep.points = std::move(centers);
    return rep;
}

// ------------------------------- re-checks ------------------------------------

// Exhaustive pairwise re-verification of the separated invariant.
inline bool verify_separated(const NdsSpec& spec, const SeparationReport& rep) {
    if (rep.mode != SeparationMode::Separated) throw ParameterError("verify_separated: wrong mode");
    for (std::size_t i = 0; i < rep.points.size(); ++i)
        for (std::size_t j = i + 1; j < rep.points.size(); ++j)
            if (bowen_distance(spec, rep.k, rep.n, rep.points[i], rep.points[j]) <= rep.epsilon) return false;
    return true;
}

// Exhaustive coverage re-check: every candidate within closed Bowen eps of
// some listed point.
inline bool verify_spanning(const NdsSpec& spec, const SeparationReport& rep,
                            const std::vector<Point>& candidates) {
    for (const Point& c : candidates) {
        bool hit = false;
        for (const Point& p : rep.points)
            if (bowen_within(spec, rep.k, rep.n, p, c, rep.epsilon)) {
                hit = true;
                break;
            }
        if (!hit) return false;
    }
    return true;
}

// No grid point can be added to a separated report without breaking it.
inline bool verify_maximality(const NdsSpec& spec, const SeparationReport& rep,
                              const std::vector<Point>& candidates) {
    for (const Point& c : candidates) {
        if (std::find(rep.points.begin(), rep.points.end(), c) != rep.points.end()) continue;
        bool blocked = false;
        for (const Point& p : rep.points)
            if (bowen_within(spec, rep.k, rep.n, p, c, rep.epsilon)) {
                blocked = true;
                break;
            }
        if (!blocked) return false;
    }
    return true;
}

}  // namespace ndsthermo
