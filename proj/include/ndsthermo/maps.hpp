// maps.hpp — the map zoo: descriptors, one-step application, exact preimage
// enumeration, and certified expansion data where available.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ndsthermo/errors.hpp"
#include "ndsthermo/numerics.hpp"
#include "ndsthermo/space.hpp"

namespace ndsthermo {

// ------------------------------- descriptors ----------------------------------

// x -> k x (mod 1) on the circle, degree k >= 2.
struct CircleAffine {
    int degree = 2;
};

// x -> A x (mod 1) on the torus, A integer with |det| >= 1.  The chosen torus
// metric is the per-coordinate max, so the certified expansion factor is
// 1/||A^{-1}||_inf; it must exceed 1.
struct TorusLinear {
    int dim = 2;
    std::vector<long long> a;  // row-major dim x dim
};

// m-fold left shift on the subshift.
struct ShiftPower {
    int power = 1;
};

// Intermittent circle map: x + 2^alpha x^{1+alpha} on [0,1/2], 2x-1 above,
// glued at the wrap point.  Not uniformly expanding (slope -> 1 at 0).
struct PomeauManneville {
    double alpha = 0.5;
};

// Lift x -> ((2n+1)/n) x (mod 1).  Non-integer degree for n > 1, so the lift
// has a discontinuity at the wrap point; excluded from inverse-branch work.
struct CircleExponentFamily {
    int n = 1;
};

// Interval map that applies an m-fold tent power inside [a,b] and is the
// identity outside.  sigma_ab is the increasing affine bijection [a,b]->[0,1].
struct KolyadaSnoha {
    int level = 1;
    double a = 0.0;
    double b = 0.5;
};

struct IdentityMap {};

using MapDescriptor = std::variant<CircleAffine, TorusLinear, ShiftPower, PomeauManneville,
                                   CircleExponentFamily, KolyadaSnoha, IdentityMap>;

inline std::string descriptor_name(const MapDescriptor& d) {
    struct V {
        std::string operator()(const CircleAffine& m) const { return "circle_affine(" + std::to_string(m.degree) + ")"; }
        std::string operator()(const TorusLinear&) const { return "torus_linear"; }
        std::string operator()(const ShiftPower& m) const { return "shift_power(" + std::to_string(m.power) + ")"; }
        std::string operator()(const PomeauManneville& m) const { return "pomeau_manneville(" + std::to_string(m.alpha) + ")"; }
        std::string operator()(const CircleExponentFamily& m) const { return "circle_exponent(" + std::to_string(m.n) + ")"; }
        std::string operator()(const KolyadaSnoha& m) const { return "kolyada_snoha(" + std::to_string(m.level) + ")"; }
        std::string operator()(const IdentityMap&) const { return "identity"; }
    };
    return std::visit(V{}, d);
}

// ------------------------- integer matrix utilities ---------------------------

namespace detail {

inline long long int_det(const std::vector<long long>& m, int dim) {
    if (dim == 1) return m[0];
    long long det = 0;
    std::vector<long long> minor(static_cast<std::size_t>(dim - 1) * (dim - 1));
    for (int c = 0; c < dim; ++c) {
        for (int i = 1; i < dim; ++i) {
            int mc = 0;
            for (int j = 0; j < dim; ++j) {
                if (j == c) continue;
                minor[static_cast<std::size_t>(i - 1) * (dim - 1) + mc++] = m[static_cast<std::size_t>(i) * dim + j];
            }
        }
        long long cof = int_det(minor, dim - 1);
        det += ((c % 2 == 0) ? 1 : -1) * m[c] * cof;
    }
    return det;
}

// Adjugate: A * adj(A) = det(A) * I.
inline std::vector<long long> int_adjugate(const std::vector<long long>& m, int dim) {
    std::vector<long long> adj(static_cast<std::size_t>(dim) * dim);
    if (dim == 1) {
        adj[0] = 1;
        return adj;
    }
    std::vector<long long> minor(static_cast<std::size_t>(dim - 1) * (dim - 1));
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            int mi = 0;
            for (int i = 0; i < dim; ++i) {
                if (i == r) continue;
                for (int j = 0; j < dim; ++j) {
                    if (j == c) continue;
                    minor[mi++] = m[static_cast<std::size_t>(i) * dim + j];
                }
            }
            long long cof = ((r + c) % 2 == 0 ? 1 : -1) * int_det(minor, dim - 1);
            adj[static_cast<std::size_t>(c) * dim + r] = cof;  // transpose of cofactors
        }
    }
    return adj;
}

// The |det A| residues (adj(A) m / det mod 1) as integer vectors over
// denominator |det|; these are the offsets between torus preimages.
inline std::vector<std::vector<long long>> preimage_offsets(const TorusLinear& t) {
    const int dim = t.dim;
    const long long det = int_det(t.a, dim);
    const long long D = std::llabs(det);
    if (D == 0) throw ParameterError("torus_linear: determinant must be nonzero");
    const auto adj = int_adjugate(t.a, dim);
    const long long sgn = det > 0 ? 1 : -1;

    auto mod_d = [D](long long v) {
        long long r = v % D;
        return r < 0 ? r + D : r;
    };

    std::vector<std::vector<long long>> gens;
    for (int j = 0; j < dim; ++j) {
        std::vector<long long> g(dim);
        for (int i = 0; i < dim; ++i) g[i] = mod_d(sgn * adj[static_cast<std::size_t>(i) * dim + j]);
        gens.push_back(std::move(g));
    }

    std::vector<std::vector<long long>> group{std::vector<long long>(dim, 0)};
    std::vector<std::vector<long long>> frontier = group;
    auto contains = [&](const std::vector<long long>& v) {
        return std::find(group.begin(), group.end(), v) != group.end();
    };
    while (!frontier.empty()) {
        std::vector<std::vector<long long>> next;
        for (const auto& f : frontier) {
            for (const auto& g : gens) {
                std::vector<long long> s(dim);
                for (int i = 0; i < dim; ++i) s[i] = mod_d(f[i] + g[i]);
                if (!contains(s)) {
                    group.push_back(s);
                    next.push_back(std::move(s));
                }
            }
        }
        frontier = std::move(next);
    }
    if (static_cast<long long>(group.size()) != D)
        throw NumericError("torus_linear: preimage coset enumeration did not close at |det| elements");
    std::sort(group.begin(), group.end());
    return group;
}

}  // namespace detail

// Certified expansion factor of a torus endomorphism in the max metric.
inline double torus_linear_sigma(const TorusLinear& t) {
    const long long det = detail::int_det(t.a, t.dim);
    if (det == 0) throw ParameterError("torus_linear: determinant must be nonzero");
    const auto adj = detail::int_adjugate(t.a, t.dim);
    long long worst = 0;
    for (int i = 0; i < t.dim; ++i) {
        long long row = 0;
        for (int j = 0; j < t.dim; ++j) row += std::llabs(adj[static_cast<std::size_t>(i) * t.dim + j]);
        worst = std::max(worst, row);
    }
    return static_cast<double>(std::llabs(det)) / static_cast<double>(worst);
}

// Half the minimal separation between distinct preimages of a point.
inline double torus_linear_rho(const TorusLinear& t) {
    const auto offsets = detail::preimage_offsets(t);
    const long long D = std::llabs(detail::int_det(t.a, t.dim));
    double min_norm = 1.0;
    for (const auto& w : offsets) {
        bool zero = std::all_of(w.begin(), w.end(), [](long long v) { return v == 0; });
        if (zero) continue;
        double norm = 0.0;
        for (long long wi : w) {
            double frac = static_cast<double>(std::min(wi, D - wi)) / static_cast<double>(D);
            norm = std::max(norm, frac);
        }
        min_norm = std::min(min_norm, norm);
    }
    return min_norm / 2.0;
}

// ----------------------------- validation ------------------------------------

inline void validate_descriptor(const Space& space, const MapDescriptor& d) {
    struct V {
        const Space& space;
        void operator()(const CircleAffine& m) const {
            if (space.kind != SpaceKind::Circle) throw SpaceMismatchError("circle_affine needs a circle space");
            if (m.degree < 2) throw ParameterError("circle_affine: degree must be >= 2");
        }
        void operator()(const TorusLinear& m) const {
            if (space.kind != SpaceKind::Torus || space.dim != m.dim)
                throw SpaceMismatchError("torus_linear dimension does not match the torus");
            if (m.a.size() != static_cast<std::size_t>(m.dim) * m.dim)
                throw ParameterError("torus_linear: matrix size mismatch");
            if (torus_linear_sigma(m) <= 1.0)
                throw ParameterError("torus_linear: max-metric expansion factor must exceed 1");
        }
        void operator()(const ShiftPower& m) const {
            if (space.kind != SpaceKind::Symbolic) throw SpaceMismatchError("shift_power needs a symbolic space");
            if (m.power < 1) throw ParameterError("shift_power: power must be >= 1");
        }
        void operator()(const PomeauManneville& m) const {
            if (space.kind != SpaceKind::Circle) throw SpaceMismatchError("pomeau_manneville needs a circle space");
            if (!(m.alpha > 0.0 && m.alpha < 1.0)) throw ParameterError("pomeau_manneville: alpha must lie in (0,1)");
        }
        void operator()(const CircleExponentFamily& m) const {
            if (space.kind != SpaceKind::Circle) throw SpaceMismatchError("circle_exponent needs a circle space");
            if (m.n < 1) throw ParameterError("circle_exponent: index must be >= 1");
        }
        void operator()(const KolyadaSnoha& m) const {
            if (space.kind != SpaceKind::Interval) throw SpaceMismatchError("kolyada_snoha needs an interval space");
            if (m.level < 1) throw ParameterError("kolyada_snoha: level must be >= 1");
            if (!(0.0 <= m.a && m.a < m.b && m.b <= 1.0))
                throw ParameterError("kolyada_snoha: need 0 <= a < b <= 1");
        }
        void operator()(const IdentityMap&) const {}
    };
    std::visit(V{space}, d);
}

// ------------------------------- application ---------------------------------

namespace detail {

inline double tent_zigzag(double x) {  // |1 - |3x - 1||, three full laps on [0,1]
    return std::fabs(1.0 - std::fabs(3.0 * x - 1.0));
}

inline double pomeau_manneville_left(double alpha, double x) {
    return x + std::pow(2.0, alpha) * std::pow(x, 1.0 + alpha);
}

}  // namespace detail

inline Point apply_map(const Space& space, const MapDescriptor& d, const Point& p) {
    check_membership(space, p, "apply_map");
    struct V {
        const Space& space;
        const Point& p;
        Point operator()(const CircleAffine& m) const {
            return Point::scalar(wrap_unit(static_cast<double>(m.degree) * p.coords[0]));
        }
        Point operator()(const TorusLinear& m) const {
            std::vector<double> out(m.dim);
            for (int i = 0; i < m.dim; ++i) {
                double s = 0.0;
                for (int j = 0; j < m.dim; ++j)
                    s += static_cast<double>(m.a[static_cast<std::size_t>(i) * m.dim + j]) * p.coords[j];
                out[i] = wrap_unit(s);
            }
            return Point::vec(std::move(out));
        }
        Point operator()(const ShiftPower& m) const {
            if (static_cast<int>(p.word.size()) <= m.power)
                throw DepthExhaustedError("shift_power: word prefix too short to shift by " +
                                          std::to_string(m.power));
            return Point::symbols(std::vector<int>(p.word.begin() + m.power, p.word.end()));
        }
        Point operator()(const PomeauManneville& m) const {
            double x = p.coords[0];
            double v = (x <= 0.5) ? detail::pomeau_manneville_left(m.alpha, x) : 2.0 * x - 1.0;
            return Point::scalar(wrap_unit(v));
        }
        Point operator()(const CircleExponentFamily& m) const {
            double factor = static_cast<double>(2 * m.n + 1) / static_cast<double>(m.n);
            return Point::scalar(wrap_unit(factor * p.coords[0]));
        }
        Point operator()(const KolyadaSnoha& m) const {
            double x = p.coords[0];
            if (x < m.a || x > m.b) return p;
            double width = m.b - m.a;
            double u = (x - m.a) / width;
            u = std::clamp(u, 0.0, 1.0);
            for (int i = 0; i < m.level; ++i) u = detail::tent_zigzag(u);
            return Point::scalar(m.a + u * width);
        }
        Point operator()(const IdentityMap&) const { return p; }
    };
    return std::visit(V{space, p}, d);
}

// ------------------------------- preimages ------------------------------------

inline bool supports_preimages(const MapDescriptor& d) {
    return !std::holds_alternative<CircleExponentFamily>(d) && !std::holds_alternative<KolyadaSnoha>(d);
}

namespace detail {

// Monotone bisection on the left Pomeau-Manneville branch, then two Newton
// polish steps.  The branch maps [0,1/2] onto [0,1] strictly increasingly.
inline double pomeau_manneville_left_inverse(double alpha, double target) {
    if (target <= 0.0) return 0.0;
    if (target >= 1.0) return 0.5;
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (pomeau_manneville_left(alpha, mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12) break;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
        double f = pomeau_manneville_left(alpha, x) - target;
        double df = 1.0 + std::pow(2.0, alpha) * (1.0 + alpha) * std::pow(std::max(x, 1e-300), alpha);
        double step = f / df;
        double next = std::clamp(x - step, 0.0, 0.5);
        x = next;
    }
    if (std::fabs(pomeau_manneville_left(alpha, x) - target) > 1e-9)
        throw NumericError("pomeau_manneville: branch inversion did not converge, residual " +
                           std::to_string(std::fabs(pomeau_manneville_left(alpha, x) - target)));
    return x;
}

}  // namespace detail

// All x with f(x) = y, ascending / lexicographic.  Cardinality equals the
// topological degree for the exactly-invertible descriptors.
inline std::vector<Point> map_preimages(const Space& space, const MapDescriptor& d, const Point& y) {
    check_membership(space, y, "map_preimages");
    struct V {
        const Space& space;
        const Point& y;
        std::vector<Point> operator()(const CircleAffine& m) const {
            std::vector<Point> out;
            out.reserve(m.degree);
            for (int j = 0; j < m.degree; ++j)
                out.push_back(Point::scalar((y.coords[0] + static_cast<double>(j)) / static_cast<double>(m.degree)));
            return out;
        }
        std::vector<Point> operator()(const TorusLinear& m) const {
            const long long det = detail::int_det(m.a, m.dim);
            const long long D = std::llabs(det);
            const auto adj = detail::int_adjugate(m.a, m.dim);
            std::vector<double> base(m.dim, 0.0);
            for (int i = 0; i < m.dim; ++i) {
                double s = 0.0;
                for (int j = 0; j < m.dim; ++j)
                    s += static_cast<double>(adj[static_cast<std::size_t>(i) * m.dim + j]) * y.coords[j];
                base[i] = s / static_cast<double>(det);
            }
            std::vector<Point> out;
            out.reserve(static_cast<std::size_t>(D));
            for (const auto& w : detail::preimage_offsets(m)) {
                std::vector<double> x(m.dim);
                for (int i = 0; i < m.dim; ++i)
                    x[i] = wrap_unit(base[i] + static_cast<double>(w[i]) / static_cast<double>(D));
                out.push_back(Point::vec(std::move(x)));
            }
            std::sort(out.begin(), out.end());
            return out;
        }
        std::vector<Point> operator()(const ShiftPower& m) const {
            // Admissible m-letter prefixes ending compatibly with y's head.
            std::vector<Point> out;
            std::vector<int> stack;
            auto rec = [&](auto&& self) -> void {
                if (static_cast<int>(stack.size()) == m.power) {
                    if (space.transitions.admissible(stack.back(), y.word.front())) {
                        std::vector<int> word = stack;
                        word.insert(word.end(), y.word.begin(), y.word.end());
                        if (static_cast<int>(word.size()) > space.word_depth)
                            word.resize(static_cast<std::size_t>(space.word_depth));
                        out.push_back(Point::symbols(std::move(word)));
                    }
                    return;
                }
                for (int letter = 0; letter < space.transitions.alphabet; ++letter) {
                    if (!stack.empty() && !space.transitions.admissible(stack.back(), letter)) continue;
                    stack.push_back(letter);
                    self(self);
                    stack.pop_back();
                }
            };
            rec(rec);
            return out;  // already lexicographic
        }
        std::vector<Point> operator()(const PomeauManneville& m) const {
            std::vector<Point> out;
            double target = y.coords[0];
            out.push_back(Point::scalar(detail::pomeau_manneville_left_inverse(m.alpha, target)));
            if (target == 0.0) {
                out.push_back(Point::scalar(0.5));  // left branch hits 1 ~ 0 at x = 1/2
            } else {
                out.push_back(Point::scalar((target + 1.0) / 2.0));
            }
            std::sort(out.begin(), out.end());
            return out;
        }
        std::vector<Point> operator()(const CircleExponentFamily&) const {
            throw ParameterError("circle_exponent: preimage enumeration unsupported (non-integer degree lift)");
        }
        std::vector<Point> operator()(const KolyadaSnoha&) const {
            throw ParameterError("kolyada_snoha: preimage enumeration unsupported");
        }
        std::vector<Point> operator()(const IdentityMap&) const { return {y}; }
    };
    return std::visit(V{space, y}, d);
}

// --------------------------- certified constants ------------------------------

// Expansion factor valid on every rho-ball, or nullopt when the map carries
// no such certificate (intermittent / interval / lift-discontinuous maps).
inline std::optional<double> certified_sigma(const MapDescriptor& d) {
    if (const auto* m = std::get_if<CircleAffine>(&d)) return static_cast<double>(m->degree);
    if (const auto* m = std::get_if<TorusLinear>(&d)) return torus_linear_sigma(*m);
    if (const auto* m = std::get_if<ShiftPower>(&d)) return std::ldexp(1.0, m->power);
    return std::nullopt;
}

inline std::optional<double> default_rho(const MapDescriptor& d) {
    if (const auto* m = std::get_if<CircleAffine>(&d)) return 1.0 / (2.0 * m->degree);
    if (const auto* m = std::get_if<TorusLinear>(&d)) return torus_linear_rho(*m);
    if (std::holds_alternative<ShiftPower>(d)) return 0.25;  // 2^{-2}
    return std::nullopt;
}

}  // namespace ndsthermo
