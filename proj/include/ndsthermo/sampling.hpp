// sampling.hpp — deterministic sample generation on phase spaces
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ndsthermo/numerics.hpp"
#include "ndsthermo/space.hpp"

namespace ndsthermo {

inline Point random_point(const Space& space, Rng& rng) {
    switch (space.kind) {
        case SpaceKind::Circle: return Point::scalar(rng.next_unit());
        case SpaceKind::Interval: return Point::scalar(rng.next_unit());
        case SpaceKind::Torus: {
            std::vector<double> c(space.dim);
            for (int i = 0; i < space.dim; ++i) c[i] = rng.next_unit();
            return Point::vec(std::move(c));
        }
        case SpaceKind::Symbolic: {
            const auto& a = space.transitions;
            std::vector<int> word;
            word.reserve(static_cast<std::size_t>(space.word_depth));
            word.push_back(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(a.alphabet))));
            while (static_cast<int>(word.size()) < space.word_depth) {
                std::vector<int> options;
                for (int j = 0; j < a.alphabet; ++j)
                    if (a.admissible(word.back(), j)) options.push_back(j);
                word.push_back(options[rng.next_below(options.size())]);
            }
            return Point::symbols(std::move(word));
        }
    }
    throw ParameterError("random_point: unknown space kind");
}

// A point of the open ball B(center, r).  Symbolic balls are cylinders: the
// sample keeps the shortest prefix that forces distance < r and randomises
// the continuation.
inline Point sample_in_ball(const Space& space, const Point& center, double r, Rng& rng) {
    if (r <= 0.0) throw ParameterError("sample_in_ball: radius must be positive");
    check_membership(space, center, "sample_in_ball");
    switch (space.kind) {
        case SpaceKind::Circle: {
            double rr = std::min(r, 0.5);
            return Point::scalar(wrap_unit(center.coords[0] + rng.next_in(-rr, rr) * (1.0 - 1e-12)));
        }
        case SpaceKind::Torus: {
            double rr = std::min(r, 0.5);
            std::vector<double> c(space.dim);
            for (int i = 0; i < space.dim; ++i)
                c[i] = wrap_unit(center.coords[i] + rng.next_in(-rr, rr) * (1.0 - 1e-12));
            return Point::vec(std::move(c));
        }
        case SpaceKind::Interval: {
            double lo = std::max(0.0, center.coords[0] - r * (1.0 - 1e-12));
            double hi = std::min(1.0, center.coords[0] + r * (1.0 - 1e-12));
            return Point::scalar(rng.next_in(lo, hi));
        }
        case SpaceKind::Symbolic: {
            int prefix = 0;
            while (prefix < space.word_depth && std::ldexp(1.0, -(prefix + 1)) >= r) ++prefix;
            prefix = std::min<int>(prefix, static_cast<int>(center.word.size()));
            std::vector<int> word(center.word.begin(), center.word.begin() + prefix);
            const auto& a = space.transitions;
            if (word.empty()) word.push_back(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(a.alphabet))));
            while (static_cast<int>(word.size()) < space.word_depth) {
                std::vector<int> options;
                for (int j = 0; j < a.alphabet; ++j)
                    if (a.admissible(word.back(), j)) options.push_back(j);
                word.push_back(options[rng.next_below(options.size())]);
            }
            return Point::symbols(std::move(word));
        }
    }
    throw ParameterError("sample_in_ball: unknown space kind");
}

// Pairs lying in a common rho-ball, for expansion estimation.
inline std::vector<std::pair<Point, Point>> sample_ball_pairs(const Space& space, double rho,
                                                              std::size_t count, Rng& rng,
                                                              const Point* near = nullptr,
                                                              double near_radius = 0.0) {
    std::vector<std::pair<Point, Point>> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Point center = near ? sample_in_ball(space, *near, near_radius, rng) : random_point(space, rng);
        Point x = sample_in_ball(space, center, rho / 2.0, rng);
        Point y = sample_in_ball(space, center, rho / 2.0, rng);
        pairs.emplace_back(std::move(x), std::move(y));
    }
    return pairs;
}

}  // namespace ndsthermo
