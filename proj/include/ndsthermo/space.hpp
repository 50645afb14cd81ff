// space.hpp — phase spaces (circle, torus, interval, subshift) and points
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ndsthermo/errors.hpp"
#include "ndsthermo/numerics.hpp"

namespace ndsthermo {

// ----------------------------- transition matrix -----------------------------

// 0/1 square matrix with no zero row or column (letters are 0-based).
struct TransitionMatrix {
    int alphabet = 0;
    std::vector<std::uint8_t> entries;  // row-major, alphabet x alphabet

    TransitionMatrix() = default;
    TransitionMatrix(int alphabet_size, std::vector<std::uint8_t> e)
        : alphabet(alphabet_size), entries(std::move(e)) {
        validate();
    }

    static TransitionMatrix full(int alphabet_size) {
        return TransitionMatrix(alphabet_size,
                                std::vector<std::uint8_t>(static_cast<std::size_t>(alphabet_size) * alphabet_size, 1));
    }

    static TransitionMatrix golden_mean() { return TransitionMatrix(2, {1, 1, 1, 0}); }

    bool admissible(int from, int to) const {
        return entries[static_cast<std::size_t>(from) * alphabet + to] != 0;
    }

    void validate() const {
        if (alphabet < 2) throw ParameterError("transition matrix: alphabet size must be >= 2");
        if (entries.size() != static_cast<std::size_t>(alphabet) * alphabet)
            throw ParameterError("transition matrix: entry count does not match alphabet size");
        for (std::uint8_t e : entries)
            if (e != 0 && e != 1) throw ParameterError("transition matrix: entries must be 0 or 1");
        for (int i = 0; i < alphabet; ++i) {
            int row = 0, col = 0;
            for (int j = 0; j < alphabet; ++j) {
                row += entries[static_cast<std::size_t>(i) * alphabet + j];
                col += entries[static_cast<std::size_t>(j) * alphabet + i];
            }
            if (row == 0) throw ParameterError("transition matrix: zero row " + std::to_string(i));
            if (col == 0) throw ParameterError("transition matrix: zero column " + std::to_string(i));
        }
    }

    bool operator==(const TransitionMatrix& o) const {
        return alphabet == o.alphabet && entries == o.entries;
    }
};

// --------------------------------- space -------------------------------------

enum class SpaceKind { Circle, Torus, Interval, Symbolic };

inline const char* to_string(SpaceKind k) {
    switch (k) {
        case SpaceKind::Circle: return "circle";
        case SpaceKind::Torus: return "torus";
        case SpaceKind::Interval: return "interval";
        case SpaceKind::Symbolic: return "symbolic";
    }
    return "?";
}

struct Space {
    SpaceKind kind = SpaceKind::Circle;
    int dim = 1;                    // torus only
    TransitionMatrix transitions;   // symbolic only
    int word_depth = 64;            // symbolic truncation depth L

    static Space circle() { return Space{SpaceKind::Circle, 1, {}, 0}; }

    static Space torus(int d) {
        if (d < 1) throw ParameterError("torus dimension must be >= 1");
        return Space{SpaceKind::Torus, d, {}, 0};
    }

    static Space interval() { return Space{SpaceKind::Interval, 1, {}, 0}; }

    static Space symbolic(TransitionMatrix a, int depth = 64) {
        if (depth < 1) throw ParameterError("symbolic truncation depth must be >= 1");
        a.validate();
        Space s{SpaceKind::Symbolic, 1, std::move(a), depth};
        return s;
    }

    bool symbolic_space() const { return kind == SpaceKind::Symbolic; }
    bool coordinate_space() const { return !symbolic_space(); }

    int coord_count() const { return kind == SpaceKind::Torus ? dim : 1; }

    double diameter() const {
        switch (kind) {
            case SpaceKind::Circle:
            case SpaceKind::Torus: return 0.5;
            case SpaceKind::Interval: return 1.0;
            case SpaceKind::Symbolic: return 0.5;  // 2^{-1}, first letters differ
        }
        return 0.0;
    }

    bool operator==(const Space& o) const {
        return kind == o.kind && (kind != SpaceKind::Torus || dim == o.dim) &&
               (kind != SpaceKind::Symbolic || (transitions == o.transitions && word_depth == o.word_depth));
    }
};

// --------------------------------- point -------------------------------------

// A phase-space element.  Coordinate spaces fill `coords`, subshifts fill
// `word` with the known prefix of the symbol sequence (letters 0-based).
// Shift applications may shorten the prefix below the truncation depth.
struct Point {
    std::vector<double> coords;
    std::vector<int> word;

    Point() = default;

    static Point scalar(double x) {
        Point p;
        p.coords = {x};
        return p;
    }

    static Point vec(std::vector<double> xs) {
        Point p;
        p.coords = std::move(xs);
        return p;
    }

    static Point symbols(std::vector<int> letters) {
        Point p;
        p.word = std::move(letters);
        return p;
    }

    double x() const { return coords.at(0); }

    bool operator==(const Point& o) const { return coords == o.coords && word == o.word; }

    // Lexicographic order; the deterministic processing order for grids.
    bool operator<(const Point& o) const {
        if (coords != o.coords) return coords < o.coords;
        return word < o.word;
    }
};

inline void check_membership(const Space& space, const Point& p, const char* who) {
    switch (space.kind) {
        case SpaceKind::Circle:
            if (p.coords.size() != 1 || !p.word.empty())
                throw SpaceMismatchError(std::string(who) + ": expected one circle coordinate");
            if (p.coords[0] < 0.0 || p.coords[0] >= 1.0)
                throw ParameterError(std::string(who) + ": circle coordinate outside [0,1)");
            return;
        case SpaceKind::Torus:
            if (static_cast<int>(p.coords.size()) != space.dim || !p.word.empty())
                throw SpaceMismatchError(std::string(who) + ": expected " + std::to_string(space.dim) +
                                         " torus coordinates");
            for (double c : p.coords)
                if (c < 0.0 || c >= 1.0)
                    throw ParameterError(std::string(who) + ": torus coordinate outside [0,1)");
            return;
        case SpaceKind::Interval:
            if (p.coords.size() != 1 || !p.word.empty())
                throw SpaceMismatchError(std::string(who) + ": expected one interval coordinate");
            if (p.coords[0] < 0.0 || p.coords[0] > 1.0)
                throw ParameterError(std::string(who) + ": interval coordinate outside [0,1]");
            return;
        case SpaceKind::Symbolic: {
            if (!p.coords.empty() || p.word.empty())
                throw SpaceMismatchError(std::string(who) + ": expected a symbol word");
            if (static_cast<int>(p.word.size()) > space.word_depth)
                throw ParameterError(std::string(who) + ": word longer than truncation depth");
            const auto& a = space.transitions;
            for (std::size_t i = 0; i < p.word.size(); ++i) {
                int letter = p.word[i];
                if (letter < 0 || letter >= a.alphabet)
                    throw ParameterError(std::string(who) + ": letter outside alphabet");
                if (i + 1 < p.word.size() && !a.admissible(letter, p.word[i + 1]))
                    throw ParameterError(std::string(who) + ": inadmissible letter pair at index " +
                                         std::to_string(i + 1));
            }
            return;
        }
    }
}

// A point of full truncation depth (the invariant for externally supplied
// symbolic points; internal orbits may carry shorter known prefixes).
inline void check_full_depth(const Space& space, const Point& p, const char* who) {
    check_membership(space, p, who);
    if (space.symbolic_space() && static_cast<int>(p.word.size()) != space.word_depth)
        throw ParameterError(std::string(who) + ": word must have length exactly " +
                             std::to_string(space.word_depth));
}

// --------------------------------- metric ------------------------------------

// circle: wraparound distance; torus: max over coordinate circles;
// interval: |x-y|; symbolic: 2^{-N} with N the first differing index
// (1-based).  Two symbolic prefixes agreeing on their whole common length
// are indistinguishable at the represented depth and report distance 0.
inline double distance(const Space& space, const Point& x, const Point& y) {
    check_membership(space, x, "distance");
    check_membership(space, y, "distance");
    switch (space.kind) {
        case SpaceKind::Circle: return circle_dist(x.coords[0], y.coords[0]);
        case SpaceKind::Interval: return std::fabs(x.coords[0] - y.coords[0]);
        case SpaceKind::Torus: {
            double d = 0.0;
            for (int i = 0; i < space.dim; ++i) d = std::max(d, circle_dist(x.coords[i], y.coords[i]));
            return d;
        }
        case SpaceKind::Symbolic: {
            std::size_t common = std::min(x.word.size(), y.word.size());
            for (std::size_t i = 0; i < common; ++i)
                if (x.word[i] != y.word[i]) return std::ldexp(1.0, -static_cast<int>(i) - 1);
            return 0.0;
        }
    }
    return 0.0;
}

// -------------------------- symbolic word helpers -----------------------------

// Smallest admissible continuation after `last`, used to give enumerated
// prefixes a canonical full-depth representative.
inline int first_admissible_after(const TransitionMatrix& a, int last) {
    for (int j = 0; j < a.alphabet; ++j)
        if (a.admissible(last, j)) return j;
    throw ParameterError("transition matrix row has no admissible successor");
}

inline Point extend_word_to_depth(const Space& space, std::vector<int> prefix, int depth) {
    while (static_cast<int>(prefix.size()) < depth) prefix.push_back(first_admissible_after(space.transitions, prefix.back()));
    return Point::symbols(std::move(prefix));
}

// All admissible words of the requested length, lexicographic order.
inline std::vector<std::vector<int>> enumerate_admissible_words(const TransitionMatrix& a, int length) {
    if (length < 1) throw ParameterError("enumerate_admissible_words: length must be >= 1");
    std::vector<std::vector<int>> out;
    std::vector<int> stack;
    auto rec = [&](auto&& self) -> void {
        if (static_cast<int>(stack.size()) == length) {
            out.push_back(stack);
            return;
        }
        for (int letter = 0; letter < a.alphabet; ++letter) {
            if (!stack.empty() && !a.admissible(stack.back(), letter)) continue;
            stack.push_back(letter);
            self(self);
            stack.pop_back();
        }
    };
    rec(rec);
    return out;
}

}  // namespace ndsthermo
