// zoo.hpp — ready-made example systems used across tests and experiments
#pragma once

#include <cmath>
#include <vector>

#include "ndsthermo/nds.hpp"

namespace ndsthermo::zoo {

// Constant doubling (or degree-k) circle system.
inline NdsSpec circle_affine(int degree = 2) {
    NdsSpec spec;
    spec.space = Space::circle();
    spec.schedule = Schedule::constant(CircleAffine{degree});
    spec.validate();
    return spec;
}

// Constant diagonal torus endomorphism diag(d1, ..., dk).
inline NdsSpec torus_diagonal(std::vector<long long> diag) {
    const int dim = static_cast<int>(diag.size());
    std::vector<long long> m(static_cast<std::size_t>(dim) * dim, 0);
    for (int i = 0; i < dim; ++i) m[static_cast<std::size_t>(i) * dim + i] = diag[static_cast<std::size_t>(i)];
    NdsSpec spec;
    spec.space = Space::torus(dim);
    spec.schedule = Schedule::constant(TorusLinear{dim, std::move(m)});
    spec.validate();
    return spec;
}

// Constant m-fold shift on the subshift of A.
inline NdsSpec shift(TransitionMatrix a, int power = 1, int depth = 64) {
    NdsSpec spec;
    spec.space = Space::symbolic(std::move(a), depth);
    spec.schedule = Schedule::constant(ShiftPower{power});
    spec.validate();
    return spec;
}

inline NdsSpec golden_mean_shift(int power = 1, int depth = 64) {
    return shift(TransitionMatrix::golden_mean(), power, depth);
}

// Intermittent schedule with per-time exponents alpha_n in (beta, 1).
inline NdsSpec pomeau_manneville_table(const std::vector<double>& alphas) {
    std::vector<MapDescriptor> maps;
    maps.reserve(alphas.size());
    for (double a : alphas) maps.push_back(PomeauManneville{a});
    NdsSpec spec;
    spec.space = Space::circle();
    spec.schedule = Schedule::table(std::move(maps));
    spec.validate();
    return spec;
}

// The default interval windows a_n = 1 - 2^{1-n}, b_n = 1 - 2^{-n}: adjacent
// intervals sharing endpoints and increasing to 1.
inline KolyadaSnoha kolyada_snoha_level(int level) {
    double a = 1.0 - std::ldexp(1.0, 1 - level);
    double b = 1.0 - std::ldexp(1.0, -level);
    return KolyadaSnoha{level, a, b};
}

// The zero-entropy interval system: f_n applies an n-fold tent power inside
// the n-th window and freezes everything else.  Windows past level 48 are
// narrower than an ulp of 1.0 and become the identity outright.
inline NdsSpec kolyada_snoha_table(int horizon) {
    std::vector<MapDescriptor> maps;
    maps.reserve(static_cast<std::size_t>(horizon));
    for (int n = 1; n <= horizon; ++n) {
        if (n <= 48)
            maps.push_back(kolyada_snoha_level(n));
        else
            maps.push_back(IdentityMap{});
    }
    NdsSpec spec;
    spec.space = Space::interval();
    spec.schedule = Schedule::table(std::move(maps));
    spec.validate();
    return spec;
}

// Lift family x -> ((2n+1)/n) x (mod 1); discontinuous at the wrap point for
// n > 1, kept for orbit experiments only.
inline NdsSpec circle_exponent_table(int horizon) {
    std::vector<MapDescriptor> maps;
    maps.reserve(static_cast<std::size_t>(horizon));
    for (int n = 1; n <= horizon; ++n) maps.push_back(CircleExponentFamily{n});
    NdsSpec spec;
    spec.space = Space::circle();
    spec.schedule = Schedule::table(std::move(maps));
    spec.validate();
    return spec;
}

inline NdsSpec identity_on_circle() {
    NdsSpec spec;
    spec.space = Space::circle();
    spec.schedule = Schedule::constant(IdentityMap{});
    spec.validate();
    return spec;
}

}  // namespace ndsthermo::zoo
