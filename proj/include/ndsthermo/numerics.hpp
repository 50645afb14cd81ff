// numerics.hpp — small numeric helpers: wrap arithmetic, log-sum-exp,
// slope fits, power iteration, and a reproducible counter-based RNG.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ndsthermo/errors.hpp"

namespace ndsthermo {

// Reduce to [0, 1).  Values that land exactly on 1.0 after rounding map to 0.
inline double wrap_unit(double x) {
    double r = x - std::floor(x);
    return (r >= 1.0) ? 0.0 : r;
}

// Distance on the unit circle R/Z.
inline double circle_dist(double x, double y) {
    double d = std::fabs(wrap_unit(x) - wrap_unit(y));
    return std::min(d, 1.0 - d);
}

// ------------------------------- log-sum-exp --------------------------------

// Accumulates log(sum_i exp(a_i)) with a max shift so that n*|psi| far past
// 700 cannot overflow.  Terms are added in caller order; the reduction is
// deterministic for a fixed order.
inline double log_sum_exp(const std::vector<double>& terms) {
    if (terms.empty()) throw ParameterError("log_sum_exp: empty term list");
    double m = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(m)) return m;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - m);
    return m + std::log(sum);
}

// ------------------------------- slope fits ----------------------------------

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

// Least-squares slope of y against x.  The numerator is centred against the
// first sample, so a constant series yields slope 0.0 exactly.
inline SlopeFit least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ParameterError("least_squares_slope: need >= 2 aligned samples");
    const std::size_t n = xs.size();
    double xbar = 0.0;
    for (double x : xs) xbar += x;
    xbar /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    const double yref = ys.front();
    for (std::size_t i = 0; i < n; ++i) {
        num += (xs[i] - xbar) * (ys[i] - yref);
        den += (xs[i] - xbar) * (xs[i] - xbar);
    }
    if (den == 0.0) throw ParameterError("least_squares_slope: degenerate abscissa");
    SlopeFit fit;
    fit.slope = num / den;
    double ybar = 0.0;
    for (double y : ys) ybar += y;
    ybar /= static_cast<double>(n);
    fit.intercept = ybar - fit.slope * xbar;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

// ----------------------------- power iteration -------------------------------

struct PerronResult {
    double value = 0.0;   // spectral radius estimate
    int iterations = 0;
    bool converged = false;
    bool irreducible = true;
};

// Spectral radius of a nonnegative square matrix (row-major) by power
// iteration on the all-ones vector, max-norm normalised.  Reducible matrices
// are flagged; the value is still the dominant growth rate of the iteration.
inline PerronResult spectral_radius_power_iteration(const std::vector<double>& m, int dim,
                                                    double tol = 1e-12, int max_iter = 200000) {
    if (dim <= 0 || m.size() != static_cast<std::size_t>(dim) * dim)
        throw ParameterError("spectral_radius_power_iteration: bad dimension");
    for (double e : m)
        if (e < 0.0 || !std::isfinite(e))
            throw ParameterError("spectral_radius_power_iteration: entries must be finite and >= 0");

    PerronResult res;

    // Boolean reachability: irreducible iff every state reaches every state.
    {
        std::vector<char> reach(static_cast<std::size_t>(dim) * dim, 0);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) reach[i * dim + j] = (i == j || m[i * dim + j] > 0.0) ? 1 : 0;
        for (int k = 0; k < dim; ++k)
            for (int i = 0; i < dim; ++i)
                if (reach[i * dim + k])
                    for (int j = 0; j < dim; ++j)
                        if (reach[k * dim + j]) reach[i * dim + j] = 1;
        for (char r : reach)
            if (!r) res.irreducible = false;
    }

    std::vector<double> v(dim, 1.0), w(dim, 0.0);
    double lambda = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        double norm = 0.0;
        for (int i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j) s += m[i * dim + j] * v[j];
            w[i] = s;
            norm = std::max(norm, s);
        }
        res.iterations = it;
        if (norm == 0.0) {  // nilpotent direction; spectral radius 0
            res.value = 0.0;
            res.converged = true;
            return res;
        }
        for (int i = 0; i < dim; ++i) v[i] = w[i] / norm;
        if (std::fabs(norm - lambda) <= tol * std::max(1.0, norm)) {
            res.value = norm;
            res.converged = true;
            return res;
        }
        lambda = norm;
    }
    res.value = lambda;
    return res;
}

// ------------------------------- seeded RNG ----------------------------------

// splitmix64: tiny, statistically fine for sample generation, and identical
// on every platform (no library distribution involved).
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    // Derive an independent stream for a (seed, stream) pair; used so that
    // parallel per-n jobs draw identical samples regardless of worker count.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        Rng mix(seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
        mix.next_u64();
        return mix;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [a, b).
    double next_in(double a, double b) { return a + (b - a) * next_unit(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }
};

// Checked u64 arithmetic for exact integer counting.
inline std::uint64_t checked_add_u64(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b)
        throw NumericError("integer overflow in checked addition");
    return a + b;
}

inline std::uint64_t checked_mul_u64(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        throw NumericError("integer overflow in checked multiplication");
    return a * b;
}

}  // namespace ndsthermo
