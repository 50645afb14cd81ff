// entropy.hpp — separated/spanning growth rates, asymptotical entropy,
// entropy-point probes, and exact subshift word counting.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ndsthermo/errors.hpp"
#include "ndsthermo/metrics.hpp"
#include "ndsthermo/nds.hpp"
#include "ndsthermo/numerics.hpp"
#include "ndsthermo/parallel.hpp"

namespace ndsthermo {

// ------------------------------- count series ----------------------------------

struct NRange {
    long long lo = 1;
    long long hi = 1;

    NRange() = default;
    NRange(long long lo_, long long hi_) : lo(lo_), hi(hi_) {
        if (lo < 0 || hi < lo) throw ParameterError("n range must satisfy 0 <= lo <= hi");
    }

    long long count() const { return hi - lo + 1; }

    // Upper half of the range; discards transient prefactors.
    NRange upper_half() const { return NRange(lo + (hi - lo + 1) / 2, hi); }
};

struct CountSeries {
    std::vector<std::pair<long long, double>> values;  // (n, count or log-partition)
    double epsilon = 0.0;
    SeparationMode mode = SeparationMode::Separated;
    long long k = 1;
    std::string grid_note;

    std::vector<double> ns() const {
        std::vector<double> out;
        out.reserve(values.size());
        for (const auto& [n, v] : values) out.push_back(static_cast<double>(n));
        return out;
    }
};

// Per-n greedy cardinalities under one grid policy.  Per-n runs are
// independent jobs; the reduction is ordered by n.
inline CountSeries count_series(const NdsSpec& spec, long long k, double eps, const NRange& range,
                                SeparationMode mode, const CandidateGrid& grid, int workers = 1) {
    if (eps <= 0.0) throw ParameterError("count_series: eps must be positive");
    auto counts = parallel_map<std::pair<double, std::string>>(
        static_cast<std::size_t>(range.count()), workers, [&](std::size_t j) {
            long long n = range.lo + static_cast<long long>(j);
            SeparationReport rep = (mode == SeparationMode::Separated)
                                       ? greedy_maximal_separated(spec, k, n, eps, grid)
                                       : greedy_spanning(spec, k, n, eps, grid);
            return std::make_pair(static_cast<double>(rep.cardinality()), rep.grid_note);
        });
    CountSeries series;
    series.epsilon = eps;
    series.mode = mode;
    series.k = k;
    series.grid_note = counts.empty() ? "" : counts.back().second;
    for (std::size_t j = 0; j < counts.size(); ++j)
        series.values.emplace_back(range.lo + static_cast<long long>(j), counts[j].first);
    return series;
}

// ------------------------------- growth rates ----------------------------------

struct GrowthRate {
    double slope = 0.0;          // least-squares slope of log(value) against n
    double limsup_proxy = 0.0;   // max over the window of (1/n) log value
    double rms_residual = 0.0;
    NRange window;
};

inline GrowthRate growth_rate(const CountSeries& series, const NRange& window) {
    std::vector<double> xs, ys;
    double proxy = -std::numeric_limits<double>::infinity();
    for (const auto& [n, v] : series.values) {
        if (n < window.lo || n > window.hi) continue;
        if (v <= 0.0) throw ParameterError("growth_rate: non-positive series value at n=" + std::to_string(n));
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(v));
        if (n > 0) proxy = std::max(proxy, std::log(v) / static_cast<double>(n));
    }
    if (xs.size() < 3) throw ParameterError("growth_rate: window must contain at least 3 points");
    SlopeFit fit = least_squares_slope(xs, ys);
    GrowthRate g;
    g.slope = fit.slope;
    g.limsup_proxy = proxy;
    g.rms_residual = fit.rms_residual;
    g.window = window;
    return g;
}

// ----------------------------- entropy estimates --------------------------------

struct EntropyReport {
    double estimate = 0.0;       // slope surrogate for the limsup
    double limsup_proxy = 0.0;
    double residual = 0.0;
    NRange window;
    double epsilon = 0.0;
    long long k = 1;
    SeparationMode mode = SeparationMode::Separated;
    std::optional<double> spanning_estimate;  // cross-check
    CountSeries series;
    std::optional<CountSeries> spanning_series;
};

inline EntropyReport entropy_estimate(const NdsSpec& spec, long long k, double eps, const NRange& range,
                                      const CandidateGrid& grid, int workers = 1,
                                      bool with_spanning_cross_check = true) {
    CountSeries sep = count_series(spec, k, eps, range, SeparationMode::Separated, grid, workers);
    NRange window = range.upper_half();
    GrowthRate g = growth_rate(sep, window);
    EntropyReport rep;
    rep.estimate = g.slope;
    rep.limsup_proxy = g.limsup_proxy;
    rep.residual = g.rms_residual;
    rep.window = window;
    rep.epsilon = eps;
    rep.k = k;
    rep.mode = SeparationMode::Separated;
    rep.series = std::move(sep);
    if (with_spanning_cross_check) {
        CountSeries span = count_series(spec, k, eps, range, SeparationMode::Spanning, grid, workers);
        rep.spanning_estimate = growth_rate(span, window).slope;
        rep.spanning_series = std::move(span);
    }
    return rep;
}

// ---------------------------- asymptotical entropy ------------------------------

struct AsymptoticReport {
    std::vector<std::pair<long long, double>> profile;  // (k, estimate)
    std::vector<EntropyReport> reports;                 // per-k detail
    double value = 0.0;                                  // stabilised (last) estimate
    bool chaotic = false;
    double threshold = 0.05;
};

// Entropy of the shifted systems f_k for increasing k; the verdict compares
// the stabilised value against the (configurable) chaoticity threshold.
inline AsymptoticReport asymptotic_entropy_estimate(const NdsSpec& spec, double eps,
                                                    const std::vector<long long>& k_list, const NRange& range,
                                                    const CandidateGrid& grid, int workers = 1,
                                                    double threshold = 0.05) {
    if (k_list.empty()) throw ParameterError("asymptotic_entropy_estimate: empty k list");
    for (std::size_t i = 1; i < k_list.size(); ++i)
        if (k_list[i] <= k_list[i - 1]) throw ParameterError("asymptotic_entropy_estimate: k list must increase");
    AsymptoticReport rep;
    rep.threshold = threshold;
    for (long long k : k_list) {
        EntropyReport e = entropy_estimate(spec, k, eps, range, grid, workers, false);
        rep.profile.emplace_back(k, e.estimate);
        rep.reports.push_back(std::move(e));
    }
    rep.value = rep.profile.back().second;
    rep.chaotic = rep.value > threshold;
    return rep;
}

// ------------------------------ entropy points ----------------------------------

struct EntropyPointProbe {
    EntropyReport local;
    EntropyReport global;
};

// Local estimate seeds the separated search inside cl(B(x0, radius));
// global uses the unrestricted grid.
inline EntropyPointProbe entropy_point_probe(const NdsSpec& spec, const Point& x0, double radius, double eps,
                                             const NRange& range, const CandidateGrid& grid, int workers = 1) {
    if (radius <= 0.0) throw ParameterError("entropy_point_probe: radius must be positive");
    check_membership(spec.space, x0, "entropy_point_probe");
    EntropyPointProbe probe;
    probe.local = entropy_estimate(spec, 1, eps, range, grid.restricted(x0, radius), workers, false);
    probe.global = entropy_estimate(spec, 1, eps, range, grid, workers, false);
    return probe;
}

// ------------------------------ exact word counts -------------------------------

// Number of admissible words of length L: the total mass of A^{L-1}, exact
// u64 arithmetic with overflow checks.
inline std::uint64_t sft_word_count(const TransitionMatrix& a, int length) {
    a.validate();
    if (length < 1) throw ParameterError("sft_word_count: length must be >= 1");
    const int d = a.alphabet;
    std::vector<std::uint64_t> mass(static_cast<std::size_t>(d), 1);  // words ending at each letter
    for (int step = 1; step < length; ++step) {
        std::vector<std::uint64_t> next(static_cast<std::size_t>(d), 0);
        for (int i = 0; i < d; ++i) {
            if (mass[static_cast<std::size_t>(i)] == 0) continue;
            for (int j = 0; j < d; ++j)
                if (a.admissible(i, j))
                    next[static_cast<std::size_t>(j)] =
                        checked_add_u64(next[static_cast<std::size_t>(j)], mass[static_cast<std::size_t>(i)]);
        }
        mass = std::move(next);
    }
    std::uint64_t total = 0;
    for (std::uint64_t m : mass) total = checked_add_u64(total, m);
    return total;
}

// Perron value of the 0/1 transition matrix via power iteration.
inline PerronResult sft_spectral_radius(const TransitionMatrix& a, double tol = 1e-12) {
    std::vector<double> m(a.entries.begin(), a.entries.end());
    return spectral_radius_power_iteration(m, a.alphabet, tol);
}

}  // namespace ndsthermo
