// nds.hpp — map schedules, composed segments f_k^n, and preimage access
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ndsthermo/errors.hpp"
#include "ndsthermo/maps.hpp"
#include "ndsthermo/space.hpp"

namespace ndsthermo {

// -------------------------------- schedule ------------------------------------

enum class ScheduleKind { Constant, Periodic, EventuallyPeriodic, Table };

inline const char* to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::Constant: return "constant";
        case ScheduleKind::Periodic: return "periodic";
        case ScheduleKind::EventuallyPeriodic: return "eventually_periodic";
        case ScheduleKind::Table: return "table";
    }
    return "?";
}

// Rule assigning a map descriptor to each time index n >= 1.  Table schedules
// are finite and throw ScheduleExhaustedError past their horizon.
struct Schedule {
    ScheduleKind kind = ScheduleKind::Constant;
    std::vector<MapDescriptor> prefix;  // table entries / eventually-periodic prefix
    std::vector<MapDescriptor> cycle;   // constant / periodic / eventually-periodic tail

    static Schedule constant(MapDescriptor d) {
        Schedule s;
        s.kind = ScheduleKind::Constant;
        s.cycle = {std::move(d)};
        return s;
    }

    static Schedule periodic(std::vector<MapDescriptor> maps) {
        if (maps.empty()) throw ParameterError("periodic schedule needs at least one map");
        Schedule s;
        s.kind = ScheduleKind::Periodic;
        s.cycle = std::move(maps);
        return s;
    }

    static Schedule eventually_periodic(std::vector<MapDescriptor> prefix, std::vector<MapDescriptor> cycle) {
        if (cycle.empty()) throw ParameterError("eventually periodic schedule needs a nonempty cycle");
        Schedule s;
        s.kind = ScheduleKind::EventuallyPeriodic;
        s.prefix = std::move(prefix);
        s.cycle = std::move(cycle);
        return s;
    }

    static Schedule table(std::vector<MapDescriptor> maps) {
        if (maps.empty()) throw ParameterError("table schedule needs at least one map");
        Schedule s;
        s.kind = ScheduleKind::Table;
        s.prefix = std::move(maps);
        return s;
    }

    // Horizon for table schedules, nullopt otherwise.
    std::optional<long long> horizon() const {
        if (kind == ScheduleKind::Table) return static_cast<long long>(prefix.size());
        return std::nullopt;
    }

    const MapDescriptor& at(long long index) const {
        if (index < 1) throw ParameterError("schedule index must be >= 1");
        switch (kind) {
            case ScheduleKind::Constant:
                return cycle[0];
            case ScheduleKind::Periodic:
                return cycle[static_cast<std::size_t>((index - 1) % static_cast<long long>(cycle.size()))];
            case ScheduleKind::EventuallyPeriodic:
                if (index <= static_cast<long long>(prefix.size()))
                    return prefix[static_cast<std::size_t>(index - 1)];
                return cycle[static_cast<std::size_t>((index - 1 - static_cast<long long>(prefix.size())) %
                                                      static_cast<long long>(cycle.size()))];
            case ScheduleKind::Table:
                if (index > static_cast<long long>(prefix.size())) throw ScheduleExhaustedError(index);
                return prefix[static_cast<std::size_t>(index - 1)];
        }
        throw ParameterError("schedule: unknown kind");
    }

    std::vector<const MapDescriptor*> distinct_maps() const {
        std::vector<const MapDescriptor*> out;
        for (const auto& d : prefix) out.push_back(&d);
        for (const auto& d : cycle) out.push_back(&d);
        return out;
    }
};

// --------------------------------- spec ---------------------------------------

// A time-dependent system: phase space, schedule, and optional declared
// uniform expansion factor / injectivity constant.
struct NdsSpec {
    Space space;
    Schedule schedule;
    std::optional<double> sigma;  // uniform expansion factor, > 1
    std::optional<double> rho;    // uniform injectivity constant, > 0

    void validate() const {
        for (const auto* d : schedule.distinct_maps()) validate_descriptor(space, *d);
        if (sigma && *sigma <= 1.0) throw ParameterError("declared sigma must exceed 1");
        if (rho && *rho <= 0.0) throw ParameterError("declared rho must be positive");
    }

    const MapDescriptor& map_at(long long index) const { return schedule.at(index); }

    // Declared sigma, else the minimum certified factor over the schedule.
    std::optional<double> resolved_sigma() const {
        if (sigma) return sigma;
        std::optional<double> best;
        for (const auto* d : schedule.distinct_maps()) {
            auto s = certified_sigma(*d);
            if (!s) return std::nullopt;
            best = best ? std::min(*best, *s) : *s;
        }
        return (best && *best > 1.0) ? best : std::nullopt;
    }

    std::optional<double> resolved_rho() const {
        if (rho) return rho;
        std::optional<double> best;
        for (const auto* d : schedule.distinct_maps()) {
            auto r = default_rho(*d);
            if (!r) return std::nullopt;
            best = best ? std::min(*best, *r) : *r;
        }
        return best;
    }

    bool uniformly_expanding() const { return resolved_sigma().has_value() && resolved_rho().has_value(); }

    double require_sigma() const {
        auto s = resolved_sigma();
        if (!s) throw ParameterError("operation needs a uniformly expanding spec (no expansion factor available)");
        return *s;
    }

    double require_rho() const {
        auto r = resolved_rho();
        if (!r) throw ParameterError("operation needs a uniformly expanding spec (no injectivity constant available)");
        return *r;
    }
};

// ------------------------------ composed maps ----------------------------------

// f_k^n(x) = f_{k+n-1} o ... o f_k (x); n = 0 is the identity.
inline Point apply_segment(const NdsSpec& spec, long long k, long long n, const Point& x) {
    if (k < 1) throw ParameterError("apply_segment: initial time k must be >= 1");
    if (n < 0) throw ParameterError("apply_segment: step count n must be >= 0");
    check_membership(spec.space, x, "apply_segment");
    Point p = x;
    for (long long i = 0; i < n; ++i) p = apply_map(spec.space, spec.map_at(k + i), p);
    return p;
}

// The n+1 points x, f_k(x), ..., f_k^n(x).
inline std::vector<Point> segment_orbit(const NdsSpec& spec, long long k, long long n, const Point& x) {
    check_membership(spec.space, x, "segment_orbit");
    std::vector<Point> orbit;
    orbit.reserve(static_cast<std::size_t>(n) + 1);
    orbit.push_back(x);
    for (long long i = 0; i < n; ++i) orbit.push_back(apply_map(spec.space, spec.map_at(k + i), orbit.back()));
    return orbit;
}

// All x with f_n(x) = y for the map scheduled at time index n.
inline std::vector<Point> enumerate_preimages(const NdsSpec& spec, long long n, const Point& y) {
    const MapDescriptor& d = spec.map_at(n);
    if (!supports_preimages(d))
        throw ParameterError("enumerate_preimages: descriptor " + descriptor_name(d) + " unsupported");
    return map_preimages(spec.space, d, y);
}

}  // namespace ndsthermo
