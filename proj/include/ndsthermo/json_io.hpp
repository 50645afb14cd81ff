// json_io.hpp — strict JSON (de)serialization for specs, grids, potentials,
// segments, pseudo-orbits, and result reports.  Unknown fields are rejected.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "ndsthermo/entropy.hpp"
#include "ndsthermo/expanding.hpp"
#include "ndsthermo/metrics.hpp"
#include "ndsthermo/nds.hpp"
#include "ndsthermo/pressure.hpp"
#include "ndsthermo/zoo.hpp"

namespace ndsthermo {

using ordered_json = nlohmann::ordered_json;

namespace jsondetail {

inline void require_object(const ordered_json& j, const std::string& ctx) {
    if (!j.is_object()) throw ParameterError(ctx + ": expected a JSON object");
}

inline void require_allowed_keys(const ordered_json& j, const std::vector<std::string>& allowed,
                                 const std::string& ctx) {
    require_object(j, ctx);
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ParameterError(ctx + ": unknown field \"" + key + "\"");
    }
}

inline const ordered_json& require_field(const ordered_json& j, const std::string& key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw ParameterError(ctx + ": missing field \"" + key + "\"");
    return *it;
}

template <class T>
T get_number(const ordered_json& j, const std::string& key, const std::string& ctx) {
    const auto& v = require_field(j, key, ctx);
    if (!v.is_number()) throw ParameterError(ctx + ": field \"" + key + "\" must be a number");
    return v.get<T>();
}

template <class T>
T get_number_or(const ordered_json& j, const std::string& key, const std::string& ctx, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ParameterError(ctx + ": field \"" + key + "\" must be a number");
    return it->get<T>();
}

inline std::string get_string(const ordered_json& j, const std::string& key, const std::string& ctx) {
    const auto& v = require_field(j, key, ctx);
    if (!v.is_string()) throw ParameterError(ctx + ": field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

}  // namespace jsondetail

// --------------------------------- spaces --------------------------------------

inline ordered_json to_json(const Space& s) {
    ordered_json j;
    j["kind"] = to_string(s.kind);
    if (s.kind == SpaceKind::Torus) j["dim"] = s.dim;
    if (s.kind == SpaceKind::Symbolic) {
        j["alphabet"] = s.transitions.alphabet;
        ordered_json rows = ordered_json::array();
        for (int i = 0; i < s.transitions.alphabet; ++i) {
            ordered_json row = ordered_json::array();
            for (int c = 0; c < s.transitions.alphabet; ++c) row.push_back(s.transitions.admissible(i, c) ? 1 : 0);
            rows.push_back(row);
        }
        j["transitions"] = rows;
        j["depth"] = s.word_depth;
    }
    return j;
}

inline TransitionMatrix transition_matrix_from_json(const ordered_json& rows, int alphabet,
                                                    const std::string& ctx) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != alphabet)
        throw ParameterError(ctx + ": transitions must be an alphabet x alphabet 0/1 array");
    std::vector<std::uint8_t> entries;
    for (const auto& row : rows) {
        if (!row.is_array() || static_cast<int>(row.size()) != alphabet)
            throw ParameterError(ctx + ": transitions must be square");
        for (const auto& e : row) entries.push_back(static_cast<std::uint8_t>(e.get<int>()));
    }
    return TransitionMatrix(alphabet, std::move(entries));
}

inline Space space_from_json(const ordered_json& j) {
    const std::string ctx = "space";
    std::string kind = jsondetail::get_string(j, "kind", ctx);
    if (kind == "circle") {
        jsondetail::require_allowed_keys(j, {"kind"}, ctx);
        return Space::circle();
    }
    if (kind == "interval") {
        jsondetail::require_allowed_keys(j, {"kind"}, ctx);
        return Space::interval();
    }
    if (kind == "torus") {
        jsondetail::require_allowed_keys(j, {"kind", "dim"}, ctx);
        return Space::torus(jsondetail::get_number<int>(j, "dim", ctx));
    }
    if (kind == "symbolic") {
        jsondetail::require_allowed_keys(j, {"kind", "alphabet", "transitions", "depth"}, ctx);
        int alphabet = jsondetail::get_number<int>(j, "alphabet", ctx);
        auto a = transition_matrix_from_json(jsondetail::require_field(j, "transitions", ctx), alphabet, ctx);
        int depth = jsondetail::get_number_or<int>(j, "depth", ctx, 64);
        return Space::symbolic(std::move(a), depth);
    }
    throw ParameterError(ctx + ": unknown kind \"" + kind + "\"");
}

// --------------------------------- points --------------------------------------

inline ordered_json to_json(const Space& s, const Point& p) {
    ordered_json j = ordered_json::array();
    if (s.symbolic_space())
        for (int letter : p.word) j.push_back(letter);
    else
        for (double c : p.coords) j.push_back(c);
    return j;
}

inline Point point_from_json(const Space& s, const ordered_json& j, const std::string& ctx) {
    if (!j.is_array()) throw ParameterError(ctx + ": point must be an array");
    Point p;
    if (s.symbolic_space()) {
        for (const auto& v : j) p.word.push_back(v.get<int>());
        if (static_cast<int>(p.word.size()) < s.word_depth)
            p = extend_word_to_depth(s, std::move(p.word), s.word_depth);
    } else {
        for (const auto& v : j) p.coords.push_back(v.get<double>());
    }
    check_membership(s, p, ctx.c_str());
    return p;
}

// ------------------------------ map descriptors ---------------------------------

inline ordered_json to_json(const MapDescriptor& d) {
    struct V {
        ordered_json operator()(const CircleAffine& m) const {
            return ordered_json{{"type", "circle_affine"}, {"degree", m.degree}};
        }
        ordered_json operator()(const TorusLinear& m) const {
            ordered_json rows = ordered_json::array();
            for (int i = 0; i < m.dim; ++i) {
                ordered_json row = ordered_json::array();
                for (int c = 0; c < m.dim; ++c) row.push_back(m.a[static_cast<std::size_t>(i) * m.dim + c]);
                rows.push_back(row);
            }
            return ordered_json{{"type", "torus_linear"}, {"matrix", rows}};
        }
        ordered_json operator()(const ShiftPower& m) const {
            return ordered_json{{"type", "shift_power"}, {"power", m.power}};
        }
        ordered_json operator()(const PomeauManneville& m) const {
            return ordered_json{{"type", "pomeau_manneville"}, {"alpha", m.alpha}};
        }
        ordered_json operator()(const CircleExponentFamily& m) const {
            return ordered_json{{"type", "circle_exponent"}, {"n", m.n}};
        }
        ordered_json operator()(const KolyadaSnoha& m) const {
            return ordered_json{{"type", "kolyada_snoha"}, {"level", m.level}, {"a", m.a}, {"b", m.b}};
        }
        ordered_json operator()(const IdentityMap&) const { return ordered_json{{"type", "identity"}}; }
    };
    return std::visit(V{}, d);
}

inline MapDescriptor descriptor_from_json(const ordered_json& j) {
    const std::string ctx = "map";
    std::string type = jsondetail::get_string(j, "type", ctx);
    if (type == "circle_affine") {
        jsondetail::require_allowed_keys(j, {"type", "degree"}, ctx);
        return CircleAffine{jsondetail::get_number<int>(j, "degree", ctx)};
    }
    if (type == "torus_linear") {
        jsondetail::require_allowed_keys(j, {"type", "matrix"}, ctx);
        const auto& rows = jsondetail::require_field(j, "matrix", ctx);
        if (!rows.is_array() || rows.empty()) throw ParameterError(ctx + ": matrix must be a nonempty array");
        int dim = static_cast<int>(rows.size());
        std::vector<long long> a;
        for (const auto& row : rows) {
            if (!row.is_array() || static_cast<int>(row.size()) != dim)
                throw ParameterError(ctx + ": matrix must be square");
            for (const auto& e : row) a.push_back(e.get<long long>());
        }
        return TorusLinear{dim, std::move(a)};
    }
    if (type == "shift_power") {
        jsondetail::require_allowed_keys(j, {"type", "power"}, ctx);
        return ShiftPower{jsondetail::get_number<int>(j, "power", ctx)};
    }
    if (type == "pomeau_manneville") {
        jsondetail::require_allowed_keys(j, {"type", "alpha"}, ctx);
        return PomeauManneville{jsondetail::get_number<double>(j, "alpha", ctx)};
    }
    if (type == "circle_exponent") {
        jsondetail::require_allowed_keys(j, {"type", "n"}, ctx);
        return CircleExponentFamily{jsondetail::get_number<int>(j, "n", ctx)};
    }
    if (type == "kolyada_snoha") {
        jsondetail::require_allowed_keys(j, {"type", "level", "a", "b"}, ctx);
        int level = jsondetail::get_number<int>(j, "level", ctx);
        KolyadaSnoha def = zoo::kolyada_snoha_level(level);
        def.a = jsondetail::get_number_or<double>(j, "a", ctx, def.a);
        def.b = jsondetail::get_number_or<double>(j, "b", ctx, def.b);
        return def;
    }
    if (type == "identity") {
        jsondetail::require_allowed_keys(j, {"type"}, ctx);
        return IdentityMap{};
    }
    throw ParameterError(ctx + ": unknown type \"" + type + "\"");
}

// -------------------------------- schedules -------------------------------------

inline ordered_json to_json(const Schedule& s) {
    ordered_json j;
    j["kind"] = to_string(s.kind);
    auto dump = [](const std::vector<MapDescriptor>& v) {
        ordered_json arr = ordered_json::array();
        for (const auto& d : v) arr.push_back(to_json(d));
        return arr;
    };
    switch (s.kind) {
        case ScheduleKind::Constant: j["map"] = to_json(s.cycle[0]); break;
        case ScheduleKind::Periodic: j["maps"] = dump(s.cycle); break;
        case ScheduleKind::EventuallyPeriodic:
            j["prefix"] = dump(s.prefix);
            j["cycle"] = dump(s.cycle);
            break;
        case ScheduleKind::Table: j["maps"] = dump(s.prefix); break;
    }
    return j;
}

inline Schedule schedule_from_json(const ordered_json& j) {
    const std::string ctx = "schedule";
    std::string kind = jsondetail::get_string(j, "kind", ctx);
    auto load = [&](const ordered_json& arr) {
        if (!arr.is_array() || arr.empty()) throw ParameterError(ctx + ": map list must be a nonempty array");
        std::vector<MapDescriptor> out;
        for (const auto& d : arr) out.push_back(descriptor_from_json(d));
        return out;
    };
    if (kind == "constant") {
        jsondetail::require_allowed_keys(j, {"kind", "map"}, ctx);
        return Schedule::constant(descriptor_from_json(jsondetail::require_field(j, "map", ctx)));
    }
    if (kind == "periodic") {
        jsondetail::require_allowed_keys(j, {"kind", "maps"}, ctx);
        return Schedule::periodic(load(jsondetail::require_field(j, "maps", ctx)));
    }
    if (kind == "eventually_periodic") {
        jsondetail::require_allowed_keys(j, {"kind", "prefix", "cycle"}, ctx);
        return Schedule::eventually_periodic(load(jsondetail::require_field(j, "prefix", ctx)),
                                             load(jsondetail::require_field(j, "cycle", ctx)));
    }
    if (kind == "table") {
        jsondetail::require_allowed_keys(j, {"kind", "maps"}, ctx);
        return Schedule::table(load(jsondetail::require_field(j, "maps", ctx)));
    }
    throw ParameterError(ctx + ": unknown kind \"" + kind + "\"");
}

// ---------------------------------- specs ---------------------------------------

inline ordered_json to_json(const NdsSpec& spec) {
    ordered_json j;
    j["space"] = to_json(spec.space);
    j["schedule"] = to_json(spec.schedule);
    if (spec.sigma) j["sigma"] = *spec.sigma;
    if (spec.rho) j["rho"] = *spec.rho;
    return j;
}

inline NdsSpec spec_from_json(const ordered_json& j) {
    const std::string ctx = "spec";
    jsondetail::require_allowed_keys(j, {"space", "schedule", "sigma", "rho"}, ctx);
    NdsSpec spec;
    spec.space = space_from_json(jsondetail::require_field(j, "space", ctx));
    spec.schedule = schedule_from_json(jsondetail::require_field(j, "schedule", ctx));
    if (j.contains("sigma")) spec.sigma = jsondetail::get_number<double>(j, "sigma", ctx);
    if (j.contains("rho")) spec.rho = jsondetail::get_number<double>(j, "rho", ctx);
    spec.validate();
    return spec;
}

// --------------------------------- grids ----------------------------------------

inline ordered_json to_json(const Space& s, const CandidateGrid& g) {
    ordered_json j;
    switch (g.kind) {
        case GridKind::Uniform:
            j["kind"] = "uniform";
            j["h"] = g.h;
            break;
        case GridKind::Auto:
            j["kind"] = "auto";
            j["divisor"] = g.auto_divisor;
            break;
        case GridKind::Pullback:
            j["kind"] = "pullback";
            j["base_h"] = g.h;
            j["depth"] = static_cast<int>(g.auto_divisor);
            break;
        case GridKind::Explicit: {
            j["kind"] = "explicit";
            ordered_json pts = ordered_json::array();
            for (const auto& p : g.points) pts.push_back(to_json(s, p));
            j["points"] = pts;
            break;
        }
    }
    if (g.restrict_to) {
        j["restrict"] = ordered_json{{"center", to_json(s, g.restrict_to->center)},
                                     {"radius", g.restrict_to->radius}};
    }
    return j;
}

inline CandidateGrid grid_from_json(const Space& s, const ordered_json& j) {
    const std::string ctx = "grid";
    jsondetail::require_allowed_keys(j, {"kind", "h", "divisor", "base_h", "depth", "points", "restrict"}, ctx);
    std::string kind = jsondetail::get_string(j, "kind", ctx);
    CandidateGrid g;
    if (kind == "uniform") {
        g = CandidateGrid::uniform(jsondetail::get_number<double>(j, "h", ctx));
    } else if (kind == "auto") {
        g = CandidateGrid::automatic(jsondetail::get_number_or<double>(j, "divisor", ctx, 2.5));
    } else if (kind == "pullback") {
        g = CandidateGrid::pullback(jsondetail::get_number<double>(j, "base_h", ctx),
                                    jsondetail::get_number<int>(j, "depth", ctx));
    } else if (kind == "explicit") {
        std::vector<Point> pts;
        for (const auto& p : jsondetail::require_field(j, "points", ctx)) pts.push_back(point_from_json(s, p, ctx));
        g = CandidateGrid::explicit_points(std::move(pts));
    } else {
        throw ParameterError(ctx + ": unknown kind \"" + kind + "\"");
    }
    if (j.contains("restrict")) {
        const auto& r = j["restrict"];
        jsondetail::require_allowed_keys(r, {"center", "radius"}, ctx + ".restrict");
        g = g.restricted(point_from_json(s, jsondetail::require_field(r, "center", ctx), ctx),
                         jsondetail::get_number<double>(r, "radius", ctx));
    }
    return g;
}

// -------------------------------- potentials ------------------------------------

inline ordered_json to_json(const Space& s, const Potential& psi) {
    struct V {
        const Space& s;
        ordered_json operator()(const ConstantPotential& p) const {
            return ordered_json{{"type", "constant"}, {"c", p.c}};
        }
        ordered_json operator()(const SmoothCirclePotential& p) const {
            return ordered_json{{"type", "smooth_circle"}, {"amplitude", p.amplitude}};
        }
        ordered_json operator()(const DistanceToPointPotential& p) const {
            return ordered_json{{"type", "distance_to"}, {"point", to_json(s, p.p)}};
        }
        ordered_json operator()(const HolderPowerPotential& p) const {
            return ordered_json{{"type", "holder_power"}, {"k", p.k}, {"alpha", p.alpha}, {"base", to_json(s, p.base)}};
        }
        ordered_json operator()(const SymbolLetterPotential& p) const {
            return ordered_json{{"type", "symbol_letter"}, {"values", p.values}};
        }
    };
    return std::visit(V{s}, psi);
}

inline Potential potential_from_json(const Space& s, const ordered_json& j) {
    const std::string ctx = "potential";
    std::string type = jsondetail::get_string(j, "type", ctx);
    if (type == "constant") {
        jsondetail::require_allowed_keys(j, {"type", "c"}, ctx);
        return ConstantPotential{jsondetail::get_number<double>(j, "c", ctx)};
    }
    if (type == "smooth_circle") {
        jsondetail::require_allowed_keys(j, {"type", "amplitude"}, ctx);
        return SmoothCirclePotential{jsondetail::get_number<double>(j, "amplitude", ctx)};
    }
    if (type == "distance_to") {
        jsondetail::require_allowed_keys(j, {"type", "point"}, ctx);
        return DistanceToPointPotential{point_from_json(s, jsondetail::require_field(j, "point", ctx), ctx)};
    }
    if (type == "holder_power") {
        jsondetail::require_allowed_keys(j, {"type", "k", "alpha", "base"}, ctx);
        HolderPowerPotential p;
        p.k = jsondetail::get_number<double>(j, "k", ctx);
        p.alpha = jsondetail::get_number<double>(j, "alpha", ctx);
        if (j.contains("base"))
            p.base = point_from_json(s, j["base"], ctx);
        else if (s.symbolic_space())
            throw ParameterError(ctx + ": holder_power on a subshift needs an explicit base point");
        else
            p.base = s.kind == SpaceKind::Torus ? Point::vec(std::vector<double>(s.dim, 0.0)) : Point::scalar(0.0);
        return p;
    }
    if (type == "symbol_letter") {
        jsondetail::require_allowed_keys(j, {"type", "values"}, ctx);
        SymbolLetterPotential p;
        for (const auto& v : jsondetail::require_field(j, "values", ctx)) p.values.push_back(v.get<double>());
        return p;
    }
    throw ParameterError(ctx + ": unknown type \"" + type + "\"");
}

// -------------------------- segments and pseudo-orbits ---------------------------

inline ordered_json to_json(const Space& s, const SpecSegments& segs) {
    ordered_json arr = ordered_json::array();
    for (const auto& seg : segs.items)
        arr.push_back(ordered_json{{"x", to_json(s, seg.base)}, {"j", seg.j}, {"k", seg.k}});
    return ordered_json{{"segments", arr}, {"gap", segs.gap}, {"base_time_one", segs.base_time_one}};
}

inline SpecSegments segments_from_json(const Space& s, const ordered_json& j) {
    const std::string ctx = "segments";
    jsondetail::require_allowed_keys(j, {"segments", "gap", "base_time_one"}, ctx);
    SpecSegments segs;
    segs.gap = jsondetail::get_number_or<long long>(j, "gap", ctx, 1);
    if (j.contains("base_time_one")) segs.base_time_one = j["base_time_one"].get<bool>();
    for (const auto& item : jsondetail::require_field(j, "segments", ctx)) {
        jsondetail::require_allowed_keys(item, {"x", "j", "k"}, ctx + ".item");
        segs.items.push_back(SpecSegment{point_from_json(s, jsondetail::require_field(item, "x", ctx), ctx),
                                         jsondetail::get_number<long long>(item, "j", ctx),
                                         jsondetail::get_number<long long>(item, "k", ctx)});
    }
    return segs;
}

inline ordered_json to_json(const Space& s, const PseudoOrbit& po) {
    ordered_json pts = ordered_json::array();
    for (const auto& p : po.points) pts.push_back(to_json(s, p));
    return ordered_json{{"points", pts}, {"delta", po.delta}};
}

inline PseudoOrbit pseudo_orbit_from_json(const Space& s, const ordered_json& j) {
    const std::string ctx = "pseudo_orbit";
    jsondetail::require_allowed_keys(j, {"points", "delta"}, ctx);
    PseudoOrbit po;
    po.delta = jsondetail::get_number<double>(j, "delta", ctx);
    for (const auto& p : jsondetail::require_field(j, "points", ctx)) po.points.push_back(point_from_json(s, p, ctx));
    return po;
}

// --------------------------------- reports --------------------------------------

inline ordered_json to_json(const NRange& r) { return ordered_json{{"lo", r.lo}, {"hi", r.hi}}; }

inline ordered_json to_json(const Space& s, const SeparationReport& rep, bool with_points = true) {
    ordered_json j;
    j["k"] = rep.k;
    j["n"] = rep.n;
    j["epsilon"] = rep.epsilon;
    j["mode"] = to_string(rep.mode);
    j["cardinality"] = rep.points.size();
    j["grid"] = rep.grid_note;
    j["grid_h"] = rep.grid_h;
    if (with_points) {
        ordered_json pts = ordered_json::array();
        for (const auto& p : rep.points) pts.push_back(to_json(s, p));
        j["points"] = pts;
    }
    return j;
}

inline ordered_json to_json(const CountSeries& cs) {
    ordered_json vals = ordered_json::array();
    for (const auto& [n, v] : cs.values) vals.push_back(ordered_json{{"n", n}, {"value", v}});
    return ordered_json{{"k", cs.k},
                        {"epsilon", cs.epsilon},
                        {"mode", to_string(cs.mode)},
                        {"grid", cs.grid_note},
                        {"values", vals}};
}

inline ordered_json to_json(const EntropyReport& rep, bool with_series = true) {
    ordered_json j;
    j["estimate"] = rep.estimate;
    j["limsup_proxy"] = rep.limsup_proxy;
    j["residual"] = rep.residual;
    j["window"] = to_json(rep.window);
    j["epsilon"] = rep.epsilon;
    j["k"] = rep.k;
    j["mode"] = to_string(rep.mode);
    if (rep.spanning_estimate) j["spanning_estimate"] = *rep.spanning_estimate;
    if (with_series) j["series"] = to_json(rep.series);
    return j;
}

inline ordered_json to_json(const PressureReport& rep) {
    ordered_json vals = ordered_json::array();
    for (const auto& [n, v] : rep.values) vals.push_back(ordered_json{{"n", n}, {"value", v}});
    return ordered_json{{"epsilon", rep.epsilon}, {"mode", to_string(rep.mode)},
                        {"estimate", rep.estimate}, {"limsup_proxy", rep.limsup_proxy},
                        {"residual", rep.residual}, {"window", to_json(rep.window)},
                        {"values", vals}};
}

inline ordered_json to_json(const PropertyCheck& c) {
    return ordered_json{{"name", c.name}, {"passed", c.passed}, {"margin", c.margin}, {"detail", c.detail}};
}

}  // namespace ndsthermo
