#include "pexstab/harness/io.hpp"

#include <cmath>
#include <string>

#include "pexstab/error.hpp"

namespace pexstab::io {
namespace {

double num(const json& j, const char* what) {
    if (!j.is_number()) throw Error(ErrorKind::Config, std::string(what) + " must be a number");
    return j.get<double>();
}

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json curve_json(const BoundCurve& c) {
    json measured = json::array();
    json theory = json::array();
    for (double v : c.measured) measured.push_back(real(v));
    for (double v : c.theory) theory.push_back(real(v));
    return {{"min_margin", real(c.min_margin)}, {"worst_x", to_json(c.worst_x)}, {"measured", measured},
            {"theory", theory}};
}

json series(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(real(x));
    return out;
}

json outcome_json(const JensenOutcome& o) {
    json out = {{"strategy", std::string(to_string(o.strategy))},
                {"status", o.status},
                {"lipschitz", real(o.lipschitz)}};
    if (!o.message.empty()) out["message"] = o.message;
    if (o.j) {
        out["jensen_residual"] = real(o.jensen_residual);
        out["side_condition"] = real(o.side_condition);
        out["f_bound_margin"] = real(o.f_bound_margin);
        out["steps"] = o.trace.steps.size();
    }
    return out;
}

}  // namespace

json to_json(const Point& p) {
    json out = json::array();
    for (auto v : p) out.push_back(v);
    return out;
}

Point point_from_json(const json& j, int dim) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(dim))
        throw Error(ErrorKind::Config, "point must be an integer array of length " + std::to_string(dim));
    Point p;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw Error(ErrorKind::Config, "point coordinates must be integers");
        p.push_back(v.get<std::int64_t>());
    }
    return p;
}

json to_json(const Value& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(real(v[i]));
    return out;
}

Value value_from_json(const json& j, int r) {
    if (j.is_number() && r == 1) return Value::Constant(1, j.get<double>());
    if (!j.is_array() || j.size() != static_cast<std::size_t>(r))
        throw Error(ErrorKind::Config, "value must be an array of length r = " + std::to_string(r));
    Value v(r);
    for (int i = 0; i < r; ++i) v[i] = num(j[static_cast<std::size_t>(i)], "value entry");
    return v;
}

json to_json(const FuncRep& f) {
    if (f.is_dense()) {
        json out = json::array();
        for (const auto& v : f.dense_table().values) out.push_back(to_json(v));
        return out;
    }
    const auto& t = f.poly_table();
    json linear = json::array();
    for (Eigen::Index i = 0; i < t.linear.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < t.linear.cols(); ++k) row.push_back(real(t.linear(i, k)));
        linear.push_back(row);
    }
    json quadratic = json::array();
    for (const auto& a : t.quadratic) {
        json m = json::array();
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < a.cols(); ++k) row.push_back(real(a(i, k)));
            m.push_back(row);
        }
        quadratic.push_back(m);
    }
    json noise = json::array();
    for (const auto& [p, v] : t.noise) noise.push_back({{"point", to_json(p)}, {"value", to_json(v)}});
    return {{"constant", to_json(t.constant)}, {"linear", linear}, {"quadratic", quadratic}, {"noise", noise}};
}

FuncRep funcrep_from_json(const json& j, const Carrier& carrier, int r) {
    const int d = carrier.dim();
    if (carrier.is_modular()) {
        if (!j.is_array()) throw Error(ErrorKind::Config, "dense table must be an array in enumeration order");
        std::vector<Value> vals;
        for (const auto& v : j) vals.push_back(value_from_json(v, r));
        return FuncRep::dense(carrier, std::move(vals));
    }
    if (!j.is_object()) throw Error(ErrorKind::Config, "polynomial function must be an object");
    PolyPlusTable t;
    t.constant = j.contains("constant") ? value_from_json(j["constant"], r) : Value::Zero(r);
    t.linear = Eigen::MatrixXd::Zero(r, d);
    if (j.contains("linear")) {
        const auto& l = j["linear"];
        if (!l.is_array() || l.size() != static_cast<std::size_t>(r))
            throw Error(ErrorKind::Config, "linear must be an r x d array");
        for (int i = 0; i < r; ++i) {
            const auto& row = l[static_cast<std::size_t>(i)];
            if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
                throw Error(ErrorKind::Config, "linear must be an r x d array");
            for (int k = 0; k < d; ++k) t.linear(i, k) = num(row[static_cast<std::size_t>(k)], "linear entry");
        }
    }
    t.quadratic.assign(static_cast<std::size_t>(r), Eigen::MatrixXd::Zero(d, d));
    if (j.contains("quadratic")) {
        const auto& q = j["quadratic"];
        if (!q.is_array() || q.size() != static_cast<std::size_t>(r))
            throw Error(ErrorKind::Config, "quadratic must hold r matrices of size d x d");
        for (int i = 0; i < r; ++i) {
            const auto& m = q[static_cast<std::size_t>(i)];
            if (!m.is_array() || m.size() != static_cast<std::size_t>(d))
                throw Error(ErrorKind::Config, "quadratic must hold r matrices of size d x d");
            for (int a = 0; a < d; ++a) {
                const auto& row = m[static_cast<std::size_t>(a)];
                if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
                    throw Error(ErrorKind::Config, "quadratic must hold r matrices of size d x d");
                for (int b = 0; b < d; ++b)
                    t.quadratic[static_cast<std::size_t>(i)](a, b) = num(row[static_cast<std::size_t>(b)], "quadratic entry");
            }
        }
    }
    if (j.contains("noise")) {
        for (const auto& e : j["noise"]) {
            if (!e.is_object() || !e.contains("point") || !e.contains("value"))
                throw Error(ErrorKind::Config, "noise entries must be {point, value}");
            t.noise[point_from_json(e["point"], d)] = value_from_json(e["value"], r);
        }
    }
    return FuncRep::poly(carrier, std::move(t));
}

Carrier carrier_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw Error(ErrorKind::Config, "carrier needs a kind");
    const auto kind = j["kind"].get<std::string>();
    const auto integer = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_number_integer())
            throw Error(ErrorKind::Config, std::string("carrier.") + key + " must be an integer");
        return j[key].get<int>();
    };
    if (kind == "modular") return Carrier::modular(integer("modulus"), integer("dim"));
    if (kind == "lattice") return Carrier::lattice(integer("dim"), integer("radius"));
    throw Error(ErrorKind::Config, "unknown carrier kind '" + kind + "'");
}

json to_json(const Carrier& c) {
    if (c.is_modular()) return {{"kind", "modular"}, {"modulus", c.modulus()}, {"dim", c.dim()}};
    return {{"kind", "lattice"}, {"dim", c.dim()}, {"radius", c.radius()}};
}

Automorphism automorphism_from_json(const json& j, int dim) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(dim * dim))
        throw Error(ErrorKind::Config, "generator must be a row-major integer array of length " + std::to_string(dim * dim));
    std::vector<std::int64_t> e;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw Error(ErrorKind::Config, "generator entries must be integers");
        e.push_back(v.get<std::int64_t>());
    }
    return {dim, std::move(e)};
}

json to_json(const Automorphism& a) { return a.entries(); }

ControlFn control_from_json(const json& j, const Carrier& carrier) {
    if (!j.is_object() || !j.contains("kind")) throw Error(ErrorKind::Config, "control needs a kind");
    const auto kind = j["kind"].get<std::string>();
    const auto field = [&](const char* key) {
        if (!j.contains(key)) throw Error(ErrorKind::Config, std::string("control.") + key + " is required");
        return num(j[key], key);
    };
    if (kind == "constant") return ControlFn(carrier, ConstantControl{field("theta")});
    if (kind == "power") return ControlFn(carrier, PowerControl{field("theta"), field("p")});
    if (kind == "table") {
        TableControl t;
        if (j.contains("entries"))
            for (const auto& e : j["entries"]) {
                if (!e.is_object() || !e.contains("x") || !e.contains("y") || !e.contains("value"))
                    throw Error(ErrorKind::Config, "table entries must be {x, y, value}");
                t.entries[{point_from_json(e["x"], carrier.dim()), point_from_json(e["y"], carrier.dim())}] =
                    num(e["value"], "table value");
            }
        return ControlFn(carrier, std::move(t));
    }
    throw Error(ErrorKind::Config, "unknown control kind '" + kind + "'");
}

json to_json(const IterationTrace& t) {
    json steps = json::array();
    for (const auto& s : t.steps)
        steps.push_back({{"step", s.step}, {"distance", real(s.distance)}, {"ratio", s.ratio ? real(*s.ratio) : json(nullptr)}});
    return {{"steps", steps},
            {"step_count", t.steps.size()},
            {"first_finite", t.first_finite},
            {"lipschitz", real(t.lipschitz)},
            {"terminal_bound", real(t.terminal_bound)}};
}

json to_json(const StabilityReport& r) {
    const auto& d = r.discrepancy;
    json disc = {{"paper_t", outcome_json(d.paper_t)},
                 {"lambda", outcome_json(d.lambda)},
                 {"distance", d.distance ? real(*d.distance) : json(nullptr)},
                 {"half_fixes_lambda_limit", d.half_fixes_lambda_limit},
                 {"t_limit_violates_jensen", d.t_limit_violates_jensen},
                 {"lambda_limit_satisfies_jensen", d.lambda_limit_satisfies_jensen},
                 {"flagged", d.flagged},
                 {"note", d.note}};
    json uniq = {{"a", series(r.uniqueness.a)},
                 {"b", series(r.uniqueness.b)},
                 {"a_rate", real(r.uniqueness.a_rate)},
                 {"b_rate", r.uniqueness.b_rate ? real(*r.uniqueness.b_rate) : json(nullptr)},
                 {"a_within_envelope", r.uniqueness.a_within_envelope},
                 {"b_within_envelope",
                  r.uniqueness.b_within_envelope ? json(*r.uniqueness.b_within_envelope) : json(nullptr)}};
    return {{"L", real(r.lipschitz)},
            {"jensen_L", real(r.jensen_lipschitz)},
            {"strategy", std::string(to_string(r.strategy))},
            {"hypothesis_margin", real(r.hypothesis_margin)},
            {"bounds", {{"f", curve_json(r.bounds.f)}, {"g", curve_json(r.bounds.g)}, {"h", curve_json(r.bounds.h)}}},
            {"laws",
             {{"quadratic", real(r.laws.quadratic)},
              {"jensen", real(r.laws.jensen)},
              {"side_condition", real(r.laws.side_condition)}}},
            {"traces", {{"q", to_json(r.q_trace)}, {"j", to_json(r.j_trace)}}},
            {"banach_margins", {{"q", real(r.q_banach_margin)}, {"j", real(r.j_banach_margin)}}},
            {"q_at_zero", real(r.q_at_zero)},
            {"uniqueness", uniq},
            {"discrepancy", disc}};
}

json to_json(const Decomposition& d) {
    return {{"q", to_json(d.q)}, {"j", to_json(d.j)}, {"g0", to_json(d.g0)}, {"h0", to_json(d.h0)}};
}

}  // namespace pexstab::io
