#include "pexstab/funcspace.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pexstab/error.hpp"
#include "pexstab/parallel.hpp"

namespace pexstab {
namespace {

Eigen::VectorXd to_real(const Point& x) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<Eigen::Index>(i)] = static_cast<double>(x[i]);
    return v;
}

Eigen::MatrixXd to_real(const Automorphism& k) {
    Eigen::MatrixXd m(k.dim(), k.dim());
    for (int i = 0; i < k.dim(); ++i)
        for (int j = 0; j < k.dim(); ++j) m(i, j) = static_cast<double>(k.at(i, j));
    return m;
}

void check_finite(const Value& v) {
    if (!v.allFinite()) throw Error(ErrorKind::Config, "function values must be finite");
}

void merge_noise(std::map<Point, Value>& into, const std::map<Point, Value>& from, double sign) {
    for (const auto& [p, v] : from) {
        auto it = into.find(p);
        if (it == into.end()) {
            into.emplace(p, sign * v);
        } else {
            it->second += sign * v;
            if (it->second.isZero(0.0)) into.erase(it);
        }
    }
}

Value mean_over(const FuncRep& f, const std::vector<Point>& pts) {
    Value s = Value::Zero(f.r());
    for (const auto& p : pts) s += f.eval(p);
    return s / static_cast<double>(pts.size());
}

}  // namespace

BetaParam::BetaParam(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta <= 1.0))
        throw Error(ErrorKind::Config, "beta must satisfy 0 < beta <= 1, got " + std::to_string(beta));
}

BetaParam BetaParam::unchecked(double beta) { return BetaParam(beta, Unchecked{}); }

double beta_norm(const Value& v, BetaParam beta) {
    double s = 0.0;
    const double b = beta.value();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        s += b == 1.0 ? a : std::pow(a, b);
    }
    return s;
}

FuncRep::FuncRep(Carrier carrier, int r, std::variant<DenseTable, PolyPlusTable> rep)
    : carrier_(std::move(carrier)), r_(r), rep_(std::move(rep)) {}

FuncRep FuncRep::dense(const Carrier& carrier, std::vector<Value> values) {
    if (!carrier.is_modular()) throw Error(ErrorKind::Config, "dense tables require a modular carrier");
    if (values.size() != carrier.size())
        throw Error(ErrorKind::Config, "dense table has " + std::to_string(values.size()) +
                                           " entries, carrier has " + std::to_string(carrier.size()));
    if (values.empty() || values.front().size() < 1) throw Error(ErrorKind::Config, "target dimension must be >= 1");
    const auto r = values.front().size();
    for (const auto& v : values) {
        if (v.size() != r) throw Error(ErrorKind::Config, "inconsistent target dimension in dense table");
        check_finite(v);
    }
    return FuncRep(carrier, static_cast<int>(r), DenseTable{std::move(values)});
}

FuncRep FuncRep::poly(const Carrier& carrier, PolyPlusTable t) {
    if (carrier.is_modular()) throw Error(ErrorKind::Config, "polynomial representation requires a lattice carrier");
    const auto r = t.constant.size();
    const int d = carrier.dim();
    if (r < 1) throw Error(ErrorKind::Config, "target dimension must be >= 1");
    if (t.linear.size() == 0) t.linear = Eigen::MatrixXd::Zero(r, d);
    if (t.quadratic.empty()) t.quadratic.assign(static_cast<std::size_t>(r), Eigen::MatrixXd::Zero(d, d));
    if (t.linear.rows() != r || t.linear.cols() != d)
        throw Error(ErrorKind::Config, "linear part must be r x d");
    if (t.quadratic.size() != static_cast<std::size_t>(r))
        throw Error(ErrorKind::Config, "quadratic part must hold r matrices");
    check_finite(t.constant);
    if (!t.linear.allFinite()) throw Error(ErrorKind::Config, "linear coefficients must be finite");
    for (auto& a : t.quadratic) {
        if (a.rows() != d || a.cols() != d) throw Error(ErrorKind::Config, "quadratic matrices must be d x d");
        if (!a.allFinite()) throw Error(ErrorKind::Config, "quadratic coefficients must be finite");
        a = 0.5 * (a + a.transpose()).eval();
    }
    for (auto it = t.noise.begin(); it != t.noise.end();) {
        if (!carrier.contains(it->first)) throw Error(ErrorKind::Config, "noise support must lie inside the window");
        if (it->second.size() != r) throw Error(ErrorKind::Config, "noise value has wrong target dimension");
        check_finite(it->second);
        if (it->second.isZero(0.0))
            it = t.noise.erase(it);
        else
            ++it;
    }
    return FuncRep(carrier, static_cast<int>(r), std::move(t));
}

FuncRep FuncRep::zero(const Carrier& carrier, int r) { return constant(carrier, Value::Zero(r)); }

FuncRep FuncRep::constant(const Carrier& carrier, const Value& c) {
    if (carrier.is_modular()) return dense(carrier, std::vector<Value>(carrier.size(), c));
    PolyPlusTable t;
    t.constant = c;
    return poly(carrier, std::move(t));
}

Value FuncRep::eval(const Point& x) const {
    if (const auto* dt = std::get_if<DenseTable>(&rep_)) {
        const auto idx = carrier_.index_of(x);
        if (!idx) throw Error(ErrorKind::OutOfCarrier, "point is not a representative of the carrier");
        return dt->values[*idx];
    }
    const auto& t = std::get<PolyPlusTable>(rep_);
    if (x.size() != static_cast<std::size_t>(carrier_.dim()))
        throw Error(ErrorKind::OutOfCarrier, "point has wrong dimension");
    const Eigen::VectorXd xr = to_real(x);
    Value v = t.constant + t.linear * xr;
    for (int i = 0; i < r_; ++i) v[i] += xr.dot(t.quadratic[static_cast<std::size_t>(i)] * xr);
    if (!t.noise.empty()) {
        const auto it = t.noise.find(x);
        if (it != t.noise.end()) v += it->second;
    }
    return v;
}

void FuncRep::check_compatible(const FuncRep& other) const {
    if (!(carrier_ == other.carrier_)) throw Error(ErrorKind::Mismatch, "functions live on different carriers");
    if (r_ != other.r_) throw Error(ErrorKind::Mismatch, "functions have different target dimensions");
}

FuncRep& FuncRep::operator+=(const FuncRep& other) {
    check_compatible(other);
    if (auto* dt = std::get_if<DenseTable>(&rep_)) {
        const auto& o = other.dense_table();
        for (std::size_t i = 0; i < dt->values.size(); ++i) dt->values[i] += o.values[i];
    } else {
        auto& t = std::get<PolyPlusTable>(rep_);
        const auto& o = other.poly_table();
        t.constant += o.constant;
        t.linear += o.linear;
        for (std::size_t i = 0; i < t.quadratic.size(); ++i) t.quadratic[i] += o.quadratic[i];
        merge_noise(t.noise, o.noise, 1.0);
    }
    return *this;
}

FuncRep& FuncRep::operator-=(const FuncRep& other) {
    check_compatible(other);
    if (auto* dt = std::get_if<DenseTable>(&rep_)) {
        const auto& o = other.dense_table();
        for (std::size_t i = 0; i < dt->values.size(); ++i) dt->values[i] -= o.values[i];
    } else {
        auto& t = std::get<PolyPlusTable>(rep_);
        const auto& o = other.poly_table();
        t.constant -= o.constant;
        t.linear -= o.linear;
        for (std::size_t i = 0; i < t.quadratic.size(); ++i) t.quadratic[i] -= o.quadratic[i];
        merge_noise(t.noise, o.noise, -1.0);
    }
    return *this;
}

FuncRep& FuncRep::operator*=(double s) {
    if (auto* dt = std::get_if<DenseTable>(&rep_)) {
        for (auto& v : dt->values) v *= s;
    } else {
        auto& t = std::get<PolyPlusTable>(rep_);
        t.constant *= s;
        t.linear *= s;
        for (auto& a : t.quadratic) a *= s;
        if (s == 0.0)
            t.noise.clear();
        else
            for (auto& [p, v] : t.noise) v *= s;
    }
    return *this;
}

FuncRep& FuncRep::add_constant(const Value& c) {
    if (c.size() != r_) throw Error(ErrorKind::Mismatch, "constant has wrong target dimension");
    if (auto* dt = std::get_if<DenseTable>(&rep_)) {
        for (auto& v : dt->values) v += c;
    } else {
        std::get<PolyPlusTable>(rep_).constant += c;
    }
    return *this;
}

Value avg_translate(const FuncRep& f, const GroupK& group, const Point& x, const Point& y) {
    const Carrier& c = f.carrier();
    std::vector<Point> pts;
    for (const auto& ky : group.orbit(y)) pts.push_back(c.add(x, ky));
    return mean_over(f, pts);
}

FuncRep symmetrize(const FuncRep& f, const GroupK& group) {
    const Carrier& c = f.carrier();
    if (f.is_dense()) {
        std::vector<Value> vals;
        vals.reserve(c.size());
        for (const auto& x : c.points()) vals.push_back(mean_over(f, group.orbit(x)));
        return FuncRep::dense(c, std::move(vals));
    }
    const auto& src = f.poly_table();
    const double inv = 1.0 / static_cast<double>(group.order());
    PolyPlusTable t;
    t.constant = src.constant;
    t.linear = Eigen::MatrixXd::Zero(src.linear.rows(), src.linear.cols());
    t.quadratic.assign(src.quadratic.size(), Eigen::MatrixXd::Zero(c.dim(), c.dim()));
    for (const auto& k : group.elements()) {
        const Eigen::MatrixXd km = to_real(k);
        t.linear += inv * src.linear * km;
        for (std::size_t i = 0; i < src.quadratic.size(); ++i)
            t.quadratic[i] += inv * km.transpose() * src.quadratic[i] * km;
    }
    // Noise support is K-closed, so the averaged noise lives on the same orbits.
    for (const auto& [p, v] : src.noise) {
        (void)v;
        for (const auto& q : group.orbit(p)) {
            if (t.noise.count(q) != 0) continue;
            if (!c.contains(q)) throw Error(ErrorKind::Config, "noise support is not closed under K inside the window");
            Value s = Value::Zero(f.r());
            const auto orbit = group.orbit(q);
            for (const auto& o : orbit) {
                const auto it = src.noise.find(o);
                if (it != src.noise.end()) s += it->second;
            }
            t.noise.emplace(q, s / static_cast<double>(orbit.size()));
        }
    }
    return FuncRep::poly(c, std::move(t));
}

double residual_pexider(const FuncRep& f, const FuncRep& g, const FuncRep& h, const GroupK& group,
                        const Point& x, const Point& y, BetaParam beta) {
    return beta_norm(avg_translate(f, group, x, y) - (g.eval(x) + h.eval(y)), beta);
}

double residual_quadratic(const FuncRep& q, const GroupK& group, const Point& x, const Point& y,
                          BetaParam beta) {
    return beta_norm(avg_translate(q, group, x, y) - (q.eval(x) + q.eval(y)), beta);
}

double residual_jensen(const FuncRep& j, const GroupK& group, const Point& x, const Point& y,
                       BetaParam beta) {
    return beta_norm(avg_translate(j, group, x, y) - j.eval(x), beta);
}

double side_condition_defect(const FuncRep& j, const GroupK& group, const Point& x, BetaParam beta) {
    return beta_norm(mean_over(j, group.orbit(x)), beta);
}

WeightedDistance sup_weighted_distance(const FuncRep& g, const FuncRep& h, const WeightFn& w,
                                       BetaParam beta) {
    const auto& pts = g.carrier().points();
    const auto best = parallel_max(pts.size(), [&](std::size_t i) {
        const double gap = beta_norm(g.eval(pts[i]) - h.eval(pts[i]), beta);
        if (gap == 0.0) return 0.0;
        const double weight = w(pts[i]);
        return weight > 0.0 ? gap / weight : std::numeric_limits<double>::infinity();
    });
    if (pts.empty()) return {0.0, {}};
    return {std::max(best.value, 0.0), pts[best.index]};
}

double sup_distance(const FuncRep& g, const FuncRep& h, BetaParam beta) {
    return sup_weighted_distance(g, h, [](const Point&) { return 1.0; }, beta).value;
}

}  // namespace pexstab
