#include "pexstab/fixpoint.hpp"

#include <cmath>
#include <limits>

#include "pexstab/error.hpp"
#include "pexstab/parallel.hpp"

namespace pexstab {
namespace {

// Distinct points of {x + k.x}; the map k -> x + k.x has equal-size fibres.
std::vector<Point> doubled_points(const GroupK& group, const Point& x) {
    const Carrier& c = group.carrier();
    std::vector<Point> out;
    for (const auto& kx : group.orbit(x)) out.push_back(c.add(x, kx));
    return out;
}

Eigen::MatrixXd shifted_matrix(const Automorphism& k) {
    Eigen::MatrixXd m(k.dim(), k.dim());
    for (int i = 0; i < k.dim(); ++i)
        for (int j = 0; j < k.dim(); ++j) m(i, j) = static_cast<double>(k.at(i, j)) + (i == j ? 1.0 : 0.0);
    return m;
}

}  // namespace

std::string_view to_string(OpKind kind) { return kind == OpKind::Half ? "half" : "full"; }

double AveragingOp::scale() const {
    const double order = static_cast<double>(group.order());
    return kind == OpKind::Half ? 1.0 / (2.0 * order) : 1.0 / order;
}

FuncRep apply_op(const AveragingOp& op, const FuncRep& f) {
    const Carrier& c = f.carrier();
    if (!(op.group.carrier() == c)) throw Error(ErrorKind::Mismatch, "operator and function use different carriers");
    // |K| * scale: 1/2 for Half, 1 for Full.
    const double factor = op.scale() * static_cast<double>(op.group.order());

    const auto mean_at = [&](const Point& x) {
        const auto pts = doubled_points(op.group, x);
        Value s = Value::Zero(f.r());
        for (const auto& p : pts) s += f.eval(p);
        return Value(factor * s / static_cast<double>(pts.size()));
    };

    if (f.is_dense()) {
        std::vector<Value> vals;
        vals.reserve(c.size());
        for (const auto& x : c.points()) vals.push_back(mean_at(x));
        return FuncRep::dense(c, std::move(vals));
    }

    const auto& src = f.poly_table();
    const double s = op.scale();
    PolyPlusTable t;
    t.constant = factor * src.constant;
    t.linear = Eigen::MatrixXd::Zero(src.linear.rows(), src.linear.cols());
    t.quadratic.assign(src.quadratic.size(), Eigen::MatrixXd::Zero(c.dim(), c.dim()));
    for (const auto& k : op.group.elements()) {
        const Eigen::MatrixXd m = shifted_matrix(k);
        t.linear += s * src.linear * m;
        for (std::size_t i = 0; i < src.quadratic.size(); ++i)
            t.quadratic[i] += s * m.transpose() * src.quadratic[i] * m;
    }
    if (!src.noise.empty()) {
        for (const auto& x : c.points()) {
            const auto pts = doubled_points(op.group, x);
            Value acc = Value::Zero(f.r());
            bool hit = false;
            for (const auto& p : pts) {
                const auto it = src.noise.find(p);
                if (it != src.noise.end()) {
                    acc += it->second;
                    hit = true;
                }
            }
            if (hit) t.noise.emplace(x, factor * acc / static_cast<double>(pts.size()));
        }
    }
    return FuncRep::poly(c, std::move(t));
}

IterationResult iterate(const AveragingOp& op, const FuncRep& start, const WeightFn& weight,
                        BetaParam beta, double lipschitz, double tol, int nmax) {
    if (!(lipschitz < 1.0)) throw Error(ErrorKind::NotContractive, "iteration needs a certificate L < 1");
    IterationTrace trace;
    trace.lipschitz = lipschitz;
    FuncRep current = start;
    std::optional<double> previous;
    for (int n = 0; n < nmax; ++n) {
        FuncRep next = apply_op(op, current);
        const double d = sup_weighted_distance(next, current, weight, beta).value;
        TraceStep step{n, d, std::nullopt};
        if (previous && *previous > 0.0 && std::isfinite(*previous) && std::isfinite(d)) step.ratio = d / *previous;
        trace.steps.push_back(step);
        previous = d;
        if (std::isfinite(d) && trace.first_finite < 0) trace.first_finite = n;
        if (std::isfinite(d) && d <= tol * (1.0 - lipschitz)) {
            trace.terminal_bound = lipschitz * d / (1.0 - lipschitz);
            return {std::move(next), std::move(trace)};
        }
        current = std::move(next);
    }
    if (trace.first_finite < 0)
        throw Error(ErrorKind::NoFiniteStep, "no finite step distance within " + std::to_string(nmax) + " iterations");
    throw Error(ErrorKind::MaxIterations, "stopping rule not met within " + std::to_string(nmax) + " iterations");
}

double diaz_margolis_bound(const FuncRep& start, const FuncRep& fix, const AveragingOp& op,
                           double lipschitz, const WeightFn& weight, BetaParam beta) {
    const double step = sup_weighted_distance(start, apply_op(op, start), weight, beta).value;
    const double actual = sup_weighted_distance(start, fix, weight, beta).value;
    if (std::isinf(step)) return std::numeric_limits<double>::infinity();
    return step / (1.0 - lipschitz) - actual;
}

double power_formula_check(const FuncRep& h, const GroupK& group, int n, BetaParam beta) {
    const Carrier& c = h.carrier();
    if (!c.is_modular()) throw Error(ErrorKind::Config, "power formula check needs a modular carrier");
    if (n < 1) throw Error(ErrorKind::Config, "power formula check needs n >= 1");

    const AveragingOp half{OpKind::Half, group};
    FuncRep composed = h;
    for (int i = 0; i < n; ++i) composed = apply_op(half, composed);

    const auto& ks = group.elements();
    const std::size_t order = ks.size();
    std::size_t tuples = 1;
    for (int i = 0; i < n; ++i) tuples *= order;
    const double norm = std::pow(2.0 * static_cast<double>(order), n);

    double worst = 0.0;
    for (const auto& x : c.points()) {
        Value sum = Value::Zero(h.r());
        for (std::size_t t = 0; t < tuples; ++t) {
            std::vector<Automorphism> chosen;
            std::size_t rest = t;
            for (int i = 0; i < n; ++i) {
                chosen.push_back(ks[rest % order]);
                rest /= order;
            }
            Point arg = x;
            for (unsigned mask = 1; mask < (1u << n); ++mask) {
                Automorphism prod = Automorphism::identity(c.dim());
                for (int i = 0; i < n; ++i)
                    if (mask & (1u << i)) prod = compose(prod, chosen[static_cast<std::size_t>(i)], c);
                arg = c.add(arg, act(prod, x, c));
            }
            sum += h.eval(arg);
        }
        worst = std::max(worst, beta_norm(composed.eval(x) - sum / norm, beta));
    }
    return worst;
}

double operator_modulus(const AveragingOp& op, const WeightFn& weight, BetaParam beta, bool vanish_at_origin) {
    const Carrier& c = op.group.carrier();
    const Point zero = c.zero();
    const double scale_beta = std::pow(op.scale(), beta.value());
    const auto& pts = c.points();
    const auto best = parallel_max(pts.size(), [&](std::size_t i) {
        const Point& x = pts[i];
        if (vanish_at_origin && x == zero) return 0.0;
        double num = 0.0;
        for (const auto& k : op.group.elements()) {
            const Point p = c.add(x, act(k, x, c));
            if (vanish_at_origin && p == zero) continue;
            num += weight(p);
        }
        if (num == 0.0) return 0.0;
        const double w = weight(x);
        return w > 0.0 ? scale_beta * num / w : std::numeric_limits<double>::infinity();
    });
    return std::max(best.value, 0.0);
}

}  // namespace pexstab
