#include "pexstab/control.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pexstab/error.hpp"
#include "pexstab/parallel.hpp"

namespace pexstab {

ControlFn::ControlFn(Carrier carrier, Spec spec) : carrier_(std::move(carrier)), spec_(std::move(spec)) {
    if (const auto* c = std::get_if<ConstantControl>(&spec_)) {
        if (!(c->theta >= 0.0) || !std::isfinite(c->theta)) throw Error(ErrorKind::Config, "theta must be >= 0");
    } else if (const auto* p = std::get_if<PowerControl>(&spec_)) {
        if (!(p->theta >= 0.0) || !std::isfinite(p->theta)) throw Error(ErrorKind::Config, "theta must be >= 0");
        if (!(p->p > 0.0) || !std::isfinite(p->p)) throw Error(ErrorKind::Config, "power p must be > 0");
    } else {
        TableControl normalized;
        for (const auto& [key, v] : std::get<TableControl>(spec_).entries) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::Config, "table control must be >= 0");
            normalized.entries[{carrier_.reduce(key.first), carrier_.reduce(key.second)}] = v;
        }
        spec_ = std::move(normalized);
    }
}

double ControlFn::operator()(const Point& x, const Point& y) const {
    if (const auto* c = std::get_if<ConstantControl>(&spec_)) return c->theta;
    if (const auto* p = std::get_if<PowerControl>(&spec_)) {
        const double nx = point_norm(x, carrier_);
        const double ny = point_norm(y, carrier_);
        return p->theta * (std::pow(nx, p->p) + std::pow(ny, p->p));
    }
    const auto& t = std::get<TableControl>(spec_);
    const auto it = t.entries.find({carrier_.reduce(x), carrier_.reduce(y)});
    return it == t.entries.end() ? 0.0 : it->second;
}

LipschitzCert measure_lipschitz(const ControlFn& phi, const GroupK& group, BetaParam beta) {
    const Carrier& c = group.carrier();
    const auto& pts = c.points();
    const std::size_t n = pts.size();
    const double denom_scale = std::pow(2.0 * static_cast<double>(group.order()), beta.value());

    const auto numerator = [&](const Point& x, const Point& y) {
        double s = 0.0;
        for (const auto& k : group.elements())
            s += phi(c.add(x, act(k, x, c)), c.add(y, act(k, y, c)));
        return s;
    };
    const auto best = parallel_max(n * n, [&](std::size_t i) {
        const Point& x = pts[i / n];
        const Point& y = pts[i % n];
        const double den = phi(x, y);
        const double num = numerator(x, y);
        if (den > 0.0) return num / (denom_scale * den);
        return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    });
    const Point& wx = pts[best.index / n];
    const Point& wy = pts[best.index % n];
    if (std::isinf(best.value)) {
        std::ostringstream os;
        os << "phi vanishes at an enumerated pair where the averaged control is positive";
        throw Error(ErrorKind::ZeroDenominatorViolation, os.str());
    }
    return {std::max(best.value, 0.0), wx, wy, std::max(best.value, 0.0)};
}

LipschitzCert minimal_lipschitz(const ControlFn& phi, const GroupK& group, BetaParam beta) {
    auto cert = measure_lipschitz(phi, group, beta);
    if (cert.L >= 1.0) {
        std::ostringstream os;
        os << "measured Lipschitz constant " << cert.L << " >= 1";
        throw Error(ErrorKind::NotContractive, os.str());
    }
    return cert;
}

PairWeightFn derive_psi(const ControlFn& phi, const GroupK& group, BetaParam beta) {
    const double order = static_cast<double>(group.order());
    const double lead = order / std::pow(order, beta.value());
    const double scale = 1.0 / std::pow(order, beta.value());
    return [phi, group, lead, scale](const Point& x, const Point& y) {
        const Carrier& c = group.carrier();
        const Point zero = c.zero();
        double s = 0.0;
        for (const auto& k : group.elements()) {
            const Point kx = act(k, x, c);
            s += phi(kx, y) + phi(kx, zero);
        }
        return lead * phi(zero, y) + scale * s;
    };
}

PairWeightFn derive_chi(const ControlFn& phi, const GroupK& group, BetaParam beta) {
    auto psi = derive_psi(phi, group, beta);
    return [phi, psi = std::move(psi), zero = group.carrier().zero()](const Point& x, const Point& y) {
        return psi(x, y) + phi(x, y) + phi(x, zero) + phi(zero, y);
    };
}

WeightFn diagonal(PairWeightFn w) {
    return [w = std::move(w)](const Point& x) { return w(x, x); };
}

HypothesisReport verify_hypothesis(const FuncRep& f, const FuncRep& g, const FuncRep& h,
                                   const ControlFn& phi, const GroupK& group, BetaParam beta) {
    const auto& pts = group.carrier().points();
    const std::size_t n = pts.size();
    const auto worst = parallel_min(n * n, [&](std::size_t i) {
        const Point& x = pts[i / n];
        const Point& y = pts[i % n];
        return phi(x, y) - residual_pexider(f, g, h, group, x, y, beta);
    });
    return {worst.value, pts[worst.index / n], pts[worst.index % n]};
}

CorollaryCoefficients corollary_coefficients(double theta, double p, double beta, int group_order) {
    if (group_order < 1) throw Error(ErrorKind::ConstraintViolation, "|K| must be >= 1");
    if (!(theta >= 0.0)) throw Error(ErrorKind::ConstraintViolation, "theta >= 0 violated");
    const double k = static_cast<double>(group_order);
    const double alpha = std::log(k) / std::log(2.0);
    std::ostringstream os;
    if (!(alpha / (alpha + 1.0) < beta)) {
        os << "alpha/(alpha+1) < beta violated (alpha=" << alpha << ", beta=" << beta << ")";
        throw Error(ErrorKind::ConstraintViolation, os.str());
    }
    if (!(beta < 1.0)) {
        os << "beta < 1 violated (beta=" << beta << ")";
        throw Error(ErrorKind::ConstraintViolation, os.str());
    }
    if (!(p > 0.0)) {
        os << "0 < p violated (p=" << p << ")";
        throw Error(ErrorKind::ConstraintViolation, os.str());
    }
    const double bound = beta + (beta - 1.0) * alpha;
    if (!(p < bound)) {
        os << "p < beta + (beta-1)*alpha violated (p=" << p << ", bound=" << bound << ")";
        throw Error(ErrorKind::ConstraintViolation, os.str());
    }
    const double two_k_beta = std::pow(2.0 * k, beta);
    const double common = theta / std::pow(2.0, beta) * two_k_beta / (two_k_beta - std::pow(2.0, p) * k);
    const double k_ratio = k / std::pow(k, beta);
    const double three_p = std::pow(3.0, p);
    CorollaryCoefficients out{};
    out.f = common * (k_ratio * (6.0 + 6.0 * three_p) + 8.0);
    out.g = out.f + theta;
    out.h = common * (k_ratio * (2.0 + 2.0 * three_p)) + theta;
    out.alpha = alpha;
    out.lipschitz = std::pow(2.0, p) * k / two_k_beta;
    return out;
}

}  // namespace pexstab
