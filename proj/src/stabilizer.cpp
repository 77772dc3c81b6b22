#include "pexstab/stabilizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pexstab/error.hpp"
#include "pexstab/parallel.hpp"

namespace pexstab {
namespace {

constexpr double kLawTolerance = 1e-6;

double pair_max(const Carrier& c, const std::function<double(const Point&, const Point&)>& f) {
    const auto& pts = c.points();
    const std::size_t n = pts.size();
    return std::max(0.0, parallel_max(n * n, [&](std::size_t i) { return f(pts[i / n], pts[i % n]); }).value);
}

double point_max(const Carrier& c, const std::function<double(const Point&)>& f) {
    const auto& pts = c.points();
    return std::max(0.0, parallel_max(pts.size(), [&](std::size_t i) { return f(pts[i]); }).value);
}

void finish_curve(BoundCurve& curve, const std::vector<Point>& pts) {
    curve.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double m = curve.theory[i] - curve.measured[i];
        if (m < curve.min_margin) {
            curve.min_margin = m;
            curve.worst_x = pts[i];
        }
    }
}

JensenOutcome run_jensen(JensenStrategy strategy, const FuncRep& omega, const GroupK& group,
                         const WeightFn& chi_diag, BetaParam beta, double lipschitz,
                         const StabilizeOptions& options) {
    JensenOutcome out{strategy, "converged", {}, lipschitz, std::nullopt, {}, 0.0, 0.0, 0.0};
    const AveragingOp op{strategy == JensenStrategy::PaperT ? OpKind::Half : OpKind::Full, group};
    try {
        if (!(lipschitz < 1.0)) {
            std::ostringstream os;
            os << "Full-operator certificate " << lipschitz << " >= 1";
            throw Error(ErrorKind::LambdaNotContractive, os.str());
        }
        auto result = iterate(op, omega, chi_diag, beta, lipschitz, options.tol, options.nmax);
        out.j = std::move(result.fix);
        out.trace = std::move(result.trace);
    } catch (const Error& e) {
        out.status = std::string(to_string(e.kind()));
        out.message = e.detail();
    }
    return out;
}

void fill_outcome_checks(JensenOutcome& out, const PexiderTriple& triple, const FuncRep& q, const Value& g0,
                         const Value& h0, const ControlFn& phi, const GroupK& group, BetaParam beta,
                         double lipschitz) {
    if (!out.j) return;
    const Decomposition d{q, *out.j, g0, h0};
    const auto laws = verify_laws(d, group, beta);
    out.jensen_residual = laws.jensen;
    out.side_condition = laws.side_condition;
    out.f_bound_margin = verify_bounds(triple, d, phi, group, beta, lipschitz).f.min_margin;
}

}  // namespace

std::string_view to_string(JensenStrategy s) { return s == JensenStrategy::PaperT ? "paper_t" : "lambda"; }

PexiderTriple::PexiderTriple(FuncRep f_, FuncRep g_, FuncRep h_)
    : f(std::move(f_)), g(std::move(g_)), h(std::move(h_)) {
    if (!(f.carrier() == g.carrier()) || !(f.carrier() == h.carrier()))
        throw Error(ErrorKind::Mismatch, "triple members must share a carrier");
    if (f.r() != g.r() || f.r() != h.r()) throw Error(ErrorKind::Mismatch, "triple members must share r");
}

PexiderTriple PexiderTriple::scaled(double s) const { return {s * f, s * g, s * h}; }

BoundsReport verify_bounds(const PexiderTriple& triple, const Decomposition& decomp, const ControlFn& phi,
                           const GroupK& group, BetaParam beta, double lipschitz) {
    const Carrier& c = triple.f.carrier();
    const auto& pts = c.points();
    const auto psi = derive_psi(phi, group, beta);
    const auto chi = derive_chi(phi, group, beta);
    const double b = beta.value();
    const double inv_gap = 1.0 / (1.0 - lipschitz);
    const double two_b = std::pow(2.0, b);
    const Point zero = c.zero();
    const Value offset = decomp.g0 + decomp.h0;

    BoundsReport out;
    for (auto* curve : {&out.f, &out.g, &out.h}) {
        curve->measured.resize(pts.size());
        curve->theory.resize(pts.size());
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point& x = pts[i];
        const Value qx = decomp.q.eval(x);
        const Value jx = decomp.j.eval(x);
        const double psi_xx = psi(x, x);
        const double chi_xx = chi(x, x);
        const double core = 2.0 / two_b * inv_gap * chi_xx + 1.0 / two_b * inv_gap * psi_xx;

        out.f.measured[i] = beta_norm(triple.f.eval(x) - qx - jx - offset, beta);
        out.f.theory[i] = core;
        out.g.measured[i] = beta_norm(triple.g.eval(x) - qx - jx - decomp.g0, beta);
        out.g.theory[i] = phi(x, zero) + core;
        out.h.measured[i] = beta_norm(triple.h.eval(x) - qx - decomp.h0, beta);
        out.h.theory[i] = 1.0 / two_b * inv_gap * psi_xx + phi(zero, x);
    }
    finish_curve(out.f, pts);
    finish_curve(out.g, pts);
    finish_curve(out.h, pts);
    return out;
}

LawReport verify_laws(const Decomposition& decomp, const GroupK& group, BetaParam beta) {
    const Carrier& c = decomp.q.carrier();
    LawReport out;
    out.quadratic = pair_max(c, [&](const Point& x, const Point& y) {
        return residual_quadratic(decomp.q, group, x, y, beta);
    });
    out.jensen = pair_max(c, [&](const Point& x, const Point& y) {
        return residual_jensen(decomp.j, group, x, y, beta);
    });
    out.side_condition = point_max(c, [&](const Point& x) { return side_condition_defect(decomp.j, group, x, beta); });
    return out;
}

UniquenessReport uniqueness_probe(const PexiderTriple& triple, const Decomposition& decomp,
                                  const ControlFn& phi, const GroupK& group, double lipschitz,
                                  std::optional<double> jensen_rate, BetaParam beta, int nmax) {
    const auto psi_diag = diagonal(derive_psi(phi, group, beta));
    const auto chi_diag = diagonal(derive_chi(phi, group, beta));
    const AveragingOp half{OpKind::Half, group};
    const AveragingOp full{OpKind::Full, group};
    constexpr double slack = 1e-9;

    UniquenessReport out;
    out.a_rate = lipschitz;
    out.b_rate = jensen_rate;

    FuncRep u = triple.h;
    u.add_constant(-decomp.h0);
    FuncRep v = triple.f - decomp.q;
    v.add_constant(-(decomp.g0 + decomp.h0));
    for (int n = 0; n <= nmax; ++n) {
        out.a.push_back(sup_weighted_distance(u, decomp.q, psi_diag, beta).value);
        out.b.push_back(sup_weighted_distance(v, decomp.j, chi_diag, beta).value);
        if (n < nmax) {
            u = apply_op(half, u);
            v = apply_op(full, v);
        }
    }
    if (std::isfinite(out.a.front())) {
        for (std::size_t n = 0; n < out.a.size(); ++n)
            if (out.a[n] > std::pow(lipschitz, static_cast<double>(n)) * out.a.front() + slack)
                out.a_within_envelope = false;
    }
    if (jensen_rate && std::isfinite(out.b.front())) {
        bool ok = true;
        for (std::size_t n = 0; n < out.b.size(); ++n)
            if (out.b[n] > std::pow(*jensen_rate, static_cast<double>(n)) * out.b.front() + slack) ok = false;
        out.b_within_envelope = ok;
    }
    return out;
}

std::pair<Decomposition, StabilityReport> stabilize(const PexiderTriple& triple, const ControlFn& phi,
                                                    const GroupK& group, BetaParam beta,
                                                    const StabilizeOptions& options) {
    const Carrier& c = triple.f.carrier();
    if (!(group.carrier() == c) || !(phi.carrier() == c))
        throw Error(ErrorKind::Mismatch, "triple, control and group must share a carrier");

    StabilityReport report;
    report.strategy = options.strategy;

    const auto hyp = verify_hypothesis(triple.f, triple.g, triple.h, phi, group, beta);
    report.hypothesis_margin = hyp.margin;
    if (hyp.margin < 0.0) {
        std::ostringstream os;
        os << "Pexider defect exceeds the control by " << -hyp.margin;
        throw Error(ErrorKind::HypothesisViolated, os.str());
    }

    report.certificate = minimal_lipschitz(phi, group, beta);
    double lipschitz = report.certificate.L;
    if (options.lipschitz) {
        if (*options.lipschitz < report.certificate.L || !(*options.lipschitz < 1.0)) {
            std::ostringstream os;
            os << "supplied L = " << *options.lipschitz << " must lie in [" << report.certificate.L << ", 1)";
            throw Error(ErrorKind::Config, os.str());
        }
        lipschitz = *options.lipschitz;
    }
    report.lipschitz = lipschitz;

    const auto psi_diag = diagonal(derive_psi(phi, group, beta));
    const auto chi_diag = diagonal(derive_chi(phi, group, beta));

    const Point zero = c.zero();
    const Value g0 = triple.g.eval(zero);
    const Value h0 = triple.h.eval(zero);
    const FuncRep sym = symmetrize(triple.f, group);

    FuncRep kappa = sym;
    kappa.add_constant(-(g0 + h0));
    const AveragingOp half{OpKind::Half, group};
    auto q_run = iterate(half, kappa, psi_diag, beta, lipschitz, options.tol, options.nmax);
    report.q_trace = q_run.trace;
    report.q_banach_margin = diaz_margolis_bound(kappa, q_run.fix, half, lipschitz, psi_diag, beta);
    report.q_at_zero = beta_norm(q_run.fix.eval(zero), beta);

    // omega(0) = 0 exactly, so the Full iteration stays on the subspace of
    // functions vanishing at the origin.
    const FuncRep omega = triple.f - sym;
    const double full_modulus = operator_modulus(AveragingOp{OpKind::Full, group}, chi_diag, beta, true);
    const double lambda_lipschitz = std::min(std::pow(2.0, beta.value()) * lipschitz, full_modulus);

    auto& disc = report.discrepancy;
    disc.paper_t = run_jensen(JensenStrategy::PaperT, omega, group, chi_diag, beta, lipschitz, options);
    disc.lambda = run_jensen(JensenStrategy::Lambda, omega, group, chi_diag, beta, lambda_lipschitz, options);
    fill_outcome_checks(disc.paper_t, triple, q_run.fix, g0, h0, phi, group, beta, lipschitz);
    fill_outcome_checks(disc.lambda, triple, q_run.fix, g0, h0, phi, group, beta, lipschitz);

    JensenOutcome& chosen = options.strategy == JensenStrategy::PaperT ? disc.paper_t : disc.lambda;
    if (!chosen.j) {
        const ErrorKind kind = chosen.status == "LambdaNotContractive" ? ErrorKind::LambdaNotContractive
                               : chosen.status == "NoFiniteStep"       ? ErrorKind::NoFiniteStep
                               : chosen.status == "NotContractive"     ? ErrorKind::NotContractive
                                                                       : ErrorKind::MaxIterations;
        throw Error(kind, chosen.message);
    }
    report.jensen_lipschitz = chosen.lipschitz;
    report.j_trace = chosen.trace;
    const AveragingOp jensen_op{options.strategy == JensenStrategy::PaperT ? OpKind::Half : OpKind::Full, group};
    report.j_banach_margin = diaz_margolis_bound(omega, *chosen.j, jensen_op, chosen.lipschitz, chi_diag, beta);

    Decomposition decomp{q_run.fix, *chosen.j, g0, h0};
    report.bounds = verify_bounds(triple, decomp, phi, group, beta, lipschitz);
    report.laws = verify_laws(decomp, group, beta);

    // The Full-operator envelope needs either the generic certificate or a start
    // that vanishes at the origin.
    std::optional<double> b_rate;
    if (options.strategy == JensenStrategy::Lambda) {
        const double generic = std::pow(2.0, beta.value()) * lipschitz;
        Value start0 = triple.f.eval(zero) - decomp.q.eval(zero) - decomp.j.eval(zero) - (g0 + h0);
        if (generic < 1.0)
            b_rate = generic;
        else if (start0.isZero(0.0))
            b_rate = full_modulus;
    }
    report.uniqueness =
        uniqueness_probe(triple, decomp, phi, group, lipschitz, b_rate, beta, options.probe_steps);

    if (disc.paper_t.j && disc.lambda.j) {
        disc.distance = sup_distance(*disc.paper_t.j, *disc.lambda.j, beta);
        disc.half_fixes_lambda_limit = sup_distance(apply_op(half, *disc.lambda.j), *disc.lambda.j, beta) <= 1e-9;
    }
    disc.t_limit_violates_jensen = disc.paper_t.j.has_value() && disc.paper_t.jensen_residual > kLawTolerance;
    disc.lambda_limit_satisfies_jensen = disc.lambda.j.has_value() && disc.lambda.jensen_residual <= kLawTolerance;

    std::ostringstream note;
    if (disc.paper_t.j.has_value() != disc.lambda.j.has_value()) {
        disc.flagged = true;
        note << "only the " << (disc.lambda.j ? "lambda" : "paper_t") << " iteration converged; ";
    }
    if (disc.distance && *disc.distance > kLawTolerance) {
        disc.flagged = true;
        note << "T-limit and Lambda-limit differ by " << *disc.distance << "; ";
    }
    if (disc.lambda.j && !disc.half_fixes_lambda_limit) {
        disc.flagged = true;
        note << "the Half operator does not fix the Lambda-limit Jensen component; ";
    }
    if (disc.paper_t.j && disc.lambda.j && ((disc.paper_t.f_bound_margin < 0.0) != (disc.lambda.f_bound_margin < 0.0))) {
        disc.flagged = true;
        note << "f-bound margin is " << disc.paper_t.f_bound_margin << " under paper_t and "
             << disc.lambda.f_bound_margin << " under lambda; ";
    }
    if (disc.t_limit_violates_jensen) {
        disc.flagged = true;
        note << "T-limit violates the Jensen equation (residual " << disc.paper_t.jensen_residual << "); ";
    }
    disc.note = note.str();
    if (!disc.note.empty()) disc.note.resize(disc.note.size() - 2);

    return {std::move(decomp), std::move(report)};
}

}  // namespace pexstab
