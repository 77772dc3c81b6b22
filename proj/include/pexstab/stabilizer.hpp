#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pexstab/control.hpp"
#include "pexstab/domain.hpp"
#include "pexstab/fixpoint.hpp"
#include "pexstab/funcspace.hpp"

namespace pexstab {

/// (f, g, h) with 1/|K| sum_k f(x + k.y) ~ g(x) + h(y).
struct PexiderTriple {
    FuncRep f;
    FuncRep g;
    FuncRep h;

    PexiderTriple(FuncRep f_, FuncRep g_, FuncRep h_);
    PexiderTriple scaled(double s) const;
};

/// PaperT iterates the Half operator on omega = f - sym(f); Lambda iterates Full,
/// whose fixed points are exactly the Jensen solutions.
enum class JensenStrategy { PaperT, Lambda };

std::string_view to_string(JensenStrategy s);

struct Decomposition {
    FuncRep q;
    FuncRep j;
    Value g0;
    Value h0;
};

struct BoundCurve {
    std::vector<double> measured;
    std::vector<double> theory;
    double min_margin = 0.0;
    Point worst_x;
};

/// Curves for the f-, g- and h-estimates, indexed by carrier enumeration.
struct BoundsReport {
    BoundCurve f;
    BoundCurve g;
    BoundCurve h;
};

struct LawReport {
    double quadratic = 0.0;       // max residual of q in the quadratic equation
    double jensen = 0.0;          // max residual of j in the Jensen equation
    double side_condition = 0.0;  // max || 1/|K| sum_k j(k.x) ||
};

struct UniquenessReport {
    std::vector<double> a;  // d(J^n (h - h0), q) in the psi metric
    std::vector<double> b;  // d(Lambda^n (f - q - g0 - h0), j) in the chi metric
    double a_rate = 0.0;
    std::optional<double> b_rate;  // unset when no envelope applies
    bool a_within_envelope = true;
    std::optional<bool> b_within_envelope;
};

/// Result of one Jensen strategy, kept even when it is not the selected one.
struct JensenOutcome {
    JensenStrategy strategy;
    std::string status;  // "converged" or the error kind
    std::string message;
    double lipschitz = 0.0;
    std::optional<FuncRep> j;
    IterationTrace trace;
    double jensen_residual = 0.0;
    double side_condition = 0.0;
    double f_bound_margin = 0.0;
};

struct Discrepancy {
    JensenOutcome paper_t;
    JensenOutcome lambda;
    std::optional<double> distance;  // sup ||j_T - j_Lambda||_beta when both converged
    bool half_fixes_lambda_limit = false;
    bool t_limit_violates_jensen = false;
    bool lambda_limit_satisfies_jensen = false;
    bool flagged = false;
    std::string note;
};

struct StabilityReport {
    double lipschitz = 0.0;         // L used in the bounds and for the q iteration
    LipschitzCert certificate;
    double jensen_lipschitz = 0.0;  // certificate of the selected Jensen iteration
    JensenStrategy strategy = JensenStrategy::Lambda;
    double hypothesis_margin = 0.0;
    BoundsReport bounds;
    LawReport laws;
    IterationTrace q_trace;
    IterationTrace j_trace;
    double q_banach_margin = 0.0;
    double j_banach_margin = 0.0;
    double q_at_zero = 0.0;
    UniquenessReport uniqueness;
    Discrepancy discrepancy;
};

struct StabilizeOptions {
    JensenStrategy strategy = JensenStrategy::Lambda;
    double tol = kDefaultTol;
    int nmax = kDefaultMaxIterations;
    std::optional<double> lipschitz;  // accepted only when >= the measured constant
    int probe_steps = 10;
};

/// Recovers q (Half iteration on sym(f) - g(0) - h(0), psi metric) and j (chosen
/// strategy on f - sym(f), chi metric). Throws HypothesisViolated, NotContractive,
/// LambdaNotContractive, NoFiniteStep or MaxIterations.
std::pair<Decomposition, StabilityReport> stabilize(const PexiderTriple& triple, const ControlFn& phi,
                                                    const GroupK& group, BetaParam beta,
                                                    const StabilizeOptions& options = {});

BoundsReport verify_bounds(const PexiderTriple& triple, const Decomposition& decomp, const ControlFn& phi,
                           const GroupK& group, BetaParam beta, double lipschitz);

LawReport verify_laws(const Decomposition& decomp, const GroupK& group, BetaParam beta);

/// `jensen_rate` is the Full-operator certificate when one applies.
UniquenessReport uniqueness_probe(const PexiderTriple& triple, const Decomposition& decomp,
                                  const ControlFn& phi, const GroupK& group, double lipschitz,
                                  std::optional<double> jensen_rate, BetaParam beta, int nmax);

}  // namespace pexstab
