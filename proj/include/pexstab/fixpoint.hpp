#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "pexstab/domain.hpp"
#include "pexstab/funcspace.hpp"

namespace pexstab {

/// Half: h -> 1/(2|K|) sum_k h(x + k.x)  (used for q and for the PaperT j)
/// Full: l -> 1/|K|    sum_k l(x + k.x)
enum class OpKind { Half, Full };

std::string_view to_string(OpKind kind);

struct AveragingOp {
    OpKind kind;
    GroupK group;

    /// Normalizer in front of the sum over K.
    double scale() const;
};

/// Exact on both representations. Polynomial parts go through x -> (I + k)x;
/// noise is re-tabulated on the window with reads outside the support equal to 0.
FuncRep apply_op(const AveragingOp& op, const FuncRep& f);

struct TraceStep {
    int step;
    double distance;               // d(u_{n+1}, u_n), possibly +inf
    std::optional<double> ratio;   // d_n / d_{n-1} when d_{n-1} is positive and finite
};

struct IterationTrace {
    std::vector<TraceStep> steps;
    int first_finite = -1;        // first n with finite step distance
    double lipschitz = 0.0;       // certificate the run was driven with
    double terminal_bound = 0.0;  // certified distance of the result from the fixed point
};

struct IterationResult {
    FuncRep fix;
    IterationTrace trace;
};

inline constexpr double kDefaultTol = 1e-10;
inline constexpr int kDefaultMaxIterations = 10000;

/// Iterates u_{n+1} = op(u_n) until d(u_{n+1}, u_n) <= tol (1 - L), so the
/// returned iterate is within tol of the fixed point. Throws NoFiniteStep when no
/// step distance within `nmax` is finite, MaxIterations when the stopping rule is
/// never met.
IterationResult iterate(const AveragingOp& op, const FuncRep& start, const WeightFn& weight,
                        BetaParam beta, double lipschitz, double tol = kDefaultTol,
                        int nmax = kDefaultMaxIterations);

/// (1/(1-L)) d(start, op(start)) - d(start, fix); nonnegative when the
/// a-posteriori Banach bound holds.
double diaz_margolis_bound(const FuncRep& start, const FuncRep& fix, const AveragingOp& op,
                           double lipschitz, const WeightFn& weight, BetaParam beta);

/// Largest beta-norm deviation between n-fold Half composition and the expanded
/// sum over (k_1..k_n) of h(x + sum_{S nonempty} (prod_{i in S} k_i).x) / (2|K|)^n.
/// Modular carriers only.
double power_formula_check(const FuncRep& h, const GroupK& group, int n, BetaParam beta);

/// sup_x scale^beta * sum_k w(x + k.x) / w(x): the contraction modulus of `op` in
/// the w-weighted metric. With `vanish_at_origin`, terms with x + k.x = 0 are
/// dropped, which is valid on the op-invariant subspace of functions vanishing at 0.
double operator_modulus(const AveragingOp& op, const WeightFn& weight, BetaParam beta,
                        bool vanish_at_origin);

}  // namespace pexstab
