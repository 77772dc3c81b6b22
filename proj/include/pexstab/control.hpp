#pragma once

#include <functional>
#include <map>
#include <utility>
#include <variant>

#include "pexstab/domain.hpp"
#include "pexstab/funcspace.hpp"

namespace pexstab {

struct ConstantControl {
    double theta;
};

/// theta (||x||^p + ||y||^p)
struct PowerControl {
    double theta;
    double p;
};

/// Tabulated control; pairs missing from the table evaluate to 0.
struct TableControl {
    std::map<std::pair<Point, Point>, double> entries;
};

/// The bound phi(x, y) on the Pexider defect.
class ControlFn {
public:
    using Spec = std::variant<ConstantControl, PowerControl, TableControl>;

    ControlFn(Carrier carrier, Spec spec);

    double operator()(const Point& x, const Point& y) const;
    const Spec& spec() const noexcept { return spec_; }
    const Carrier& carrier() const noexcept { return carrier_; }

private:
    Carrier carrier_;
    Spec spec_;
};

inline double eval_control(const ControlFn& phi, const Point& x, const Point& y) { return phi(x, y); }

struct LipschitzCert {
    double L;
    Point worst_x;
    Point worst_y;
    double ratio;
};

/// sup over enumerated pairs of sum_k phi(x + k.x, y + k.y) / ((2|K|)^beta phi(x, y)).
/// Reports the measured value even when it is >= 1. Throws ZeroDenominatorViolation
/// when phi(x, y) = 0 but the numerator is positive.
LipschitzCert measure_lipschitz(const ControlFn& phi, const GroupK& group, BetaParam beta);

/// measure_lipschitz, additionally throwing NotContractive when L >= 1.
LipschitzCert minimal_lipschitz(const ControlFn& phi, const GroupK& group, BetaParam beta);

using PairWeightFn = std::function<double(const Point&, const Point&)>;

/// psi(x,y) = |K|^(1-b) phi(0,y) + |K|^(-b) sum_k [phi(k.x, y) + phi(k.x, 0)]
PairWeightFn derive_psi(const ControlFn& phi, const GroupK& group, BetaParam beta);
/// chi(x,y) = psi(x,y) + phi(x,y) + phi(x,0) + phi(0,y)
PairWeightFn derive_chi(const ControlFn& phi, const GroupK& group, BetaParam beta);

/// x -> w(x, x)
WeightFn diagonal(PairWeightFn w);

struct HypothesisReport {
    double margin;  // min of phi - residual; negative means violated
    Point worst_x;
    Point worst_y;
};

HypothesisReport verify_hypothesis(const FuncRep& f, const FuncRep& g, const FuncRep& h,
                                   const ControlFn& phi, const GroupK& group, BetaParam beta);

/// Coefficients of ||x||^p in the three power-control bounds.
struct CorollaryCoefficients {
    double f;
    double g;
    double h;
    double alpha;      // log|K| / log 2
    double lipschitz;  // 2^p |K| / (2|K|)^beta, the modulus behind the common factor
};

/// Throws ConstraintViolation naming the violated inequality.
CorollaryCoefficients corollary_coefficients(double theta, double p, double beta, int group_order);

}  // namespace pexstab
