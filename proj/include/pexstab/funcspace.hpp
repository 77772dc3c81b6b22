#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <variant>
#include <vector>

#include "pexstab/domain.hpp"

namespace pexstab {

/// Element of the target space R^r.
using Value = Eigen::VectorXd;

/// Exponent of the beta-norm, 0 < beta <= 1.
class BetaParam {
public:
    explicit BetaParam(double beta);
    /// Skips validation; only for probing what breaks outside (0, 1].
    static BetaParam unchecked(double beta);

    double value() const noexcept { return beta_; }

private:
    struct Unchecked {};
    BetaParam(double beta, Unchecked) : beta_(beta) {}
    double beta_;
};

/// sum_i |v_i|^beta
double beta_norm(const Value& v, BetaParam beta);

struct DenseTable {
    std::vector<Value> values;  // carrier enumeration order
};

/// c + V x + (x^T A_i x)_i plus a finitely supported correction inside the window.
struct PolyPlusTable {
    Value constant;
    Eigen::MatrixXd linear;                  // r x d
    std::vector<Eigen::MatrixXd> quadratic;  // r symmetric d x d
    std::map<Point, Value> noise;
};

/// A function E -> R^r: a dense table on a modular carrier, or polynomial plus
/// noise on a lattice.
class FuncRep {
public:
    static FuncRep dense(const Carrier& carrier, std::vector<Value> values);
    static FuncRep poly(const Carrier& carrier, PolyPlusTable table);
    static FuncRep zero(const Carrier& carrier, int r);
    static FuncRep constant(const Carrier& carrier, const Value& c);

    const Carrier& carrier() const noexcept { return carrier_; }
    int r() const noexcept { return r_; }
    bool is_dense() const noexcept { return std::holds_alternative<DenseTable>(rep_); }
    const DenseTable& dense_table() const { return std::get<DenseTable>(rep_); }
    const PolyPlusTable& poly_table() const { return std::get<PolyPlusTable>(rep_); }

    /// Throws OutOfCarrier for a dense lookup outside the carrier.
    Value eval(const Point& x) const;

    FuncRep& operator+=(const FuncRep& other);
    FuncRep& operator-=(const FuncRep& other);
    FuncRep& operator*=(double s);
    FuncRep& add_constant(const Value& c);

    friend FuncRep operator+(FuncRep a, const FuncRep& b) { return a += b; }
    friend FuncRep operator-(FuncRep a, const FuncRep& b) { return a -= b; }
    friend FuncRep operator*(double s, FuncRep a) { return a *= s; }

private:
    FuncRep(Carrier carrier, int r, std::variant<DenseTable, PolyPlusTable> rep);
    void check_compatible(const FuncRep& other) const;

    Carrier carrier_;
    int r_;
    std::variant<DenseTable, PolyPlusTable> rep_;
};

/// Mean of f over the distinct points {x + k.y : k in K}; equal to the full
/// 1/|K| sum because every orbit point is hit |K|/|orbit| times.
Value avg_translate(const FuncRep& f, const GroupK& group, const Point& x, const Point& y);

/// x -> 1/|K| sum_k f(k.x)
FuncRep symmetrize(const FuncRep& f, const GroupK& group);

double residual_pexider(const FuncRep& f, const FuncRep& g, const FuncRep& h, const GroupK& group,
                        const Point& x, const Point& y, BetaParam beta);
double residual_quadratic(const FuncRep& q, const GroupK& group, const Point& x, const Point& y,
                          BetaParam beta);
double residual_jensen(const FuncRep& j, const GroupK& group, const Point& x, const Point& y,
                       BetaParam beta);
/// || 1/|K| sum_k j(k.x) ||_beta
double side_condition_defect(const FuncRep& j, const GroupK& group, const Point& x, BetaParam beta);

using WeightFn = std::function<double(const Point&)>;

struct WeightedDistance {
    double value;  // +inf when some point has positive gap and zero weight
    Point worst_x;
};

/// sup_x ||g(x) - h(x)||_beta / w(x) over the enumeration, with 0/0 = 0 and
/// positive/0 = inf.
WeightedDistance sup_weighted_distance(const FuncRep& g, const FuncRep& h, const WeightFn& w,
                                       BetaParam beta);

/// Unweighted sup of ||g(x) - h(x)||_beta over the enumeration.
double sup_distance(const FuncRep& g, const FuncRep& h, BetaParam beta);

}  // namespace pexstab
