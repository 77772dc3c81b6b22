#pragma once

#include <cstdint>
#include <map>

#include "pexstab/domain.hpp"
#include "pexstab/funcspace.hpp"
#include "pexstab/oracle.hpp"

namespace testing_support {

using namespace pexstab;

inline Value v1(double x) { return Value::Constant(1, x); }

// a x^2 + b x + c on a 1-d lattice window.
inline FuncRep quad1(const Carrier& car, double a, double b, double c, std::map<Point, Value> noise = {}) {
    PolyPlusTable t;
    t.constant = v1(c);
    t.linear = Eigen::MatrixXd::Constant(1, 1, b);
    t.quadratic = {Eigen::MatrixXd::Constant(1, 1, a)};
    t.noise = std::move(noise);
    return FuncRep::poly(car, std::move(t));
}

inline FuncRep indicator(const Carrier& car, const Point& at) {
    std::vector<Value> vals(car.size(), v1(0.0));
    vals[*car.index_of(car.reduce(at))] = v1(1.0);
    return FuncRep::dense(car, std::move(vals));
}

inline FuncRep random_table(SplitMix64& rng, const Carrier& car, int r = 1) {
    std::vector<Value> vals;
    for (std::size_t i = 0; i < car.size(); ++i) {
        Value v(r);
        for (int k = 0; k < r; ++k) v[k] = 2.0 * rng.uniform() - 1.0;
        vals.push_back(v);
    }
    return FuncRep::dense(car, std::move(vals));
}

inline GroupK plus_minus(const Carrier& car) { return build_group({Automorphism::negation(car.dim())}, car); }
inline GroupK trivial(const Carrier& car) { return build_group({}, car); }
inline Automorphism swap2() { return Automorphism(2, {0, 1, 1, 0}); }

}  // namespace testing_support
