#include <cmath>

#include <gtest/gtest.h>

#include "pexstab/control.hpp"
#include "pexstab/error.hpp"
#include "support.hpp"

using namespace pexstab;
using namespace testing_support;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Config;
}

}  // namespace

TEST(Control, Evaluation) {
    const auto lat = Carrier::lattice(1, 5);
    const ControlFn c(lat, ConstantControl{0.3});
    EXPECT_DOUBLE_EQ(c({2}, {-4}), 0.3);
    const ControlFn p(lat, PowerControl{1.0, 0.5});
    EXPECT_DOUBLE_EQ(p({4}, {0}), 2.0);
    EXPECT_DOUBLE_EQ(p({0}, {0}), 0.0);
    const ControlFn t(lat, TableControl{{{{{1}, {2}}, 0.7}}});
    EXPECT_DOUBLE_EQ(t({1}, {2}), 0.7);
    EXPECT_DOUBLE_EQ(t({2}, {1}), 0.0);
}

TEST(Lipschitz, ConstantControl) {
    const auto z5 = Carrier::modular(5, 1);
    const auto l = minimal_lipschitz(ControlFn(z5, ConstantControl{2.0}), plus_minus(z5), BetaParam(1.0));
    EXPECT_DOUBLE_EQ(l.L, 0.5);
    const auto t = minimal_lipschitz(ControlFn(z5, ConstantControl{2.0}), trivial(z5), BetaParam(1.0));
    EXPECT_DOUBLE_EQ(t.L, 0.5);
}

TEST(Lipschitz, PowerControlWithSwap) {
    // K = {I, swap}: phi(x + swap x, y + swap y) grows like 2^p at the diagonal, and the
    // identity term contributes another 2^p, so the sup is 2 * 2^p / 4 = 2^(p-1).
    const auto lat = Carrier::lattice(2, 4);
    const auto k = build_group({swap2()}, lat);
    for (double p : {0.25, 0.5, 0.9}) {
        const auto l = measure_lipschitz(ControlFn(lat, PowerControl{1.0, p}), k, BetaParam(1.0));
        EXPECT_NEAR(l.L, std::pow(2.0, p - 1.0), 1e-12) << "p=" << p;
    }
}

TEST(Lipschitz, PowerControlWithNegation) {
    // The -I term vanishes (phi(0,0) = 0), leaving 2^p / 4.
    const auto lat = Carrier::lattice(1, 16);
    const auto l = measure_lipschitz(ControlFn(lat, PowerControl{1.0, 0.5}), plus_minus(lat), BetaParam(1.0));
    EXPECT_NEAR(l.L, std::sqrt(2.0) / 4.0, 1e-12);
    const auto b = measure_lipschitz(ControlFn(lat, PowerControl{1e-6, 0.25}), plus_minus(lat), BetaParam(0.5));
    EXPECT_NEAR(b.L, std::pow(2.0, -0.75), 1e-12);
}

TEST(Lipschitz, NotContractive) {
    const auto lat = Carrier::lattice(2, 4);
    const auto k = build_group({swap2()}, lat);
    EXPECT_EQ(kind_of([&] { minimal_lipschitz(ControlFn(lat, PowerControl{1.0, 1.2}), k, BetaParam(1.0)); }),
              ErrorKind::NotContractive);
}

TEST(Lipschitz, ZeroDenominator) {
    const auto z3 = Carrier::modular(3, 1);
    // phi vanishes at (1,1) but not at (1,1) + (1,1) = (-1,-1)
    const ControlFn t(z3, TableControl{{{{{-1}, {-1}}, 1.0}}});
    EXPECT_EQ(kind_of([&] { measure_lipschitz(t, trivial(z3), BetaParam(1.0)); }), ErrorKind::ZeroDenominatorViolation);
}

TEST(Weights, ConstantControl) {
    for (int order : {1, 2}) {
        const auto z5 = Carrier::modular(5, 1);
        const auto k = order == 1 ? trivial(z5) : plus_minus(z5);
        const ControlFn phi(z5, ConstantControl{0.2});
        const auto psi = derive_psi(phi, k, BetaParam(1.0));
        const auto chi = derive_chi(phi, k, BetaParam(1.0));
        for (const auto& x : z5.points()) {
            EXPECT_NEAR(psi(x, x), 0.6, 1e-15);
            EXPECT_NEAR(chi(x, x), 1.2, 1e-15);
        }
    }
}

TEST(Weights, DegenerateControl) {
    const auto z5 = Carrier::modular(5, 1);
    const ControlFn phi(z5, TableControl{});
    const auto psi = derive_psi(phi, plus_minus(z5), BetaParam(1.0));
    const auto chi = derive_chi(phi, plus_minus(z5), BetaParam(1.0));
    for (const auto& x : z5.points()) {
        EXPECT_EQ(psi(x, {0}), 0.0);
        EXPECT_EQ(chi(x, x), 0.0);
    }
}

TEST(Hypothesis, Margins) {
    const auto lat = Carrier::lattice(1, 6);
    const auto k = plus_minus(lat);
    const BetaParam beta(1.0);
    const auto t = make_exact_triple(quad1(lat, 2, 0, 0), quad1(lat, 0, 3, 0), v1(0.5), v1(0.5), k, beta);
    EXPECT_GE(verify_hypothesis(t.f, t.g, t.h, ControlFn(lat, TableControl{}), k, beta).margin, 0.0);

    PerturbOptions opt;
    opt.delta = 1e-3;
    opt.seed = 5;
    opt.support_radius = 4;
    const auto p = perturb(t, k, beta, opt);
    EXPECT_GE(verify_hypothesis(p.triple.f, p.triple.g, p.triple.h, ControlFn(lat, ConstantControl{1e-3}), k, beta).margin,
              0.0);

    // noise at the origin against a power control
    const auto bad = t.f + quad1(lat, 0, 0, 0, {{{0}, v1(1e-3)}});
    const auto r = verify_hypothesis(bad, t.g, t.h, ControlFn(lat, PowerControl{1.0, 0.5}), k, beta);
    EXPECT_LT(r.margin, 0.0);
    EXPECT_EQ(r.worst_x, Point{0});
    EXPECT_EQ(r.worst_y, Point{0});
}

TEST(Corollary, KnownValue) {
    const auto c = corollary_coefficients(1.0, 0.5, 0.9, 2);
    // A = 2^-0.9 * 4^0.9 / (4^0.9 - 2^1.5);  f = A (6 + 6 sqrt 3) 2^-0.9 + 8 A
    const double a = std::pow(2.0, -0.9) * std::pow(4.0, 0.9) / (std::pow(4.0, 0.9) - std::pow(2.0, 1.5));
    const double kb = std::pow(2.0, 0.1);
    EXPECT_NEAR(c.f, a * (kb * (6 + 6 * std::sqrt(3.0)) + 8), 1e-12);
    EXPECT_NEAR(c.f, 72.98096161808627, 1e-9);
    EXPECT_NEAR(c.g, c.f + 1.0, 1e-12);
    EXPECT_NEAR(c.h, a * kb * (2 + 2 * std::sqrt(3.0)) + 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(c.alpha, 1.0);
    EXPECT_LT(c.lipschitz, 1.0);
}

TEST(Corollary, ZeroTheta) {
    const auto c = corollary_coefficients(0.0, 0.5, 0.9, 2);
    EXPECT_EQ(c.f, 0.0);
    EXPECT_EQ(c.g, 0.0);
    EXPECT_EQ(c.h, 0.0);
}

TEST(Corollary, Constraints) {
    // |K| = 2: 0 < p < 2 beta - 1
    for (double p : {0.8, 0.85, 1.0})
        EXPECT_EQ(kind_of([&] { corollary_coefficients(1.0, p, 0.9, 2); }), ErrorKind::ConstraintViolation);
    EXPECT_EQ(kind_of([&] { corollary_coefficients(1.0, 0.0, 0.9, 2); }), ErrorKind::ConstraintViolation);
    EXPECT_NO_THROW(corollary_coefficients(1.0, 0.79, 0.9, 2));
    // beta must exceed alpha / (alpha + 1) = 1/2
    EXPECT_EQ(kind_of([&] { corollary_coefficients(1.0, 0.01, 0.5, 2); }), ErrorKind::ConstraintViolation);
    // Cauchy case |K| = 1: alpha = 0, constraint 0 < p < beta
    EXPECT_NO_THROW(corollary_coefficients(1.0, 0.5, 0.6, 1));
    EXPECT_EQ(kind_of([&] { corollary_coefficients(1.0, 0.6, 0.6, 1); }), ErrorKind::ConstraintViolation);
}
