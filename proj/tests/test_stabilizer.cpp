#include <cmath>

#include <gtest/gtest.h>

#include "pexstab/control.hpp"
#include "pexstab/error.hpp"
#include "pexstab/stabilizer.hpp"
#include "support.hpp"

using namespace pexstab;
using namespace testing_support;

namespace {

struct Instance {
    Carrier lat = Carrier::lattice(1, 32);
    GroupK k = plus_minus(lat);
    BetaParam beta{1.0};
    PexiderTriple exact = make_exact_triple(quad1(lat, 2, 0, 0), quad1(lat, 0, 3, 0), v1(0.5), v1(0.5), k, beta);

    PexiderTriple noisy(std::uint64_t seed) const {
        PerturbOptions opt;
        opt.delta = 1e-3;
        opt.seed = seed;
        opt.support_radius = 8;
        return perturb(exact, k, beta, opt).triple;
    }
};

}  // namespace

TEST(Stabilize, ExactTripleRecoversEverything) {
    const Instance in;
    const ControlFn phi(in.lat, ConstantControl{1e-6});
    const auto [d, rep] = stabilize(in.exact, phi, in.k, in.beta);
    EXPECT_EQ(sup_distance(d.q, quad1(in.lat, 2, 0, 0), in.beta), 0.0);
    EXPECT_EQ(sup_distance(d.j, quad1(in.lat, 0, 3, 0), in.beta), 0.0);
    EXPECT_DOUBLE_EQ(d.g0[0], 0.5);
    EXPECT_DOUBLE_EQ(d.h0[0], 0.5);
    EXPECT_LE(rep.laws.quadratic, 1e-9);
    EXPECT_LE(rep.laws.jensen, 1e-9);
    EXPECT_LE(rep.laws.side_condition, 1e-9);
    for (const auto* c : {&rep.bounds.f, &rep.bounds.g, &rep.bounds.h}) {
        EXPECT_GE(c->min_margin, 0.0);
        for (double m : c->measured) EXPECT_LE(m, 1e-10);
    }
    for (double a : rep.uniqueness.a) EXPECT_EQ(a, 0.0);
    for (double b : rep.uniqueness.b) EXPECT_EQ(b, 0.0);
}

TEST(Stabilize, NoisyInstanceWithinBounds) {
    const Instance in;
    const ControlFn phi(in.lat, ConstantControl{1e-3});
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto [d, rep] = stabilize(in.noisy(seed), phi, in.k, in.beta);
        EXPECT_DOUBLE_EQ(rep.lipschitz, 0.5);
        EXPECT_GE(rep.bounds.f.min_margin, 0.0);
        EXPECT_GE(rep.bounds.g.min_margin, 0.0);
        EXPECT_GE(rep.bounds.h.min_margin, 0.0);
        double worst = 0.0;
        for (double m : rep.bounds.f.measured) worst = std::max(worst, m);
        EXPECT_LE(worst, 15e-3);
        EXPECT_LE(rep.laws.jensen, 1e-9);
        for (std::size_t n = 0; n < rep.uniqueness.a.size(); ++n)
            EXPECT_LE(rep.uniqueness.a[n], std::pow(0.5, double(n)) * rep.uniqueness.a[0] + 1e-9);
        for (const auto& s : rep.q_trace.steps)
            if (s.ratio) EXPECT_LE(*s.ratio, rep.q_trace.lipschitz + 1e-9);
        EXPECT_GE(rep.q_banach_margin, -1e-9);
        EXPECT_GE(rep.j_banach_margin, -1e-9);
    }
}

TEST(Stabilize, WrongDecompositionGivesNegativeMargin) {
    const Instance in;
    const ControlFn phi(in.lat, ConstantControl{1e-3});
    const auto t = in.noisy(5);
    auto [d, rep] = stabilize(t, phi, in.k, in.beta);
    d.q = FuncRep::zero(in.lat, 1);
    EXPECT_LT(verify_bounds(t, d, phi, in.k, in.beta, rep.lipschitz).f.min_margin, 0.0);
}

TEST(Stabilize, HypothesisViolated) {
    const Instance in;
    try {
        stabilize(in.noisy(1), ControlFn(in.lat, ConstantControl{1e-6}), in.k, in.beta);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolated);
        EXPECT_EQ(exit_code(e.kind()), 2);
    }
}

TEST(Stabilize, LipschitzOverride) {
    const Instance in;
    const ControlFn phi(in.lat, ConstantControl{1e-3});
    StabilizeOptions opt;
    opt.lipschitz = 0.4;  // below the measured 0.5
    EXPECT_THROW(stabilize(in.exact, phi, in.k, in.beta, opt), Error);
    opt.lipschitz = 0.75;
    const auto [d, rep] = stabilize(in.exact, phi, in.k, in.beta, opt);
    EXPECT_DOUBLE_EQ(rep.lipschitz, 0.75);
}

TEST(Stabilize, PaperTDiscrepancyIsReported) {
    const Instance in;
    const ControlFn phi(in.lat, ConstantControl{1e-6});
    StabilizeOptions opt;
    opt.strategy = JensenStrategy::PaperT;
    const auto [d, rep] = stabilize(in.exact, phi, in.k, in.beta, opt);
    // T halves the linear part each step, so its limit is far from 3x.
    EXPECT_GT(sup_distance(d.j, quad1(in.lat, 0, 3, 0), in.beta), 1.0);
    ASSERT_TRUE(rep.discrepancy.distance.has_value());
    EXPECT_GT(*rep.discrepancy.distance, 1.0);
    EXPECT_TRUE(rep.discrepancy.flagged);
    EXPECT_FALSE(rep.discrepancy.half_fixes_lambda_limit);
    EXPECT_TRUE(rep.discrepancy.lambda_limit_satisfies_jensen);
    EXPECT_LT(rep.bounds.f.min_margin, 0.0);
}

TEST(Stabilize, ModularCarrier) {
    SplitMix64 rng(3);
    const auto z5 = Carrier::modular(5, 1);
    const auto k = plus_minus(z5);
    const BetaParam beta(1.0);
    // the only exact triples are constants; add a small random defect to f
    const auto base = make_exact_triple(FuncRep::zero(z5, 1), FuncRep::zero(z5, 1), v1(1), v1(2), k, beta);
    auto f = base.f;
    f += 1e-3 * random_table(rng, z5);
    const PexiderTriple t(f, base.g, base.h);
    const ControlFn phi(z5, ConstantControl{2e-3});
    const auto [d, rep] = stabilize(t, phi, k, beta);
    EXPECT_GE(rep.bounds.f.min_margin, 0.0);
    EXPECT_GE(rep.bounds.g.min_margin, 0.0);
    EXPECT_GE(rep.bounds.h.min_margin, 0.0);
    EXPECT_LE(sup_distance(d.q, FuncRep::zero(z5, 1), beta), 1e-9);
}

TEST(Uniqueness, ExactTripleHasZeroSeries) {
    const Instance in;
    const ControlFn phi(in.lat, ConstantControl{1e-3});
    const auto [d, rep] = stabilize(in.exact, phi, in.k, in.beta);
    const auto u = uniqueness_probe(in.exact, d, phi, in.k, 0.5, 0.5, in.beta, 10);
    EXPECT_EQ(u.a.size(), 11u);
    for (double a : u.a) EXPECT_EQ(a, 0.0);
    EXPECT_TRUE(u.a_within_envelope);
}
