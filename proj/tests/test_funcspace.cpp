#include <cmath>

#include <gtest/gtest.h>

#include "pexstab/error.hpp"
#include "support.hpp"

using namespace pexstab;
using namespace testing_support;

TEST(BetaNorm, Examples) {
    EXPECT_DOUBLE_EQ(beta_norm(Eigen::Vector2d(3, -4), BetaParam(1.0)), 7.0);
    EXPECT_DOUBLE_EQ(beta_norm(v1(4), BetaParam(0.5)), 2.0);
    EXPECT_DOUBLE_EQ(beta_norm(Value::Zero(3), BetaParam(0.3)), 0.0);
}

TEST(BetaNorm, ParameterRange) {
    EXPECT_THROW(BetaParam(0.0), Error);
    EXPECT_THROW(BetaParam(1.5), Error);
    EXPECT_THROW(BetaParam(-0.2), Error);
    EXPECT_NO_THROW(BetaParam(1.0));
    EXPECT_DOUBLE_EQ(BetaParam::unchecked(1.5).value(), 1.5);
}

TEST(BetaNorm, SubadditiveOnlyUpToOne) {
    SplitMix64 rng(3);
    for (double b : {0.2, 0.5, 1.0}) {
        const BetaParam beta(b);
        for (int n = 0; n < 500; ++n) {
            Value u(3), v(3);
            for (int i = 0; i < 3; ++i) {
                u[i] = 2 * rng.uniform() - 1;
                v[i] = 2 * rng.uniform() - 1;
            }
            EXPECT_LE(beta_norm(u + v, beta), beta_norm(u, beta) + beta_norm(v, beta) + 1e-12);
        }
    }
    const auto b15 = BetaParam::unchecked(1.5);
    EXPECT_GT(beta_norm(v1(2), b15), 2 * beta_norm(v1(1), b15));
}

TEST(FuncRep, Evaluation) {
    const auto lat = Carrier::lattice(1, 10);
    EXPECT_DOUBLE_EQ(quad1(lat, 2, 3, 1).eval({1})[0], 6.0);
    EXPECT_DOUBLE_EQ(quad1(lat, 0, 0, 0, {{{2}, v1(0.5)}}).eval({7})[0], 0.0);
    EXPECT_DOUBLE_EQ(quad1(lat, 0, 0, 0, {{{2}, v1(0.5)}}).eval({2})[0], 0.5);
    const auto z5 = Carrier::modular(5, 1);
    EXPECT_DOUBLE_EQ(indicator(z5, {0}).eval({0})[0], 1.0);
    EXPECT_THROW(indicator(z5, {0}).eval({5}), Error);  // not a centered representative
}

TEST(FuncRep, PolynomialEvaluatesOutsideWindow) {
    const auto lat = Carrier::lattice(1, 2);
    EXPECT_DOUBLE_EQ(quad1(lat, 1, 0, 0).eval({10})[0], 100.0);
}

TEST(FuncRep, NoiseOutsideWindowRejected) {
    EXPECT_THROW(quad1(Carrier::lattice(1, 2), 0, 0, 0, {{{3}, v1(1.0)}}), Error);
}

TEST(FuncRep, Arithmetic) {
    const auto lat = Carrier::lattice(1, 5);
    const auto f = quad1(lat, 1, 2, 3, {{{1}, v1(1.0)}});
    const auto g = quad1(lat, -1, 0, 1, {{{1}, v1(-1.0)}, {{2}, v1(2.0)}});
    const auto s = f + g;
    for (const auto& x : lat.points()) EXPECT_DOUBLE_EQ(s.eval(x)[0], f.eval(x)[0] + g.eval(x)[0]);
    EXPECT_EQ(s.poly_table().noise.size(), 1u);  // cancelled entry dropped
    const auto d = 2.0 * f - g;
    for (const auto& x : lat.points()) EXPECT_DOUBLE_EQ(d.eval(x)[0], 2 * f.eval(x)[0] - g.eval(x)[0]);
}

TEST(FuncRep, MismatchRejected) {
    const auto a = FuncRep::zero(Carrier::lattice(1, 5), 1);
    const auto b = FuncRep::zero(Carrier::lattice(1, 6), 1);
    const auto c = FuncRep::zero(Carrier::lattice(1, 5), 2);
    try {
        (void)(a + b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Mismatch);
    }
    EXPECT_THROW((void)(a + c), Error);
}

TEST(AvgTranslate, Examples) {
    const auto lat = Carrier::lattice(1, 5);
    const auto k = plus_minus(lat);
    EXPECT_DOUBLE_EQ(avg_translate(FuncRep::constant(lat, v1(4)), k, {1}, {3})[0], 4.0);
    EXPECT_DOUBLE_EQ(avg_translate(quad1(lat, 1, 0, 0), k, {1}, {2})[0], 5.0);
    const auto z5 = Carrier::modular(5, 1);
    EXPECT_DOUBLE_EQ(avg_translate(indicator(z5, {0}), plus_minus(z5), {1}, {1})[0], 0.5);
}

TEST(Symmetrize, Examples) {
    const auto lat = Carrier::lattice(1, 6);
    const auto s = symmetrize(quad1(lat, 2, 3, 1), plus_minus(lat));
    for (const auto& x : lat.points()) EXPECT_DOUBLE_EQ(s.eval(x)[0], 2.0 * x[0] * x[0] + 1.0);
    const auto f = quad1(lat, 2, 3, 1, {{{2}, v1(1.0)}});
    const auto same = symmetrize(f, trivial(lat));
    for (const auto& x : lat.points()) EXPECT_DOUBLE_EQ(same.eval(x)[0], f.eval(x)[0]);

    const auto z5 = Carrier::modular(5, 1);
    const auto t = symmetrize(indicator(z5, {1}), plus_minus(z5));
    EXPECT_DOUBLE_EQ(t.eval({1})[0], 0.5);
    EXPECT_DOUBLE_EQ(t.eval({-1})[0], 0.5);
    EXPECT_DOUBLE_EQ(t.eval({0})[0], 0.0);
    EXPECT_DOUBLE_EQ(t.eval({2})[0], 0.0);
}

TEST(Symmetrize, IdempotentOnRandomTables) {
    SplitMix64 rng(17);
    const auto c = Carrier::modular(7, 2);
    const auto k = build_group({Automorphism(2, {0, 1, 1, 0}), Automorphism::negation(2)}, c);
    for (int n = 0; n < 10; ++n) {
        const auto f = random_table(rng, c, 2);
        const auto s = symmetrize(f, k);
        EXPECT_LE(sup_distance(symmetrize(s, k), s, BetaParam(1.0)), 1e-14);
    }
}

TEST(Residuals, PexiderExamples) {
    const auto lat = Carrier::lattice(1, 4);
    const auto k = plus_minus(lat);
    const BetaParam beta(1.0);
    const auto q = quad1(lat, 2, 0, 0), j = quad1(lat, 0, 3, 0);
    const auto triple = make_exact_triple(q, j, v1(0.5), v1(0.5), k, beta);
    for (const auto& x : lat.points())
        for (const auto& y : lat.points()) EXPECT_EQ(residual_pexider(triple.f, triple.g, triple.h, k, x, y, beta), 0.0);

    // constant shift of g by c shows up as |c|^beta
    const auto shifted = triple.g + FuncRep::constant(lat, v1(0.25));
    EXPECT_DOUBLE_EQ(residual_pexider(triple.f, shifted, triple.h, k, {1}, {2}, BetaParam(0.5)), 0.5);

    // noise on f only: beta-norm of the K-average of n(x + k.y)
    const auto noisy = triple.f + quad1(lat, 0, 0, 0, {{{3}, v1(0.4)}});
    EXPECT_NEAR(residual_pexider(noisy, triple.g, triple.h, k, {1}, {2}, beta), 0.2, 1e-12);
    EXPECT_DOUBLE_EQ(residual_pexider(noisy, triple.g, triple.h, k, {1}, {1}, beta), 0.0);
}

TEST(Residuals, LawExamples) {
    const auto lat = Carrier::lattice(2, 3);
    const auto k = plus_minus(lat);
    const BetaParam beta(1.0);
    PolyPlusTable qt{v1(0), Eigen::MatrixXd::Zero(1, 2), {(Eigen::Matrix2d() << 1, 2, 2, -3).finished()}, {}};
    PolyPlusTable jt{v1(0), (Eigen::MatrixXd(1, 2) << 4, -1).finished(), {Eigen::Matrix2d::Zero()}, {}};
    const auto q = FuncRep::poly(lat, qt), j = FuncRep::poly(lat, jt);
    const auto one = FuncRep::constant(lat, v1(1));
    for (const auto& x : lat.points()) {
        EXPECT_LE(side_condition_defect(j, k, x, beta), 1e-12);
        for (const auto& y : lat.points()) {
            EXPECT_LE(residual_quadratic(q, k, x, y, beta), 1e-12);
            EXPECT_LE(residual_jensen(j, k, x, y, beta), 1e-12);
            EXPECT_EQ(residual_jensen(one, k, x, y, beta), 0.0);
        }
    }
    EXPECT_GT(side_condition_defect(one, k, {1, 0}, beta), 0.5);
    EXPECT_GT(residual_quadratic(one, k, {0, 0}, {0, 0}, beta), 0.0);  // forces q(0) = 0
}

TEST(Distance, Examples) {
    const auto z5 = Carrier::modular(5, 1);
    const BetaParam beta(1.0);
    const auto g = indicator(z5, {1});
    EXPECT_EQ(sup_weighted_distance(g, g, [](const Point&) { return 1.0; }, beta).value, 0.0);

    const double theta = 0.1;
    const auto shifted = g + FuncRep::constant(z5, v1(3 * theta));
    EXPECT_NEAR(sup_weighted_distance(shifted, g, [&](const Point&) { return 3 * theta; }, beta).value, 1.0, 1e-15);

    const auto w = [](const Point& x) { return x[0] == 1 ? 0.0 : 1.0; };
    const auto d = sup_weighted_distance(g, FuncRep::zero(z5, 1), w, beta);
    EXPECT_TRUE(std::isinf(d.value));
    EXPECT_EQ(d.worst_x, Point{1});
    // 0/0 counts as 0
    EXPECT_EQ(sup_weighted_distance(g, g, w, beta).value, 0.0);
}
