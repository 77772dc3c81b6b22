#include <gtest/gtest.h>

#include "pexstab/error.hpp"
#include "support.hpp"

using namespace pexstab;
using namespace testing_support;

TEST(Carrier, ModularEnumerationIsCenteredResidueOrder) {
    const auto c = Carrier::modular(5, 1);
    ASSERT_EQ(c.size(), 5u);
    EXPECT_EQ(c.points()[0], Point{0});
    EXPECT_EQ(c.points()[1], Point{1});
    EXPECT_EQ(c.points()[2], Point{2});
    EXPECT_EQ(c.points()[3], Point{-2});
    EXPECT_EQ(c.points()[4], Point{-1});
    EXPECT_EQ(c.reduce({4}), Point{-1});
    EXPECT_EQ(Carrier::modular(4, 1).reduce({2}), Point{2});  // (-m/2, m/2]
    EXPECT_EQ(Carrier::modular(4, 1).reduce({-2}), Point{2});
}

TEST(Carrier, ModularFirstCoordinateSlowest) {
    const auto c = Carrier::modular(3, 2);
    ASSERT_EQ(c.size(), 9u);
    EXPECT_EQ(c.points()[1], (Point{0, 1}));
    EXPECT_EQ(c.points()[3], (Point{1, 0}));
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c.index_of(c.points()[i]), i);
}

TEST(Carrier, LatticeWindow) {
    const auto c = Carrier::lattice(2, 2);
    EXPECT_EQ(c.size(), 25u);
    EXPECT_EQ(c.points().front(), (Point{-2, -2}));
    EXPECT_EQ(c.points().back(), (Point{2, 2}));
    EXPECT_TRUE(c.contains({2, -2}));
    EXPECT_FALSE(c.contains({3, 0}));
    EXPECT_FALSE(c.index_of({0, 3}).has_value());
    EXPECT_EQ(c.add({2, 2}, {2, 2}), (Point{4, 4}));  // no wraparound on the lattice
}

TEST(Carrier, RejectsBadParameters) {
    EXPECT_THROW(Carrier::modular(1, 1), Error);
    EXPECT_THROW(Carrier::lattice(0, 3), Error);
    EXPECT_THROW(Carrier::lattice(2, 0), Error);
}

TEST(Automorphism, Action) {
    const auto c = Carrier::modular(5, 2);
    EXPECT_EQ(act(swap2(), {1, 2}, c), (Point{2, 1}));
    EXPECT_EQ(act(Automorphism::negation(2), {2, 3}, c), c.reduce({3, 2}));
    EXPECT_EQ(act(Automorphism::identity(2), {1, -2}, c), (Point{1, -2}));
}

TEST(Automorphism, Determinant) {
    EXPECT_EQ(Automorphism(2, {1, 2, 2, 4}).determinant(), 0);
    EXPECT_EQ(swap2().determinant(), -1);
    EXPECT_EQ(Automorphism(3, {2, 0, 0, 0, 3, 0, 0, 0, 1}).determinant(), 6);
}

TEST(Norm, Examples) {
    EXPECT_DOUBLE_EQ(point_norm({0, 0}, Carrier::lattice(2, 5)), 0.0);
    EXPECT_DOUBLE_EQ(point_norm({3, 4}, Carrier::lattice(2, 5)), 5.0);
    EXPECT_DOUBLE_EQ(point_norm({4}, Carrier::modular(5, 1)), 1.0);
}

TEST(Group, Negation) {
    const auto c = Carrier::modular(5, 2);
    const auto k = plus_minus(c);
    ASSERT_EQ(k.order(), 2u);
    EXPECT_EQ(k.elements()[0], normalize(Automorphism::identity(2), c));
}

TEST(Group, EmptyGeneratorsGiveIdentity) {
    const auto k = trivial(Carrier::lattice(3, 1));
    ASSERT_EQ(k.order(), 1u);
    EXPECT_EQ(k.elements()[0], Automorphism::identity(3));
}

TEST(Group, NonAbelianRejected) {
    const Automorphism p12(3, {0, 1, 0, 1, 0, 0, 0, 0, 1});
    const Automorphism p23(3, {1, 0, 0, 0, 0, 1, 0, 1, 0});
    try {
        build_group({p12, p23}, Carrier::lattice(3, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonAbelian);
    }
}

TEST(Group, SingularGeneratorRejected) {
    try {
        build_group({Automorphism(2, {1, 2, 2, 4})}, Carrier::modular(5, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonInvertible);
    }
    // det 2 is a unit mod 5 but not on the lattice
    EXPECT_NO_THROW(build_group({Automorphism(1, {2})}, Carrier::modular(5, 1)));
    EXPECT_THROW(build_group({Automorphism(1, {2})}, Carrier::lattice(1, 3)), Error);
}

TEST(Group, InfiniteOrderOverflows) {
    try {
        build_group({Automorphism(2, {1, 1, 0, 1})}, Carrier::lattice(2, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ClosureOverflow);
    }
}

TEST(Group, MultiplicativeUnitsModSeven) {
    // 3 generates the full unit group of Z_7.
    const auto k = build_group({Automorphism(1, {3})}, Carrier::modular(7, 1));
    EXPECT_EQ(k.order(), 6u);
    EXPECT_EQ(k.orbit({1}).size(), 6u);
    EXPECT_EQ(k.orbit({0}).size(), 1u);
}

TEST(Doubling, Examples) {
    const auto lat = Carrier::lattice(2, 4);
    const auto pm = check_doubling(lat, plus_minus(lat));
    EXPECT_TRUE(pm.holds);
    EXPECT_DOUBLE_EQ(pm.max_ratio, 2.0);
    EXPECT_TRUE(check_doubling(lat, build_group({swap2()}, lat)).holds);
    const auto z5 = Carrier::modular(5, 1);
    EXPECT_TRUE(check_doubling(z5, trivial(z5)).holds);
}

TEST(Doubling, FailsForStretchingGroup) {
    // k = 5 has order 4 on Z_13, and 1 + 5 = 6 > 2.
    const auto c = Carrier::modular(13, 1);
    EXPECT_FALSE(check_doubling(c, build_group({Automorphism(1, {5})}, c)).holds);
}
