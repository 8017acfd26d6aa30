#include <cmath>

#include <gtest/gtest.h>

#include "fraclab/errors.hpp"
#include "fraclab/nonlinearity.hpp"

namespace fraclab {
namespace {

std::vector<double> log_mesh() {
    std::vector<double> u;
    for (int k = 0; k < 1000; ++k) u.push_back(std::pow(10.0, -8.0 + 16.0 * k / 999.0));
    return u;
}

struct Case {
    NonlinearityKind kind;
    double gamma, c1, c2;
    bool monotone;
};

class Growth : public ::testing::TestWithParam<Case> {};

TEST_P(Growth, StaysBetweenConstants) {
    const Case c = GetParam();
    const Nonlinearity g(c.kind, c.gamma, c.c1, c.c2, c.monotone);
    double previous = INFINITY;
    for (double u : log_mesh()) {
        const double scaled = g(u) * std::pow(u, c.gamma);
        EXPECT_GE(scaled, c.c1 * (1.0 - 1e-12)) << u;
        EXPECT_LE(scaled, c.c2 * (1.0 + 1e-12)) << u;
        if (c.monotone) EXPECT_LE(g(u), previous) << u;
        previous = g(u);
    }
}

INSTANTIATE_TEST_SUITE_P(Kinds, Growth,
                         ::testing::Values(Case{NonlinearityKind::pure_power, 1.0, 2.0, 2.0, true},
                                           Case{NonlinearityKind::pure_power, 0.05, 1.0, 1.0, true},
                                           Case{NonlinearityKind::shifted_power, 0.5, 1.0, 3.0, true},
                                           Case{NonlinearityKind::shifted_power, 2.0, 0.5, 0.7, true},
                                           Case{NonlinearityKind::oscillating_power, 1.0, 1.0, 2.0, false}));

TEST(Nonlinearity, PowerFastPathsAgreeWithPow) {
    for (double gamma : {1.0, 2.0, 0.7}) {
        const Nonlinearity g = Nonlinearity::power(gamma, 1.5);
        for (double u : {1e-3, 0.4, 7.0}) EXPECT_NEAR(g(u), 1.5 * std::pow(u, -gamma), 1e-14 * g(u));
    }
}

TEST(Nonlinearity, OscillatingIsNotMonotone) {
    const Nonlinearity g(NonlinearityKind::oscillating_power, 1.0, 1.0, 3.0, false);
    bool increased = false;
    double previous = INFINITY;
    for (double u : log_mesh()) {
        if (g(u) > previous) increased = true;
        previous = g(u);
    }
    EXPECT_TRUE(increased);
}

TEST(Nonlinearity, RejectsInvalidParameters) {
    EXPECT_THROW(Nonlinearity::power(0.0), ParameterError);
    EXPECT_THROW(Nonlinearity::power(1.0, -1.0), ParameterError);
    EXPECT_THROW(Nonlinearity(NonlinearityKind::shifted_power, 1.0, 2.0, 1.0, true), ParameterError);
    EXPECT_THROW(Nonlinearity(NonlinearityKind::oscillating_power, 1.0, 1.0, 2.0, true), ParameterError);
    EXPECT_THROW(parse_nonlinearity_kind("cubic"), ParameterError);
}

TEST(Nonlinearity, KindNamesRoundTrip) {
    for (auto kind : {NonlinearityKind::pure_power, NonlinearityKind::shifted_power, NonlinearityKind::oscillating_power})
        EXPECT_EQ(parse_nonlinearity_kind(to_string(kind)), kind);
}

TEST(Nonlinearity, WithExponentKeepsShape) {
    const Nonlinearity g(NonlinearityKind::shifted_power, 1.0, 1.0, 2.0, true);
    const Nonlinearity h = g.with_exponent(2.0);
    EXPECT_EQ(h.kind(), g.kind());
    EXPECT_EQ(h.gamma(), 2.0);
    EXPECT_EQ(h.c2(), 2.0);
}

}  // namespace
}  // namespace fraclab
