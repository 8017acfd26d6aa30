#include <gtest/gtest.h>

#include "fraclab/domain.hpp"
#include "fraclab/errors.hpp"

namespace fraclab {
namespace {

TEST(Domain, SpacingAndNodes) {
    const Domain d = Domain::make(0.0, 1.0, 3);
    EXPECT_DOUBLE_EQ(d.h, 0.25);
    EXPECT_DOUBLE_EQ(d.node(0), 0.25);
    EXPECT_DOUBLE_EQ(d.node(2), 0.75);
    EXPECT_EQ(d.nodes().size(), 3u);
}

TEST(Domain, RejectsBadInput) {
    EXPECT_THROW(Domain::make(1.0, 0.0, 3), ParameterError);
    EXPECT_THROW(Domain::make(0.0, 1.0, 0), ParameterError);
    EXPECT_THROW(FractionalOrder(0.0), ParameterError);
    EXPECT_THROW(FractionalOrder(2.5), ParameterError);
    EXPECT_NO_THROW(FractionalOrder(2.0));
}

TEST(Domain, NearestNodeTiesGoLeft) {
    const Domain d = Domain::make(0.0, 1.0, 3);
    EXPECT_EQ(d.nearest_node(0.5), 1u);
    EXPECT_EQ(d.nearest_node(0.375), 0u);
    EXPECT_EQ(d.nearest_node(0.01), 0u);
    EXPECT_THROW(d.nearest_node(1.0), ParameterError);
}

TEST(Domain, InterpolationVanishesOutside) {
    const Domain d = Domain::make(0.0, 1.0, 3);
    Vector v(3);
    v << 1.0, 2.0, 1.0;
    EXPECT_DOUBLE_EQ(interpolate(d, v, 0.5), 2.0);
    EXPECT_DOUBLE_EQ(interpolate(d, v, 0.125), 0.5);
    EXPECT_DOUBLE_EQ(interpolate(d, v, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(interpolate(d, v, -3.0), 0.0);
    EXPECT_DOUBLE_EQ(interpolate(d, v, 1.5), 0.0);
}

}  // namespace
}  // namespace fraclab
