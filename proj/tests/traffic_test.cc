#include "fluidnet/traffic.h"

#include <gtest/gtest.h>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

TEST(TrafficProfile, Constant) {
  TrafficProfile p = TrafficProfile::constant(0.5);
  EXPECT_DOUBLE_EQ(p.fraction(3.7), 0.5);
  EXPECT_DOUBLE_EQ(p.integral(2.0), 1.0);
  EXPECT_DOUBLE_EQ(p.integral(-2.0), -1.0);
}

TEST(TrafficProfile, SquareHalves) {
  TrafficProfile p = TrafficProfile::square(0.55, 0.55, 1.0);
  EXPECT_DOUBLE_EQ(p.fraction(0.25), 1.1);
  EXPECT_DOUBLE_EQ(p.fraction(0.75), 0.0);
  // jump: mean of one-sided limits
  EXPECT_DOUBLE_EQ(p.fraction(0.5), 0.55);
  EXPECT_DOUBLE_EQ(p.right_limit(0.5), 0.0);
  EXPECT_DOUBLE_EQ(p.right_limit(1.0), 1.1);
}

TEST(TrafficProfile, SquareIntegral) {
  TrafficProfile p = TrafficProfile::square(0.55, 0.55, 1.0);
  EXPECT_NEAR(p.integral(0.5), 0.55, 1e-12);
  EXPECT_NEAR(p.integral(1.0), 0.55, 1e-12);
  EXPECT_NEAR(p.integral(2.25), 1.1 + 0.275, 1e-12);
  TrafficProfile q = TrafficProfile::square(0.55, -0.55, 1.0);
  EXPECT_NEAR(q.integral(0.75), 0.275, 1e-12);
}

TEST(TrafficProfile, TimeOfIntegralInvertsIntegral) {
  TrafficProfile p = TrafficProfile::square(0.55, 0.55, 1.0, 0.1);
  for (double y : {0.1, 0.6, 1.3}) {
    double t = p.time_of_integral(y, 0.2);
    EXPECT_NEAR(p.integral(t) - p.integral(0.2), y, 1e-9);
  }
}

TEST(TrafficProfile, RejectsNegativeLoad) {
  EXPECT_THROW(TrafficProfile::square(0.2, 0.5, 1.0).validate(), ConfigError);
  EXPECT_THROW(TrafficProfile::square(0.5, 0.2, 0.0).validate(), ConfigError);
  EXPECT_THROW(TrafficProfile::constant(-0.1).validate(), ConfigError);
}

}  // namespace
}  // namespace fluidnet
