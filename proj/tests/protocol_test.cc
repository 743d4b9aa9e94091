#include "fluidnet/protocol.h"

#include <gtest/gtest.h>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

TEST(Fast, WindowDerivative) {
  // 0.5 * (200 - 0.01 / 0.11 * 1000)
  EXPECT_NEAR(fast_wdot(1000.0, 0.01, 0.1, {0.5, 200.0}), 54.5454545454545,
              1e-9);
}

TEST(Fast, NoQueueingGrowsAtGammaAlpha) {
  EXPECT_DOUBLE_EQ(fast_wdot(500.0, 0.0, 0.05, {0.5, 200.0}), 100.0);
}

TEST(Fast, FixedPointHoldsAlphaInQueue) {
  // wdot = 0 when w * tau / (T + tau) = alpha, i.e. alpha packets queued.
  double T = 0.1, tau = 0.02, alpha = 200.0;
  double w = alpha * (T + tau) / tau;
  EXPECT_NEAR(fast_wdot(w, tau, T, {0.5, alpha}), 0.0, 1e-9);
}

TEST(Fast, RejectsZeroDelay) {
  EXPECT_THROW(fast_wdot(10.0, 0.0, 0.0, {}), ConfigError);
  EXPECT_THROW(fast_wdot(10.0, 0.0, 0.1, {0.0, 200.0}), ConfigError);
}

WindowSchedule halving() { return {500.0, {{5.0, 250.0}}}; }

TEST(WindowSchedule, RightContinuous) {
  WindowSchedule s = halving();
  EXPECT_DOUBLE_EQ(s.window_at(4.999), 500.0);
  EXPECT_DOUBLE_EQ(s.window_at(5.0), 250.0);
  EXPECT_DOUBLE_EQ(s.sampled_at(5.0), 375.0);
  EXPECT_DOUBLE_EQ(s.sampled_at(6.0), 250.0);
}

TEST(WindowSchedule, Validation) {
  WindowSchedule bad{100.0, {{2.0, 50.0}, {1.0, 60.0}}};
  EXPECT_THROW(bad.validate(), ConfigError);
  WindowSchedule negative{100.0, {{2.0, -1.0}}};
  EXPECT_THROW(negative.validate(), ConfigError);
  EXPECT_NO_THROW(halving().validate());
}

TEST(ScheduledWdot, StepLandsOnNearestTickOnce) {
  WindowSchedule s{50.0, {{3.00004, 150.0}}};
  const double dt = 1e-4;
  double total = 0.0;
  int hits = 0;
  for (long k = 29990; k <= 30010; ++k) {
    ScheduledSample smp = scheduled_wdot(s, k * dt, dt);
    if (smp.impulse != 0.0) {
      ++hits;
      EXPECT_EQ(k, 30000);
    }
    total += smp.impulse;
  }
  EXPECT_EQ(hits, 1);
  EXPECT_DOUBLE_EQ(total, 100.0);
  EXPECT_DOUBLE_EQ(scheduled_wdot(s, 3.1, dt).window, 150.0);
}

}  // namespace
}  // namespace fluidnet
