#include "fluidnet/history.h"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

Trajectory ramp() {
  // v = 1.5 t on [0, 4]
  Trajectory tr(0.0);
  for (int k = 0; k <= 4; ++k) tr.record(k, 1.5 * k);
  return tr;
}

TEST(Trajectory, InterpolatesBetweenSamples) {
  Trajectory tr = ramp();
  EXPECT_DOUBLE_EQ(tr.eval(2.5), 3.75);
  EXPECT_DOUBLE_EQ(tr.eval(4.0), 6.0);
}

TEST(Trajectory, InitialValueBeforeFirstSample) {
  Trajectory tr(7.0);
  tr.record(1.0, 2.0);
  tr.record(2.0, 4.0);
  EXPECT_DOUBLE_EQ(tr.eval(-3.0), 7.0);
  EXPECT_DOUBLE_EQ(tr.eval(0.5), 7.0);
}

TEST(Trajectory, ReadPastLastSampleThrows) {
  Trajectory tr = ramp();
  EXPECT_THROW(tr.eval(4.1), CausalityError);
  EXPECT_NO_THROW(tr.eval(4.0 + 1e-11));
}

TEST(Trajectory, RecordMustAdvanceTime) {
  Trajectory tr = ramp();
  EXPECT_THROW(tr.record(4.0, 1.0), CausalityError);
  EXPECT_THROW(tr.record(3.0, 1.0), CausalityError);
  EXPECT_THROW(tr.record(5.0, std::nan("")), SimulationError);
}

TEST(Trajectory, IntegrateMatchesClosedForm) {
  Trajectory tr = ramp();
  // int_a^b 1.5 t dt = 0.75 (b^2 - a^2)
  EXPECT_NEAR(tr.integrate(0.0, 4.0), 12.0, 1e-12);
  EXPECT_NEAR(tr.integrate(0.5, 3.25), 0.75 * (3.25 * 3.25 - 0.25), 1e-12);
  EXPECT_THROW(tr.integrate(3.25, 0.5), std::invalid_argument);
}

TEST(Trajectory, IntegrateReachesIntoPreHistory) {
  Trajectory tr(2.0);
  tr.record(0.0, 2.0);
  tr.record(1.0, 4.0);
  // constant 2 on [-1, 0], then trapezoid 3 on [0, 1]
  EXPECT_NEAR(tr.integrate(-1.0, 1.0), 5.0, 1e-12);
}

TEST(Trajectory, InvertMonotone) {
  Trajectory tr = ramp();
  EXPECT_NEAR(tr.invert_monotone(3.0), 2.0, 1e-12);
  EXPECT_NEAR(tr.invert_monotone(0.75), 0.5, 1e-12);
  EXPECT_THROW(tr.invert_monotone(6.5), CausalityError);
}

TEST(Trajectory, InvertFlatStretchTakesLeftEdge) {
  Trajectory tr(0.0);
  tr.record(0.0, 0.0);
  tr.record(1.0, 1.0);
  tr.record(2.0, 1.0);
  tr.record(3.0, 2.0);
  EXPECT_DOUBLE_EQ(tr.invert_monotone(1.0), 1.0);
}

TEST(Trajectory, PruneKeepsRecentReads) {
  Trajectory tr(0.0);
  for (int k = 0; k <= 100; ++k) tr.record(0.1 * k, k);
  double before = tr.integrate(5.0, 10.0);
  tr.prune_before(5.0);
  EXPECT_LT(tr.size(), 60u);
  EXPECT_NEAR(tr.eval(5.0), 50.0, 1e-9);
  EXPECT_NEAR(tr.integrate(5.0, 10.0), before, 1e-9);
  EXPECT_THROW(tr.eval(1.0), CausalityError);
}

TEST(PacketCounter, CountsIntegral) {
  Trajectory flow(100.0);
  flow.record(0.0, 100.0);
  flow.record(2.0, 100.0);
  PacketCounter n(flow);
  EXPECT_NEAR(n(1.5, 0.5), 100.0, 1e-9);
  EXPECT_NEAR(n(0.0, -1.0), 100.0, 1e-9);
}

}  // namespace
}  // namespace fluidnet
