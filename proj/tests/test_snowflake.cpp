#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "heis/errors.hpp"
#include "heis/rng.hpp"
#include "heis/snowflake.hpp"

using namespace heis;

TEST(SnowflakeLine, Endpoints) {
  const auto& c = default_line_snowflake();
  EXPECT_NEAR((c(0) - Vec3(0.5, 0.5, 0)).norm(), 0, 1e-15);
  EXPECT_NEAR((c(1) - Vec3(0.5, 0.5, 1)).norm(), 0, 1e-15);
  const double d = (c(0) - c(1)).norm();
  EXPECT_GE(d, 1 / c.measured_L());
  EXPECT_LE(d, c.measured_L());
}

TEST(SnowflakeLine, StaysInUnitCube) {
  const auto& c = default_line_snowflake();
  CounterRng r(3);
  for (int i = 0; i < 20000; ++i) {
    const Vec3 p = c.unit(r.uniform());
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(p[k], 0);
      EXPECT_LE(p[k], 1);
    }
  }
}

TEST(SnowflakeLine, PeriodicExtensionExact) {
  const auto& c = default_line_snowflake();
  CounterRng r(5);
  // Dyadic parameters keep t and t + 1 on the same fractional part; the planar
  // components then agree bit for bit and z differs by one rounded integer shift.
  for (int i = 0; i < 2000; ++i) {
    const double t = std::ldexp(std::floor(r.uniform(-3, 3) * 0x1p24), -24);
    const Vec3 a = c(t), b = c(t + 1);
    EXPECT_EQ(a[0], b[0]) << t;
    EXPECT_EQ(a[1], b[1]) << t;
    EXPECT_EQ(b[2], std::floor(t + 1) + c.unit(t - std::floor(t))[2]) << t;
    EXPECT_EQ(a[2], std::floor(t) + c.unit(t - std::floor(t))[2]) << t;
  }
}

TEST(SnowflakeLine, HolderBoundPinned) {
  const auto& c = default_line_snowflake();
  const auto s = holder_stats(c, 100000, 1);
  EXPECT_GE(s.distortion(), 1);
  EXPECT_LE(s.distortion(), snowcal::kHolderBound);
  EXPECT_LE(c.measured_L(), snowcal::kHolderBound);
}

TEST(SnowflakeLine, EstimateConvergesInSampleSize) {
  const auto& c = default_line_snowflake();
  const double a = measure_holder_distortion(c, 100000, 1), b = measure_holder_distortion(c, 400000, 2);
  EXPECT_LE(std::abs(b - a) / a, 0.02);
}

TEST(SnowflakeLine, DeeperIsNoLooser) {
  for (int d : {10, 12}) {
    const auto shallow = build_snowflake_line(d), deep = build_snowflake_line(d + 2);
    const double a = measure_holder_distortion(shallow, 100000, 1);
    const double b = measure_holder_distortion(deep, 100000, 1, std::ldexp(1.0, -2 * d));
    EXPECT_LE(std::abs(b - a) / a, 0.05) << "depth " << d;
  }
}

TEST(SnowflakeLine, MarginProperty) {
  // dist(Phi(t), boundary) >= c dist(Phi(t), endpoints) at depth >= 8.
  for (int d : {8, 12}) EXPECT_GE(margin_ratio(build_snowflake_line(d), 100000, 1), snowcal::kMarginBound);
}

TEST(SnowflakeLine, DepthLimitsAndParameters) {
  EXPECT_THROW(build_snowflake_line(24), ResourceLimit);
  EXPECT_THROW(build_snowflake_line(0), InvalidInput);
  EXPECT_THROW(build_snowflake_line(8, 0.6), InvalidInput);
  EXPECT_THROW(default_line_snowflake()(NAN), InvalidInput);
  EXPECT_THROW(holder_stats(default_line_snowflake(), 10), InvalidInput);
  EXPECT_EQ(default_line_snowflake().resolution(), std::ldexp(1.0, -24));
}

TEST(SnowflakeLine, SnapIsOnGrid) {
  const auto& c = default_line_snowflake();
  const double t = c.snap(0.123456789);
  EXPECT_EQ(std::fmod(t / c.resolution(), 1.0), 0.0);
  EXPECT_LE(std::abs(t - 0.123456789), c.resolution());
}

TEST(SnowflakeCircle, PeriodicAndAntipodal) {
  const auto& c = default_circle_snowflake();
  CounterRng r(9);
  for (int i = 0; i < 2000; ++i) {
    const double s = r.uniform(0, 2 * M_PI);
    // s + 2 pi is rounded; a 1/2-Hoelder curve turns that shift into its square root.
    const double shift = std::abs((s + 2 * M_PI) - 2 * M_PI - s) + 4e-16;
    EXPECT_LE((c(s) - c(s + 2 * M_PI)).norm(), 2 * snowcal::kHolderBound * std::sqrt(shift));
    // Chord between s and -s is 2|sin s|.
    const double chord = 2 * std::abs(std::sin(s));
    if (chord < 1e-3) continue;
    const double q = (c(s) - c(-s)).norm() / std::sqrt(chord);
    EXPECT_GE(q, 1 / c.measured_L() * 0.99);
    EXPECT_LE(q, c.measured_L() * 1.01);
  }
}

TEST(SnowflakeCircle, HolderBound) {
  const auto& c = default_circle_snowflake();
  EXPECT_LE(measure_holder_distortion(c, 100000, 3), snowcal::kHolderBound);
  EXPECT_THROW(margin_ratio(c, 100), InvalidInput);
}

TEST(SnowflakeLine, CsvExport) {
  const std::string csv = default_line_snowflake().export_csv(11);
  std::istringstream in(csv);
  std::string line;
  int n = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x,y,z");
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 11);
}
