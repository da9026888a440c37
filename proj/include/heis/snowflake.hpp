#pragma once

#include <cstdint>
#include <string>

#include "heis/core.hpp"

namespace heis {

enum class SnowflakeVariant { Line, Circle };

// Calibrated construction parameters (sweep documented in the README).
namespace snowcal {
inline constexpr double kTheta = 0.275;        // midpoint displacement factor
inline constexpr int kCircleSides = 8;         // polygon start of the circle variant
inline constexpr double kCircleRadius = 2.26;  // balances expansion and contraction
inline constexpr int kDefaultDepth = 12;
inline constexpr int kMaxDepth = 23;
inline constexpr double kHolderBound = 7.5;    // pinned bound on the measured Hoelder distortion (depth 12)
inline constexpr double kMarginBound = 0.15;   // pinned lower bound on the margin ratio
}  // namespace snowcal

// A depth-truncated 1/2-snowflake curve. Line variant: parameter in R, with
// Phi(t + 1) = Phi(t) + (0,0,1) and Phi([0,1]) inside the unit cube. Circle variant:
// parameter is an angle, 2*pi periodic.
class SnowflakeCurve {
 public:
  SnowflakeVariant variant() const { return variant_; }
  int depth() const { return depth_; }
  int generations() const { return 2 * depth_; }
  double theta() const { return theta_; }
  double resolution() const { return std::ldexp(1.0, -2 * depth_); }
  double measured_L() const { return measured_L_; }

  Vec3 operator()(double t) const;
  // Line variant only: the base curve on [0,1] (t clamped).
  Vec3 unit(double t) const;
  // Parameter rounded to the vertex grid of the truncated construction.
  double snap(double t) const;

  std::string export_csv(int samples) const;

 private:
  friend SnowflakeCurve build_snowflake_line(int depth, double theta);
  friend SnowflakeCurve build_snowflake_circle(int depth, double theta);

  Vec3 descend(const Vec3& a, const Vec3& b, const Vec3& n, double scale, double t) const;

  SnowflakeVariant variant_ = SnowflakeVariant::Line;
  int depth_ = 0;
  double theta_ = snowcal::kTheta;
  double measured_L_ = 1;
};

SnowflakeCurve build_snowflake_line(int depth = snowcal::kDefaultDepth, double theta = snowcal::kTheta);
SnowflakeCurve build_snowflake_circle(int depth = snowcal::kDefaultDepth, double theta = snowcal::kTheta);

struct HolderStats {
  double upper = 0;  // sup |Phi(s)-Phi(t)| / sep^{1/2}
  double lower = 0;  // inf |Phi(s)-Phi(t)| / sep^{1/2}
  double distortion() const { return std::max(upper, 1.0 / lower); }
};

// Stratified dyadic sampling of separations in [max(resolution, min_sep), diameter];
// separation is |s-t| on the line and the chord |e^{is}-e^{it}| on the circle.
HolderStats holder_stats(const SnowflakeCurve& c, long pairs, std::uint64_t seed = 1, double min_sep = 0);

double measure_holder_distortion(const SnowflakeCurve& c, long pairs, std::uint64_t seed = 1,
                                 double min_sep = 0);

// min over sampled t in (0,1) of dist(Phi(t), boundary of cube) / dist(Phi(t), endpoints).
double margin_ratio(const SnowflakeCurve& c, long samples, std::uint64_t seed = 1);

// Shared depth-12 curves, built once.
const SnowflakeCurve& default_line_snowflake();
const SnowflakeCurve& default_circle_snowflake();

}  // namespace heis
