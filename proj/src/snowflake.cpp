#include "heis/snowflake.hpp"

#include <algorithm>
#include <numbers>

#include <Eigen/Geometry>

#include "heis/harness.hpp"
#include "heis/report_io.hpp"
#include "heis/rng.hpp"

namespace heis {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
const Vec3 kStart(0.5, 0.5, 0.0);
const Vec3 kEnd(0.5, 0.5, 1.0);

Vec3 orthonormal_to(Vec3 n, const Vec3& d) {
  const Vec3 u = d.normalized();
  n -= n.dot(u) * u;
  return n.normalized();
}

double chord(double s, double t) { return 2.0 * std::abs(std::sin(0.5 * (s - t))); }

}  // namespace

Vec3 SnowflakeCurve::descend(const Vec3& a0, const Vec3& b0, const Vec3& n0, double scale, double t) const {
  Vec3 a = a0, b = b0, n = n0;
  double h = 1.0;
  for (int g = 0; g < 2 * depth_; ++g) {
    const Vec3 dhat = (b - a).normalized();
    const Vec3 bn = dhat.cross(n);
    const Vec3 m = 0.5 * (a + b) + theta_ * scale * std::sqrt(h) * n;
    h *= 0.5;
    if (t < 0.5) {
      n = orthonormal_to(bn, m - a);
      b = m;
      t = 2.0 * t;
    } else {
      n = orthonormal_to(-bn, b - m);
      a = m;
      t = 2.0 * t - 1.0;
    }
  }
  return (1.0 - t) * a + t * b;
}

Vec3 SnowflakeCurve::unit(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  return descend(kStart, kEnd, Vec3(1, 0, 0), 1.0, t);
}

Vec3 SnowflakeCurve::operator()(double t) const {
  if (!std::isfinite(t)) throw InvalidInput("non-finite snowflake parameter");
  if (variant_ == SnowflakeVariant::Line) {
    if (t >= 0.0 && t <= 1.0) return unit(t);
    const double k = std::floor(t);
    return unit(t - k) + Vec3(0, 0, k);
  }
  const int sides = snowcal::kCircleSides;
  double u = t / kTwoPi;
  u -= std::floor(u);
  double x = u * sides;
  int j = static_cast<int>(std::floor(x));
  if (j >= sides) j = sides - 1;
  const double local = std::clamp(x - j, 0.0, 1.0);
  const double R = snowcal::kCircleRadius;
  const double a0 = kTwoPi * j / sides, a1 = kTwoPi * (j + 1) / sides, am = 0.5 * (a0 + a1);
  const Vec3 pa(R * std::cos(a0), R * std::sin(a0), 0), pb(R * std::cos(a1), R * std::sin(a1), 0);
  const Vec3 outward(std::cos(am), std::sin(am), 0);
  return descend(pa, pb, outward, (pb - pa).norm(), local);
}

double SnowflakeCurve::snap(double t) const {
  const double g = std::ldexp(1.0, 2 * depth_);
  if (variant_ == SnowflakeVariant::Line) return std::round(t * g) / g;
  const double cell = kTwoPi / snowcal::kCircleSides;
  return std::round(t / cell * g) / g * cell;
}

std::string SnowflakeCurve::export_csv(int samples) const {
  if (samples < 2) throw InvalidInput("need at least 2 samples");
  CsvWriter w({"t", "x", "y", "z"});
  const double span = variant_ == SnowflakeVariant::Line ? 1.0 : kTwoPi;
  for (int i = 0; i < samples; ++i) {
    const double t = span * i / (samples - 1);
    const Vec3 p = (*this)(t);
    w.row({t, p[0], p[1], p[2]});
  }
  return w.str();
}

namespace {

void check_depth(int depth) {
  if (depth < 1) throw InvalidInput("snowflake depth must be >= 1");
  if (depth > snowcal::kMaxDepth)
    throw ResourceLimit("snowflake depth " + std::to_string(depth) +
                        " resolves below 64-bit parameter precision");
}

}  // namespace

SnowflakeCurve build_snowflake_line(int depth, double theta) {
  check_depth(depth);
  if (!(theta > 0 && theta < 0.5)) throw InvalidInput("snowflake theta must lie in (0, 1/2)");
  SnowflakeCurve c;
  c.variant_ = SnowflakeVariant::Line;
  c.depth_ = depth;
  c.theta_ = theta;
  const double holder = measure_holder_distortion(c, 20000, 7);
  const double margin = margin_ratio(c, 20000, 7);
  c.measured_L_ = std::max(holder, 1.0 / margin);
  return c;
}

SnowflakeCurve build_snowflake_circle(int depth, double theta) {
  check_depth(depth);
  if (!(theta > 0 && theta < 0.5)) throw InvalidInput("snowflake theta must lie in (0, 1/2)");
  SnowflakeCurve c;
  c.variant_ = SnowflakeVariant::Circle;
  c.depth_ = depth;
  c.theta_ = theta;
  c.measured_L_ = measure_holder_distortion(c, 20000, 7);
  return c;
}

HolderStats holder_stats(const SnowflakeCurve& c, long pairs, std::uint64_t seed, double min_sep) {
  if (pairs < 100) throw InvalidInput("at least 100 pairs are required");
  const bool line = c.variant() == SnowflakeVariant::Line;
  ParamDomain dom = line ? ParamDomain::interval(0, 1) : ParamDomain::interval(0, kTwoPi);
  double max_sep = 1.0;
  double res = c.resolution();
  if (!line) {
    dom.periodic[0] = true;
    dom.separation = [](const Param& p, const Param& q) { return chord(p[0], q[0]); };
    max_sep = 2.0;
    res *= kTwoPi / snowcal::kCircleSides;
  }
  const double floor_sep = std::max(res, min_sep);
  const int buckets = std::max(3, static_cast<int>(std::floor(std::log2(max_sep / floor_sep))));
  SampleConfig cfg;
  cfg.buckets = buckets;
  cfg.quota = static_cast<int>(std::max<long>(10, pairs / buckets));
  cfg.max_sep = max_sep;
  cfg.seed = seed;
  auto snap = [&](const Param& p) { return c.snap(p[0]); };
  DistanceFn source = [&](const Param& p, const Param& q) {
    const double s = snap(p), t = snap(q);
    return std::sqrt(line ? std::abs(s - t) : chord(s, t));
  };
  DistanceFn target = [&](const Param& p, const Param& q) { return (c(snap(p)) - c(snap(q))).norm(); };
  const DistortionReport r = measure_distortion("snowflake", dom, cfg, source, target);
  return {r.L_lower, 1.0 / r.L_upper};
}

double measure_holder_distortion(const SnowflakeCurve& c, long pairs, std::uint64_t seed, double min_sep) {
  return holder_stats(c, pairs, seed, min_sep).distortion();
}

double margin_ratio(const SnowflakeCurve& c, long samples, std::uint64_t seed) {
  if (c.variant() != SnowflakeVariant::Line) throw InvalidInput("margin is defined for the line variant");
  CounterRng rng(seed, 0x6d617267);
  double worst = std::numeric_limits<double>::infinity();
  auto eval = [&](double t) {
    t = c.snap(t);
    if (t <= 0 || t >= 1) return;
    const Vec3 p = c.unit(t);
    double db = 1e300;
    for (int k = 0; k < 3; ++k) db = std::min({db, p[k], 1.0 - p[k]});
    const double de = std::min((p - kStart).norm(), (p - kEnd).norm());
    worst = std::min(worst, db / de);
  };
  // Half the samples uniform, half log-stratified towards the endpoints.
  const double res = c.resolution();
  for (long i = 0; i < samples; ++i) {
    if (i % 2 == 0) {
      eval(rng.uniform());
    } else {
      const double t = std::exp2(std::log2(res) * rng.uniform());
      eval(rng.uniform() < 0.5 ? t : 1.0 - t);
    }
  }
  return worst;
}

const SnowflakeCurve& default_line_snowflake() {
  static const SnowflakeCurve c = build_snowflake_line(snowcal::kDefaultDepth);
  return c;
}

const SnowflakeCurve& default_circle_snowflake() {
  static const SnowflakeCurve c = build_snowflake_circle(snowcal::kDefaultDepth);
  return c;
}

}  // namespace heis
