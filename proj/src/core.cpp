#include "heis/core.hpp"

#include <algorithm>

namespace heis {

namespace {

void require_finite(const HPoint& p) {
  if (!p.finite()) throw InvalidInput("non-finite Heisenberg point");
}

}  // namespace

HPoint group_mul(const HPoint& p, const HPoint& q) {
  require_finite(p);
  require_finite(q);
  return {p.x + q.x, p.y + q.y, p.z + q.z + 0.5 * (p.x * q.y - q.x * p.y)};
}

HPoint group_inv(const HPoint& p) {
  require_finite(p);
  return {-p.x, -p.y, -p.z};
}

// a b - c d with one rounding (Kahan).
static double diff_of_products(double a, double b, double c, double d) {
  const double w = c * d;
  const double e = std::fma(-c, d, w);
  const double f = std::fma(a, b, -w);
  return f + e;
}

double twisted_dz(const HPoint& p, const HPoint& q) {
  return (p.z - q.z) + 0.5 * diff_of_products(p.x, q.y, q.x, p.y);
}

double d_K(const HPoint& p, const HPoint& q) {
  require_finite(p);
  require_finite(q);
  const double dx = p.x - q.x, dy = p.y - q.y;
  const double r2 = dx * dx + dy * dy;
  const double w = twisted_dz(p, q);
  return std::sqrt(std::sqrt(r2 * r2 + 16.0 * w * w));
}

double d_H(const HPoint& p, const HPoint& q) {
  require_finite(p);
  require_finite(q);
  return std::abs(p.x - q.x) + std::abs(p.y - q.y) + std::sqrt(std::abs(twisted_dz(p, q)));
}

HPoint left_translate(const HPoint& q, const HPoint& p) { return group_mul(q, p); }

HPoint dilate(const HPoint& p, double r) {
  if (!(r > 0) || !std::isfinite(r)) throw InvalidInput("dilation factor must be positive");
  require_finite(p);
  return {r * p.x, r * p.y, r * r * p.z};
}

HPoint rotate_z(const HPoint& p, double theta) {
  require_finite(p);
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * p.x - s * p.y, s * p.x + c * p.y, p.z};
}

HPoint similarity(const HPoint& p, const Similarity& s) {
  switch (s.kind) {
    case Similarity::Kind::LeftTranslate: return left_translate(s.q, p);
    case Similarity::Kind::Dilate: return dilate(p, s.value);
    case Similarity::Kind::RotateZ: return rotate_z(p, s.value);
  }
  return p;
}

Cone::Cone(double a) : alpha(a) {
  if (!(a > 0)) throw InvalidInput("cone aperture must be positive");
}

bool cone_contains(const Cone& cone, const HPoint& base, const HPoint& p) {
  return cone.contains(group_mul(group_inv(base), p));
}

SampledCurve::SampledCurve(std::vector<CurveSample> samples) : s_(std::move(samples)) {
  if (s_.size() < 2) throw InvalidInput("a sampled curve needs at least 2 samples");
  for (std::size_t i = 0; i < s_.size(); ++i) {
    if (!s_[i].p.finite() || !std::isfinite(s_[i].t)) throw InvalidInput("non-finite curve sample");
    if (i > 0 && !(s_[i].t > s_[i - 1].t)) throw InvalidInput("curve parameters must increase strictly");
  }
}

Vec3 SampledCurve::velocity(std::size_t i) const {
  const std::size_t n = s_.size();
  if (n < 3) return (s_[1].p.vec() - s_[0].p.vec()) / (s_[1].t - s_[0].t);
  auto quad = [&](std::size_t a, std::size_t b, std::size_t c, double t) {
    // Derivative of the quadratic through three samples, evaluated at t.
    const double ta = s_[a].t, tb = s_[b].t, tc = s_[c].t;
    const Vec3 pa = s_[a].p.vec(), pb = s_[b].p.vec(), pc = s_[c].p.vec();
    return Vec3(pa * ((2 * t - tb - tc) / ((ta - tb) * (ta - tc))) +
                pb * ((2 * t - ta - tc) / ((tb - ta) * (tb - tc))) +
                pc * ((2 * t - ta - tb) / ((tc - ta) * (tc - tb))));
  };
  if (i == 0) return quad(0, 1, 2, s_[0].t);
  if (i == n - 1) return quad(n - 3, n - 2, n - 1, s_[n - 1].t);
  return quad(i - 1, i, i + 1, s_[i].t);
}

double horizontality_residual(const SampledCurve& curve) {
  if (curve.size() < 3) throw InvalidInput("horizontality residual needs at least 3 samples");
  double worst = 0;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const Vec3 v = curve.velocity(i);
    const HPoint& p = curve[i].p;
    const double r = std::abs(v[2] + 0.5 * v[0] * p.y - 0.5 * p.x * v[1]);
    worst = std::max(worst, r / (std::abs(v[0]) + std::abs(v[1]) + 1.0));
  }
  return worst;
}

}  // namespace heis
