#include "heis/affine.hpp"

#include <cmath>
#include <numbers>

namespace heis {

namespace {

constexpr double kCaseTol = 1e-12;

Vec3 pad3(const Vec3& v) { return v; }

Vec4 pad4(const Vec3& v) { return {v[0], v[1], v[2], 0.0}; }

}  // namespace

LineCase classify_line(const LineSpec& line) {
  if (!line.a.allFinite() || !line.c.allFinite()) throw InvalidInput("non-finite line spec");
  if (std::abs(line.a.norm() - 1.0) > 1e-12) throw InvalidInput("line direction must be a unit vector");
  LineCase lc;
  lc.a = line.a;
  lc.c = line.c;
  if (std::abs(lc.a[1]) > std::abs(lc.a[0])) {
    // (x, y, z) -> (y, x, -z) is a d_H isometry.
    lc.swapped = true;
    lc.a = Vec3(line.a[1], line.a[0], -line.a[2]);
    lc.c = Vec3(line.c[1], line.c[0], -line.c[2]);
  }
  lc.c[2] = 0;  // vertical translations are d_H isometries
  const double a1 = lc.a[0], a2 = lc.a[1], a3 = lc.a[2], c1 = lc.c[0], c2 = lc.c[1];
  lc.kappa = std::abs(a1) + std::abs(a2);
  const double horiz = 2 * a3 + c2 * a1 - c1 * a2;
  if (lc.kappa <= kCaseTol) {
    lc.tag = LineTag::Vertical;
  } else if (std::abs(horiz) <= kCaseTol * (1 + std::abs(c1) + std::abs(c2))) {
    lc.tag = LineTag::Horizontal;
  } else {
    lc.tag = LineTag::Generic;
    lc.lambda = std::sqrt(std::abs(0.5 * horiz));
    lc.mu = lc.kappa * lc.kappa / (lc.lambda * lc.lambda);
  }
  return lc;
}

Vec3 LineEmbedding::operator()(double t) const {
  const SnowflakeCurve& phi = default_line_snowflake();
  switch (case_.tag) {
    case LineTag::Vertical: return phi(t);
    case LineTag::Horizontal: return {case_.kappa * t, 0, 0};
    case LineTag::Generic: {
      const double s = case_.mu * t;
      const double k = std::floor(s);
      return (case_.kappa / case_.mu) * (phi.unit(s - k) + Vec3(0, 0, k));
    }
  }
  return pad3(Vec3::Zero());
}

double LineEmbedding::window() const {
  return case_.tag == LineTag::Generic ? 4.0 / case_.mu : 1.0;
}

double LineEmbedding::source_distance(double s, double t) const {
  const double d = std::abs(s - t);
  if (case_.tag == LineTag::Vertical) return std::sqrt(d);
  return case_.kappa * d + case_.lambda * std::sqrt(d);
}

LineEmbedding embed_line(const LineSpec& line) { return LineEmbedding(line, classify_line(line)); }

PlaneSpec PlaneSpec::vertical(double b, double c) {
  if (!std::isfinite(b) || !std::isfinite(c)) throw InvalidInput("non-finite plane spec");
  PlaneSpec p;
  p.tag = Tag::Vertical;
  if (std::abs(b) < 1) {
    p.b = b;
    p.c = c;
  } else {
    // y = b x + c  <=>  x = y / b - c / b
    p.swapped = true;
    p.b = 1.0 / b;
    p.c = -c / b;
  }
  return p;
}

PlaneSpec PlaneSpec::vertical_in_y(double b, double c) {
  if (!std::isfinite(b) || !std::isfinite(c)) throw InvalidInput("non-finite plane spec");
  if (std::abs(b) >= 1) return vertical(1.0 / b, -c / b);
  PlaneSpec p;
  p.tag = Tag::Vertical;
  p.swapped = true;
  p.b = b;
  p.c = c;
  return p;
}

PlaneSpec PlaneSpec::graph(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) throw InvalidInput("non-finite plane spec");
  PlaneSpec p;
  p.tag = Tag::Graph;
  p.a = a;
  p.b = b;
  p.c = c;
  return p;
}

double PlaneSpec::residual(const HPoint& p) const {
  if (tag == Tag::Graph) return p.z - (a * p.x + b * p.y + c);
  return swapped ? p.x - (b * p.y + c) : p.y - (b * p.x + c);
}

HPoint PlaneSpec::point(double u, double v) const {
  if (tag == Tag::Graph) return plane_isometry(a, b, c, u, v);
  if (!swapped) return {u, b * u + c, v - 0.5 * c * u};
  return {b * u + c, u, 0.5 * c * u - v};
}

HPoint plane_isometry(double a, double b, double c, double x, double y) {
  const double X = x + 2 * b, Y = y - 2 * a;
  return {X, Y, a * X + b * Y + c};
}

Vec2 plane_isometry_inverse(double a, double b, const HPoint& p) { return {p.x - 2 * b, p.y + 2 * a}; }

Vec4 p0_embedding(double x, double y) {
  const double t = std::hypot(x, y);
  if (t == 0) return Vec4::Zero();
  const Vec3 f = t * default_circle_snowflake()(std::atan2(y, x));
  return {f[0], f[1], f[2], t};
}

Vec4 PlaneEmbedding::operator()(const HPoint& p) const {
  const double scale = 1 + std::abs(p.x) + std::abs(p.y) + std::abs(p.z);
  if (std::abs(spec_.residual(p)) > 1e-9 * scale) throw InvalidInput("point is not on the plane");
  if (spec_.tag == PlaneSpec::Tag::Graph) {
    const Vec2 w = plane_isometry_inverse(spec_.a, spec_.b, p);
    return p0_embedding(w[0], w[1]);
  }
  const SnowflakeCurve& phi = default_line_snowflake();
  const double u = spec_.swapped ? p.y : p.x;
  const double zeta = spec_.swapped ? -p.z + 0.5 * spec_.c * p.y : p.z + 0.5 * spec_.c * p.x;
  const Vec3 f = phi(zeta);
  return {u, f[0], f[1], f[2]};
}

PlaneEmbedding embed_plane(const PlaneSpec& plane) { return PlaneEmbedding(plane); }

SimplexEmbedding::SimplexEmbedding(std::vector<Vec3> vertices) : v_(std::move(vertices)) {
  if (v_.empty() || v_.size() > 3) throw InvalidInput("a simplex has 1 to 3 vertices");
  for (const auto& v : v_)
    if (!v.allFinite()) throw InvalidInput("non-finite simplex vertex");
  if (v_.size() == 2) {
    const Vec3 d = v_[1] - v_[0];
    if (d.norm() < 1e-12) throw InvalidInput("degenerate 1-simplex");
    line_.push_back(embed_line(LineSpec{d.normalized(), v_[0]}));
  } else if (v_.size() == 3) {
    const Vec3 n = (v_[1] - v_[0]).cross(v_[2] - v_[0]);
    const double scale = (v_[1] - v_[0]).norm() * (v_[2] - v_[0]).norm();
    if (!(n.norm() > 1e-12 * scale) || scale == 0) throw InvalidInput("degenerate 2-simplex");
    const Vec3 u = n.normalized();
    const double d = u.dot(v_[0]);
    if (std::abs(u[2]) <= 1e-12) {
      if (std::abs(u[1]) >= std::abs(u[0]))
        plane_.push_back(embed_plane(PlaneSpec::vertical(-u[0] / u[1], d / u[1])));
      else
        plane_.push_back(embed_plane(PlaneSpec::vertical_in_y(-u[1] / u[0], d / u[0])));
    } else {
      plane_.push_back(embed_plane(PlaneSpec::graph(-u[0] / u[2], -u[1] / u[2], d / u[2])));
    }
  }
}

HPoint SimplexEmbedding::point(double u, double w) const {
  Vec3 p = v_[0];
  if (v_.size() >= 2) p += u * (v_[1] - v_[0]);
  if (v_.size() == 3) p += w * (v_[2] - v_[0]);
  return HPoint(p);
}

Vec4 SimplexEmbedding::operator()(const HPoint& p) const {
  if (v_.size() == 1) return Vec4::Zero();
  if (v_.size() == 2) {
    const LineSpec& s = line_[0].spec();
    const double t = (p.vec() - s.c).dot(s.a);
    if ((s.at(t).vec() - p.vec()).norm() > 1e-9 * (1 + p.vec().norm()))
      throw InvalidInput("point is not on the simplex's line");
    return pad4(line_[0](t));
  }
  return plane_[0](p);
}

SimplexEmbedding embed_simplex(const std::vector<Vec3>& vertices) { return SimplexEmbedding(vertices); }

DistortionReport line_distortion(const LineEmbedding& f, const SampleConfig& cfg) {
  const double W = f.window();
  const ParamDomain dom = ParamDomain::interval(-0.5 * W, 0.5 * W);
  SampleConfig c = cfg;
  c.max_sep = W;
  DistanceFn src = [&](const Param& p, const Param& q) { return f.source_distance(p[0], q[0]); };
  DistanceFn tgt = [&](const Param& p, const Param& q) { return (f(p[0]) - f(q[0])).norm(); };
  return measure_distortion("line", dom, c, src, tgt);
}

DistortionReport plane_distortion(const PlaneEmbedding& f, const SampleConfig& cfg) {
  const bool vertical = f.spec().tag == PlaneSpec::Tag::Vertical;
  const ParamDomain dom = vertical ? ParamDomain::box(-1, 1, -0.5, 0.5) : ParamDomain::box(-1, 1, -1, 1);
  const PlaneSpec& s = f.spec();
  DistanceFn src = [&](const Param& p, const Param& q) { return d_H(s.point(p[0], p[1]), s.point(q[0], q[1])); };
  DistanceFn tgt = [&](const Param& p, const Param& q) { return (f.at(p[0], p[1]) - f.at(q[0], q[1])).norm(); };
  return measure_distortion("plane", dom, cfg, src, tgt);
}

DistortionReport simplex_distortion(const SimplexEmbedding& f, const SampleConfig& cfg) {
  if (f.dim() == 0) throw InvalidInput("a 0-simplex has no pairs");
  ParamDomain dom = f.dim() == 1 ? ParamDomain::interval(0, 1) : ParamDomain::box(0, 1, 0, 1);
  if (f.dim() == 2) dom.contains = [](const Param& p) { return p[0] + p[1] <= 1.0; };
  DistanceFn src = [&](const Param& p, const Param& q) { return d_H(f.point(p[0], p[1]), f.point(q[0], q[1])); };
  DistanceFn tgt = [&](const Param& p, const Param& q) { return (f.at(p[0], p[1]) - f.at(q[0], q[1])).norm(); };
  return measure_distortion("simplex", dom, cfg, src, tgt);
}

}  // namespace heis
