#include "heis/foliation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "heis/errors.hpp"
#include "heis/snowflake.hpp"

namespace heis {

Surface Surface::graph(Fn2 F, Fn2 Fx, Fn2 Fy, std::string name) {
  Surface s;
  s.tag_ = Tag::Graph;
  s.F_ = std::move(F);
  s.Fx_ = std::move(Fx);
  s.Fy_ = std::move(Fy);
  s.name_ = std::move(name);
  return s;
}

Surface Surface::implicit(Fn3 H, Grad3 grad, std::string name) {
  Surface s;
  s.tag_ = Tag::Implicit;
  s.H_ = std::move(H);
  s.grad_ = std::move(grad);
  s.name_ = std::move(name);
  return s;
}

double Surface::value(const Vec3& p) const {
  if (tag_ == Tag::Graph) return F_(p[0], p[1]) - p[2];
  return H_(p);
}

Vec3 Surface::gradient(const Vec3& p) const {
  if (tag_ == Tag::Graph) return {Fx_(p[0], p[1]), Fy_(p[0], p[1]), -1.0};
  return grad_(p);
}

double Surface::residual(const Vec3& p) const {
  const double g = gradient(p).norm();
  if (!(g > 0)) throw InvalidInput("surface gradient vanishes");
  return std::abs(value(p)) / g;
}

namespace surfaces {

Surface plane(double a, double b, double c) {
  return Surface::graph([=](double x, double y) { return a * x + b * y + c; },
                        [=](double, double) { return a; }, [=](double, double) { return b; }, "plane");
}

Surface vertical_plane(double b, double c) {
  return Surface::implicit([=](const Vec3& p) { return p[1] - b * p[0] - c; },
                           [=](const Vec3&) { return Vec3(-b, 1, 0); }, "vertical_plane");
}

Surface paraboloid() {
  return Surface::graph([](double x, double y) { return x * x + y * y; },
                        [](double x, double) { return 2 * x; }, [](double, double y) { return 2 * y; },
                        "paraboloid");
}

Surface saddle() {
  return Surface::graph([](double x, double y) { return 0.5 * x * y; },
                        [](double, double y) { return 0.5 * y; }, [](double x, double) { return 0.5 * x; },
                        "saddle");
}

Surface torus(double r, double R) {
  if (!(r > 0) || !(R > r)) throw InvalidInput("torus needs 0 < r < R");
  return Surface::implicit(
      [=](const Vec3& p) {
        const double rho = std::hypot(p[0], p[1]);
        return (rho - R) * (rho - R) + p[2] * p[2] - r * r;
      },
      [=](const Vec3& p) {
        const double rho = std::hypot(p[0], p[1]);
        if (rho == 0) return Vec3(0, 0, 2 * p[2]);
        const double f = 2 * (rho - R) / rho;
        return Vec3(f * p[0], f * p[1], 2 * p[2]);
      },
      "torus");
}

Surface koranyi_sphere() {
  return Surface::implicit(
      [](const Vec3& p) {
        const double q = p[0] * p[0] + p[1] * p[1];
        return q * q + 16 * p[2] * p[2] - 1;
      },
      [](const Vec3& p) {
        const double q = p[0] * p[0] + p[1] * p[1];
        return Vec3(4 * q * p[0], 4 * q * p[1], 32 * p[2]);
      },
      "koranyi_sphere");
}

Surface euclidean_sphere() {
  return Surface::implicit([](const Vec3& p) { return p.squaredNorm() - 1; },
                           [](const Vec3& p) { return Vec3(2 * p); }, "euclidean_sphere");
}

}  // namespace surfaces

namespace {

Vec3 horizontal_normal(const Vec3& p) { return {p[1] / 2, -p[0] / 2, 1.0}; }

HorizontalDirection direction_unchecked(const Surface& s, const Vec3& p) {
  const Vec3 n = s.gradient(p);
  const Vec3 h = horizontal_normal(p);
  const Vec3 w = n.cross(h);
  HorizontalDirection out;
  const double nn = n.norm();
  if (!(nn > 0)) throw InvalidInput("surface gradient vanishes");
  out.angle = std::asin(std::min(1.0, w.norm() / (nn * h.norm())));
  out.characteristic = out.angle < kCharacteristicAngle;
  if (!out.characteristic) out.dir = w.normalized();
  return out;
}

}  // namespace

HorizontalDirection horizontal_direction(const Surface& s, const HPoint& p) {
  if (!p.finite()) throw InvalidInput("non-finite point");
  const Vec3 v = p.vec();
  if (s.residual(v) > 1e-9 * (1 + v.norm())) throw InvalidInput("point is not on the surface");
  return direction_unchecked(s, v);
}

// ---- charts ----

Vec3 FoliationChart::assemble(double qu, double qv) const {
  Vec3 q;
  q[ua_] = qu;
  q[va_] = qv;
  q[k_] = lift(qu, qv);
  return q;
}

double FoliationChart::lift(double qu, double qv) const {
  Vec3 q;
  q[ua_] = qu;
  q[va_] = qv;
  if (surface_.tag() == Surface::Tag::Graph && k_ == 2) return surface_.graph_height(q[0], q[1]);
  // Newton on the dominant coordinate, started from the tangent plane at p0.
  const Vec3 p0 = p0_.vec();
  const Vec3 g0 = surface_.gradient(p0);
  double s = p0[k_] - (g0[ua_] * (qu - p0[ua_]) + g0[va_] * (qv - p0[va_])) / g0[k_];
  for (int it = 0; it < 60; ++it) {
    q[k_] = s;
    const Vec3 g = surface_.gradient(q);
    if (std::abs(g[k_]) < 1e-3 * g.norm()) throw OutOfChart("lift lost its dominant axis");
    const double step = surface_.value(q) / g[k_];
    s -= step;
    if (!std::isfinite(s)) break;
    if (std::abs(step) <= 1e-15 * (1 + std::abs(s))) return s;
  }
  q[k_] = s;
  if (std::isfinite(s) && surface_.residual(q) <= 1e-13 * (1 + q.norm())) return s;
  throw OutOfChart("lift did not converge");
}

double FoliationChart::slope(double qu, double qv) const {
  const Vec3 q = assemble(qu, qv);
  const HorizontalDirection hd = direction_unchecked(surface_, q);
  if (hd.characteristic) throw ShrinkError("characteristic point inside the chart", eps_ / 2);
  const double wu = hd.dir[ua_], wv = hd.dir[va_];
  if (std::abs(wu) < 0.05 * std::hypot(wu, wv))
    throw ShrinkError("foliation ODE denominator vanishes inside the chart", eps_ / 2);
  return wv / wu;
}

FoliationChart::Line FoliationChart::integrate_line(double v0, int n) const {
  Line line;
  line.q.assign(2 * n + 1, 0.0);
  line.dq.assign(2 * n + 1, 0.0);
  const double h = eps_ / n;
  const double u0 = p0_.vec()[ua_];
  line.q[n] = p0_.vec()[va_] + v0;
  line.dq[n] = slope(u0, line.q[n]);
  for (int dir : {1, -1}) {
    const double hs = dir * h;
    for (int m = 0; m < n; ++m) {
      const int i = n + dir * m;
      const double u = u0 + (i - n) * h, y = line.q[i];
      const double k1 = line.dq[i];
      const double k2 = slope(u + hs / 2, y + hs / 2 * k1);
      const double k3 = slope(u + hs / 2, y + hs / 2 * k2);
      const double k4 = slope(u + hs, y + hs * k3);
      const int j = i + dir;
      line.q[j] = y + hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      line.dq[j] = slope(u + hs, line.q[j]);
    }
  }
  return line;
}

double FoliationChart::snap_v(double v) const {
  const double st = v_step();
  return std::clamp(std::round(v / st), -double(kVLines), double(kVLines)) * st;
}

HPoint FoliationChart::G(double u, double v) const {
  if (!(std::abs(u) <= eps_ * (1 + 1e-12)) || !(std::abs(v) <= eps_ * (1 + 1e-12)))
    throw OutOfChart("(u, v) outside the chart square");
  const int j = int(std::lround(snap_v(v) / v_step())) + kVLines;
  const Line& L = (*lines_)[j];
  const double h = eps_ / kSteps;
  const double x = (u + eps_) / h;
  const int i = std::clamp(int(std::floor(x)), 0, 2 * kSteps - 1);
  const double s = x - i;
  // Cubic Hermite between nodes i and i+1.
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const double qv = h00 * L.q[i] + h10 * h * L.dq[i] + h01 * L.q[i + 1] + h11 * h * L.dq[i + 1];
  const Vec3 p = assemble(p0_.vec()[ua_] + u, qv);
  return {p[0], p[1], p[2]};
}

ChartConstants FoliationChart::constants(double h) const {
  const Vec3 gu = (G(h, 0).vec() - G(-h, 0).vec()) / (2 * h);
  const Vec3 c = p0_.vec();
  const Vec3 gv = (assemble(c[ua_], c[va_] + h) - assemble(c[ua_], c[va_] - h)) / (2 * h);
  ChartConstants k;
  k.kappa = std::abs(2 * gv[2] + c[1] * gv[0] - c[0] * gv[1]);
  k.lambda = std::abs(gu[0]) + std::abs(gu[1]);
  return k;
}

double FoliationChart::grid_lipschitz(int m) const {
  if (m < 2) throw InvalidInput("grid needs at least 2 points per side");
  std::vector<std::pair<Vec2, Vec3>> pts;
  double sup = 0, inf = INFINITY;
  const double du = eps_ / kSteps, dv = v_step();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double u = -eps_ + 2 * eps_ * a / (m - 1);
      const double v = snap_v(-eps_ + 2 * eps_ * b / (m - 1));
      pts.push_back({Vec2(u, v), G(u, v).vec()});
      // Local part: singular values of the Jacobian (differences one-sided at the edges).
      const double u1 = std::max(-eps_, u - du), u2 = std::min(eps_, u + du);
      const double v1 = std::max(-eps_, v - dv), v2 = std::min(eps_, v + dv);
      Eigen::Matrix<double, 3, 2> J;
      J.col(0) = (G(u2, v).vec() - G(u1, v).vec()) / (u2 - u1);
      J.col(1) = (G(u, v2).vec() - G(u, v1).vec()) / (v2 - v1);
      const Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J);
      sup = std::max(sup, svd.singularValues()[0]);
      inf = std::min(inf, svd.singularValues()[1]);
    }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double ds = (pts[i].first - pts[j].first).norm();
      if (ds == 0) continue;
      const double r = (pts[i].second - pts[j].second).norm() / ds;
      sup = std::max(sup, r);
      inf = std::min(inf, r);
    }
  return std::max(sup, 1.0 / inf);
}

SampledCurve FoliationChart::u_line(double v, int refine) const {
  if (refine < 1) throw InvalidInput("refine must be positive");
  std::vector<CurveSample> out;
  const int n = 2 * kSteps * refine;
  for (int i = 0; i <= n; ++i) {
    const double u = std::clamp(-eps_ + 2 * eps_ * i / n, -eps_, eps_);
    out.push_back({u, G(u, v)});
  }
  return SampledCurve(std::move(out));
}

FoliationChart build_chart(const Surface& s, const HPoint& p0, double eps) {
  if (!(eps > 0) || !std::isfinite(eps)) throw InvalidInput("epsilon must be positive");
  const HorizontalDirection hd = horizontal_direction(s, p0);
  if (hd.characteristic) throw PreconditionError("chart center is a characteristic point");
  FoliationChart c;
  c.surface_ = s;
  c.p0_ = p0;
  c.eps_ = eps;
  const Vec3 g = s.gradient(p0.vec());
  c.k_ = 2;
  for (int a = 0; a < 3; ++a)
    if (std::abs(g[a]) > std::abs(g[c.k_])) c.k_ = a;
  int i = (c.k_ + 1) % 3, j = (c.k_ + 2) % 3;
  if (i > j) std::swap(i, j);
  if (std::abs(hd.dir[i]) >= std::abs(hd.dir[j])) {
    c.ua_ = i;
    c.va_ = j;
  } else {
    c.ua_ = j;
    c.va_ = i;
  }

  constexpr int n = FoliationChart::kSteps, nv = FoliationChart::kVLines;
  auto lines = std::make_shared<std::vector<FoliationChart::Line>>();
  lines->reserve(2 * nv + 1);
  for (int b = -nv; b <= nv; ++b) lines->push_back(c.integrate_line(b * eps / nv, n));
  c.lines_ = lines;

  // Richardson monitor on the central and boundary lines.
  double err = 0;
  for (int b : {-nv, 0, nv}) {
    const auto fine = c.integrate_line(b * eps / nv, 2 * n);
    const auto& coarse = (*lines)[b + nv];
    for (int m = 0; m <= 2 * n; ++m) err = std::max(err, std::abs(coarse.q[m] - fine.q[2 * m]) / 15);
  }
  c.ode_error_ = err / (2 * eps);

  const ChartConstants k = c.constants(eps / 16);
  c.kappa_ = k.kappa;
  c.lambda_ = k.lambda;
  if (!(c.kappa_ > 0) || !(c.lambda_ > 0)) throw NumericError("degenerate chart constants");
  c.L_chart_ = c.grid_lipschitz(foliationcal::kLipschitzGrid);
  return c;
}

// ---- Psi ----

Vec4 RegularChartEmbedding::operator()(double u, double v) const {
  const Vec3 phi = default_line_snowflake()(chart_.snap_v(v));
  const double s = std::sqrt(chart_.kappa());
  return {chart_.lambda() * u, s * phi[0], s * phi[1], s * phi[2]};
}

RegularChartEmbedding embed_regular_chart(const FoliationChart& chart) { return RegularChartEmbedding(chart); }

DistortionReport regular_chart_distortion(const RegularChartEmbedding& f, double rho, const SampleConfig& cfg) {
  const FoliationChart& c = f.chart();
  if (!(rho > 0) || rho > c.epsilon() * (1 + 1e-12)) throw InvalidInput("rho must lie in (0, epsilon]");
  const ParamDomain dom = ParamDomain::box(-rho, rho, -rho, rho);
  auto src = [&](const Param& a, const Param& b) { return d_H(c.G(a[0], a[1]), c.G(b[0], b[1])); };
  auto tgt = [&](const Param& a, const Param& b) { return (f(a[0], a[1]) - f(b[0], b[1])).norm(); };
  return measure_distortion("chart:" + c.surface().name(), dom, cfg, src, tgt);
}

AdaptiveChart adaptive_regular_chart(const Surface& s, const HPoint& p0, double eps, const SampleConfig& cfg) {
  AdaptiveChart out;
  double prev = 0;
  bool have = false;
  for (int round = 0; round < 12; ++round, eps /= 2) {
    out.rounds = round + 1;
    FoliationChart chart;
    try {
      chart = build_chart(s, p0, eps);
    } catch (const ShrinkError&) {
      continue;
    } catch (const OutOfChart&) {
      continue;
    }
    const auto f = embed_regular_chart(chart);
    DistortionReport rep = regular_chart_distortion(f, eps, cfg);
    out.history.push_back(rep.L_opt);
    const bool stable = have && std::abs(rep.L_opt - prev) < 0.05 * prev;
    out.chart = chart;
    out.report = rep;
    if (stable) return out;
    prev = rep.L_opt;
    have = true;
  }
  if (!have) throw ShrinkError("no admissible chart radius found", eps);
  return out;
}

// ---- curves ----

double vertical_rate(const SampledCurve& curve, std::size_t i) {
  const Vec3 v = curve.velocity(i);
  const HPoint& p = curve[i].p;
  return 2 * v[2] + v[0] * p.y - v[1] * p.x;
}

std::vector<CurveSegmentClass> decompose_curve(const SampledCurve& curve, double M) {
  const std::size_t n = curve.size();
  if (n < 3) throw InvalidInput("curve needs at least 3 samples");
  double sup = 1;
  for (const auto& s : curve.samples()) sup = std::max({sup, std::abs(s.p.x), std::abs(s.p.y)});
  if (!(M >= sup)) throw InvalidInput("M must bound 1, |x| and |y|");
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 v = curve.velocity(i);
    if (std::abs(v.norm() - 1) > 1e-6) throw InvalidInput("curve is not unit speed");
    q[i] = v[0] * v[0] + v[1] * v[1];
  }
  const double e0 = 1.0 / (16 * M * M);
  auto allowed = [&](ArcTag t, std::size_t i) { return t == ArcTag::VerticalArc ? q[i] <= e0 : q[i] >= e0 / 2; };

  std::vector<CurveSegmentClass> out;
  ArcTag tag = q[0] <= 0.75 * e0 ? ArcTag::VerticalArc : ArcTag::HorizontalArc;
  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (allowed(tag, i)) continue;
    const ArcTag other = tag == ArcTag::VerticalArc ? ArcTag::HorizontalArc : ArcTag::VerticalArc;
    // Switch at the last sample that satisfies both tags.
    std::size_t b = i;
    while (b > start && !(allowed(tag, b) && allowed(other, b))) --b;
    if (b == start && !(allowed(tag, b) && allowed(other, b)))
      throw InvalidInput("sampling too coarse to place a segment boundary");
    out.push_back({curve[start].t, curve[b].t, start, b, tag, 0});
    start = b;
    tag = other;
  }
  out.push_back({curve[start].t, curve[n - 1].t, start, n - 1, tag, 0});
  for (auto& seg : out)
    if (seg.tag == ArcTag::VerticalArc)
      seg.lambda_local = std::sqrt(std::abs(vertical_rate(curve, (seg.i1 + seg.i2) / 2)));
  return out;
}

namespace {

struct Range {
  double lo = INFINITY, hi = -INFINITY;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

Range mul(const Range& a, const Range& b) {
  Range r;
  for (double x : {a.lo, a.hi})
    for (double y : {b.lo, b.hi}) r.add(x * y);
  return r;
}

}  // namespace

ArcEmbedding::ArcEmbedding(const SampledCurve& c, std::size_t i1, std::size_t i2, double lambda, bool vertical)
    : t1_(c[i1].t), t2_(c[i2].t), lambda_(lambda), vertical_(vertical) {
  s_.assign(c.samples().begin() + i1, c.samples().begin() + i2 + 1);
}

std::size_t ArcEmbedding::index(double t) const {
  auto it = std::lower_bound(s_.begin(), s_.end(), t, [](const CurveSample& a, double x) { return a.t < x; });
  if (it == s_.end()) return s_.size() - 1;
  if (it != s_.begin() && t - std::prev(it)->t < it->t - t) --it;
  return std::size_t(it - s_.begin());
}

HPoint ArcEmbedding::point(double t) const { return s_[index(t)].p; }

Vec4 ArcEmbedding::operator()(double t) const {
  const std::size_t i = index(t);
  const double ts = s_[i].t;
  const auto& phi = default_line_snowflake();
  if (vertical_) {
    const double len = t2_ - t1_;
    const Vec3 p = lambda_ * std::sqrt(len) * phi.unit((ts - t1_) / len);
    return {p[0], p[1], p[2], 0.0};
  }
  const Vec3 p = std::sqrt(2.0) * phi(v_[i]);
  return {lambda_ * (ts - t0_), p[0], p[1], p[2]};
}

ArcEmbedding embed_vertical_arc(const SampledCurve& curve, std::size_t i1, std::size_t i2, std::size_t i0) {
  if (!(i1 < i2) || i2 >= curve.size() || i0 < i1 || i0 > i2) throw InvalidInput("bad arc indices");
  const double d0 = std::abs(vertical_rate(curve, i0));
  if (!(d0 > 1e-9)) throw PreconditionError("arc is horizontal at t0, not a vertical arc");
  Range z, xp, yp, x, y;
  for (std::size_t i = i1; i <= i2; ++i) {
    const Vec3 v = curve.velocity(i);
    z.add(2 * v[2]);
    xp.add(v[0]);
    yp.add(v[1]);
    x.add(curve[i].p.x);
    y.add(curve[i].p.y);
  }
  const Range a = mul(xp, y), b = mul(x, yp);
  const double lo = z.lo + a.lo - b.hi, hi = z.hi + a.hi - b.lo;
  const double amin = (lo <= 0 && hi >= 0) ? 0 : std::min(std::abs(lo), std::abs(hi));
  const double amax = std::max(std::abs(lo), std::abs(hi));
  if (amin < 0.5 * d0 || amax > 2 * d0)
    throw ShrinkError("ratio condition fails on the arc", 0.5 * (curve[i2].t - curve[i1].t));
  return ArcEmbedding(curve, i1, i2, std::sqrt(d0), true);
}

ArcEmbedding embed_horizontal_arc(const SampledCurve& curve, std::size_t i1, std::size_t i2, std::size_t i0) {
  if (!(i1 < i2) || i2 >= curve.size() || i0 < i1 || i0 > i2) throw InvalidInput("bad arc indices");
  const Vec3 v0 = curve.velocity(i0);
  const double lam = std::abs(v0[0]) + std::abs(v0[1]);
  if (!(lam > 1e-9)) throw PreconditionError("arc projection is degenerate at t0");
  ArcEmbedding f(curve, i1, i2, lam, false);
  f.t0_ = curve[i0].t;
  // Horizontal lift Z of the projected arc, anchored at w(t0); v = z - Z.
  const std::size_t m = i2 - i1 + 1;
  std::vector<double> Z(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) {
    const HPoint& a = curve[i1 + k - 1].p;
    const HPoint& b = curve[i1 + k].p;
    Z[k] = Z[k - 1] + 0.5 * (a.x * b.y - b.x * a.y);  // exact for the chord polygon
  }
  const double anchor = Z[i0 - i1] - curve[i0].p.z;
  f.v_.resize(m);
  for (std::size_t k = 0; k < m; ++k) f.v_[k] = curve[i1 + k].p.z - (Z[k] - anchor);
  return f;
}

DistortionReport arc_distortion(const ArcEmbedding& f, const SampleConfig& cfg) {
  const ParamDomain dom = ParamDomain::interval(f.t1(), f.t2());
  // Points snap to curve samples, so separations stay above a few sample gaps.
  double gap = 0;
  for (std::size_t i = 1; i < f.samples().size(); ++i) gap = std::max(gap, f.samples()[i].t - f.samples()[i - 1].t);
  SampleConfig c = cfg;
  c.buckets = std::max(3, std::min(cfg.buckets, int(std::floor(std::log2((f.t2() - f.t1()) / (4 * gap))))));
  auto src = [&](const Param& a, const Param& b) { return d_H(f.point(a[0]), f.point(b[0])); };
  auto tgt = [&](const Param& a, const Param& b) { return (f(a[0]) - f(b[0])).norm(); };
  return measure_distortion(f.consistency_factor() < 1 ? "vertical_arc" : "horizontal_arc", dom, c, src, tgt);
}

}  // namespace heis
