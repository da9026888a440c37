#include "heis/special_surfaces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "heis/affine.hpp"
#include "heis/errors.hpp"
#include "heis/rng.hpp"
#include "heis/snowflake.hpp"

namespace heis {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 rot2(const Vec2& p, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * p[0] - s * p[1], s * p[0] + c * p[1]};
}

// Cubic Hermite on [0, 1] with endpoint values and (already scaled) tangents.
template <class V>
V hermite(const V& p0, const V& m0, const V& p1, const V& m1, double s) {
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1;
}

}  // namespace

// ---- revolution ----

RevolutionSpec revolution_preset(const std::string& name) {
  RevolutionSpec s;
  s.name = name;
  if (name == "zero") {
    s.F = [](double) { return 0.0; };
    s.dF = [](double) { return 0.0; };
    s.M_rev = 1;
    s.T = 1;
  } else if (name == "square") {
    s.F = [](double t) { return t * t; };
    s.dF = [](double t) { return 2 * t; };
    s.M_rev = 2;
    s.T = 0.5;
  } else if (name == "cosh") {
    s.F = [](double t) { return std::cosh(t) - 1; };
    s.dF = [](double t) { return std::sinh(t); };
    s.M_rev = 1;
    s.T = 1;
  } else {
    throw InvalidInput("unknown revolution preset '" + name + "' (zero, square, cosh)");
  }
  return s;
}

Surface revolution_surface(const RevolutionSpec& spec) {
  auto F = spec.F;
  auto dF = spec.dF;
  return Surface::graph(
      [F](double x, double y) { return F(std::hypot(x, y)); },
      [dF](double x, double y) {
        const double r = std::hypot(x, y);
        return r == 0 ? 0.0 : dF(r) * x / r;
      },
      [dF](double x, double y) {
        const double r = std::hypot(x, y);
        return r == 0 ? 0.0 : dF(r) * y / r;
      },
      "revolution:" + spec.name);
}

Vec2 RevolutionChart::field(const Vec2& p) const {
  const double r = p.norm();
  const Vec2 s = p / r;
  const Vec2 sh(-s[1], s[0]);
  return 0.5 * s + (spec_.dF(r) / r) * sh;
}

int RevolutionChart::annulus_of(double tau) const {
  const int i = int(std::floor(std::log2(2 * spec_.T / tau))) + 1;
  return std::max(1, i);
}

Vec2 RevolutionChart::eval(int i, double tau) const {
  const Annulus& a = (*ann_)[i - 1];
  const double h = (a.tau_out - a.tau_in) / kSteps;
  const double x = std::clamp((tau - a.tau_in) / h, 0.0, double(kSteps));
  const int k = std::min(int(x), kSteps - 1);
  return hermite<Vec2>(a.p[k], h * a.v[k], a.p[k + 1], h * a.v[k + 1], x - k);
}

Vec2 RevolutionChart::gamma0(double tau) const {
  if (!(tau >= 0) || tau > 2 * spec_.T * (1 + 1e-12)) throw OutOfChart("tau outside [0, 2T]");
  if (tau == 0) return Vec2::Zero();
  tau = std::min(tau, 2 * spec_.T);
  const int i = annulus_of(tau);
  if (i <= kAnnuli) return rot2(eval(i, tau), rot_[i - 1]);
  // Below the innermost annulus: log-spiral extension with the limiting twist rate.
  const Annulus& a = ann_->back();
  const Vec2 inner = rot2(a.p[0], rot_[kAnnuli - 1]);
  const double r_min = inner.norm();
  const double ang = std::atan2(inner[1], inner[0]) + 2 * core_c_ * std::log((tau / 2) / r_min);
  return (tau / 2) * Vec2(std::cos(ang), std::sin(ang));
}

Vec2 RevolutionChart::G(double t, double angle) const { return rot2(gamma0(2 * t), angle); }

Vec2 RevolutionChart::G(const Vec2& w) const {
  const double t = w.norm();
  return t == 0 ? Vec2::Zero() : G(t, std::atan2(w[1], w[0]));
}

std::pair<double, double> RevolutionChart::G_inverse(const Vec2& p) const {
  const double r = p.norm();
  if (r > spec_.T * (1 + 1e-12)) throw OutOfChart("point outside the revolution chart");
  if (r == 0) return {0.0, 0.0};
  // Radial law |gamma0(2t)| is strictly increasing in t.
  double lo = 0, hi = spec_.T;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * spec_.T; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gamma0(2 * mid).norm() < r ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  const Vec2 g = gamma0(2 * t);
  double a = std::atan2(p[1], p[0]) - std::atan2(g[1], g[0]);
  a -= 2 * kPi * std::floor(a / (2 * kPi));
  return {t, a};
}

HPoint RevolutionChart::lift(double t, double angle) const {
  const Vec2 g = G(t, angle);
  return {g[0], g[1], spec_.F(g.norm())};
}

RevolutionChart build_revolution_chart(const RevolutionSpec& spec) {
  if (!spec.F || !spec.dF) throw InvalidInput("revolution spec needs F and F'");
  if (!(spec.T > 0) || !(spec.M_rev >= 1)) throw InvalidInput("revolution spec needs T > 0 and M_rev >= 1");
  if (std::abs(spec.dF(0)) > 1e-9) throw InvalidInput("F'(0) must vanish");
  const double h = 1e-4 * spec.T;
  const double fd = (-3 * spec.F(0) + 4 * spec.F(h) - spec.F(2 * h)) / (2 * h);
  if (std::abs(fd - spec.dF(0)) > 1e-6) throw InvalidInput("F' is inconsistent with F at 0");
  for (int k = 1; k <= 1000; ++k) {
    const double t = spec.T * k / 1000.0;
    if (std::abs(spec.dF(t)) / t > 2 * spec.M_rev) throw ShrinkError("|F'(t)|/t exceeds 2 M_rev on (0, T)", spec.T / 2);
  }

  RevolutionChart c;
  c.spec_ = spec;
  auto ann = std::make_shared<std::vector<RevolutionChart::Annulus>>();
  double err = 0;
  for (int i = 1; i <= RevolutionChart::kAnnuli; ++i) {
    RevolutionChart::Annulus a;
    const double R = std::ldexp(spec.T, 1 - i);
    a.tau_out = 2 * R;
    a.tau_in = R;
    const int n = RevolutionChart::kSteps;
    const double hs = -(a.tau_out - a.tau_in) / n;
    a.p.assign(n + 1, Vec2::Zero());
    a.v.assign(n + 1, Vec2::Zero());
    a.p[n] = Vec2(R, 0);
    a.v[n] = c.field(a.p[n]);
    for (int k = n; k > 0; --k) {
      const Vec2 y = a.p[k];
      const Vec2 k1 = a.v[k];
      const Vec2 k2 = c.field(y + hs / 2 * k1);
      const Vec2 k3 = c.field(y + hs / 2 * k2);
      const Vec2 k4 = c.field(y + hs * k3);
      a.p[k - 1] = y + hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      a.v[k - 1] = c.field(a.p[k - 1]);
    }
    for (int k = 0; k <= n; ++k) {
      const double tau = a.tau_in + (a.tau_out - a.tau_in) * k / n;
      err = std::max(err, std::abs(a.p[k].norm() - tau / 2));
    }
    ann->push_back(std::move(a));
  }
  c.rot_.assign(RevolutionChart::kAnnuli, 0.0);
  for (int i = 1; i < RevolutionChart::kAnnuli; ++i) {
    const Vec2 inner = (*ann)[i - 1].p[0];
    c.rot_[i] = c.rot_[i - 1] + std::atan2(inner[1], inner[0]);
  }
  const double r_min = ann->back().p[0].norm();
  c.core_c_ = spec.dF(r_min) / r_min;
  c.ann_ = ann;
  c.radial_err_ = err;
  return c;
}

Vec4 RevolutionEmbedding::param(double t, double angle) const { return p0_embedding(t * std::cos(angle), t * std::sin(angle)); }

Vec4 RevolutionEmbedding::operator()(const HPoint& p) const {
  if (!p.finite()) throw InvalidInput("non-finite point");
  const double r = std::hypot(p.x, p.y);
  const double z = chart_.spec().F(r);
  if (std::abs(p.z - z) > 1e-9 * (1 + std::abs(z))) throw InvalidInput("point is not on the surface of revolution");
  const auto [t, a] = chart_.G_inverse(Vec2(p.x, p.y));
  return param(t, a);
}

RevolutionEmbedding embed_revolution(const RevolutionSpec& spec) { return RevolutionEmbedding(build_revolution_chart(spec)); }

namespace {

ParamDomain disc_domain(double rho) {
  ParamDomain d = ParamDomain::box(-rho, rho, -rho, rho);
  d.contains = [rho](const Param& p) { return p[0] * p[0] + p[1] * p[1] <= rho * rho; };
  return d;
}

}  // namespace

DistortionReport revolution_G_distortion(const RevolutionChart& c, double rho, const SampleConfig& cfg) {
  if (!(rho > 0) || rho > c.spec().T) throw InvalidInput("rho must lie in (0, T]");
  const ParamDomain dom = disc_domain(rho);
  SampleConfig k = cfg;
  if (k.max_sep == 0) k.max_sep = 2 * rho;
  auto src = [](const Param& a, const Param& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); };
  auto tgt = [&](const Param& a, const Param& b) { return (c.G(Vec2(a[0], a[1])) - c.G(Vec2(b[0], b[1]))).norm(); };
  return measure_distortion("revolution_G:" + c.spec().name, dom, k, src, tgt);
}

DistortionReport revolution_distortion(const RevolutionEmbedding& f, double rho, const SampleConfig& cfg) {
  const RevolutionChart& c = f.chart();
  if (!(rho > 0) || rho > c.spec().T) throw InvalidInput("rho must lie in (0, T]");
  const ParamDomain dom = disc_domain(rho);
  SampleConfig k = cfg;
  if (k.max_sep == 0) k.max_sep = 2 * rho;
  auto point = [&](const Param& a) {
    const double t = std::hypot(a[0], a[1]);
    return c.lift(t, t == 0 ? 0.0 : std::atan2(a[1], a[0]));
  };
  auto src = [&](const Param& a, const Param& b) { return d_H(point(a), point(b)); };
  auto tgt = [&](const Param& a, const Param& b) { return (f(point(a)) - f(point(b))).norm(); };
  return measure_distortion("revolution:" + c.spec().name, dom, k, src, tgt);
}

// ---- spheres ----

double sphere_pole_height(SphereKind kind) { return kind == SphereKind::Koranyi ? 0.25 : 1.0; }

Surface sphere_surface(SphereKind kind) {
  return kind == SphereKind::Koranyi ? surfaces::koranyi_sphere() : surfaces::euclidean_sphere();
}

Vec3 sphere_field(SphereKind kind, const Vec3& p) {
  const double x = p[0], y = p[1], z = p[2], q = x * x + y * y;
  if (q == 0) throw NumericError("sphere field is singular on the axis");
  Vec3 v;
  if (kind == SphereKind::Koranyi) {
    v = Vec3(-8 * x * z - 2 * y * q, -8 * y * z + 2 * x * q, q * q) / std::sqrt(4 * q + q * q * q * q);
  } else {
    // Reversed so that longitudes run from the south to the north pole.
    v = -Vec3(x * z + 2 * y, y * z - 2 * x, -q) / std::sqrt(5 * q);
  }
  return v;
}

namespace {

Vec3 project_sphere(SphereKind kind, Vec3 p) {
  if (kind == SphereKind::Euclidean) return p.normalized();
  const Surface s = surfaces::koranyi_sphere();
  for (int it = 0; it < 3; ++it) {
    const Vec3 g = s.gradient(p);
    p -= s.value(p) * g / g.squaredNorm();
  }
  return p;
}

Vec3 unit_field(SphereKind kind, const Vec3& p) { return sphere_field(kind, p).normalized(); }

}  // namespace

SphereEmbedding build_sphere(SphereKind kind) {
  SphereEmbedding e;
  e.kind_ = kind;
  const double zp = sphere_pole_height(kind);
  const Vec3 S(0, 0, -zp), N(0, 0, zp);
  const double d = SphereEmbedding::kPoleOffset;
  const double z0 = kind == SphereKind::Koranyi ? -0.25 * std::sqrt(1 - d * d * d * d) : -std::sqrt(1 - d * d);
  auto s = std::make_shared<std::vector<double>>();
  auto pts = std::make_shared<std::vector<Vec3>>();
  s->push_back(0);
  pts->push_back(S);
  Vec3 p(d, 0, z0);
  double sig = (p - S).norm();
  s->push_back(sig);
  pts->push_back(p);
  constexpr double kMaxStep = 1e-3, kRel = 0.01;
  for (long it = 0; it < 10000000; ++it) {
    const double rho = std::hypot(p[0], p[1]);
    if (p[2] > 0 && rho < d) break;
    const double h = std::min(kMaxStep, kRel * rho);
    const Vec3 k1 = unit_field(kind, p);
    const Vec3 k2 = unit_field(kind, p + h / 2 * k1);
    const Vec3 k3 = unit_field(kind, p + h / 2 * k2);
    const Vec3 k4 = unit_field(kind, p + h * k3);
    p = project_sphere(kind, p + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4));
    sig += h;
    s->push_back(sig);
    pts->push_back(p);
  }
  if (!(p[2] > 0 && std::hypot(p[0], p[1]) < 2 * d)) throw NumericError("longitude did not reach the north pole");
  sig += (N - p).norm();
  s->push_back(sig);
  pts->push_back(N);
  e.length_ = sig;
  e.s_ = s;
  e.p_ = pts;
  return e;
}

HPoint SphereEmbedding::longitude(double t) const {
  if (!(t >= -1 - 1e-12 && t <= 1 + 1e-12)) throw OutOfChart("longitude parameter outside [-1, 1]");
  const auto& s = *s_;
  const auto& p = *p_;
  const double sig = std::clamp((t + 1) / 2, 0.0, 1.0) * length_;
  const std::size_t n = s.size();
  std::size_t k = std::upper_bound(s.begin(), s.end(), sig) - s.begin();
  k = std::clamp<std::size_t>(k, 1, n - 1) - 1;  // segment [k, k+1]
  const double h = s[k + 1] - s[k];
  const double u = (sig - s[k]) / h;
  Vec3 out;
  if (k == 0 || k + 1 == n - 1) {
    out = (1 - u) * p[k] + u * p[k + 1];
  } else {
    out = hermite<Vec3>(p[k], h * unit_field(kind_, p[k]), p[k + 1], h * unit_field(kind_, p[k + 1]), u);
  }
  return {out[0], out[1], out[2]};
}

HPoint SphereEmbedding::G(double angle, double t) const { return rotate_z(longitude(t), angle); }

Vec4 SphereEmbedding::param(double angle, double t) const {
  const Vec3 f = (1 - std::abs(t)) * default_circle_snowflake()(angle);
  return {t, f[0], f[1], f[2]};
}

std::pair<double, double> SphereEmbedding::inverse(const HPoint& p) const {
  if (!p.finite()) throw InvalidInput("non-finite point");
  const Surface surf = sphere_surface(kind_);
  if (surf.residual(p.vec()) > 1e-9) throw InvalidInput("point is not on the sphere");
  // z increases strictly along the longitude.
  double lo = -1, hi = 1;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (longitude(mid).z < p.z ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  const HPoint b = longitude(t);
  if (std::hypot(p.x, p.y) < 1e-12 || std::hypot(b.x, b.y) < 1e-12) return {0.0, t};
  double a = std::atan2(p.y, p.x) - std::atan2(b.y, b.x);
  a -= 2 * kPi * std::floor(a / (2 * kPi));
  return {a, t};
}

Vec4 SphereEmbedding::operator()(const HPoint& p) const {
  const auto [a, t] = inverse(p);
  return param(a, t);
}

SampledCurve SphereEmbedding::base_curve() const {
  std::vector<CurveSample> out;
  for (std::size_t k = 0; k < s_->size(); ++k) {
    const Vec3& q = (*p_)[k];
    out.push_back({(*s_)[k], {q[0], q[1], q[2]}});
  }
  return SampledCurve(std::move(out));
}

const SphereEmbedding& embed_koranyi_sphere() {
  static const SphereEmbedding e = build_sphere(SphereKind::Koranyi);
  return e;
}

const SphereEmbedding& embed_euclid_sphere() {
  static const SphereEmbedding e = build_sphere(SphereKind::Euclidean);
  return e;
}

double SphereReport::far_bound() const {
  if (far_count == 0) return 1;
  return std::sqrt((far_dH_max / far_psi_min) * (far_psi_max / far_dH_min));
}

SphereReport sphere_distortion(const SphereEmbedding& f, const SampleConfig& cfg, double eps, double rotate) {
  ParamDomain dom = ParamDomain::box(0, 2 * kPi, -1, 1);
  dom.periodic = {true, false};
  auto cone = [](const Param& a) {
    const double r = 1 - std::abs(a[1]);
    return Vec3(r * std::cos(a[0]), r * std::sin(a[0]), a[1]);
  };
  dom.separation = [cone](const Param& a, const Param& b) { return (cone(a) - cone(b)).norm(); };
  SampleConfig k = cfg;
  if (k.max_sep == 0) k.max_sep = 2;
  auto src = [&](const Param& a, const Param& b) { return d_H(f.G(a[0] + rotate, a[1]), f.G(b[0] + rotate, b[1])); };
  auto tgt = [&](const Param& a, const Param& b) {
    return (f.param(a[0] + rotate, a[1]) - f.param(b[0] + rotate, b[1])).norm();
  };
  PairSample sample = sample_scale_pairs(dom, k);
  const std::string id = f.kind() == SphereKind::Koranyi ? "koranyi_sphere" : "euclidean_sphere";
  distortion_report(id, src, tgt, sample);
  refine_worst_pairs(sample, dom, src, tgt);
  SphereReport out;
  out.all = summarize(id, sample);
  out.eps = eps;
  out.far_dH_min = out.far_psi_min = INFINITY;
  double far_up = 0, far_dn = 0;
  for (const auto& pr : sample.pairs) {
    const double e = (f.G(pr.p[0] + rotate, pr.p[1]).vec() - f.G(pr.q[0] + rotate, pr.q[1]).vec()).norm();
    if (e < eps) continue;
    ++out.far_count;
    out.far_dH_min = std::min(out.far_dH_min, pr.d_source);
    out.far_dH_max = std::max(out.far_dH_max, pr.d_source);
    out.far_psi_min = std::min(out.far_psi_min, pr.d_target);
    out.far_psi_max = std::max(out.far_psi_max, pr.d_target);
    far_up = std::max(far_up, pr.d_target / pr.d_source);
    far_dn = std::max(far_dn, pr.d_source / pr.d_target);
  }
  out.far_L = out.far_count ? std::sqrt(far_up * far_dn) : 1.0;
  return out;
}

// ---- saddle ----

int SaddleSquare::family() const {
  const int pn = ((n % 2) + 2) % 2, pm = ((m % 2) + 2) % 2;
  return 2 * pn + pm + 1;
}

bool SaddleSquare::contains(double x, double y) const {
  const double a = sign * y;
  const double u = std::ldexp(1.0, -n);
  const double tol = 1e-14 * u;
  return a >= u - tol && a <= 2 * u + tol && x >= m * u - tol && x <= (m + 1) * u + tol;
}

HPoint saddle_zeta(const SaddleSquare& q, double x, double y) {
  const double u = std::ldexp(1.0, -q.n);
  return {u * (x + q.m), q.sign * u * y, q.sign * 0.5 * u * u * (x + q.m) * y};
}

Vec4 saddle_sigma(const SaddleSquare& q, const Vec4& v) {
  const double u = std::ldexp(1.0, -q.n);
  return {q.sign * u * v[0], u * (v[1] + q.m), u * v[2], u * v[3]};
}

Vec4 saddle_g(double x, double y) {
  const Vec3 f = default_line_snowflake()(x);
  return {y, f[0], f[1], f[2]};
}

bool saddle_square_in_family(double x, double y, int family, SaddleSquare& out) {
  if (y == 0 || !std::isfinite(x) || !std::isfinite(y)) return false;
  const int sign = y > 0 ? 1 : -1;
  const double L = -std::log2(std::abs(y));
  for (int n : {int(std::floor(L)), int(std::floor(L)) + 1, int(std::ceil(L))}) {
    const double xs = std::ldexp(x, n);
    for (int m : {int(std::floor(xs)) - 1, int(std::floor(xs))}) {
      SaddleSquare q{n, m, sign};
      if (q.family() == family && q.contains(x, y)) {
        out = q;
        return true;
      }
    }
  }
  return false;
}

SaddleEmbedding::SaddleEmbedding(int family) : family_(family) {
  if (family < 1 || family > 4) throw InvalidInput("saddle family must be 1..4");
}

bool SaddleEmbedding::in_domain(double x, double y) const {
  if (y == 0) return true;
  SaddleSquare q;
  return saddle_square_in_family(x, y, family_, q);
}

Vec4 SaddleEmbedding::param(double x, double y) const {
  if (y == 0) return {0, x, 0, 0};
  SaddleSquare q;
  if (!saddle_square_in_family(x, y, family_, q)) throw InvalidInput("point is not in this saddle family");
  const double u = std::ldexp(1.0, q.n);
  const double bx = std::clamp(u * x - q.m, 0.0, 1.0), by = std::clamp(q.sign * u * y, 1.0, 2.0);
  return saddle_sigma(q, saddle_g(bx, by));
}

Vec4 SaddleEmbedding::operator()(const HPoint& p) const {
  if (!p.finite()) throw InvalidInput("non-finite point");
  if (std::abs(p.z - 0.5 * p.x * p.y) > 1e-12 * (1 + std::abs(p.z))) throw InvalidInput("point is not on z = xy/2");
  return param(p.x, p.y);
}

SaddleEmbedding embed_saddle_family(int family) { return SaddleEmbedding(family); }

namespace {

HPoint saddle_point(double x, double y) { return {x, y, 0.5 * x * y}; }

ParamDomain saddle_domain(const SaddleEmbedding& f) {
  ParamDomain d = ParamDomain::box(-2, 2, -2, 2);
  const double ymin = std::ldexp(1.0, -SaddleEmbedding::kMaxLevel);
  d.contains = [f, ymin](const Param& p) { return std::abs(p[1]) >= ymin && f.in_domain(p[0], p[1]); };
  return d;
}

}  // namespace

DistortionReport saddle_distortion(const SaddleEmbedding& f, const SampleConfig& cfg) {
  const ParamDomain dom = saddle_domain(f);
  SampleConfig k = cfg;
  if (k.max_sep == 0) k.max_sep = 4;
  k.max_attempts = std::max(k.max_attempts, 2000000L);  // sparse domain
  auto src = [](const Param& a, const Param& b) { return d_H(saddle_point(a[0], a[1]), saddle_point(b[0], b[1])); };
  auto tgt = [&](const Param& a, const Param& b) { return (f.param(a[0], a[1]) - f.param(b[0], b[1])).norm(); };
  return measure_distortion("saddle_family_" + std::to_string(f.family()), dom, k, src, tgt);
}

DistortionReport saddle_base_distortion(const SampleConfig& cfg) {
  const ParamDomain dom = ParamDomain::box(0, 1, 1, 2);
  auto src = [](const Param& a, const Param& b) { return d_H(saddle_point(a[0], a[1]), saddle_point(b[0], b[1])); };
  auto tgt = [](const Param& a, const Param& b) { return (saddle_g(a[0], a[1]) - saddle_g(b[0], b[1])).norm(); };
  return measure_distortion("saddle_base", dom, cfg, src, tgt);
}

CrossSquareStats saddle_cross_square(const SaddleEmbedding& f, long pairs, std::uint64_t seed) {
  CounterRng rng(seed, 17);
  CrossSquareStats st;
  st.lo = INFINITY;
  auto draw = [&](double& x, double& y) {
    for (;;) {
      const int n = int(rng.below(SaddleEmbedding::kMaxLevel + 1));
      const double u = std::ldexp(1.0, -n);
      x = rng.uniform(-2, 2);
      y = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(u, 2 * u);
      if (f.in_domain(x, y)) return;
    }
  };
  // Ratio for a cross-square pair, NaN when the pair is not admissible.
  auto ratio = [&](const std::array<double, 4>& p) -> double {
    const double x = p[0], y = p[1], x2 = p[2], y2 = p[3];
    if (std::abs(x) > 2 || std::abs(y) > 2 || std::abs(x2) > 2 || std::abs(y2) > 2) return NAN;
    if (y == 0 || y2 == 0 || !f.in_domain(x, y) || !f.in_domain(x2, y2)) return NAN;
    SaddleSquare q1, q2;
    saddle_square_in_family(x, y, f.family(), q1);
    saddle_square_in_family(x2, y2, f.family(), q2);
    if (q1.n == q2.n && q1.m == q2.m && q1.sign == q2.sign) return NAN;
    const double den = std::abs(x - x2) + std::abs(y - y2);
    if (den == 0) return NAN;
    return (f.param(x, y) - f.param(x2, y2)).norm() / den;
  };
  constexpr int kKeep = 8;
  std::vector<std::pair<double, std::array<double, 4>>> top_hi, top_lo;
  auto keep = [](auto& v, double key, const std::array<double, 4>& p) {
    v.emplace_back(key, p);
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (v.size() > kKeep) v.pop_back();
  };
  long budget = 200 * pairs;
  while (st.count < pairs && budget-- > 0) {
    std::array<double, 4> p;
    draw(p[0], p[1]);
    if (rng.uniform() < 0.5) {
      draw(p[2], p[3]);
    } else {
      // Nearby partner, usually in a neighbouring square of the same family.
      const double r = std::abs(p[1]) * std::exp2(rng.uniform(-1, 3));
      const double a = rng.uniform(0, 2 * kPi);
      p[2] = p[0] + r * std::cos(a);
      p[3] = p[1] + r * std::sin(a);
    }
    const double q = ratio(p);
    if (!std::isfinite(q)) continue;
    st.lo = std::min(st.lo, q);
    st.hi = std::max(st.hi, q);
    keep(top_hi, q, p);
    keep(top_lo, -q, p);
    ++st.count;
  }
  // Deterministic pattern search from the extreme pairs (sign +1 pushes the maximum up).
  auto refine = [&](std::array<double, 4> p, double sign) {
    double best = sign * ratio(p);
    double h = 0.25 * std::max(std::abs(p[1]), std::abs(p[3]));
    for (int it = 0; it < 60 && h > 1e-12; ++it) {
      bool moved = false;
      for (int k = 0; k < 4; ++k)
        for (double d : {h, -h}) {
          auto c = p;
          c[k] += d;
          const double v = sign * ratio(c);
          if (std::isfinite(v) && v > best) {
            best = v;
            p = c;
            moved = true;
          }
        }
      if (!moved) h *= 0.5;
    }
    return sign * best;
  };
  for (const auto& [key, p] : top_hi) st.hi = std::max(st.hi, refine(p, 1));
  for (const auto& [key, p] : top_lo) st.lo = std::min(st.lo, refine(p, -1));
  return st;
}

std::vector<std::size_t> characteristic_census(const Surface& s, const std::vector<HPoint>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (horizontal_direction(s, pts[i]).characteristic) out.push_back(i);
  return out;
}

}  // namespace heis
