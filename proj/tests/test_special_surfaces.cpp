#include <gtest/gtest.h>

#include <cmath>

#include "heis/errors.hpp"
#include "heis/rng.hpp"
#include "heis/special_surfaces.hpp"

using namespace heis;

namespace {

SampleConfig cfg(int quota = 400) {
  SampleConfig c;
  c.quota = quota;
  return c;
}

Vec3 koranyi_point(double a, double b) {
  // (x^2+y^2)^2 + 16 z^2 = 1 with z = sin(b)/4, |w| = cos(b)^{1/2}.
  const double r = std::sqrt(std::cos(b));
  return {r * std::cos(a), r * std::sin(a), std::sin(b) / 4};
}

}  // namespace

TEST(Revolution, RadialLawAndInverse) {
  for (const char* nm : {"zero", "square", "cosh"}) {
    const auto spec = revolution_preset(nm);
    const auto c = build_revolution_chart(spec);
    EXPECT_LE(c.radial_law_error(), 1e-6) << nm;
    for (double tau1 : {0.1, 0.4, 0.9})
      for (double tau2 : {1.3, 1.9}) {
        const double g1 = c.gamma0(tau1 * spec.T).norm(), g2 = c.gamma0(tau2 * spec.T).norm();
        EXPECT_NEAR(g2 - g1, 0.5 * (tau2 - tau1) * spec.T, 1e-6) << nm;
      }
    for (double t : {0.05, 0.3, 0.8})
      for (double ang : {-2.0, 0.0, 1.0}) {
        EXPECT_NEAR(c.G(t * spec.T, ang).norm(), t * spec.T, 1e-6);
        const auto inv = c.G_inverse(c.G(t * spec.T, ang));
        EXPECT_NEAR(inv.first, t * spec.T, 1e-9);
        EXPECT_NEAR(std::remainder(inv.second - ang, 2 * M_PI), 0, 1e-9);
      }
  }
}

TEST(Revolution, LiftedFoliationIsHorizontal) {
  for (const char* nm : {"zero", "square", "cosh"}) {
    const auto spec = revolution_preset(nm);
    const auto c = build_revolution_chart(spec);
    std::vector<CurveSample> s;
    for (int i = 0; i <= 20000; ++i) {
      const double t = spec.T * (0.05 + 0.95 * i / 20000.0);
      s.push_back({t, c.lift(t, 0.3)});
    }
    // Finite-difference residual of a sampled curve; dominated by the sample spacing.
    EXPECT_LE(horizontality_residual(SampledCurve(s)), 1e-5) << nm;
  }
}

TEST(Revolution, DistortionPinned) {
  for (const char* nm : {"zero", "square", "cosh"}) {
    const auto spec = revolution_preset(nm);
    const auto f = embed_revolution(spec);
    const auto r = revolution_distortion(f, spec.T, cfg());
    EXPECT_LE(r.L_opt, specialcal::L_rev) << nm;
    EXPECT_TRUE(std::isfinite(revolution_G_distortion(f.chart(), spec.T, cfg()).L_opt));
  }
  // F = 0: G is the identity of the plane.
  const auto z = build_revolution_chart(revolution_preset("zero"));
  EXPECT_NEAR(revolution_G_distortion(z, 1, cfg()).L, 1, 1e-9);
}

TEST(Spheres, FieldsTangentAndHorizontal) {
  const Surface ks = sphere_surface(SphereKind::Koranyi), es = sphere_surface(SphereKind::Euclidean);
  for (int i = 0; i < 30; ++i)
    for (int j = 1; j < 30; ++j) {
      const double a = 2 * M_PI * i / 30, b = -M_PI / 2 + M_PI * j / 30;
      const Vec3 p = koranyi_point(a, b);
      const Vec3 v = sphere_field(SphereKind::Koranyi, p);
      EXPECT_NEAR(v.norm(), 1, 1e-12);
      EXPECT_LE(std::abs(v.dot(ks.gradient(p))) / ks.gradient(p).norm(), 1e-12);
      EXPECT_LE(std::abs(v.dot(Vec3(p[1] / 2, -p[0] / 2, 1))), 1e-12);

      const Vec3 e(std::cos(b) * std::cos(a), std::cos(b) * std::sin(a), std::sin(b));
      const Vec3 w = sphere_field(SphereKind::Euclidean, e);
      EXPECT_NEAR(w.dot(e), 0, 1e-15);
      EXPECT_NEAR(w.dot(Vec3(e[1] / 2, -e[0] / 2, 1)), 0, 1e-15);
      EXPECT_GE(w[2], 0);  // south to north
      (void)es;
    }
  EXPECT_THROW(sphere_field(SphereKind::Koranyi, Vec3(0, 0, 0.25)), NumericError);
}

TEST(Spheres, OnlyPolesAreCharacteristic) {
  const Surface ks = sphere_surface(SphereKind::Koranyi);
  std::vector<HPoint> pts{HPoint(0, 0, 0.25), HPoint(0, 0, -0.25)};
  for (int i = 0; i < 12; ++i)
    for (int j = 1; j < 12; ++j) {
      const Vec3 p = koranyi_point(2 * M_PI * i / 12, -M_PI / 2 + M_PI * j / 12);
      pts.emplace_back(p[0], p[1], p[2]);
    }
  EXPECT_EQ(characteristic_census(ks, pts), (std::vector<std::size_t>{0, 1}));
}

TEST(Spheres, LongitudeAndInverse) {
  for (auto k : {SphereKind::Koranyi, SphereKind::Euclidean}) {
    const auto& e = k == SphereKind::Koranyi ? embed_koranyi_sphere() : embed_euclid_sphere();
    EXPECT_LE(horizontality_residual(e.base_curve()), 1e-6);
    const double zp = sphere_pole_height(k);
    EXPECT_NEAR(e.longitude(-1).z, -zp, 1e-12);
    EXPECT_NEAR(e.longitude(1).z, zp, 1e-9);
    const Surface s = sphere_surface(k);
    for (double ang : {0.0, 1.0, 4.0})
      for (double t : {-0.7, 0.0, 0.3, 0.9}) {
        const HPoint p = e.G(ang, t);
        EXPECT_LE(std::abs(s.value(p.vec())), 1e-9);
        const auto inv = e.inverse(p);
        EXPECT_NEAR(std::remainder(inv.first - ang, 2 * M_PI), 0, 1e-8);
        EXPECT_NEAR(inv.second, t, 1e-8);
      }
    // Psi(G(s, t)) = (t, (1-|t|) phi(s)).
    const Vec4 v = e.param(1.0, 0.5);
    EXPECT_DOUBLE_EQ(v[0], 0.5);
    EXPECT_NEAR(e.param(2.0, 1)[1], 0, 1e-15);
  }
}

TEST(Spheres, DistortionPinnedIncludingFarPairs) {
  for (auto k : {SphereKind::Koranyi, SphereKind::Euclidean}) {
    const auto& e = k == SphereKind::Koranyi ? embed_koranyi_sphere() : embed_euclid_sphere();
    const double pin = k == SphereKind::Koranyi ? specialcal::L_sphere : specialcal::L_sphere2;
    const auto r = sphere_distortion(e, cfg());
    EXPECT_LE(r.all.L_opt, pin);
    EXPECT_GT(r.far_count, 100);
    EXPECT_GT(r.far_dH_min, 0);
    EXPECT_GT(r.far_psi_min, 0);
    EXPECT_TRUE(std::isfinite(r.far_bound()));
    EXPECT_LE(r.far_L, r.far_bound());
    EXPECT_LE(r.far_L, pin);
    // Rotating the sampled region keeps the constant in the same range.
    EXPECT_LE(sphere_distortion(e, cfg(), 0.25, 1.234).all.L_opt, pin);
  }
}

TEST(Saddle, ZetaIsSimilarity) {
  CounterRng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const SaddleSquare q{int(rng.uniform(0, 8)), int(rng.uniform(-20, 20)), rng.uniform() < 0.5 ? -1 : 1};
    // Grid inputs keep the images exactly representable; see the acceptance binary for reals.
    auto grid = [&](double a, double b) { return std::ldexp(std::floor(rng.uniform(a, b) * 0x1p20), -20); };
    const double x1 = grid(0, 1), y1 = grid(1, 2), x2 = grid(0, 1), y2 = grid(1, 2);
    const HPoint a = saddle_zeta(q, x1, y1), b = saddle_zeta(q, x2, y2);
    EXPECT_NEAR(a.z, 0.5 * a.x * a.y, 1e-15 * (1 + std::abs(a.z)));
    const double base = d_H(HPoint(x1, y1, 0.5 * x1 * y1), HPoint(x2, y2, 0.5 * x2 * y2));
    const double s = std::ldexp(1.0, -q.n);
    EXPECT_NEAR(d_H(a, b), s * base, 1e-12 * s * base);
    const Vec4 u = saddle_g(x1, y1), v = saddle_g(x2, y2);
    EXPECT_NEAR((saddle_sigma(q, u) - saddle_sigma(q, v)).norm(), s * (u - v).norm(), 1e-12 * s * (u - v).norm());
  }
}

TEST(Saddle, FamiliesCoverAndPassPinned) {
  const auto b = saddle_base_distortion(cfg());
  EXPECT_LE(b.L_opt, specialcal::K_base);
  for (int f = 1; f <= 4; ++f) {
    const auto e = embed_saddle_family(f);
    EXPECT_LE(saddle_distortion(e, cfg()).L_opt, specialcal::L_saddle) << f;
    const auto c1 = saddle_cross_square(e, 20000, 3), c2 = saddle_cross_square(e, 40000, 5);
    EXPECT_GE(c1.lo, 1 / specialcal::K_cross);
    EXPECT_LE(c1.hi, specialcal::K_cross);
    EXPECT_NEAR(c1.lo, c2.lo, 0.05 * c1.lo);
    EXPECT_NEAR(c1.hi, c2.hi, 0.05 * c1.hi);
  }
  SaddleSquare q;
  int found = 0;
  for (int f = 1; f <= 4; ++f)
    if (saddle_square_in_family(0.3, 0.7, f, q)) {
      ++found;
      EXPECT_TRUE(q.contains(0.3, 0.7));
      EXPECT_EQ(q.family(), f);
    }
  EXPECT_GE(found, 1);
  EXPECT_FALSE(saddle_square_in_family(0.3, 0, 1, q));
  EXPECT_THROW(embed_saddle_family(1)(HPoint(0.3, 0.7, 1)), InvalidInput);
}

TEST(Saddle, CharacteristicSetIsTheXAxis) {
  // Tangent normal (y/2, x/2, -1) and horizontal normal (y/2, -x/2, 1) are parallel iff y = 0.
  const Surface s = surfaces::saddle();
  std::vector<HPoint> pts;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) pts.emplace_back(0.25 * i, 0.25 * j, 0.5 * 0.0625 * i * j);
  const auto c = characteristic_census(s, pts);
  ASSERT_EQ(c.size(), 9u);
  for (auto i : c) EXPECT_EQ(pts[i].y, 0);
}
