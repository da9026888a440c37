#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "heis/core.hpp"
#include "heis/foliation.hpp"
#include "heis/harness.hpp"

namespace heis {

// ---- surfaces of revolution z = F(|w|) ----

struct RevolutionSpec {
  std::string name = "custom";
  std::function<double(double)> F;
  std::function<double(double)> dF;
  double M_rev = 1;  // >= max(1, limsup |F'(t)|/t)
  double T = 1;      // chart radius, |F'(t)|/t <= 2 M_rev on (0, T)
};

// Presets: "zero" (F = 0), "square" (F = t^2), "cosh" (F = cosh t - 1).
RevolutionSpec revolution_preset(const std::string& name);

Surface revolution_surface(const RevolutionSpec& spec);

// G(ts) = gamma_s(2t): gamma_s are integral curves of V/2, V(ts) = s + 2(F'(t)/t) s_hat,
// integrated annulus by annulus on A_i = {2^-i T <= |w| <= 2^(1-i) T}.
class RevolutionChart {
 public:
  static constexpr int kAnnuli = 40;
  static constexpr int kSteps = 256;  // RK4 steps per annulus

  const RevolutionSpec& spec() const { return spec_; }
  // Base integral curve gamma_0 (ends at (T, 0)), tau in [0, 2T].
  Vec2 gamma0(double tau) const;
  Vec2 G(double t, double angle) const;
  Vec2 G(const Vec2& w) const;
  // Inverse of G: (t, angle) with G(t, angle) = p.
  std::pair<double, double> G_inverse(const Vec2& p) const;
  // Surface point over G(t, angle).
  HPoint lift(double t, double angle) const;
  // max | |gamma0(tau)| - tau/2 | over the stored nodes.
  double radial_law_error() const { return radial_err_; }
  // Accumulated rotation alpha_i of annulus i.
  const std::vector<double>& annulus_rotation() const { return rot_; }

 private:
  friend RevolutionChart build_revolution_chart(const RevolutionSpec& spec);

  struct Annulus {
    double tau_in = 0, tau_out = 0;
    std::vector<Vec2> p, v;  // base curve nodes and their velocities (tau decreasing to increasing)
  };
  Vec2 field(const Vec2& p) const;  // V/2
  int annulus_of(double tau) const;
  Vec2 eval(int i, double tau) const;

  RevolutionSpec spec_;
  std::shared_ptr<const std::vector<Annulus>> ann_;
  std::vector<double> rot_;
  double radial_err_ = 0;
  double core_c_ = 0;  // F'(r)/r at the innermost radius (log-spiral extension below it)
};

RevolutionChart build_revolution_chart(const RevolutionSpec& spec);

class RevolutionEmbedding {
 public:
  explicit RevolutionEmbedding(const RevolutionChart& c) : chart_(c) {}
  // Surface point -> R^4 through the inverse of Psi and the z=0 plane embedding.
  Vec4 operator()(const HPoint& p) const;
  Vec4 param(double t, double angle) const;
  const RevolutionChart& chart() const { return chart_; }

 private:
  RevolutionChart chart_;
};

RevolutionEmbedding embed_revolution(const RevolutionSpec& spec);

// Euclidean distortion of G on the disc of radius rho.
DistortionReport revolution_G_distortion(const RevolutionChart& c, double rho, const SampleConfig& cfg);
// d_H distortion of the embedding over the part of the surface above the disc of radius rho.
DistortionReport revolution_distortion(const RevolutionEmbedding& f, double rho, const SampleConfig& cfg);

// ---- spheres ----

enum class SphereKind { Koranyi, Euclidean };

Vec3 sphere_field(SphereKind kind, const Vec3& p);  // unit, oriented south to north
Surface sphere_surface(SphereKind kind);
double sphere_pole_height(SphereKind kind);  // 1/4 or 1

class SphereEmbedding {
 public:
  static constexpr double kPoleOffset = 1e-6;

  SphereKind kind() const { return kind_; }
  // Point of the base longitude at t in [-1, 1] (arclength proportional to t + 1).
  HPoint longitude(double t) const;
  // G(l_s(t)) for s = (cos angle, sin angle).
  HPoint G(double angle, double t) const;
  // Psi(G(s(1-|t|), t)) = (t, (1-|t|) phi(s)).
  Vec4 param(double angle, double t) const;
  Vec4 operator()(const HPoint& p) const;
  std::pair<double, double> inverse(const HPoint& p) const;  // (angle, t)
  double length() const { return length_; }
  // Base longitude as sampled curve (integration nodes).
  SampledCurve base_curve() const;

 private:
  friend SphereEmbedding build_sphere(SphereKind kind);

  SphereKind kind_ = SphereKind::Koranyi;
  std::shared_ptr<const std::vector<double>> s_;  // arclength at the nodes
  std::shared_ptr<const std::vector<Vec3>> p_;
  double length_ = 0;
};

SphereEmbedding build_sphere(SphereKind kind);
const SphereEmbedding& embed_koranyi_sphere();
const SphereEmbedding& embed_euclid_sphere();

struct SphereReport {
  DistortionReport all;   // whole sphere
  double eps = 0;         // far pairs: Euclidean separation >= eps
  double far_dH_min = 0, far_dH_max = 0;
  double far_psi_min = 0, far_psi_max = 0;
  long far_count = 0;
  double far_L = 1;  // optimally rescaled distortion over the far pairs alone
  // Comparison route: d_H and |Psi difference| both lie in fixed ranges on far pairs, so
  // the ratio is bounded by the product of the range spreads.
  double far_bound() const;
};

SphereReport sphere_distortion(const SphereEmbedding& f, const SampleConfig& cfg, double eps = 0.25,
                               double rotate = 0);

// ---- saddle z = xy/2 ----

struct SaddleSquare {
  int n = 0, m = 0, sign = 1;
  int family() const;  // 1..4 by parity of (n, m)
  bool contains(double x, double y) const;
};

// zeta_{n,m}^{+-} applied to a base-square point (x, y) in [0,1] x [1,2].
HPoint saddle_zeta(const SaddleSquare& q, double x, double y);
Vec4 saddle_sigma(const SaddleSquare& q, const Vec4& v);
Vec4 saddle_g(double x, double y);  // base square map (y, Phi(x))

// A square of the requested family containing (x, y); nullopt-style flag when none.
bool saddle_square_in_family(double x, double y, int family, SaddleSquare& out);

class SaddleEmbedding {
 public:
  static constexpr int kMaxLevel = 7;  // squares with n in [0, kMaxLevel]
  explicit SaddleEmbedding(int family);
  int family() const { return family_; }
  bool in_domain(double x, double y) const;
  Vec4 operator()(const HPoint& p) const;
  Vec4 param(double x, double y) const;

 private:
  int family_;
};

SaddleEmbedding embed_saddle_family(int family);
DistortionReport saddle_distortion(const SaddleEmbedding& f, const SampleConfig& cfg);
DistortionReport saddle_base_distortion(const SampleConfig& cfg);

struct CrossSquareStats {
  double lo = 0, hi = 0;  // range of |G(w)-G(w')| / (|x-x'|+|y-y'|)
  long count = 0;
};
CrossSquareStats saddle_cross_square(const SaddleEmbedding& f, long pairs, std::uint64_t seed);

// Indices of characteristic points among the samples.
std::vector<std::size_t> characteristic_census(const Surface& s, const std::vector<HPoint>& pts);

namespace specialcal {
inline constexpr double L_rev = 8.0;
inline constexpr double L_sphere = 8.0;
inline constexpr double L_sphere2 = 8.0;
inline constexpr double L_saddle = 8.0;
inline constexpr double K_base = 8.0;   // d_H / |g difference| within [1/K, K] on the base square
inline constexpr double K_cross = 3.0;  // cross-square comparison constant
}  // namespace specialcal

}  // namespace heis
