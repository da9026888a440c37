#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "heis/errors.hpp"

namespace heis {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

struct HPoint {
  double x = 0, y = 0, z = 0;

  HPoint() = default;
  HPoint(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
  explicit HPoint(const Vec3& v) : x(v[0]), y(v[1]), z(v[2]) {}

  Vec3 vec() const { return {x, y, z}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  bool operator==(const HPoint&) const = default;
};

HPoint group_mul(const HPoint& p, const HPoint& q);
HPoint group_inv(const HPoint& p);

// Vertical component of p^{-1} q, i.e. z' - z + (x y' - x' y)/2 up to sign.
double twisted_dz(const HPoint& p, const HPoint& q);

double d_K(const HPoint& p, const HPoint& q);
double d_H(const HPoint& p, const HPoint& q);

HPoint left_translate(const HPoint& q, const HPoint& p);
HPoint dilate(const HPoint& p, double r);
HPoint rotate_z(const HPoint& p, double theta);

struct Similarity {
  enum class Kind { LeftTranslate, Dilate, RotateZ };
  Kind kind;
  HPoint q;
  double value = 0;

  static Similarity translate(const HPoint& q) { return {Kind::LeftTranslate, q, 0}; }
  static Similarity dilation(double r) { return {Kind::Dilate, {}, r}; }
  static Similarity rotation(double theta) { return {Kind::RotateZ, {}, theta}; }
};

HPoint similarity(const HPoint& p, const Similarity& s);

struct Cone {
  double alpha;
  explicit Cone(double a);
  bool contains(const HPoint& p) const { return std::abs(p.z) <= alpha * (p.x * p.x + p.y * p.y); }
};

bool cone_contains(const Cone& cone, const HPoint& base, const HPoint& p);

struct CurveSample {
  double t;
  HPoint p;
};

class SampledCurve {
 public:
  explicit SampledCurve(std::vector<CurveSample> samples);
  const std::vector<CurveSample>& samples() const { return s_; }
  std::size_t size() const { return s_.size(); }
  const CurveSample& operator[](std::size_t i) const { return s_[i]; }
  // Second-order finite-difference velocity at sample i (one-sided at the ends).
  Vec3 velocity(std::size_t i) const;

 private:
  std::vector<CurveSample> s_;
};

double horizontality_residual(const SampledCurve& curve);

// Calibrated module constants (see tests/test_core.cpp for the oracles).
namespace calib {
inline constexpr double dH_over_dK_min = 0.5;     // attained on vertical pairs
inline constexpr double dH_over_dK_max = 1.6719;  // diagonal planar offset plus twist
// Comparison bounds for points with max-norm <= R:
//   min(R^{1/2}, 1/R) |w - w'| <= K1 d_H  and  d_H <= K2 max(1, R^{1/2}) |w - w'|^{1/2}.
inline constexpr double K1 = 1.4143;
inline constexpr double K2 = 2.9207;
// Horizontal curves: d_H(w(t1), w(t2)) <= K3 (|x'|_inf + |y'|_inf) |t1 - t2|.
inline constexpr double K3 = 1.1;
}  // namespace calib

}  // namespace heis
