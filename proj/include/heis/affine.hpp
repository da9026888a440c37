#pragma once

#include <vector>

#include "heis/core.hpp"
#include "heis/harness.hpp"
#include "heis/snowflake.hpp"

namespace heis {

struct LineSpec {
  Vec3 a;  // unit direction
  Vec3 c;  // base point
  HPoint at(double t) const { return HPoint(a * t + c); }
};

enum class LineTag { Vertical, Horizontal, Generic };

struct LineCase {
  LineTag tag = LineTag::Generic;
  double kappa = 0, lambda = 0, mu = 0;
  bool swapped = false;  // |a2| > |a1| was normalized by the xy flip
  // Normalized spec (after the flip and c3 = 0).
  Vec3 a, c;
};

LineCase classify_line(const LineSpec& line);

// t -> R^3 image of w(t) = a t + c.
class LineEmbedding {
 public:
  LineEmbedding(const LineSpec& spec, const LineCase& cs) : spec_(spec), case_(cs) {}
  Vec3 operator()(double t) const;
  const LineSpec& spec() const { return spec_; }
  const LineCase& line_case() const { return case_; }
  // Natural window length for distortion sampling (one period for vertical lines,
  // four periods 1/mu for generic ones).
  double window() const;
  // d_H(w(s), w(t)) in closed form: kappa |s-t| + lambda |s-t|^{1/2}. Algebraically equal
  // to d_H on the line, without the cancellation of the generic formula.
  double source_distance(double s, double t) const;

 private:
  LineSpec spec_;
  LineCase case_;
};

LineEmbedding embed_line(const LineSpec& line);

struct PlaneSpec {
  enum class Tag { Vertical, Graph };
  Tag tag = Tag::Graph;
  double a = 0, b = 0, c = 0;
  // Vertical: y = b x + c, or x = b y + c when swapped; always |b| < 1.
  bool swapped = false;

  static PlaneSpec vertical(double b, double c);          // y = b x + c
  static PlaneSpec vertical_in_y(double b, double c);     // x = b y + c
  static PlaneSpec graph(double a, double b, double c);   // z = a x + b y + c

  // Signed residual of the defining equation.
  double residual(const HPoint& p) const;
  // Chart of the plane: Vertical -> (x or y, z + ...), Graph -> P0 coordinates.
  HPoint point(double u, double v) const;
};

// The isometry g: P0 -> {z = a x + b y + c} and its inverse.
HPoint plane_isometry(double a, double b, double c, double x, double y);
Vec2 plane_isometry_inverse(double a, double b, const HPoint& p);

// (t phi(s), t) for the P0 point w = t s.
Vec4 p0_embedding(double x, double y);

class PlaneEmbedding {
 public:
  explicit PlaneEmbedding(const PlaneSpec& spec) : spec_(spec) {}
  Vec4 operator()(const HPoint& p) const;
  Vec4 at(double u, double v) const { return (*this)(spec_.point(u, v)); }
  const PlaneSpec& spec() const { return spec_; }

 private:
  PlaneSpec spec_;
};

PlaneEmbedding embed_plane(const PlaneSpec& plane);

class SimplexEmbedding {
 public:
  explicit SimplexEmbedding(std::vector<Vec3> vertices);
  int dim() const { return static_cast<int>(v_.size()) - 1; }
  // Point with barycentric-style parameters: v0 + u (v1 - v0) + w (v2 - v0).
  HPoint point(double u, double w = 0) const;
  Vec4 operator()(const HPoint& p) const;
  Vec4 at(double u, double w = 0) const { return (*this)(point(u, w)); }

 private:
  std::vector<Vec3> v_;
  std::vector<LineEmbedding> line_;
  std::vector<PlaneEmbedding> plane_;
};

SimplexEmbedding embed_simplex(const std::vector<Vec3>& vertices);

// Calibrated uniform constants (L_opt convention).
namespace affinecal {
inline constexpr double L_line = 4.0;
inline constexpr double L_plane = 6.0;
}  // namespace affinecal

DistortionReport line_distortion(const LineEmbedding& f, const SampleConfig& cfg);
DistortionReport plane_distortion(const PlaneEmbedding& f, const SampleConfig& cfg);
DistortionReport simplex_distortion(const SimplexEmbedding& f, const SampleConfig& cfg);

}  // namespace heis
