#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "heis/core.hpp"
#include "heis/harness.hpp"

namespace heis {

class Surface {
 public:
  enum class Tag { Graph, Implicit };
  using Fn2 = std::function<double(double, double)>;
  using Fn3 = std::function<double(const Vec3&)>;
  using Grad3 = std::function<Vec3(const Vec3&)>;

  static Surface graph(Fn2 F, Fn2 Fx, Fn2 Fy, std::string name = "graph");
  static Surface implicit(Fn3 H, Grad3 grad, std::string name = "implicit");

  Tag tag() const { return tag_; }
  const std::string& name() const { return name_; }
  // Defining function (F(x,y) - z for graphs) and its gradient.
  double value(const Vec3& p) const;
  Vec3 gradient(const Vec3& p) const;
  double graph_height(double x, double y) const { return F_(x, y); }
  // Distance-like residual |value| / |gradient|.
  double residual(const Vec3& p) const;

 private:
  Tag tag_ = Tag::Graph;
  std::string name_;
  Fn2 F_, Fx_, Fy_;
  Fn3 H_;
  Grad3 grad_;
};

namespace surfaces {
Surface plane(double a, double b, double c);  // z = a x + b y + c
Surface vertical_plane(double b, double c);   // y = b x + c
Surface paraboloid();                         // z = x^2 + y^2
Surface saddle();                             // z = x y / 2
Surface torus(double r, double R);
Surface koranyi_sphere();                     // (x^2+y^2)^2 + 16 z^2 = 1
Surface euclidean_sphere();
}  // namespace surfaces

inline constexpr double kCharacteristicAngle = 1e-6;

struct HorizontalDirection {
  bool characteristic = false;
  Vec3 dir = Vec3::Zero();  // unit, spans T_pM and H_p
  double angle = 0;         // angle between T_pM and H_p
};

HorizontalDirection horizontal_direction(const Surface& s, const HPoint& p);

struct ChartConstants {
  double kappa = 0;
  double lambda = 0;
};

class FoliationChart {
 public:
  static constexpr int kSteps = 512;  // RK4 steps per half u-range
  static constexpr int kVLines = 128; // v grid lines per half v-range

  HPoint p0() const { return p0_; }
  double epsilon() const { return eps_; }
  double kappa() const { return kappa_; }
  double lambda() const { return lambda_; }
  double L_chart() const { return L_chart_; }
  double ode_error() const { return ode_error_; }  // Richardson estimate per unit length
  int dominant_axis() const { return k_; }
  int u_axis() const { return ua_; }
  int v_axis() const { return va_; }

  // v is rounded to the nearest grid line.
  HPoint G(double u, double v) const;
  double snap_v(double v) const;
  double v_step() const { return eps_ / kVLines; }

  // Central differences with step h (h a multiple of the u step).
  ChartConstants constants(double h) const;
  // Euclidean bi-Lipschitz constant max(sup, 1/inf) of G over all pairs of an m x m grid.
  double grid_lipschitz(int m) const;
  // The u-line through grid line v, sampled `refine` times per u step.
  SampledCurve u_line(double v, int refine = 4) const;
  const Surface& surface() const { return surface_; }

 private:
  friend FoliationChart build_chart(const Surface& s, const HPoint& p0, double eps);

  double lift(double qu, double qv) const;
  double slope(double qu, double qv) const;
  struct Line {
    std::vector<double> q, dq;  // q_v and dq_v/dq_u at the u nodes
  };
  Line integrate_line(double v0, int steps_per_half) const;
  Vec3 assemble(double qu, double qv) const;

  Surface surface_;
  HPoint p0_;
  double eps_ = 0;
  int k_ = 2, ua_ = 0, va_ = 1;
  double kappa_ = 0, lambda_ = 0, L_chart_ = 0, ode_error_ = 0;
  std::shared_ptr<const std::vector<Line>> lines_;
};

FoliationChart build_chart(const Surface& s, const HPoint& p0, double eps);

// Psi(G(u, v)) = (lambda u, kappa^{1/2} Phi(v)).
class RegularChartEmbedding {
 public:
  explicit RegularChartEmbedding(const FoliationChart& c) : chart_(c) {}
  Vec4 operator()(double u, double v) const;
  const FoliationChart& chart() const { return chart_; }

 private:
  FoliationChart chart_;
};

RegularChartEmbedding embed_regular_chart(const FoliationChart& chart);

// Distortion of (chart image, d_H) -> R^4 over [-rho, rho]^2 (rho <= epsilon).
DistortionReport regular_chart_distortion(const RegularChartEmbedding& f, double rho, const SampleConfig& cfg);

struct AdaptiveChart {
  FoliationChart chart;
  DistortionReport report;
  int rounds = 0;
  std::vector<double> history;  // L_opt per round
};

// Halves epsilon until the distortion estimate changes by < 5% (at most 12 rounds).
AdaptiveChart adaptive_regular_chart(const Surface& s, const HPoint& p0, double eps, const SampleConfig& cfg);

namespace foliationcal {
inline constexpr double L_reg = 4.0;
inline constexpr int kLipschitzGrid = 33;
inline constexpr double L_arc = 4.0;  // curve arcs, vertical and horizontal
}

// Curve decomposition.
enum class ArcTag { VerticalArc, HorizontalArc };

struct CurveSegmentClass {
  double t1 = 0, t2 = 0;
  std::size_t i1 = 0, i2 = 0;  // sample indices of the endpoints
  ArcTag tag = ArcTag::HorizontalArc;
  double lambda_local = 0;     // VerticalArc only
};

std::vector<CurveSegmentClass> decompose_curve(const SampledCurve& curve, double M);

// 2 z' + x' y - y' x at sample i.
double vertical_rate(const SampledCurve& curve, std::size_t i);

class ArcEmbedding {
 public:
  ArcEmbedding(const SampledCurve& c, std::size_t i1, std::size_t i2, double lambda, bool vertical);
  // Map on the sample parameters of the arc (t is rounded to the nearest sample).
  Vec4 operator()(double t) const;
  HPoint point(double t) const;
  double lambda_local() const { return lambda_; }
  // lambda |dt|^{1/2} relates to d_H through this factor on vertical arcs.
  double consistency_factor() const { return vertical_ ? 1.0 / std::sqrt(2.0) : 1.0; }
  double t1() const { return t1_; }
  double t2() const { return t2_; }
  std::size_t index(double t) const;
  const std::vector<CurveSample>& samples() const { return s_; }

 private:
  friend ArcEmbedding embed_horizontal_arc(const SampledCurve&, std::size_t, std::size_t, std::size_t);
  std::vector<CurveSample> s_;
  std::vector<double> v_;  // cylinder transversal coordinate (horizontal arcs)
  double t1_, t2_, t0_ = 0, lambda_;
  bool vertical_;
};

ArcEmbedding embed_vertical_arc(const SampledCurve& curve, std::size_t i1, std::size_t i2, std::size_t i0);
// Cylinder chart over the projected arc with the vertical line through w(t0) as transversal.
ArcEmbedding embed_horizontal_arc(const SampledCurve& curve, std::size_t i1, std::size_t i2, std::size_t i0);

DistortionReport arc_distortion(const ArcEmbedding& f, const SampleConfig& cfg);

}  // namespace heis
