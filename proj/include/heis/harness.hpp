#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace heis {

using Param = std::array<double, 2>;
using DistanceFn = std::function<double(const Param&, const Param&)>;

// Axis-aligned parameter box (dimension 1 or 2) with optional membership test,
// periodic axes and a custom separation function.
struct ParamDomain {
  int dim = 1;
  Param lo{0, 0};
  Param hi{0, 0};
  std::array<bool, 2> periodic{false, false};
  std::function<bool(const Param&)> contains;
  DistanceFn separation;

  static ParamDomain interval(double a, double b);
  static ParamDomain box(double ax, double bx, double ay, double by);

  bool inside(const Param& p) const;
  double sep(const Param& p, const Param& q) const;
  double diameter() const;
  Param wrap(Param p) const;
};

struct SampleConfig {
  int buckets = 12;
  int quota = 100;
  double max_sep = 0;  // 0: domain diameter
  std::uint64_t seed = 1;
  long max_attempts = 100000;
};

struct PairRecord {
  Param p{0, 0};
  Param q{0, 0};
  double sep = 0;
  int bucket = 0;
  double d_source = std::numeric_limits<double>::quiet_NaN();
  double d_target = std::numeric_limits<double>::quiet_NaN();
};

struct PairSample {
  std::vector<PairRecord> pairs;
  int buckets = 0;
  double max_sep = 0;
  std::uint64_t seed = 0;

  double min_sep() const;
  int bucket_of(double sep) const;  // -1 when outside the configured range
};

PairSample sample_scale_pairs(const ParamDomain& domain, const SampleConfig& cfg);

struct BucketStats {
  int bucket = 0;
  double sep_lo = 0, sep_hi = 0;
  long count = 0;
  double min_ratio = 0, max_ratio = 0;  // d_target / d_source
};

struct DistortionReport {
  std::string id;
  double L_lower = 1;    // sup d_target / d_source
  double L_upper = 1;    // sup d_source / d_target
  double L_product = 1;  // L_lower * L_upper
  double L = 1;          // max(L_lower, L_upper), no rescaling
  double L_opt = 1;      // sqrt(L_product), after optimal rescaling
  double prescale = 1;   // factor applied to target distances to reach L_opt
  std::vector<BucketStats> buckets;
  long sample_count = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  PairRecord worst_expansion;
  PairRecord worst_contraction;
};

// Evaluates both distances on every pair (filling the records) and reduces them.
DistortionReport distortion_report(const std::string& id, const DistanceFn& source,
                                   const DistanceFn& target, PairSample& sample,
                                   std::uint64_t config_hash = 0);

// Reduction only; records must already carry their distances.
DistortionReport summarize(const std::string& id, const PairSample& sample,
                           std::uint64_t config_hash = 0);

// Local pattern search started from the `top` worst pairs in each direction.
// Improved pairs are appended to the sample (only if they stay in the domain and in
// the sample's separation range).
void refine_worst_pairs(PairSample& sample, const ParamDomain& domain, const DistanceFn& source,
                        const DistanceFn& target, int top = 8, int iterations = 60);

// sample + evaluate + refine + summarize.
DistortionReport measure_distortion(const std::string& id, const ParamDomain& domain,
                                    const SampleConfig& cfg, const DistanceFn& source,
                                    const DistanceFn& target, bool refine = true,
                                    std::uint64_t config_hash = 0);

}  // namespace heis
