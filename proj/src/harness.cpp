#include "heis/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "heis/errors.hpp"
#include "heis/rng.hpp"

namespace heis {

ParamDomain ParamDomain::interval(double a, double b) {
  ParamDomain d;
  d.dim = 1;
  d.lo = {a, 0};
  d.hi = {b, 0};
  return d;
}

ParamDomain ParamDomain::box(double ax, double bx, double ay, double by) {
  ParamDomain d;
  d.dim = 2;
  d.lo = {ax, ay};
  d.hi = {bx, by};
  return d;
}

bool ParamDomain::inside(const Param& p) const {
  for (int k = 0; k < dim; ++k) {
    if (periodic[k]) continue;
    if (p[k] < lo[k] || p[k] > hi[k]) return false;
  }
  return !contains || contains(p);
}

double ParamDomain::sep(const Param& p, const Param& q) const {
  if (separation) return separation(p, q);
  double s = 0;
  for (int k = 0; k < dim; ++k) {
    double d = std::abs(p[k] - q[k]);
    if (periodic[k]) {
      const double per = hi[k] - lo[k];
      d = std::fmod(d, per);
      d = std::min(d, per - d);
    }
    s += d * d;
  }
  return std::sqrt(s);
}

double ParamDomain::diameter() const {
  double s = 0;
  for (int k = 0; k < dim; ++k) {
    const double w = (hi[k] - lo[k]) * (periodic[k] ? 0.5 : 1.0);
    s += w * w;
  }
  return std::sqrt(s);
}

Param ParamDomain::wrap(Param p) const {
  for (int k = 0; k < dim; ++k) {
    if (!periodic[k]) continue;
    const double per = hi[k] - lo[k];
    p[k] = lo[k] + (p[k] - lo[k]) - per * std::floor((p[k] - lo[k]) / per);
  }
  return p;
}

double PairSample::min_sep() const { return max_sep * std::ldexp(1.0, -buckets); }

int PairSample::bucket_of(double s) const {
  if (!(s > 0) || max_sep <= 0) return -1;
  const int b = static_cast<int>(std::floor(std::log2(max_sep / s)));
  if (b < 0) return s <= max_sep ? 0 : -1;
  return b < buckets ? b : -1;
}

PairSample sample_scale_pairs(const ParamDomain& domain, const SampleConfig& cfg) {
  if (cfg.quota < 10) throw InvalidInput("quota must be at least 10");
  if (cfg.buckets < 3) throw InvalidInput("at least 3 buckets are required");
  PairSample out;
  out.buckets = cfg.buckets;
  out.seed = cfg.seed;
  out.max_sep = cfg.max_sep > 0 ? cfg.max_sep : domain.diameter();
  out.pairs.reserve(static_cast<std::size_t>(cfg.buckets) * cfg.quota);
  if (!(out.max_sep > 0)) throw CoverageError("bucket 0 unreachable: domain has no positive separations", 0);

  for (int b = 0; b < cfg.buckets; ++b) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(b) + 1);
    const double s_hi = out.max_sep * std::ldexp(1.0, -b);
    const double s_lo = 0.5 * s_hi;
    int got = 0;
    const long budget = std::max<long>(cfg.max_attempts, 100L * cfg.quota);
    long attempts = 0;
    while (got < cfg.quota) {
      if (attempts++ >= budget)
        throw CoverageError("sampler could not fill separation bucket " + std::to_string(b) + " [" +
                                std::to_string(s_lo) + ", " + std::to_string(s_hi) + ")",
                            b);
      Param p{0, 0};
      for (int k = 0; k < domain.dim; ++k) p[k] = rng.uniform(domain.lo[k], domain.hi[k]);
      if (!domain.inside(p)) continue;
      const double r = s_lo * std::exp2(rng.uniform());
      Param q = p;
      if (domain.dim == 1) {
        q[0] += (rng.uniform() < 0.5 ? -r : r);
      } else {
        const double a = rng.uniform(0, 2 * std::numbers::pi);
        q[0] += r * std::cos(a);
        q[1] += r * std::sin(a);
      }
      q = domain.wrap(q);
      if (!domain.inside(q)) continue;
      const double s = domain.sep(p, q);
      if (!(s >= s_lo && s < s_hi)) continue;
      PairRecord rec;
      rec.p = p;
      rec.q = q;
      rec.sep = s;
      rec.bucket = b;
      out.pairs.push_back(rec);
      ++got;
    }
  }
  return out;
}

DistortionReport summarize(const std::string& id, const PairSample& sample, std::uint64_t config_hash) {
  DistortionReport r;
  r.id = id;
  r.seed = sample.seed;
  r.config_hash = config_hash;
  r.buckets.resize(sample.buckets);
  for (int b = 0; b < sample.buckets; ++b) {
    r.buckets[b].bucket = b;
    r.buckets[b].sep_hi = sample.max_sep * std::ldexp(1.0, -b);
    r.buckets[b].sep_lo = 0.5 * r.buckets[b].sep_hi;
    r.buckets[b].min_ratio = std::numeric_limits<double>::infinity();
    r.buckets[b].max_ratio = 0;
  }
  double lo = 0, up = 0;
  for (const auto& pr : sample.pairs) {
    if (!(pr.d_source > 0) || !(pr.d_target > 0))
      throw NumericError("degenerate pair in distortion sample (zero or NaN distance)");
    const double ratio = pr.d_target / pr.d_source;
    if (ratio > lo) {
      lo = ratio;
      r.worst_expansion = pr;
    }
    if (1.0 / ratio > up) {
      up = 1.0 / ratio;
      r.worst_contraction = pr;
    }
    if (pr.bucket >= 0 && pr.bucket < sample.buckets) {
      auto& bs = r.buckets[pr.bucket];
      ++bs.count;
      bs.min_ratio = std::min(bs.min_ratio, ratio);
      bs.max_ratio = std::max(bs.max_ratio, ratio);
    }
  }
  for (auto& bs : r.buckets)
    if (bs.count == 0) bs.min_ratio = 0;
  r.sample_count = static_cast<long>(sample.pairs.size());
  r.L_lower = lo;
  r.L_upper = up;
  r.L_product = lo * up;
  r.L = std::max(lo, up);
  r.L_opt = std::sqrt(r.L_product);
  r.prescale = std::sqrt(up / lo);
  return r;
}

namespace {

void evaluate(PairRecord& pr, const DistanceFn& source, const DistanceFn& target) {
  try {
    pr.d_source = source(pr.p, pr.q);
    pr.d_target = target(pr.p, pr.q);
  } catch (const Error& e) {
    throw NumericError(std::string("map failed on pair p=(") + std::to_string(pr.p[0]) + "," +
                       std::to_string(pr.p[1]) + ") q=(" + std::to_string(pr.q[0]) + "," +
                       std::to_string(pr.q[1]) + "): " + e.what());
  }
}

}  // namespace

DistortionReport distortion_report(const std::string& id, const DistanceFn& source,
                                   const DistanceFn& target, PairSample& sample,
                                   std::uint64_t config_hash) {
  for (auto& pr : sample.pairs) evaluate(pr, source, target);
  return summarize(id, sample, config_hash);
}

void refine_worst_pairs(PairSample& sample, const ParamDomain& domain, const DistanceFn& source,
                        const DistanceFn& target, int top, int iterations) {
  if (sample.pairs.empty()) return;
  const double smin = sample.min_sep(), smax = sample.max_sep;
  std::vector<PairRecord> added;
  for (int dir = 0; dir < 2; ++dir) {
    auto score = [dir](const PairRecord& pr) {
      const double r = pr.d_target / pr.d_source;
      return dir == 0 ? r : 1.0 / r;
    };
    std::vector<std::size_t> idx(sample.pairs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(top), idx.size());
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](std::size_t a, std::size_t b) {
      const double sa = score(sample.pairs[a]), sb = score(sample.pairs[b]);
      return sa != sb ? sa > sb : a < b;
    });
    for (std::size_t j = 0; j < k; ++j) {
      PairRecord best = sample.pairs[idx[j]];
      double best_score = score(best);
      double step = 0.25 * best.sep;
      const int nv = 2 * domain.dim;
      for (int it = 0; it < iterations && step > 1e-7 * best.sep; ++it) {
        bool improved = false;
        for (int v = 0; v < nv && !improved; ++v) {
          for (int sgn = -1; sgn <= 1 && !improved; sgn += 2) {
            PairRecord cand = best;
            Param& target_param = v < domain.dim ? cand.p : cand.q;
            target_param[v % domain.dim] += sgn * step;
            cand.p = domain.wrap(cand.p);
            cand.q = domain.wrap(cand.q);
            if (!domain.inside(cand.p) || !domain.inside(cand.q)) continue;
            cand.sep = domain.sep(cand.p, cand.q);
            if (!(cand.sep >= smin && cand.sep <= smax)) continue;
            cand.bucket = sample.bucket_of(cand.sep);
            try {
              cand.d_source = source(cand.p, cand.q);
              cand.d_target = target(cand.p, cand.q);
            } catch (const Error&) {
              continue;
            }
            if (!(cand.d_source > 0) || !(cand.d_target > 0)) continue;
            const double s = score(cand);
            if (s > best_score) {
              best = cand;
              best_score = s;
              improved = true;
            }
          }
        }
        if (!improved) step *= 0.5;
      }
      if (best_score > score(sample.pairs[idx[j]])) added.push_back(best);
    }
  }
  sample.pairs.insert(sample.pairs.end(), added.begin(), added.end());
}

DistortionReport measure_distortion(const std::string& id, const ParamDomain& domain,
                                    const SampleConfig& cfg, const DistanceFn& source,
                                    const DistanceFn& target, bool refine, std::uint64_t config_hash) {
  PairSample sample = sample_scale_pairs(domain, cfg);
  for (auto& pr : sample.pairs) evaluate(pr, source, target);
  if (refine) refine_worst_pairs(sample, domain, source, target);
  return summarize(id, sample, config_hash);
}

}  // namespace heis
